//! Vertex-described rational polytopes with exact facet descriptions.
//!
//! Facets are found by scanning affinely independent vertex subsets inside
//! the affine hull, which is exact and fast enough for a dozen or so
//! vertices in dimension at most six.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::enumerate::enumerate_points;
use crate::error::{Error, Result};
use crate::linalg::{self, AffineChart};
use crate::ratpoly::{denominator_lcm, Rat};

pub type Point = Vec<Rat>;

/// Which part of a polytope a membership query or count refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Closed,
    RelativeInterior,
}

/// `⟨normal, x⟩ = offset` or `⟨normal, x⟩ ≤ offset`, primitive over the integers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub normal: Vec<BigInt>,
    pub offset: BigInt,
}

impl Constraint {
    /// Primitive integer form of `⟨normal, x⟩ (op) offset` with a rational offset.
    fn primitive(normal: Vec<BigInt>, offset: &Rat) -> Self {
        let den = offset.denom().clone();
        let mut normal: Vec<BigInt> = normal.into_iter().map(|a| a * &den).collect();
        let mut offset = offset.numer().clone();
        let g = normal.iter().fold(offset.clone(), |acc, a| acc.gcd(a));
        if !g.is_zero() && !g.is_one() {
            normal.iter_mut().for_each(|a| *a /= &g);
            offset /= &g;
        }
        Constraint { normal, offset }
    }

    fn value(&self, x: &[Rat]) -> Rat {
        linalg::dot_int_rat(&self.normal, x)
    }

    fn scaled(&self, t: &Rat) -> Self {
        Constraint::primitive(
            self.normal.clone(),
            &(Rat::from_integer(self.offset.clone()) * t),
        )
    }

    fn offset_rat(&self) -> Rat {
        Rat::from_integer(self.offset.clone())
    }
}

impl Serialize for Constraint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Constraint", 2)?;
        let normal: Vec<String> = self.normal.iter().map(|a| a.to_string()).collect();
        st.serialize_field("normal", &normal)?;
        st.serialize_field("offset", &self.offset.to_string())?;
        st.end()
    }
}

/// Half-space description relative to the affine hull.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HRep {
    pub equalities: Vec<Constraint>,
    pub inequalities: Vec<Constraint>,
}

impl HRep {
    pub fn contains(&self, x: &[Rat], region: Region) -> bool {
        self.equalities.iter().all(|c| c.value(x) == c.offset_rat())
            && self.inequalities.iter().all(|c| {
                let v = c.value(x);
                let o = c.offset_rat();
                match region {
                    Region::Closed => v <= o,
                    Region::RelativeInterior => v < o,
                }
            })
    }

    /// Extreme points of `{x : HRep}` in `R^ambient`, by solving every
    /// square subsystem that includes all equalities.
    pub fn vertices(&self, ambient: usize) -> Vec<Point> {
        let to_rows = |cs: &[&Constraint]| -> Vec<Vec<Rat>> {
            cs.iter()
                .map(|c| c.normal.iter().map(|a| Rat::from_integer(a.clone())).collect())
                .collect()
        };
        let eq_refs: Vec<&Constraint> = self.equalities.iter().collect();
        let eq_rows = to_rows(&eq_refs);
        let (_, eq_pivots) = linalg::rref(eq_rows, ambient);
        let eq_rank = eq_pivots.len();
        let need = ambient - eq_rank;
        let mut out = BTreeSet::new();
        for subset in self.inequalities.iter().combinations(need) {
            let mut cs: Vec<&Constraint> = eq_refs.clone();
            cs.extend(subset);
            let rows = to_rows(&cs);
            if linalg::rank(&rows, ambient) != ambient {
                continue;
            }
            // pick an independent square subsystem
            let mut chosen: Vec<usize> = Vec::new();
            for i in 0..rows.len() {
                let mut trial: Vec<Vec<Rat>> = chosen.iter().map(|&j| rows[j].clone()).collect();
                trial.push(rows[i].clone());
                if linalg::rank(&trial, ambient) == trial.len() {
                    chosen.push(i);
                }
            }
            let a: Vec<Vec<Rat>> = chosen.iter().map(|&j| rows[j].clone()).collect();
            let b: Vec<Rat> = chosen.iter().map(|&j| cs[j].offset_rat()).collect();
            if let Some(x) = linalg::solve(&a, &b) {
                if self.contains(&x, Region::Closed) {
                    out.insert(x);
                }
            }
        }
        out.into_iter().collect()
    }
}

/// Facet inequality in chart coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct ChartFacet {
    pub normal: Vec<BigInt>,
    pub offset: Rat,
}

/// Convex hull of finitely many rational points, kept irredundant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolytope {
    name: String,
    ambient_dim: usize,
    vertices: Vec<Point>,
    dim: usize,
    is_lattice: bool,
    chart: AffineChart,
    chart_facets: Vec<ChartFacet>,
    hrep: HRep,
}

impl RationalPolytope {
    /// Convex hull of `points`, reduced to its extreme points.
    pub fn normalize(name: impl Into<String>, points: Vec<Point>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::Empty("polytope needs at least one point"));
        };
        let ambient_dim = first.len();
        if let Some(bad) = points.iter().find(|p| p.len() != ambient_dim) {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                got: bad.len(),
            });
        }
        let unique: Vec<Point> = points
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let chart = AffineChart::from_points(&unique);
        let projected: Vec<Vec<Rat>> = unique.iter().map(|p| chart.project(p)).collect();
        let chart_facets = scan_facets(&projected, chart.dim());
        let k = chart.dim();
        let vertices: Vec<Point> = unique
            .iter()
            .zip(&projected)
            .filter(|(_, y)| {
                let tight: Vec<Vec<Rat>> = chart_facets
                    .iter()
                    .filter(|f| chart_value(&f.normal, y) == f.offset)
                    .map(|f| f.normal.iter().map(|a| Rat::from_integer(a.clone())).collect())
                    .collect();
                linalg::rank(&tight, k) == k
            })
            .map(|(p, _)| p.clone())
            .collect();
        let is_lattice = vertices.iter().flatten().all(|x| x.is_integer());
        // same subspace, canonical origin
        let chart = AffineChart::from_points(&vertices);
        let hrep = build_hrep(&chart, &chart_facets);
        Ok(RationalPolytope {
            name: name.into(),
            ambient_dim,
            dim: k,
            vertices,
            is_lattice,
            chart,
            chart_facets,
            hrep,
        })
    }

    pub fn from_integer_points(name: impl Into<String>, points: &[Vec<i64>]) -> Result<Self> {
        Self::normalize(name, points.iter().map(|p| linalg::to_rat_vec(p)).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_lattice(&self) -> bool {
        self.is_lattice
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.ambient_dim
    }

    pub fn facets(&self) -> &HRep {
        &self.hrep
    }

    /// Lattice vertices as `i64` vectors.
    pub fn integer_vertices(&self) -> Result<Vec<Vec<i64>>> {
        if !self.is_lattice {
            return Err(Error::NotLattice);
        }
        self.vertices
            .iter()
            .map(|v| v.iter().map(|x| linalg::big_to_i64(&x.to_integer())).collect())
            .collect()
    }

    /// Smallest `p > 0` with `pP` a lattice polytope.
    pub fn denominator(&self) -> BigInt {
        denominator_lcm(self.vertices.iter().flatten())
    }

    pub(crate) fn chart(&self) -> &AffineChart {
        &self.chart
    }

    pub(crate) fn chart_facets(&self) -> &[ChartFacet] {
        &self.chart_facets
    }

    pub fn contains(&self, x: &[Rat], region: Region) -> bool {
        x.len() == self.ambient_dim && self.hrep.contains(x, region)
    }

    pub fn dilate(&self, t: &Rat) -> Result<Self> {
        if !t.is_positive() {
            return Err(Error::NonPositiveDilation(t.to_string()));
        }
        let vertices: Vec<Point> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| x * t).collect())
            .collect();
        let is_lattice = vertices.iter().flatten().all(|x| x.is_integer());
        let chart = self.chart.scaled(t);
        let chart_facets: Vec<ChartFacet> = self
            .chart_facets
            .iter()
            .map(|f| ChartFacet {
                normal: f.normal.clone(),
                offset: &f.offset * t,
            })
            .collect();
        let hrep = HRep {
            equalities: self.hrep.equalities.iter().map(|c| c.scaled(t)).collect(),
            inequalities: self.hrep.inequalities.iter().map(|c| c.scaled(t)).collect(),
        };
        Ok(RationalPolytope {
            name: format!("{}*{}", t, self.name),
            ambient_dim: self.ambient_dim,
            vertices,
            dim: self.dim,
            is_lattice,
            chart,
            chart_facets,
            hrep,
        })
    }

    pub fn dilate_int(&self, n: i64) -> Result<Self> {
        self.dilate(&Rat::from_integer(BigInt::from(n)))
    }

    pub fn translate(&self, shift: &[Rat]) -> Result<Self> {
        if shift.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: shift.len(),
            });
        }
        let pts = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(shift).map(|(a, b)| a + b).collect())
            .collect();
        RationalPolytope::normalize(self.name.clone(), pts)
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &RationalPolytope) -> bool {
        self.ambient_dim == other.ambient_dim
            && self
                .vertices
                .iter()
                .all(|v| other.contains(v, Region::Closed))
    }

    /// Reflexivity up to lattice translation, for full-dimensional lattice polytopes.
    pub fn reflexive_check(&self) -> Result<ReflexiveCheck> {
        if !self.is_lattice {
            return Err(Error::NotLattice);
        }
        if !self.is_full_dimensional() {
            return Err(Error::Unsupported(format!(
                "reflexivity test needs a full-dimensional polytope, got dim {} in R^{}",
                self.dim, self.ambient_dim
            )));
        }
        let interior = enumerate_points(self, Region::RelativeInterior)?;
        let [z] = interior.as_slice() else {
            return Ok(ReflexiveCheck {
                is_reflexive: false,
                witness_translate: None,
                interior_points: interior.len(),
            });
        };
        let zr = linalg::to_rat_vec(z);
        let ok = self.hrep.inequalities.iter().all(|c| {
            let g = c.normal.iter().fold(BigInt::zero(), |acc, a| acc.gcd(a));
            let shifted = c.offset_rat() - c.value(&zr);
            shifted == Rat::from_integer(g)
        });
        Ok(ReflexiveCheck {
            is_reflexive: ok,
            witness_translate: ok.then(|| z.iter().map(|x| -x).collect()),
            interior_points: 1,
        })
    }
}

/// `inner ⊆ outer`.
pub fn contains_polytope(inner: &RationalPolytope, outer: &RationalPolytope) -> bool {
    inner.is_subset_of(outer)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReflexiveCheck {
    pub is_reflexive: bool,
    pub witness_translate: Option<Vec<i64>>,
    pub interior_points: usize,
}

fn chart_value(normal: &[BigInt], y: &[Rat]) -> Rat {
    linalg::dot_int_rat(normal, y)
}

/// Facets of the full-dimensional hull of `points` in `R^k`.
fn scan_facets(points: &[Vec<Rat>], k: usize) -> Vec<ChartFacet> {
    if k == 0 {
        return Vec::new();
    }
    let mut found = BTreeSet::new();
    for subset in (0..points.len()).combinations(k) {
        let base = &points[subset[0]];
        let diffs: Vec<Vec<Rat>> = subset[1..]
            .iter()
            .map(|&i| linalg::sub(&points[i], base))
            .collect();
        let ns = linalg::nullspace(&diffs, k);
        if ns.len() != 1 {
            continue;
        }
        let mut normal = linalg::primitive_integer(&ns[0]);
        let mut offset = chart_value(&normal, base);
        let mut sign = Ordering::Equal;
        let mut mixed = false;
        for p in points {
            let s = chart_value(&normal, p).cmp(&offset);
            if s == Ordering::Equal {
                continue;
            }
            if sign == Ordering::Equal {
                sign = s;
            } else if sign != s {
                mixed = true;
                break;
            }
        }
        if mixed || sign == Ordering::Equal {
            continue;
        }
        if sign == Ordering::Greater {
            normal.iter_mut().for_each(|a| *a = -a.clone());
            offset = -offset;
        }
        found.insert(ChartFacet { normal, offset });
    }
    found.into_iter().collect()
}

fn build_hrep(chart: &AffineChart, facets: &[ChartFacet]) -> HRep {
    let n = chart.ambient();
    let mut equalities: Vec<Constraint> = linalg::nullspace(&chart.basis, n)
        .iter()
        .map(|v| {
            let normal = linalg::primitive_integer(v);
            let offset = linalg::dot_int_rat(&normal, &chart.origin);
            let mut c = Constraint::primitive(normal, &offset);
            if c.normal.iter().find(|a| !a.is_zero()).is_some_and(|a| a.is_negative()) {
                c.normal.iter_mut().for_each(|a| *a = -a.clone());
                c.offset = -c.offset;
            }
            c
        })
        .collect();
    equalities.sort();
    let mut inequalities: Vec<Constraint> = facets
        .iter()
        .map(|f| {
            let mut normal = vec![BigInt::zero(); n];
            for (i, &c) in chart.cols.iter().enumerate() {
                normal[c] = f.normal[i].clone();
            }
            Constraint::primitive(normal, &f.offset)
        })
        .collect();
    inequalities.sort();
    HRep {
        equalities,
        inequalities,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{rat, ratio};

    fn poly(pts: &[&[i64]]) -> RationalPolytope {
        RationalPolytope::from_integer_points(
            "t",
            &pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    fn pt(v: &[i64]) -> Point {
        linalg::to_rat_vec(v)
    }

    fn c(normal: &[i64], offset: i64) -> Constraint {
        Constraint {
            normal: normal.iter().map(|&a| BigInt::from(a)).collect(),
            offset: BigInt::from(offset),
        }
    }

    #[test]
    fn normalize_drops_non_extreme_points() {
        let p = RationalPolytope::normalize(
            "t",
            vec![
                pt(&[0, 0]),
                pt(&[1, 0]),
                pt(&[0, 1]),
                vec![ratio(1, 2), ratio(1, 2)],
            ],
        )
        .unwrap();
        assert_eq!(p.vertices(), &[pt(&[0, 0]), pt(&[0, 1]), pt(&[1, 0])]);
        let seg = poly(&[&[0, 0], &[1, 0], &[2, 0]]);
        assert_eq!(seg.vertices(), &[pt(&[0, 0]), pt(&[2, 0])]);
        assert_eq!(seg.dim(), 1);
        assert!(RationalPolytope::normalize("e", vec![]).is_err());
    }

    #[test]
    fn birkhoff_three_vertices() {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let pts: Vec<Vec<i64>> = perms
            .iter()
            .map(|s| {
                let mut m = vec![0; 9];
                for (i, &j) in s.iter().enumerate() {
                    m[3 * i + j] = 1;
                }
                m
            })
            .collect();
        let b = RationalPolytope::from_integer_points("B3", &pts).unwrap();
        assert_eq!(b.vertices().len(), 6);
        assert_eq!(b.dim(), 4);
        assert_eq!(b.facets().inequalities.len(), 9);
    }

    #[test]
    fn facets_of_square_triangle_segment() {
        let sq = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let h = sq.facets();
        assert!(h.equalities.is_empty());
        let expected: BTreeSet<Constraint> =
            [c(&[-1, 0], 0), c(&[0, -1], 0), c(&[1, 0], 1), c(&[0, 1], 1)]
                .into_iter()
                .collect();
        assert_eq!(h.inequalities.iter().cloned().collect::<BTreeSet<_>>(), expected);

        let tri = poly(&[&[0, 0], &[1, 0], &[0, 1]]);
        assert_eq!(tri.facets().inequalities.len(), 3);

        let seg = poly(&[&[0, 0], &[1, 0]]);
        assert_eq!(seg.facets().equalities, vec![c(&[0, 1], 0)]);
        assert_eq!(seg.facets().inequalities.len(), 2);
    }

    #[test]
    fn membership() {
        let sq = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let half = vec![ratio(1, 2), ratio(1, 2)];
        assert!(sq.contains(&half, Region::RelativeInterior));
        let edge = vec![rat(0), ratio(1, 2)];
        assert!(!sq.contains(&edge, Region::RelativeInterior));
        assert!(sq.contains(&edge, Region::Closed));
        let seg = poly(&[&[0, 0], &[1, 0]]);
        assert!(seg.contains(&[ratio(1, 2), rat(0)], Region::RelativeInterior));
        assert!(!seg.contains(&[ratio(1, 2), ratio(1, 2)], Region::Closed));
    }

    #[test]
    fn dilation() {
        let sq = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let big = sq.dilate(&rat(2)).unwrap();
        let expected = poly(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2]]);
        assert_eq!(big.vertices(), expected.vertices());
        assert_eq!(big.facets(), expected.facets());

        let half = RationalPolytope::normalize("h", vec![vec![rat(0)], vec![ratio(1, 2)]]).unwrap();
        assert!(!half.is_lattice());
        let unit = half.dilate(&rat(2)).unwrap();
        assert!(unit.is_lattice());
        assert_eq!(unit.vertices(), &[pt(&[0]), pt(&[1])]);

        assert_eq!(sq.dilate(&rat(1)).unwrap().vertices(), sq.vertices());
        assert!(sq.dilate(&rat(0)).is_err());
        assert!(sq.dilate(&rat(-1)).is_err());
    }

    #[test]
    fn polytope_containment() {
        let small = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let big = poly(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2]]);
        assert!(contains_polytope(&small, &big));
        assert!(!contains_polytope(&big, &small));
        assert!(contains_polytope(&small, &small));
    }

    #[test]
    fn reflexivity() {
        let centered = poly(&[&[-1, -1], &[1, -1], &[-1, 1], &[1, 1]]);
        let r = centered.reflexive_check().unwrap();
        assert!(r.is_reflexive);
        assert_eq!(r.witness_translate, Some(vec![0, 0]));

        let shifted = poly(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2]]);
        let r = shifted.reflexive_check().unwrap();
        assert!(r.is_reflexive);
        assert_eq!(r.witness_translate, Some(vec![-1, -1]));

        let unit = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert!(!unit.reflexive_check().unwrap().is_reflexive);

        let seg = poly(&[&[0, 0], &[2, 0]]);
        assert!(matches!(seg.reflexive_check(), Err(Error::Unsupported(_))));
        let half = RationalPolytope::normalize("h", vec![vec![rat(0)], vec![ratio(1, 2)]]).unwrap();
        assert_eq!(half.reflexive_check(), Err(Error::NotLattice));
    }

    #[test]
    fn hrep_round_trip_on_lower_dim() {
        let seg = poly(&[&[0, 0, 1], &[2, 2, 1]]);
        assert_eq!(seg.facets().vertices(3), seg.vertices().to_vec());
        let cube = poly(&[
            &[0, 0, 0],
            &[1, 0, 0],
            &[0, 1, 0],
            &[0, 0, 1],
            &[1, 1, 0],
            &[1, 0, 1],
            &[0, 1, 1],
            &[1, 1, 1],
        ]);
        assert_eq!(cube.facets().vertices(3), cube.vertices().to_vec());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn point_set() -> impl Strategy<Value = Vec<Vec<i64>>> {
            (1usize..=3).prop_flat_map(|d| {
                proptest::collection::vec(proptest::collection::vec(-2i64..=2, d), 1..7)
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn vertex_and_facet_invariants(pts in point_set(), a in 1i64..4, b in 1i64..4) {
                let p = RationalPolytope::from_integer_points("r", &pts).unwrap();
                prop_assert_eq!(p.facets().vertices(p.ambient_dim()), p.vertices().to_vec());
                for v in p.vertices() {
                    prop_assert!(p.contains(v, Region::Closed));
                    if p.dim() >= 1 {
                        prop_assert!(!p.contains(v, Region::RelativeInterior));
                    }
                }
                for q in &pts {
                    prop_assert!(p.contains(&linalg::to_rat_vec(q), Region::Closed));
                }
                let two = p.dilate(&rat(a)).unwrap().dilate(&rat(b)).unwrap();
                let one = p.dilate(&rat(a * b)).unwrap();
                prop_assert_eq!(two.vertices(), one.vertices());
                prop_assert_eq!(two.facets(), one.facets());
                let again = RationalPolytope::normalize("s", p.vertices().to_vec()).unwrap();
                prop_assert!(contains_polytope(&p, &again) && contains_polytope(&again, &p));
                prop_assert_eq!(again.vertices(), p.vertices());
            }
        }
    }
}
