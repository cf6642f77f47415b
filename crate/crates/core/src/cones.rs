//! Rational cones, their integer-point generating functions, and Stanley
//! reciprocity.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::enumerate::ehrhart;
use crate::error::{Error, Result};
use crate::linalg::{self, AffineChart};
use crate::polytope::{RationalPolytope, Region};
use crate::ratpoly::{rat, Rat};
use crate::report::{Relation, Report};
use crate::triangulate::place;

/// Seed of the perturbation that picks the reference point in [`decompose`].
const REFERENCE_SEED: u64 = 0x5eed_c0de;

/// Pointed cone spanned by primitive, pairwise non-proportional integer rays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalCone {
    ambient_dim: usize,
    generators: Vec<Vec<i64>>,
}

/// JSON form of a cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeFile {
    pub ambient_dim: usize,
    pub generators: Vec<Vec<i64>>,
}

fn primitive_i64(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g <= 1 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

fn big_vec_to_i64(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(linalg::big_to_i64).collect()
}

fn to_rat(v: &[i64]) -> Vec<Rat> {
    linalg::to_rat_vec(v)
}

impl RationalCone {
    /// Normalizes generators to primitive form and drops repeated rays.
    /// Zero vectors and non-pointed inputs are rejected.
    pub fn new(ambient_dim: usize, generators: Vec<Vec<i64>>) -> Result<Self> {
        let mut gens: Vec<Vec<i64>> = Vec::new();
        for g in generators {
            if g.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: g.len(),
                });
            }
            if g.iter().all(|&x| x == 0) {
                return Err(Error::Precondition("zero generator".into()));
            }
            let g = primitive_i64(&g);
            if !gens.contains(&g) {
                gens.push(g);
            }
        }
        let cone = RationalCone {
            ambient_dim,
            generators: gens,
        };
        if !cone.is_pointed() {
            return Err(Error::NotPointed);
        }
        Ok(cone)
    }

    pub fn from_file(f: &ConeFile) -> Result<Self> {
        Self::new(f.ambient_dim, f.generators.clone())
    }

    pub fn to_file(&self) -> ConeFile {
        ConeFile {
            ambient_dim: self.ambient_dim,
            generators: self.generators.clone(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        let rows: Vec<Vec<Rat>> = self.generators.iter().map(|g| to_rat(g)).collect();
        linalg::rank(&rows, self.ambient_dim)
    }

    /// `0 ∉ conv(generators)`.
    pub fn is_pointed(&self) -> bool {
        if self.generators.is_empty() {
            return true;
        }
        let pts: Vec<Vec<Rat>> = self.generators.iter().map(|g| to_rat(g)).collect();
        match RationalPolytope::normalize("generators", pts) {
            Ok(p) => !p.contains(&vec![Rat::zero(); self.ambient_dim], Region::Closed),
            Err(_) => false,
        }
    }

    /// `conv(0 ∪ generators)`: its facets through the origin are the cone's facets.
    fn apex_polytope(&self) -> Result<RationalPolytope> {
        let mut pts = vec![vec![Rat::zero(); self.ambient_dim]];
        pts.extend(self.generators.iter().map(|g| to_rat(g)));
        RationalPolytope::normalize("apex", pts)
    }

    /// `(equalities, inequalities)` with `K = {x : E x = 0, A x ≤ 0}`.
    pub fn to_inequalities(&self) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
        let h = self.apex_polytope()?.facets().clone();
        let eqs = h
            .equalities
            .iter()
            .map(|c| big_vec_to_i64(&c.normal))
            .collect::<Result<Vec<_>>>()?;
        let ineqs = h
            .inequalities
            .iter()
            .filter(|c| c.offset.is_zero())
            .map(|c| big_vec_to_i64(&c.normal))
            .collect::<Result<Vec<_>>>()?;
        Ok((eqs, ineqs))
    }

    /// Ray enumeration for `{x : A x ≤ 0}`.
    pub fn from_inequalities(ambient_dim: usize, rows: &[Vec<i64>]) -> Result<Self> {
        for r in rows {
            if r.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: r.len(),
                });
            }
        }
        if ambient_dim == 0 {
            return Self::new(0, Vec::new());
        }
        let a: Vec<Vec<Rat>> = rows.iter().map(|r| to_rat(r)).collect();
        if !linalg::nullspace(&a, ambient_dim).is_empty() {
            return Err(Error::NotPointed);
        }
        let mut rays = Vec::new();
        let satisfies = |x: &[Rat]| a.iter().all(|r| !linalg::dot(r, x).is_positive());
        for subset in itertools::Itertools::combinations(0..rows.len(), ambient_dim - 1) {
            let sub: Vec<Vec<Rat>> = subset.iter().map(|&i| a[i].clone()).collect();
            let ns = linalg::nullspace(&sub, ambient_dim);
            if ns.len() != 1 {
                continue;
            }
            let r = &ns[0];
            let neg: Vec<Rat> = r.iter().map(|x| -x).collect();
            for cand in [r.clone(), neg] {
                if satisfies(&cand) {
                    rays.push(big_vec_to_i64(&linalg::primitive_integer(&cand))?);
                }
            }
        }
        rays.sort();
        rays.dedup();
        Self::new(ambient_dim, rays)
    }

    pub fn contains(&self, x: &[i64]) -> Result<bool> {
        let (eqs, ineqs) = self.to_inequalities()?;
        let dot = |r: &Vec<i64>| -> i128 { r.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum() };
        Ok(eqs.iter().all(|r| dot(r) == 0) && ineqs.iter().all(|r| dot(r) <= 0))
    }

    /// Integer functional positive on every generator.
    pub fn positive_functional(&self) -> Result<Vec<BigInt>> {
        let mut c = vec![BigInt::zero(); self.ambient_dim];
        if self.generators.is_empty() {
            return Ok(c);
        }
        let h = self.apex_polytope()?;
        for f in h.facets().inequalities.iter().filter(|f| f.offset.is_zero()) {
            for (ci, a) in c.iter_mut().zip(&f.normal) {
                *ci -= a;
            }
        }
        debug_assert!(self.generators.iter().all(|g| {
            c.iter().zip(g).map(|(a, &b)| a * b).sum::<BigInt>().is_positive()
        }));
        Ok(c)
    }
}

/// `cone(P)`: rays through the vertices of `P` lifted to height one.
pub fn homogenize(p: &RationalPolytope) -> RationalCone {
    let gens: Vec<Vec<i64>> = p
        .vertices()
        .iter()
        .map(|v| {
            let mut w = v.clone();
            w.push(Rat::one());
            big_vec_to_i64(&linalg::primitive_integer(&w)).expect("generator fits in i64")
        })
        .collect();
    RationalCone::new(p.ambient_dim() + 1, gens).expect("lifted vertices span a pointed cone")
}

/// Which parameter box the parallelepiped points are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParallelepipedMode {
    /// `[0,1)` on closed facets, `(0,1]` on open ones.
    HalfOpen,
    /// `(0,1)` everywhere.
    Open,
    /// The flipped flags: `(0,1]` on closed facets, `[0,1)` on open ones.
    ClosedOpenDual,
}

/// Simplicial cone with some facets removed; `open[i]` drops the facet
/// that omits generator `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HalfOpenSimplicialCone {
    generators: Vec<Vec<i64>>,
    open: Vec<bool>,
}

impl HalfOpenSimplicialCone {
    pub fn new(generators: Vec<Vec<i64>>, open: Vec<bool>) -> Result<Self> {
        if generators.len() != open.len() {
            return Err(Error::Precondition("one flag per generator".into()));
        }
        if let Some(first) = generators.first() {
            let n = first.len();
            if generators.iter().any(|g| g.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: generators.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n),
                });
            }
            let rows: Vec<Vec<Rat>> = generators.iter().map(|g| to_rat(g)).collect();
            if linalg::rank(&rows, n) != generators.len() {
                return Err(Error::DependentGenerators);
            }
        }
        Ok(HalfOpenSimplicialCone { generators, open })
    }

    pub fn closed(generators: Vec<Vec<i64>>) -> Result<Self> {
        let k = generators.len();
        Self::new(generators, vec![false; k])
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn open_flags(&self) -> &[bool] {
        &self.open
    }

    fn ambient(&self) -> usize {
        self.generators.first().map_or(0, Vec::len)
    }

    /// Coefficients of `x` in the generators, if `x` lies in their span.
    pub fn coordinates(&self, x: &[Rat]) -> Option<Vec<Rat>> {
        let rows: Vec<Vec<Rat>> = self.generators.iter().map(|g| to_rat(g)).collect();
        let chart = AffineChart::linear_span(&rows, x.len());
        let m: Vec<Vec<Rat>> = chart
            .cols
            .iter()
            .map(|&j| rows.iter().map(|g| g[j].clone()).collect())
            .collect();
        let rhs: Vec<Rat> = chart.cols.iter().map(|&j| x[j].clone()).collect();
        let lambda = if rows.is_empty() {
            Vec::new()
        } else {
            linalg::solve(&m, &rhs)?
        };
        let mut back = vec![Rat::zero(); x.len()];
        for (l, g) in lambda.iter().zip(&rows) {
            for (b, gi) in back.iter_mut().zip(g) {
                *b += l * gi;
            }
        }
        (back == x).then_some(lambda)
    }

    /// Membership of an integer point, honouring open facets (or the
    /// flipped flags when `dual`).
    pub fn contains(&self, x: &[i64], dual: bool) -> bool {
        let Some(lambda) = self.coordinates(&to_rat(x)) else {
            return false;
        };
        lambda.iter().zip(&self.open).all(|(l, &open)| {
            if open != dual {
                l.is_positive()
            } else {
                !l.is_negative()
            }
        })
    }

    /// Lattice points of the parallelepiped, with their last coordinate.
    pub fn parallelepiped_points(&self, mode: ParallelepipedMode) -> Result<Vec<(Vec<i64>, i64)>> {
        let n = self.ambient();
        let k = self.generators.len();
        if k == 0 {
            return Ok(vec![(Vec::new(), 0)]);
        }
        let rows: Vec<Vec<Rat>> = self.generators.iter().map(|g| to_rat(g)).collect();
        let chart = AffineChart::linear_span(&rows, n);
        let cols = chart.cols.clone();
        // y = λ G_J with G_J[i][j] = g_i[cols[j]]
        let gj: Vec<Vec<Rat>> = rows
            .iter()
            .map(|g| cols.iter().map(|&j| g[j].clone()).collect())
            .collect();
        let det = linalg::det(&gj);
        let inv = linalg::inverse(&gj).ok_or(Error::DependentGenerators)?;
        let det_abs = det.abs();
        let d = linalg::big_to_i128(det_abs.numer())?;
        // adj[j][i] = |det| * inv[j][i], integral
        let adj: Vec<Vec<i128>> = inv
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| linalg::big_to_i128(&(x * &det_abs).to_integer()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let lo: Vec<i64> = cols
            .iter()
            .map(|&j| self.generators.iter().map(|g| g[j].min(0)).sum())
            .collect();
        let hi: Vec<i64> = cols
            .iter()
            .map(|&j| self.generators.iter().map(|g| g[j].max(0)).sum())
            .collect();
        let lower_open: Vec<bool> = self
            .open
            .iter()
            .map(|&o| match mode {
                ParallelepipedMode::HalfOpen => o,
                ParallelepipedMode::Open => true,
                ParallelepipedMode::ClosedOpenDual => !o,
            })
            .collect();
        let upper_closed: Vec<bool> = self
            .open
            .iter()
            .map(|&o| match mode {
                ParallelepipedMode::HalfOpen => o,
                ParallelepipedMode::Open => false,
                ParallelepipedMode::ClosedOpenDual => !o,
            })
            .collect();
        let mut out = Vec::new();
        linalg::for_each_in_box(&lo, &hi, |y| {
            let mut t = vec![0i128; k];
            for (i, ti) in t.iter_mut().enumerate() {
                *ti = y.iter().zip(&adj).map(|(&yj, a)| yj as i128 * a[i]).sum();
                let ok_lo = if lower_open[i] { *ti > 0 } else { *ti >= 0 };
                let ok_hi = if upper_closed[i] { *ti <= d } else { *ti < d };
                if !(ok_lo && ok_hi) {
                    return;
                }
            }
            let mut m = Vec::with_capacity(n);
            for c in 0..n {
                let s: i128 = t
                    .iter()
                    .zip(&self.generators)
                    .map(|(&ti, g)| ti * g[c] as i128)
                    .sum();
                if s % d != 0 {
                    return;
                }
                m.push((s / d) as i64);
            }
            let h = *m.last().expect("nonempty");
            out.push((m, h));
        });
        out.sort();
        Ok(out)
    }
}

/// Splits a pointed cone into half-open simplicial cones that partition its
/// lattice points.
pub fn decompose(k: &RationalCone) -> Result<Vec<HalfOpenSimplicialCone>> {
    if !k.is_pointed() {
        return Err(Error::NotPointed);
    }
    if k.generators.is_empty() {
        return Ok(vec![HalfOpenSimplicialCone::closed(Vec::new())?]);
    }
    let c = k.positive_functional()?;
    let sliced: Vec<Vec<Rat>> = k
        .generators
        .iter()
        .map(|g| {
            let h = Rat::from_integer(c.iter().zip(g).map(|(a, &b)| a * b).sum::<BigInt>());
            g.iter().map(|&x| rat(x) / &h).collect()
        })
        .collect();
    let (cells, _) = place(&sliced);
    let simplices: Vec<HalfOpenSimplicialCone> = cells
        .iter()
        .map(|cell| HalfOpenSimplicialCone::closed(cell.iter().map(|&i| k.generators[i].clone()).collect()))
        .collect::<Result<_>>()?;
    if simplices.len() == 1 {
        return Ok(simplices);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(REFERENCE_SEED);
    for _ in 0..256 {
        let mut w = vec![Rat::zero(); k.ambient_dim];
        for g in &simplices[0].generators {
            let mu = Rat::one() + Rat::new(BigInt::from(rng.gen_range(1..1000)), BigInt::from(1000));
            for (wi, &gi) in w.iter_mut().zip(g) {
                *wi += &mu * rat(gi);
            }
        }
        let coords: Vec<Vec<Rat>> = simplices
            .iter()
            .map(|s| s.coordinates(&w).ok_or(Error::DependentGenerators))
            .collect::<Result<_>>()?;
        if coords.iter().flatten().any(Zero::is_zero) {
            continue;
        }
        return simplices
            .into_iter()
            .zip(coords)
            .map(|(s, l)| HalfOpenSimplicialCone::new(s.generators, l.iter().map(Signed::is_negative).collect()))
            .collect();
    }
    Err(Error::Precondition("no generic reference point found".into()))
}

/// Which lattice points a generating function counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeRegion {
    Closed,
    Interior,
}

/// `Σ_m z^m / Π (1 - z^g)` for one simplicial piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GfPiece {
    pub numerator_points: Vec<Vec<i64>>,
    pub denominator_gens: Vec<Vec<i64>>,
}

/// Integer-point generating function as a sum over simplicial pieces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeGF {
    pub pieces: Vec<GfPiece>,
}

fn monomial(z: &[Rat], m: &[i64]) -> Result<Rat> {
    let mut v = Rat::one();
    for (zi, &e) in z.iter().zip(m) {
        if e == 0 {
            continue;
        }
        if zi.is_zero() && e < 0 {
            return Err(Error::Precondition("zero coordinate raised to a negative power".into()));
        }
        let p = num_traits::pow(zi.clone(), e.unsigned_abs() as usize);
        v *= if e < 0 { p.recip() } else { p };
    }
    Ok(v)
}

impl ConeGF {
    pub fn eval(&self, z: &[Rat]) -> Result<Rat> {
        let mut total = Rat::zero();
        for piece in &self.pieces {
            let mut num = Rat::zero();
            for m in &piece.numerator_points {
                num += monomial(z, m)?;
            }
            let mut den = Rat::one();
            for g in &piece.denominator_gens {
                let f = Rat::one() - monomial(z, g)?;
                if f.is_zero() {
                    return Err(Error::Pole(g.clone()));
                }
                den *= f;
            }
            total += num / den;
        }
        Ok(total)
    }

    /// Power series in the last coordinate, up to `x^max_height`; every
    /// denominator generator must have positive last coordinate.
    pub fn height_series(&self, max_height: usize) -> Result<Vec<BigInt>> {
        let mut series = vec![BigInt::zero(); max_height + 1];
        for piece in &self.pieces {
            let mut s = vec![BigInt::zero(); max_height + 1];
            for m in &piece.numerator_points {
                let h = *m.last().unwrap_or(&0);
                if h < 0 {
                    return Err(Error::Precondition("negative height".into()));
                }
                if (h as usize) <= max_height {
                    s[h as usize] += 1;
                }
            }
            for g in &piece.denominator_gens {
                let h = *g.last().unwrap_or(&0);
                if h <= 0 {
                    return Err(Error::Pole(g.clone()));
                }
                // multiply by 1/(1 - x^h)
                for i in h as usize..=max_height {
                    let prev = s[i - h as usize].clone();
                    s[i] += prev;
                }
            }
            for (a, b) in series.iter_mut().zip(s) {
                *a += b;
            }
        }
        Ok(series)
    }
}

pub fn generating_function(k: &RationalCone, region: ConeRegion) -> Result<ConeGF> {
    let mode = match region {
        ConeRegion::Closed => ParallelepipedMode::HalfOpen,
        ConeRegion::Interior => ParallelepipedMode::ClosedOpenDual,
    };
    let pieces = decompose(k)?
        .into_iter()
        .map(|piece| {
            Ok(GfPiece {
                numerator_points: piece.parallelepiped_points(mode)?.into_iter().map(|(m, _)| m).collect(),
                denominator_gens: piece.generators,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ConeGF { pieces })
}

/// Exact value of `σ_K(z)` or `σ_{K°}(z)`.
pub fn sigma_eval(k: &RationalCone, z: &[Rat], region: ConeRegion) -> Result<Rat> {
    if z.len() != k.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: k.ambient_dim,
            got: z.len(),
        });
    }
    generating_function(k, region)?.eval(z)
}

/// `σ_K(1/z) = (-1)^{dim K} σ_{K°}(z)` at seeded random rational points.
pub fn stanley_reciprocity_check(k: &RationalCone, trials: usize, seed: u64) -> Result<Report> {
    let closed = generating_function(k, ConeRegion::Closed)?;
    let interior = generating_function(k, ConeRegion::Interior)?;
    let sign = if k.dim().is_multiple_of(2) { Rat::one() } else { -Rat::one() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new("stanley-reciprocity", format!("{:?}", k.generators));
    let mut done = 0;
    let mut attempts = 0;
    while done < trials {
        attempts += 1;
        if attempts > trials * 1000 + 1000 {
            report.fail("could not sample pole-free points");
            break;
        }
        let z: Vec<Rat> = (0..k.ambient_dim)
            .map(|_| {
                let num = rng.gen_range(1..=50i64) * if rng.gen_bool(0.5) { -1 } else { 1 };
                Rat::new(BigInt::from(num), BigInt::from(rng.gen_range(1..=50i64)))
            })
            .collect();
        let pole = closed
            .pieces
            .iter()
            .flat_map(|p| &p.denominator_gens)
            .any(|g| monomial(&z, g).map_or(true, |v| v.is_one()));
        if pole {
            continue;
        }
        let inv: Vec<Rat> = z.iter().map(|x| x.recip()).collect();
        let lhs = closed.eval(&inv)?;
        let rhs = &sign * interior.eval(&z)?;
        let zs: Vec<String> = z.iter().map(|x| x.to_string()).collect();
        report.check(json!({"trial": done, "z": zs}), lhs, Relation::Eq, rhs);
        done += 1;
    }
    Ok(report)
}

/// `σ_{cone(P)}(1,…,1,x0) = h*(x0) / (1 - x0^p)^{d+1}`, plus agreement of the
/// height series with the lattice-point counts up to `truncation`.
pub fn specialization_check(p: &RationalPolytope, x0: &Rat, truncation: usize) -> Result<Report> {
    let cone = homogenize(p);
    let gf = generating_function(&cone, ConeRegion::Closed)?;
    let mut z = vec![Rat::one(); cone.ambient_dim];
    *z.last_mut().expect("lifted") = x0.clone();
    let lhs = gf.eval(&z)?;
    let e = ehrhart(p)?;
    let den = Rat::one() - num_traits::pow(x0.clone(), e.period);
    if den.is_zero() {
        return Err(Error::Pole(vec![0; cone.ambient_dim]));
    }
    let rhs = e.hstar.poly().eval(x0) / num_traits::pow(den, e.dim + 1);
    let mut report = Report::new("ehrhart-series-specialization", p.name());
    report.check(json!({"x0": x0.to_string()}), lhs, Relation::Eq, rhs);
    for (n, c) in gf.height_series(truncation)?.into_iter().enumerate() {
        report.check(json!({"n": n}), Rat::from_integer(c), Relation::Eq, e.evaluate(n as i64));
    }
    Ok(report)
}

impl HalfOpenSimplicialCone {
    /// Absolute determinant of the generators inside their span.
    pub fn index(&self) -> BigInt {
        linalg::lattice_index(&self.generators)
    }
}

/// Lattice points of a piece up to a bound on a positive functional; used
/// by tests and the corpus checks.
pub fn piece_points_below(
    piece: &HalfOpenSimplicialCone,
    functional: &[BigInt],
    bound: i64,
) -> Result<Vec<Vec<i64>>> {
    let f = |v: &[i64]| -> i64 {
        functional
            .iter()
            .zip(v)
            .map(|(a, &b)| a * b)
            .sum::<BigInt>()
            .to_i64()
            .unwrap_or(i64::MAX)
    };
    let heights: Vec<i64> = piece.generators.iter().map(|g| f(g)).collect();
    if heights.iter().any(|&h| h <= 0) {
        return Err(Error::Precondition("functional must be positive on generators".into()));
    }
    let mut out = Vec::new();
    for (m, _) in piece.parallelepiped_points(ParallelepipedMode::HalfOpen)? {
        let mut stack = vec![(m.clone(), f(&m), 0usize)];
        while let Some((x, h, from)) = stack.pop() {
            if h > bound {
                continue;
            }
            out.push(x.clone());
            for i in from..piece.generators.len() {
                let y: Vec<i64> = x.iter().zip(&piece.generators[i]).map(|(a, b)| a + b).collect();
                stack.push((y, h + heights[i], i));
            }
        }
    }
    Ok(out)
}

/// The half-open pieces partition the lattice points of `K` up to
/// `⟨c, x⟩ <= height`, where `c` is the positive functional: the points
/// generated piece by piece must match a box scan filtered by the facet
/// description, with no repeats. The flipped flags must likewise cover the
/// relative interior exactly once on the same window.
pub fn partition_check(k: &RationalCone, height: i64) -> Result<Report> {
    let pieces = decompose(k)?;
    let c = k.positive_functional()?;
    let (eqs, ineqs) = k.to_inequalities()?;
    let n = k.ambient_dim;
    let mut generated: Vec<Vec<i64>> = Vec::new();
    for p in &pieces {
        generated.extend(piece_points_below(p, &c, height)?);
    }
    generated.sort();
    let bound: Vec<i64> = (0..n)
        .map(|j| height * k.generators.iter().map(|g| g[j].abs()).max().unwrap_or(0))
        .collect();
    let lo: Vec<i64> = bound.iter().map(|b| -b).collect();
    let mut brute: Vec<Vec<i64>> = Vec::new();
    let mut interior_misses = 0usize;
    let dot = |r: &[i64], x: &[i64]| -> i128 { r.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum() };
    let cx = |x: &[i64]| -> BigInt { c.iter().zip(x).map(|(a, &b)| a * b).sum() };
    linalg::for_each_in_box(&lo, &bound, |x| {
        if cx(x) > BigInt::from(height) || !eqs.iter().all(|r| dot(r, x) == 0) {
            return;
        }
        let closed = ineqs.iter().all(|r| dot(r, x) <= 0);
        if closed {
            brute.push(x.to_vec());
        }
        let open = ineqs.iter().all(|r| dot(r, x) < 0);
        let hits = pieces.iter().filter(|p| p.contains(x, true)).count();
        if hits != usize::from(open) {
            interior_misses += 1;
        }
    });
    brute.sort();
    let mut report = Report::new("half-open-partition", format!("{:?}", k.generators));
    let distinct = {
        let mut d = generated.clone();
        d.dedup();
        d.len()
    };
    report.check(json!("closed_points"), rat(generated.len() as i64), Relation::Eq, rat(brute.len() as i64));
    report.check(json!("closed_repeats"), rat((generated.len() - distinct) as i64), Relation::Eq, Rat::zero());
    if generated != brute {
        report.fail("generated points differ from the box scan");
    }
    report.check(json!("interior_misses"), rat(interior_misses as i64), Relation::Eq, Rat::zero());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::ratio;

    fn cone(gens: &[&[i64]]) -> RationalCone {
        RationalCone::new(gens[0].len(), gens.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    fn square_cone() -> RationalCone {
        cone(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]])
    }

    #[test]
    fn construction() {
        let k = cone(&[&[2, 0], &[0, 3], &[1, 0]]);
        assert_eq!(k.generators(), &[vec![1, 0], vec![0, 1]]);
        assert_eq!(RationalCone::new(1, vec![vec![1], vec![-1]]), Err(Error::NotPointed));
        assert!(RationalCone::new(2, vec![vec![0, 0]]).is_err());
        let (eqs, ineqs) = square_cone().to_inequalities().unwrap();
        assert!(eqs.is_empty());
        assert_eq!(ineqs.len(), 4);
        let back = RationalCone::from_inequalities(3, &ineqs).unwrap();
        let mut a = back.generators().to_vec();
        let mut b = square_cone().generators().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(
            RationalCone::from_inequalities(2, &[vec![-1, 0]]),
            Err(Error::NotPointed)
        );
    }

    #[test]
    fn homogenize_examples() {
        let seg = RationalPolytope::from_integer_points("s", &[vec![0], vec![1]]).unwrap();
        assert_eq!(homogenize(&seg).generators(), &[vec![0, 1], vec![1, 1]]);
        let half = RationalPolytope::normalize("h", vec![vec![rat(0)], vec![ratio(1, 2)]]).unwrap();
        assert_eq!(homogenize(&half).generators(), &[vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn parallelepipeds() {
        let unimod = HalfOpenSimplicialCone::closed(vec![vec![0, 1], vec![1, 1]]).unwrap();
        assert!(unimod.parallelepiped_points(ParallelepipedMode::Open).unwrap().is_empty());
        assert_eq!(
            unimod.parallelepiped_points(ParallelepipedMode::HalfOpen).unwrap(),
            vec![(vec![0, 0], 0)]
        );
        let seg = HalfOpenSimplicialCone::closed(vec![vec![0, 0, 1], vec![2, 0, 1]]).unwrap();
        assert_eq!(
            seg.parallelepiped_points(ParallelepipedMode::Open).unwrap(),
            vec![(vec![1, 0, 1], 1)]
        );
        assert_eq!(
            HalfOpenSimplicialCone::closed(vec![vec![1, 2], vec![2, 4]]),
            Err(Error::DependentGenerators)
        );
        // index many points in each half-open box
        let c = HalfOpenSimplicialCone::closed(vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, -1, 1]]).unwrap();
        assert_eq!(c.parallelepiped_points(ParallelepipedMode::HalfOpen).unwrap().len(), 3);
        assert_eq!(c.index(), BigInt::from(3));
    }

    #[test]
    fn decompose_examples() {
        let pieces = decompose(&square_cone()).unwrap();
        assert_eq!(pieces.len(), 2);
        let opens: usize = pieces.iter().map(|p| p.open_flags().iter().filter(|&&o| o).count()).sum();
        assert_eq!(opens, 1);
        let tri = cone(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1]]);
        let pieces = decompose(&tri).unwrap();
        assert_eq!(pieces.len(), 1);
        assert!(pieces[0].open_flags().iter().all(|&o| !o));
    }

    /// Every box point of K lies in exactly one piece, for both flag choices.
    fn assert_partition(k: &RationalCone, radius: i64) {
        let pieces = decompose(k).unwrap();
        let n = k.ambient_dim();
        let (eqs, ineqs) = k.to_inequalities().unwrap();
        let in_cone = |x: &[i64], strict: bool| {
            let dot = |r: &Vec<i64>| r.iter().zip(x).map(|(a, b)| a * b).sum::<i64>();
            eqs.iter().all(|r| dot(r) == 0)
                && ineqs.iter().all(|r| if strict { dot(r) < 0 } else { dot(r) <= 0 })
        };
        linalg::for_each_in_box(&vec![-radius; n], &vec![radius; n], |x| {
            for dual in [false, true] {
                let hits = pieces.iter().filter(|p| p.contains(x, dual)).count();
                let expect = in_cone(x, dual);
                assert_eq!(hits, usize::from(expect), "{x:?} dual={dual}");
            }
        });
    }

    #[test]
    fn partition_property() {
        assert_partition(&square_cone(), 3);
        assert_partition(&cone(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, -1]]), 3);
        assert_partition(&cone(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1], &[1, 1, 2]]), 3);
    }

    #[test]
    fn partition_reports() {
        for k in [
            square_cone(),
            cone(&[&[1, 0], &[1, 3]]),
            cone(&[&[1, 0, 0], &[1, 2, 0]]),
            cone(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]),
        ] {
            let r = partition_check(&k, 4).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(r.instances[0].lhs > rat(4));
        }
    }

    #[test]
    fn piece_enumeration_counts_cone_points() {
        let k = square_cone();
        let c = k.positive_functional().unwrap();
        let mut all: Vec<Vec<i64>> = Vec::new();
        for p in decompose(&k).unwrap() {
            all.extend(piece_points_below(&p, &c, 4).unwrap());
        }
        let len = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), len);
        assert!(all.iter().all(|x| k.contains(x).unwrap()));
    }

    #[test]
    fn sigma_examples() {
        let quad = cone(&[&[1, 0], &[0, 1]]);
        let z = [ratio(1, 2), ratio(1, 3)];
        assert_eq!(sigma_eval(&quad, &z, ConeRegion::Closed).unwrap(), rat(3));
        assert_eq!(sigma_eval(&quad, &z, ConeRegion::Interior).unwrap(), ratio(1, 2));
        assert_eq!(
            sigma_eval(&quad, &[rat(1), rat(2)], ConeRegion::Closed),
            Err(Error::Pole(vec![1, 0]))
        );
        let ray = cone(&[&[1]]);
        assert_eq!(sigma_eval(&ray, &[ratio(1, 2)], ConeRegion::Closed).unwrap(), rat(2));
        assert_eq!(sigma_eval(&ray, &[rat(2)], ConeRegion::Interior).unwrap(), rat(-2));
    }

    #[test]
    fn sigma_matches_truncated_sum() {
        // cone over [0,1]: points (a, b) with 0 <= a <= b
        let k = cone(&[&[0, 1], &[1, 1]]);
        let (z1, z2) = (rat(2), ratio(1, 5));
        let value = sigma_eval(&k, &[z1.clone(), z2.clone()], ConeRegion::Closed).unwrap();
        let mut partial = Rat::zero();
        for b in 0..=12u32 {
            for a in 0..=b {
                partial += num_traits::pow(z1.clone(), a as usize) * num_traits::pow(z2.clone(), b as usize);
            }
        }
        // Σ_{b>12} z2^b (2^{b+1} - 1) as two geometric tails
        let tail = |r: Rat| num_traits::pow(r.clone(), 13) / (Rat::one() - r);
        let exact_tail = rat(2) * tail(&z1 * &z2) - tail(z2.clone());
        assert_eq!(value, partial + exact_tail);
        assert_eq!(value, ratio(25, 12));
    }

    #[test]
    fn reciprocity_examples() {
        for k in [
            cone(&[&[1, 0], &[0, 1]]),
            cone(&[&[1]]),
            square_cone(),
            cone(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1], &[1, 1, 2]]),
            cone(&[&[1, 0, 0], &[1, 2, 0]]),
        ] {
            let r = stanley_reciprocity_check(&k, 10, 7).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.instances.len(), 10);
        }
    }

    #[test]
    fn specialization_examples() {
        let seg = RationalPolytope::from_integer_points("s", &[vec![0], vec![1]]).unwrap();
        let r = specialization_check(&seg, &ratio(1, 2), 6).unwrap();
        assert!(r.passed());
        assert_eq!(r.instances[0].lhs, rat(4));
        let sq = RationalPolytope::from_integer_points("sq", &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let r = specialization_check(&sq, &ratio(1, 3), 6).unwrap();
        assert_eq!(r.instances[0].lhs, ratio(9, 2));
        assert!(r.passed());
        let tri = RationalPolytope::from_integer_points("t", &[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(specialization_check(&tri, &ratio(1, 2), 4).unwrap().instances[0].lhs, rat(8));
        let half = RationalPolytope::normalize("h", vec![vec![rat(0)], vec![ratio(1, 2)]]).unwrap();
        assert!(specialization_check(&half, &ratio(-1, 3), 8).unwrap().passed());
        assert!(matches!(specialization_check(&seg, &rat(1), 2), Err(Error::Pole(_))));
    }
}
