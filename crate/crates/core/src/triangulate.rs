//! Placing triangulations, f- and h-vectors, links, box polynomials, and
//! the Betke–McMullen formula for h*.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cones::{HalfOpenSimplicialCone, ParallelepipedMode};
use crate::enumerate::{ehrhart, enumerate_points};
use crate::error::{Error, Result};
use crate::linalg::{self, AffineChart};
use crate::polytope::{RationalPolytope, Region};
use crate::ratpoly::{rat, HStarData, Poly, Rat};
use crate::report::{Relation, Report};

/// Placing triangulation of `points` in the given order.
///
/// Each point is joined to every boundary facet of the current complex it
/// sees strictly; points that see nothing (already in the hull) are skipped.
/// Returns sorted cells and the dimension of the complex.
pub(crate) fn place(points: &[Vec<Rat>]) -> (Vec<Vec<usize>>, usize) {
    if points.is_empty() {
        return (Vec::new(), 0);
    }
    let mut cells: Vec<Vec<usize>> = vec![vec![0]];
    let mut used: Vec<usize> = vec![0];
    let mut chart = AffineChart::from_points(&points[..1]);
    for (i, p) in points.iter().enumerate().skip(1) {
        if !chart.contains(p) {
            used.push(i);
            let hull: Vec<Vec<Rat>> = used.iter().map(|&j| points[j].clone()).collect();
            chart = AffineChart::from_points(&hull);
            for c in cells.iter_mut() {
                c.push(i);
            }
            continue;
        }
        let dim = chart.dim();
        if dim == 0 {
            continue;
        }
        let proj = |j: usize| chart.project(&points[j]);
        // boundary facets: (dim)-subsets of exactly one cell
        let mut facet_owner: BTreeMap<Vec<usize>, Option<usize>> = BTreeMap::new();
        for c in &cells {
            for (skip, &opp) in c.iter().enumerate() {
                let f: Vec<usize> = c
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != skip)
                    .map(|(_, &v)| v)
                    .collect();
                facet_owner
                    .entry(f)
                    .and_modify(|o| *o = None)
                    .or_insert(Some(opp));
            }
        }
        let q = proj(i);
        let mut new_cells = Vec::new();
        for (f, opp) in facet_owner {
            let Some(opp) = opp else { continue };
            let base = proj(f[0]);
            let mut rows: Vec<Vec<Rat>> = f[1..]
                .iter()
                .map(|&v| linalg::sub(&proj(v), &base))
                .collect();
            rows.push(linalg::sub(&q, &base));
            let sq = linalg::det(&rows);
            *rows.last_mut().expect("nonempty") = linalg::sub(&proj(opp), &base);
            let sv = linalg::det(&rows);
            if !sq.is_zero() && sq.is_positive() != sv.is_positive() {
                let mut c = f.clone();
                c.push(i);
                new_cells.push(c);
            }
        }
        if !new_cells.is_empty() {
            used.push(i);
            cells.extend(new_cells);
        }
    }
    for c in cells.iter_mut() {
        c.sort_unstable();
    }
    cells.sort();
    (cells, chart.dim())
}

/// Triangulation of a lattice polytope by lattice simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    points: Vec<Vec<i64>>,
    cells: Vec<Vec<usize>>,
    dim: usize,
    faces: BTreeSet<Vec<usize>>,
}

/// JSON form: points plus cells as index lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationFile {
    pub points: Vec<Vec<i64>>,
    pub cells: Vec<Vec<usize>>,
}

impl Triangulation {
    /// Placing triangulation with lexicographic insertion order, on the
    /// vertices or on every lattice point of `p`.
    pub fn placing(p: &RationalPolytope, use_all_lattice_points: bool) -> Result<Self> {
        if !p.is_lattice() {
            return Err(Error::NotLattice);
        }
        let mut points = if use_all_lattice_points {
            enumerate_points(p, Region::Closed)?
        } else {
            p.integer_vertices()?
        };
        points.sort();
        let rats: Vec<Vec<Rat>> = points.iter().map(|v| linalg::to_rat_vec(v)).collect();
        let (cells, dim) = place(&rats);
        Ok(Self::from_cells(points, cells, dim))
    }

    /// Wraps externally supplied cells; every cell must have `dim + 1` points.
    pub fn new(points: Vec<Vec<i64>>, mut cells: Vec<Vec<usize>>) -> Result<Self> {
        let Some(first) = cells.first() else {
            return Err(Error::Empty("triangulation needs a cell"));
        };
        let dim = first.len() - 1;
        for c in cells.iter_mut() {
            if c.len() != dim + 1 || c.iter().any(|&i| i >= points.len()) {
                return Err(Error::Precondition(format!("malformed cell {c:?}")));
            }
            c.sort_unstable();
        }
        cells.sort();
        Ok(Self::from_cells(points, cells, dim))
    }

    fn from_cells(points: Vec<Vec<i64>>, cells: Vec<Vec<usize>>, dim: usize) -> Self {
        let mut faces = BTreeSet::new();
        for c in &cells {
            for mask in 0u32..(1 << c.len()) {
                let f: Vec<usize> = c
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| mask >> t & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                faces.insert(f);
            }
        }
        Triangulation {
            points,
            cells,
            dim,
            faces,
        }
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All faces, the empty face included.
    pub fn faces(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.faces.iter()
    }

    pub fn is_face(&self, face: &[usize]) -> bool {
        self.faces.contains(face)
    }

    /// `f_{-1}, f_0, ..., f_dim`.
    pub fn f_vector(&self) -> Vec<u64> {
        let mut f = vec![0u64; self.dim + 2];
        for face in &self.faces {
            f[face.len()] += 1;
        }
        f
    }

    pub fn h_polynomial(&self) -> Poly {
        h_polynomial(&self.f_vector(), self.dim as i64)
    }

    /// f-vector and dimension of `link(face)`.
    pub fn link(&self, face: &[usize]) -> Result<(Vec<u64>, i64)> {
        let mut face = face.to_vec();
        face.sort_unstable();
        if !self.faces.contains(&face) {
            return Err(Error::NotAFace(face));
        }
        let link_dim = self.dim as i64 - face.len() as i64;
        let mut f = vec![0u64; (link_dim + 2).max(1) as usize];
        for omega in &self.faces {
            if omega.iter().any(|v| face.contains(v)) {
                continue;
            }
            let mut join: Vec<usize> = omega.iter().chain(&face).copied().collect();
            join.sort_unstable();
            if self.faces.contains(&join) {
                f[omega.len()] += 1;
            }
        }
        Ok((f, link_dim))
    }

    pub fn link_h_polynomial(&self, face: &[usize]) -> Result<Poly> {
        let (f, d) = self.link(face)?;
        Ok(h_polynomial(&f, d))
    }

    /// Vertices of `face` lifted to height one.
    pub fn lifted(&self, face: &[usize]) -> Vec<Vec<i64>> {
        face.iter()
            .map(|&i| {
                let mut v = self.points[i].clone();
                v.push(1);
                v
            })
            .collect()
    }

    /// Normalized volume of a simplex, relative to the lattice in its affine hull.
    pub fn simplex_volume(&self, face: &[usize]) -> BigInt {
        linalg::lattice_index(&self.lifted(face))
    }

    pub fn normalized_volume(&self) -> BigInt {
        self.cells.iter().map(|c| self.simplex_volume(c)).sum()
    }

    pub fn is_unimodular(&self) -> bool {
        self.cells.iter().all(|c| self.simplex_volume(c).is_one())
    }

    /// Maximal faces of the boundary: codimension-one faces lying in one cell.
    pub fn boundary_facets(&self) -> Vec<Vec<usize>> {
        let mut count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for c in &self.cells {
            for skip in 0..c.len() {
                let f: Vec<usize> = c
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != skip)
                    .map(|(_, &v)| v)
                    .collect();
                *count.entry(f).or_default() += 1;
            }
        }
        count
            .into_iter()
            .filter(|&(_, n)| n == 1)
            .map(|(f, _)| f)
            .collect()
    }

    pub fn boundary_is_unimodular(&self) -> bool {
        self.boundary_facets()
            .iter()
            .all(|f| self.simplex_volume(f).is_one())
    }

    /// Checks that no cell's barycenter lies strictly inside another cell.
    pub fn interiors_disjoint(&self) -> bool {
        if self.cells.len() < 2 {
            return true;
        }
        let rats: Vec<Vec<Rat>> = self.points.iter().map(|v| linalg::to_rat_vec(v)).collect();
        let used: Vec<Vec<Rat>> = self.cells.iter().flatten().map(|&i| rats[i].clone()).collect();
        let chart = AffineChart::from_points(&used);
        let k = Rat::from_integer(BigInt::from(self.dim as i64 + 1));
        let bary = |c: &[usize]| -> Vec<Rat> {
            let mut b = vec![Rat::zero(); chart.dim()];
            for &i in c {
                for (bj, x) in b.iter_mut().zip(chart.project(&rats[i])) {
                    *bj += x;
                }
            }
            b.into_iter().map(|x| x / &k).collect()
        };
        for (a, ca) in self.cells.iter().enumerate() {
            let ba = bary(ca);
            for (b, cb) in self.cells.iter().enumerate() {
                if a == b {
                    continue;
                }
                let base = chart.project(&rats[cb[0]]);
                let cols: Vec<Vec<Rat>> = cb[1..]
                    .iter()
                    .map(|&i| linalg::sub(&chart.project(&rats[i]), &base))
                    .collect();
                // solve Σ λ_i cols_i = ba - base (transpose system)
                let m: Vec<Vec<Rat>> = (0..chart.dim())
                    .map(|r| cols.iter().map(|c| c[r].clone()).collect())
                    .collect();
                let Some(lambda) = linalg::solve(&m, &linalg::sub(&ba, &base)) else {
                    continue;
                };
                let total: Rat = lambda.iter().sum();
                if lambda.iter().all(Signed::is_positive) && total < Rat::one() {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_file(&self) -> TriangulationFile {
        TriangulationFile {
            points: self.points.clone(),
            cells: self.cells.clone(),
        }
    }
}

/// `h(z) = Σ_{k=-1}^{e} f_k z^{k+1} (1-z)^{e-k}` with `f[k+1] = f_k`.
pub fn h_polynomial(f: &[u64], e: i64) -> Poly {
    let one_minus = Poly::from_ints(&[1, -1]);
    let mut h = Poly::zero();
    for (i, &fk) in f.iter().enumerate() {
        let k = i as i64 - 1;
        if k > e || fk == 0 {
            continue;
        }
        let term = &Poly::monomial(i, rat(fk as i64)) * &one_minus.pow((e - k) as u32);
        h = &h + &term;
    }
    h
}

/// `B_Δ(x) = Σ x^height(m)` over lattice points of the open parallelepiped
/// of the lifted simplex; `B_∅ = 1`.
pub fn box_polynomial(lifted: &[Vec<i64>]) -> Result<Poly> {
    if lifted.is_empty() {
        return Ok(Poly::one());
    }
    let cone = HalfOpenSimplicialCone::closed(lifted.to_vec())?;
    let mut coeffs: Vec<Rat> = Vec::new();
    for (_, h) in cone.parallelepiped_points(ParallelepipedMode::Open)? {
        let h = h as usize;
        if coeffs.len() <= h {
            coeffs.resize(h + 1, Rat::zero());
        }
        coeffs[h] += Rat::one();
    }
    Ok(Poly::new(coeffs))
}

/// `Σ_{Δ ∈ T} h_link(Δ)(x) B_Δ(x)`, summed over all faces including `∅`.
pub fn betke_mcmullen(t: &Triangulation) -> Result<HStarData> {
    let mut total = Poly::zero();
    for face in t.faces() {
        let b = box_polynomial(&t.lifted(face))?;
        if b.is_zero() {
            continue;
        }
        total = &total + &(&t.link_h_polynomial(face)? * &b);
    }
    Ok(HStarData::new(total.coeffs().to_vec(), t.dim(), 1))
}

/// Compares the Betke–McMullen sum with h* from interpolated counts.
pub fn betke_mcmullen_check(p: &RationalPolytope, t: &Triangulation) -> Result<Report> {
    let hstar = ehrhart(p)?.hstar;
    let bm = betke_mcmullen(t)?;
    let mut report = Report::new("betke-mcmullen", p.name());
    let top = hstar.coeffs.len().max(bm.coeffs.len());
    for k in 0..top as i64 {
        report.check(json!(k), bm.coeff(k), Relation::Eq, hstar.coeff(k));
    }
    Ok(report)
}

/// `h* >= h_T` componentwise, with equality when `T` is unimodular.
pub fn h_vector_bound_check(p: &RationalPolytope, t: &Triangulation) -> Result<Report> {
    let hstar = ehrhart(p)?.hstar;
    let ht = t.h_polynomial();
    let unimodular = t.is_unimodular();
    let mut report = Report::new(
        if unimodular {
            "unimodular-triangulation-h-vector"
        } else {
            "triangulation-h-vector-lower-bound"
        },
        p.name(),
    );
    let rel = if unimodular { Relation::Eq } else { Relation::Ge };
    for k in 0..=t.dim() as i64 {
        report.check(json!(k), hstar.coeff(k), rel, ht.coeff(k as usize));
    }
    Ok(report)
}
