//! Degree and codegree of h*, the linear inequalities it satisfies, the
//! a/b decomposition, palindromy versus reflexivity, and monotonicity.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::json;

use crate::enumerate::ehrhart;
use crate::error::{Error, Result};
use crate::linalg;
use crate::polytope::{contains_polytope, RationalPolytope};
use crate::ratpoly::{binomial, hstar_from_counts, is_palindromic, serde_rat, HStarData, Poly, Rat};
use crate::report::{Relation, Report};
use crate::triangulate::Triangulation;

/// Integer h*-vector of a lattice polytope with its degree and codegree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HStarProfile {
    pub d: usize,
    pub s: usize,
    pub l: usize,
    #[serde(serialize_with = "ser_big_vec")]
    pub coeffs: Vec<BigInt>,
}

fn ser_big_vec<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl HStarProfile {
    /// Trailing zeros are dropped; `coeffs[0]` must be 1 and the degree at most `d`.
    pub fn new(coeffs: Vec<BigInt>, d: usize) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.first().is_none_or(|c| !c.is_one()) {
            return Err(Error::Precondition("h*_0 must be 1".into()));
        }
        if coeffs.iter().any(Signed::is_negative) {
            return Err(Error::Precondition("h* has a negative coefficient".into()));
        }
        let s = coeffs.len() - 1;
        if s > d {
            return Err(Error::Precondition(format!("degree {s} exceeds dimension {d}")));
        }
        Ok(HStarProfile {
            d,
            s,
            l: d + 1 - s,
            coeffs,
        })
    }

    pub fn from_ints(coeffs: &[i64], d: usize) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect(), d)
    }

    /// `h*_j`, zero outside `0..=s`.
    pub fn h(&self, j: i64) -> BigInt {
        usize::try_from(j)
            .ok()
            .and_then(|j| self.coeffs.get(j).cloned())
            .unwrap_or_default()
    }

    /// `h*_lo + ... + h*_hi`, empty when `lo > hi`.
    fn window(&self, lo: i64, hi: i64) -> Rat {
        Rat::from_integer((lo..=hi).map(|j| self.h(j)).sum())
    }

    pub fn poly(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect())
    }
}

/// Profile of a lattice h*-vector; rational forms are rejected.
pub fn profile(h: &HStarData) -> Result<HStarProfile> {
    if h.period != 1 {
        return Err(Error::Unsupported(format!(
            "degree and codegree need a lattice polytope, got period {}",
            h.period
        )));
    }
    let coeffs = h
        .integer_coeffs()
        .ok_or_else(|| Error::Precondition("h* is not integral".into()))?;
    HStarProfile::new(coeffs, h.dim)
}

/// `h*_0 + ... + h*_j <= h*_s + ... + h*_{s-j}` for `0 <= j <= d`.
pub fn stanley_inequalities(pr: &HStarProfile, subject: &str) -> Report {
    let mut r = Report::new("stanley-inequalities", subject);
    let s = pr.s as i64;
    for j in 0..=pr.d as i64 {
        r.check(json!({"j": j}), pr.window(0, j), Relation::Le, pr.window(s - j, s));
    }
    r
}

/// Both codegree families plus `h*_1 >= h*_d`.
pub fn stapledon_inequalities(pr: &HStarProfile, subject: &str) -> Report {
    let mut r = Report::new("stapledon-inequalities", subject);
    let d = pr.d as i64;
    let l = pr.l as i64;
    for j in 0..(d / 2) {
        r.check(
            json!({"family": "A", "j": j}),
            pr.window(2, j + 1),
            Relation::Ge,
            pr.window(d - j, d - 1),
        );
    }
    for j in 2..d {
        r.check(
            json!({"family": "B", "j": j}),
            pr.window(2 - l, 1),
            Relation::Le,
            pr.window(j - l + 1, j),
        );
    }
    // meaningless for a point, where h*_d is h*_0
    if d >= 1 {
        r.check(
            json!({"family": "trivial"}),
            Rat::from_integer(pr.h(1)),
            Relation::Ge,
            Rat::from_integer(pr.h(d)),
        );
    }
    r
}

/// `(1 + x + ... + x^{l-1}) h*(x) = a(x) + x^l b(x)` with palindromic `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ABDecomposition {
    #[serde(with = "serde_rat::vec")]
    pub a: Vec<Rat>,
    #[serde(with = "serde_rat::vec")]
    pub b: Vec<Rat>,
}

impl ABDecomposition {
    pub fn a_poly(&self) -> Poly {
        Poly::new(self.a.clone())
    }

    pub fn b_poly(&self) -> Poly {
        Poly::new(self.b.clone())
    }
}

/// Solves the coefficient-matching and palindromy equations; errors when the
/// solution is not a single point.
pub fn ab_decomposition(pr: &HStarProfile) -> Result<ABDecomposition> {
    let d = pr.d;
    let l = pr.l;
    let na = d + 1;
    // b has degree at most d - l; empty when l = d + 1
    let nb = (d + 1).saturating_sub(l);
    let n = na + nb;
    let lhs = &Poly::new(vec![Rat::one(); l]) * &pr.poly();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let unit = |i: usize| -> Vec<Rat> {
        let mut v = vec![Rat::zero(); n + 1];
        v[i] = Rat::one();
        v
    };
    for k in 0..=d {
        let mut row = unit(k);
        if k >= l && k - l < nb {
            row[na + k - l] = Rat::one();
        }
        row[n] = lhs.coeff(k);
        rows.push(row);
    }
    for k in 0..na {
        let mut row = unit(k);
        row[d - k] -= Rat::one();
        rows.push(row);
    }
    for k in 0..nb {
        let mut row = unit(na + k);
        row[na + nb - 1 - k] -= Rat::one();
        rows.push(row);
    }
    let (reduced, pivots) = linalg::rref(rows, n + 1);
    if pivots.contains(&n) {
        return Err(Error::Precondition("a/b system is inconsistent".into()));
    }
    if pivots.len() != n {
        return Err(Error::Precondition("a/b system has a non-unique solution".into()));
    }
    let mut sol = vec![Rat::zero(); n];
    for (row, &p) in reduced.iter().zip(&pivots) {
        sol[p] = row[n].clone();
    }
    let b = sol.split_off(na);
    Ok(ABDecomposition { a: sol, b })
}

/// Existence, uniqueness, nonnegativity, and the chain `1 = a_0 <= a_1 <= a_j`.
pub fn ab_check(pr: &HStarProfile, subject: &str) -> (Option<ABDecomposition>, Report) {
    let mut r = Report::new("ab-decomposition", subject);
    let ab = match ab_decomposition(pr) {
        Ok(ab) => ab,
        Err(e) => {
            r.fail(e.to_string());
            return (None, r);
        }
    };
    let lhs = &Poly::new(vec![Rat::one(); pr.l]) * &pr.poly();
    let rhs = &ab.a_poly() + &(&Poly::monomial(pr.l, Rat::one()) * &ab.b_poly());
    for k in 0..=pr.d {
        r.check(json!({"identity": k}), lhs.coeff(k), Relation::Eq, rhs.coeff(k));
    }
    for (k, a) in ab.a.iter().enumerate() {
        r.check(json!({"a_nonneg": k}), a.clone(), Relation::Ge, Rat::zero());
    }
    for (k, b) in ab.b.iter().enumerate() {
        r.check(json!({"b_nonneg": k}), b.clone(), Relation::Ge, Rat::zero());
    }
    r.check(json!("a_0"), ab.a[0].clone(), Relation::Eq, Rat::one());
    if pr.d >= 1 {
        for j in 2..pr.d {
            r.check(json!({"a_1_le_a_j": j}), ab.a[1].clone(), Relation::Le, ab.a[j].clone());
        }
    }
    (Some(ab), r)
}

fn truth(b: bool) -> Rat {
    if b {
        Rat::one()
    } else {
        Rat::zero()
    }
}

/// h* palindromic exactly when `l P` is a translate of a reflexive polytope.
pub fn hibi_check(p: &RationalPolytope) -> Result<Report> {
    let mut r = Report::new("hibi-palindromic-reflexive", p.name());
    if !p.is_lattice() {
        return Err(Error::NotLattice);
    }
    if !p.is_full_dimensional() {
        r.hypothesis_not_met("reflexivity is tested on full-dimensional polytopes only");
        return Ok(r);
    }
    let pr = profile(&ehrhart(p)?.hstar)?;
    let palindromic = is_palindromic(&pr.poly(), pr.s as i64);
    let check = p.dilate_int(pr.l as i64)?.reflexive_check()?;
    r.check(
        json!({"s": pr.s, "l": pr.l}),
        truth(palindromic),
        Relation::Eq,
        truth(check.is_reflexive),
    );
    if let Some(t) = check.witness_translate {
        r.note = Some(format!("{}P translated by {t:?} is reflexive", pr.l));
    }
    Ok(r)
}

/// Inequalities valid under a unimodular triangulation of `P` or of its boundary.
pub fn athanasiadis_check(p: &RationalPolytope) -> Result<Report> {
    let mut r = Report::new("unimodular-triangulation-inequalities", p.name());
    let pr = profile(&ehrhart(p)?.hstar)?;
    let t = Triangulation::placing(p, true)?;
    let d = pr.d as i64;
    let h = |j: i64| Rat::from_integer(pr.h(j));
    let mut notes = Vec::new();
    if t.is_unimodular() {
        for k in (d + 1) / 2..d {
            r.check(json!({"chain": k}), h(k), Relation::Ge, h(k + 1));
        }
        for j in 0..=d {
            let bound = binomial((pr.h(1) + BigInt::from(j - 1)).to_i64().unwrap_or(i64::MAX), j);
            r.check(json!({"binomial": j}), h(j), Relation::Le, Rat::from_integer(bound));
        }
    } else {
        notes.push("placing triangulation on all lattice points is not unimodular");
    }
    if d >= 1 && t.boundary_is_unimodular() {
        let h1_minus_hd = pr.h(1) - pr.h(d);
        for j in 0..d / 2 {
            r.check(json!({"boundary": j}), h(j + 1), Relation::Ge, h(d - j));
            let bound = binomial((&h1_minus_hd + BigInt::from(j + 1)).to_i64().unwrap_or(i64::MAX), j + 1);
            r.check(
                json!({"boundary_sum": j}),
                pr.window(0, j + 1),
                Relation::Le,
                pr.window(d - j, d) + Rat::from_integer(bound),
            );
        }
    } else {
        notes.push("induced boundary triangulation is not unimodular");
    }
    if !notes.is_empty() {
        if t.is_unimodular() {
            r.note = Some(notes.join("; "));
        } else {
            r.hypothesis_not_met(notes.join("; "));
        }
    }
    Ok(r)
}

/// Numerator of the Ehrhart series over `(1 - x^p)^{d+1}`.
pub fn hstar_normal_form(p: &RationalPolytope, period: usize, d: usize) -> Result<HStarData> {
    let e = ehrhart(p)?;
    if !period.is_multiple_of(e.period) || d < e.dim {
        return Err(Error::Precondition(format!(
            "normal form (p={period}, d={d}) does not refine (p={}, d={})",
            e.period, e.dim
        )));
    }
    let counts: Vec<Rat> = (0..=(period * (d + 2)) as i64).map(|n| e.evaluate(n)).collect();
    hstar_from_counts(&counts, d, period)
}

/// `P ⊆ Q` implies `h*_P <= h*_Q` coefficientwise in a common normal form.
pub fn monotonicity_check(p: &RationalPolytope, q: &RationalPolytope) -> Result<Report> {
    if p.ambient_dim() != q.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: q.ambient_dim(),
            got: p.ambient_dim(),
        });
    }
    if !contains_polytope(p, q) {
        return Err(Error::Precondition(format!("{} is not contained in {}", p.name(), q.name())));
    }
    let pp = p.denominator();
    let pq = q.denominator();
    let period = num_integer::lcm(pp, pq)
        .to_usize()
        .ok_or_else(|| Error::Unsupported("period exceeds usize".into()))?;
    let d = q.dim();
    let hp = hstar_normal_form(p, period, d)?;
    let hq = hstar_normal_form(q, period, d)?;
    let mut r = Report::new("hstar-monotonicity", format!("{} in {}", p.name(), q.name()));
    for k in 0..(period * (d + 1)) as i64 {
        r.check(json!({"k": k, "p": period, "d": d}), hp.coeff(k), Relation::Le, hq.coeff(k));
    }
    Ok(r)
}
