//! Semimagic squares: counts `H_n(r)`, their polynomial and series
//! structure, and the Birkhoff polytope.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::polytope::RationalPolytope;
use crate::ratpoly::{hstar_from_counts, interpolate, is_palindromic, rat, Poly, Rat};
use crate::report::{Relation, Report};

/// Largest square size the counting routine accepts.
pub const MAX_N: usize = 4;

fn compositions(r: u32, bounds: &[u32], prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let i = prefix.len();
    if i + 1 == bounds.len() {
        if r <= bounds[i] {
            prefix.push(r);
            out.push(prefix.clone());
            prefix.pop();
        }
        return;
    }
    for c in 0..=r.min(bounds[i]) {
        prefix.push(c);
        compositions(r - c, bounds, prefix, out);
        prefix.pop();
    }
}

/// Number of `n x n` nonnegative integer matrices with all line sums `r`.
pub fn count_semimagic(n: usize, r: u32) -> Result<BigInt> {
    if n == 0 || n > MAX_N {
        return Err(Error::Unsupported(format!("semimagic counts need 1 <= n <= {MAX_N}, got n = {n}")));
    }
    // residual column sums, kept sorted since columns are interchangeable
    let mut states: HashMap<Vec<u32>, BigInt> = HashMap::new();
    states.insert(vec![r; n], BigInt::one());
    for _ in 0..n - 1 {
        let mut next: HashMap<Vec<u32>, BigInt> = HashMap::new();
        for (res, ways) in &states {
            let mut rows = Vec::new();
            compositions(r, res, &mut Vec::new(), &mut rows);
            for row in rows {
                let mut key: Vec<u32> = res.iter().zip(&row).map(|(a, b)| a - b).collect();
                key.sort_unstable();
                *next.entry(key).or_default() += ways;
            }
        }
        states = next;
    }
    // the last row is forced
    Ok(states.values().sum())
}

/// Counts, the counting polynomial, and the series numerator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemimagicTable {
    pub n: usize,
    #[serde(serialize_with = "ser_big_vec")]
    pub values: Vec<BigInt>,
    pub counting_poly: Poly,
    pub numerator: Poly,
}

fn ser_big_vec<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// Builds the table for `r = 0..=R`, `R = max(rmax, (n-1)^2 + 3)`, and checks
/// polynomiality, the roots `-1..-(n-1)`, the symmetry `H(-r) = (-1)^{n-1} H(r-n)`,
/// and palindromy, degree, and nonnegativity of the numerator.
pub fn adg_report(n: usize, rmax: u32) -> Result<(SemimagicTable, Report)> {
    if n == 0 || n > MAX_N {
        return Err(Error::Unsupported(format!("semimagic tables need 1 <= n <= {MAX_N}, got n = {n}")));
    }
    let d = (n - 1) * (n - 1);
    let big_r = rmax.max(d as u32 + 3);
    let values: Vec<BigInt> = (0..=big_r).map(|r| count_semimagic(n, r)).collect::<Result<_>>()?;
    let rats: Vec<Rat> = values.iter().map(|v| Rat::from_integer(v.clone())).collect();
    let mut report = Report::new("semimagic-structure", format!("n={n}"));

    let samples: Vec<(i64, Rat)> = rats[..=d].iter().enumerate().map(|(r, v)| (r as i64, v.clone())).collect();
    let poly = interpolate(&samples)?;
    report.check(json!({"degree": "counting"}), rat(poly.degree()), Relation::Eq, rat(d as i64));
    for (r, v) in rats.iter().enumerate().skip(d + 1) {
        report.check(json!({"r": r}), poly.eval_int(r as i64), Relation::Eq, v.clone());
    }
    report.check(json!({"H(0)": 0}), rats[0].clone(), Relation::Eq, Rat::one());
    report.check(json!({"H(1)": 1}), rats[1].clone(), Relation::Eq, Rat::from_integer(factorial(n)));
    for k in 1..n as i64 {
        report.check(json!({"root": -k}), poly.eval_int(-k), Relation::Eq, Rat::zero());
    }
    let sign = if (n - 1).is_multiple_of(2) { Rat::one() } else { -Rat::one() };
    for r in 1..=big_r as i64 {
        report.check(
            json!({"symmetry": r}),
            poly.eval_int(-r),
            Relation::Eq,
            &sign * poly.eval_int(r - n as i64),
        );
    }

    let h = hstar_from_counts(&rats, d, 1)?.poly();
    let top = (n * n + 2).saturating_sub(3 * n) as i64;
    report.check(json!({"degree": "numerator"}), rat(h.degree()), Relation::Eq, rat(top));
    report.check(
        json!("numerator_palindromic"),
        Rat::from_integer(BigInt::from(is_palindromic(&h, top) as i64)),
        Relation::Eq,
        Rat::one(),
    );
    for (k, c) in h.coeffs().iter().enumerate() {
        report.check(json!({"numerator_nonneg": k}), c.clone(), Relation::Ge, Rat::zero());
        if !c.is_integer() {
            report.fail(format!("numerator coefficient {k} is not an integer"));
        }
    }
    let table = SemimagicTable {
        n,
        values,
        counting_poly: poly,
        numerator: h,
    };
    Ok((table, report))
}

/// Doubly stochastic `n x n` matrices, flattened row by row.
pub fn birkhoff_polytope(n: usize) -> Result<RationalPolytope> {
    if n == 0 || n > 3 {
        return Err(Error::Unsupported(format!(
            "the Birkhoff polytope is built geometrically for 1 <= n <= 3, got n = {n}"
        )));
    }
    let vertices: Vec<Vec<i64>> = (0..n)
        .permutations(n)
        .map(|perm| {
            let mut m = vec![0i64; n * n];
            for (i, &j) in perm.iter().enumerate() {
                m[i * n + j] = 1;
            }
            m
        })
        .collect();
    RationalPolytope::from_integer_points(format!("birkhoff-{n}"), &vertices)
}

/// `ehr_{B_n°}(r) = H_n(r - n)` for the geometric sizes.
pub fn birkhoff_interior_check(n: usize, extra: u32) -> Result<Report> {
    let b = birkhoff_polytope(n)?;
    let mut report = Report::new("birkhoff-interior-counts", b.name());
    for r in n as u32..=n as u32 + extra {
        let interior = crate::enumerate::count_dilate(&b, r as i64, crate::polytope::Region::RelativeInterior)?;
        let expected = count_semimagic(n, r - n as u32)?;
        report.check(
            json!({"r": r}),
            rat(interior as i64),
            Relation::Eq,
            Rat::from_integer(expected),
        );
    }
    Ok(report)
}

impl SemimagicTable {
    /// `H_n(r)` from the stored counting polynomial.
    pub fn eval(&self, r: i64) -> Rat {
        self.counting_poly.eval_int(r)
    }

    pub fn numerator_at_one(&self) -> Rat {
        self.numerator.eval(&Rat::one())
    }

    pub fn numerator_is_nonneg(&self) -> bool {
        self.numerator.coeffs().iter().all(|c| !c.is_negative())
    }

    pub fn all_counts_positive(&self) -> bool {
        self.values.iter().all(|v| !v.is_zero())
    }
}
