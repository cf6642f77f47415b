//! Lattice-point enumeration of dilates and the Ehrhart counting pipeline.
//!
//! Points are enumerated on the chart coordinates of the affine hull: the
//! remaining coordinates are affine functions of those, so the scan box has
//! the polytope's own dimension rather than the ambient one.

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::{self, big_to_i128};
use crate::polytope::{RationalPolytope, Region};
use crate::ratpoly::{hstar_from_counts, interpolate, rat, HStarData, Poly, QuasiPoly, Rat};
use crate::report::{Relation, Report};

/// Calls `f` on each lattice point of `region` of `p`.
pub fn for_each_point(
    p: &RationalPolytope,
    region: Region,
    mut f: impl FnMut(&[i64]),
) -> Result<()> {
    let chart = p.chart();
    let k = chart.dim();
    let lift = chart.int_lift()?;
    let facets: Vec<(Vec<i128>, i128)> = p
        .chart_facets()
        .iter()
        .map(|fa| {
            let den = fa.offset.denom();
            let normal = fa
                .normal
                .iter()
                .map(|a| big_to_i128(&(a * den)))
                .collect::<Result<Vec<_>>>()?;
            Ok((normal, big_to_i128(fa.offset.numer())?))
        })
        .collect::<Result<_>>()?;
    let projected: Vec<Vec<Rat>> = p.vertices().iter().map(|v| chart.project(v)).collect();
    let mut lo = Vec::with_capacity(k);
    let mut hi = Vec::with_capacity(k);
    for i in 0..k {
        let min = projected.iter().map(|y| &y[i]).min().expect("nonempty");
        let max = projected.iter().map(|y| &y[i]).max().expect("nonempty");
        lo.push(linalg::ceil_i64(min)?);
        hi.push(linalg::floor_i64(max)?);
    }
    let strict = region == Region::RelativeInterior;
    linalg::for_each_in_box(&lo, &hi, |y| {
        let inside = facets.iter().all(|(a, c)| {
            let v: i128 = a.iter().zip(y).map(|(ai, &yi)| ai * yi as i128).sum();
            if strict {
                v < *c
            } else {
                v <= *c
            }
        });
        if inside {
            if let Some(x) = lift.lift(y) {
                f(&x);
            }
        }
    });
    Ok(())
}

/// Integer points of `region` of `p`, in scan order.
pub fn enumerate_points(p: &RationalPolytope, region: Region) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    for_each_point(p, region, |x| out.push(x.to_vec()))?;
    Ok(out)
}

pub fn count_points(p: &RationalPolytope, region: Region) -> Result<u64> {
    let mut n = 0u64;
    for_each_point(p, region, |_| n += 1)?;
    Ok(n)
}

/// `#(nP ∩ Z^d)` (or the relative interior), with `0P = {0}`.
pub fn count_dilate(p: &RationalPolytope, n: i64, region: Region) -> Result<u64> {
    match n {
        0 => Ok(match region {
            Region::Closed => 1,
            // relative interior of a point is the point itself
            Region::RelativeInterior => u64::from(p.dim() == 0),
        }),
        n if n > 0 => count_points(&p.dilate_int(n)?, region),
        _ => Err(Error::Precondition(format!("dilation {n} must be nonnegative"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EhrhartResult {
    pub name: String,
    pub dim: usize,
    pub period: usize,
    pub quasi: QuasiPoly,
    pub quasi_interior: QuasiPoly,
    pub hstar: HStarData,
    /// Closed counts for `n = 0..counts.len()`.
    pub counts: Vec<u64>,
    /// Interior counts for `n = 1..=interior_counts.len()`.
    pub interior_counts: Vec<u64>,
}

impl EhrhartResult {
    pub fn evaluate(&self, n: i64) -> Rat {
        self.quasi.evaluate(n)
    }

    pub fn evaluate_interior(&self, n: i64) -> Rat {
        self.quasi_interior.evaluate(n)
    }

    pub fn minimal_period(&self) -> usize {
        self.quasi.minimal_period()
    }
}

/// Ehrhart quasipolynomials of `P` and of its relative interior, plus h*.
///
/// The period is the lcm of the vertex denominators. Each constituent is
/// interpolated from `dim + 1` dilates in its residue class; all counts up to
/// `p(dim + 2) - 1` are taken directly, so the extra ones double as guard
/// terms for the h* transform and as a check on the interpolants.
pub fn ehrhart(p: &RationalPolytope) -> Result<EhrhartResult> {
    let period = p
        .denominator()
        .to_usize()
        .ok_or_else(|| Error::Unsupported("vertex denominators too large".into()))?;
    let d = p.dim();
    let last = period * (d + 2) - 1;
    let counts: Vec<u64> = (0..=last as i64)
        .map(|n| count_dilate(p, n, Region::Closed))
        .collect::<Result<_>>()?;
    let interior_counts: Vec<u64> = (1..=last as i64)
        .map(|n| count_dilate(p, n, Region::RelativeInterior))
        .collect::<Result<_>>()?;

    let closed_constituents: Vec<Poly> = (0..period)
        .map(|r| {
            let samples: Vec<(i64, Rat)> = (0..=d)
                .map(|k| {
                    let n = r + period * k;
                    (n as i64, rat(counts[n] as i64))
                })
                .collect();
            interpolate(&samples)
        })
        .collect::<Result<_>>()?;
    let mut interior_constituents = vec![Poly::zero(); period];
    for r in 1..=period {
        let samples: Vec<(i64, Rat)> = (0..=d)
            .map(|k| {
                let n = r + period * k;
                (n as i64, rat(interior_counts[n - 1] as i64))
            })
            .collect();
        interior_constituents[r % period] = interpolate(&samples)?;
    }
    let quasi = QuasiPoly::new(closed_constituents)?;
    let quasi_interior = QuasiPoly::new(interior_constituents)?;

    for (n, &c) in counts.iter().enumerate() {
        if quasi.evaluate(n as i64) != rat(c as i64) {
            return Err(Error::InconsistentCounts(format!(
                "closed count at n={n} is {c}, interpolant gives {}",
                quasi.evaluate(n as i64)
            )));
        }
    }
    for (i, &c) in interior_counts.iter().enumerate() {
        let n = i as i64 + 1;
        if quasi_interior.evaluate(n) != rat(c as i64) {
            return Err(Error::InconsistentCounts(format!(
                "interior count at n={n} is {c}, interpolant gives {}",
                quasi_interior.evaluate(n)
            )));
        }
    }
    let as_rats: Vec<Rat> = counts.iter().map(|&c| rat(c as i64)).collect();
    let hstar = hstar_from_counts(&as_rats, d, period)?;
    Ok(EhrhartResult {
        name: p.name().to_string(),
        dim: d,
        period,
        quasi,
        quasi_interior,
        hstar,
        counts,
        interior_counts,
    })
}

/// Checks `ehr(-n) = (-1)^dim ehr°(n)` for `n = 1..=max_n`, and confirms the
/// interior side against a direct count of `nP` for `n <= direct_cap`.
pub fn reciprocity_check(
    p: &RationalPolytope,
    result: &EhrhartResult,
    max_n: i64,
    direct_cap: i64,
) -> Result<Report> {
    let mut report = Report::new("ehrhart-macdonald-reciprocity", p.name());
    let sign = if result.dim.is_multiple_of(2) { rat(1) } else { rat(-1) };
    for n in 1..=max_n {
        let interior = result.evaluate_interior(n);
        report.check(
            json!(n),
            result.evaluate(-n),
            Relation::Eq,
            &sign * &interior,
        );
        if n <= direct_cap {
            let direct = count_dilate(p, n, Region::RelativeInterior)?;
            report.check(
                json!({"n": n, "check": "interior-count"}),
                rat(direct as i64),
                Relation::Eq,
                interior,
            );
        }
    }
    Ok(report)
}

/// Smallest `n >= 1` whose dilate has a relative-interior lattice point.
pub fn first_interior_dilate(p: &RationalPolytope, limit: i64) -> Result<Option<i64>> {
    for n in 1..=limit {
        if !count_dilate(p, n, Region::RelativeInterior)?.is_zero() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::ratio;

    fn poly(pts: &[&[i64]]) -> RationalPolytope {
        RationalPolytope::from_integer_points(
            "t",
            &pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    fn half_segment() -> RationalPolytope {
        RationalPolytope::normalize("half", vec![vec![rat(0)], vec![ratio(1, 2)]]).unwrap()
    }

    fn brute_force_count(p: &RationalPolytope, n: i64, region: Region) -> u64 {
        // full ambient box, independent of the chart scan
        let q = p.dilate_int(n).unwrap();
        let d = q.ambient_dim();
        let lo: Vec<i64> = (0..d)
            .map(|i| q.vertices().iter().map(|v| v[i].floor().to_integer()).min().unwrap().try_into().unwrap())
            .collect();
        let hi: Vec<i64> = (0..d)
            .map(|i| q.vertices().iter().map(|v| v[i].ceil().to_integer()).max().unwrap().try_into().unwrap())
            .collect();
        let mut c = 0;
        linalg::for_each_in_box(&lo, &hi, |x| {
            if q.contains(&linalg::to_rat_vec(x), region) {
                c += 1;
            }
        });
        c
    }

    #[test]
    fn enumerate_square() {
        let sq = poly(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2]]);
        assert_eq!(enumerate_points(&sq, Region::Closed).unwrap().len(), 9);
        assert_eq!(
            enumerate_points(&sq, Region::RelativeInterior).unwrap(),
            vec![vec![1, 1]]
        );
    }

    #[test]
    fn enumerate_lower_dimensional() {
        let diag = poly(&[&[0, 0, 1], &[3, 6, 1]]);
        let pts = enumerate_points(&diag, Region::Closed).unwrap();
        assert_eq!(pts, vec![vec![0, 0, 1], vec![1, 2, 1], vec![2, 4, 1], vec![3, 6, 1]]);
        assert_eq!(count_points(&diag, Region::RelativeInterior).unwrap(), 2);
        // affine hull misses the lattice
        let off = RationalPolytope::normalize(
            "off",
            vec![vec![ratio(1, 2), rat(0)], vec![ratio(1, 2), rat(3)]],
        )
        .unwrap();
        assert_eq!(count_points(&off, Region::Closed).unwrap(), 0);
        assert_eq!(count_points(&off.dilate_int(2).unwrap(), Region::Closed).unwrap(), 7);
    }

    #[test]
    fn ehrhart_unit_square() {
        let sq = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let e = ehrhart(&sq).unwrap();
        assert_eq!(e.period, 1);
        assert_eq!(e.quasi.constituents()[0], Poly::from_ints(&[1, 2, 1]));
        assert_eq!(e.quasi_interior.constituents()[0], Poly::from_ints(&[1, -2, 1]));
        assert_eq!(e.hstar.coeffs, vec![rat(1), rat(1)]);
    }

    #[test]
    fn ehrhart_cross_polygon() {
        let cross = poly(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
        let e = ehrhart(&cross).unwrap();
        assert_eq!(&e.counts[..4], &[1, 5, 13, 25]);
        assert_eq!(e.quasi.constituents()[0], Poly::from_ints(&[1, 2, 2]));
        assert_eq!(e.hstar.coeffs, vec![rat(1), rat(2), rat(1)]);
    }

    #[test]
    fn ehrhart_half_segment() {
        let e = ehrhart(&half_segment()).unwrap();
        assert_eq!(e.period, 2);
        for n in 0..12 {
            assert_eq!(e.evaluate(n), rat(n / 2 + 1));
        }
        assert_eq!(e.hstar.coeffs, vec![rat(1), rat(1)]);
        assert_eq!(e.hstar.period, 2);
    }

    #[test]
    fn reciprocity_examples() {
        let seg = poly(&[&[0], &[1]]);
        let e = ehrhart(&seg).unwrap();
        assert_eq!(e.evaluate(-3), rat(-2));
        assert_eq!(e.evaluate_interior(3), rat(2));
        assert!(reciprocity_check(&seg, &e, 5, 5).unwrap().passed());

        let sq = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let e = ehrhart(&sq).unwrap();
        assert_eq!(e.evaluate(-4), rat(9));
        assert_eq!(e.evaluate_interior(4), rat(9));

        let half = half_segment();
        let e = ehrhart(&half).unwrap();
        assert_eq!(e.evaluate(-5), rat(-2));
        assert_eq!(e.evaluate_interior(5), rat(2));
        assert!(reciprocity_check(&half, &e, 6, 6).unwrap().passed());
    }

    #[test]
    fn zero_dimensional_polytopes() {
        let pt = poly(&[&[2, 3]]);
        let e = ehrhart(&pt).unwrap();
        assert_eq!(e.quasi.constituents()[0], Poly::one());
        assert_eq!(e.hstar.coeffs, vec![rat(1)]);
        assert!(reciprocity_check(&pt, &e, 3, 3).unwrap().passed());

        let rational = RationalPolytope::normalize("q", vec![vec![ratio(1, 3)]]).unwrap();
        let e = ehrhart(&rational).unwrap();
        assert_eq!(e.period, 3);
        assert_eq!((0..7).map(|n| e.evaluate(n)).collect::<Vec<_>>(),
            [1, 0, 0, 1, 0, 0, 1].map(rat).to_vec());
        assert!(reciprocity_check(&rational, &e, 6, 6).unwrap().passed());
    }

    #[test]
    fn counts_match_brute_force_and_facts() {
        let polys = [
            poly(&[&[0, 0], &[3, 0], &[0, 1]]),
            poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 2]]),
            poly(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]]),
            poly(&[&[0, 0, 1], &[2, 1, 1], &[1, 3, 1]]),
        ];
        for p in &polys {
            let e = ehrhart(p).unwrap();
            for n in 1..=5 {
                assert_eq!(e.evaluate(n), rat(brute_force_count(p, n, Region::Closed) as i64));
                assert_eq!(
                    e.evaluate_interior(n),
                    rat(brute_force_count(p, n, Region::RelativeInterior) as i64)
                );
            }
            let h = &e.hstar;
            let d = p.dim() as i64;
            assert_eq!(h.coeff(1), rat(e.counts[1] as i64 - d - 1));
            assert_eq!(h.coeff(d), rat(e.interior_counts[0] as i64));
            let first = first_interior_dilate(p, d + 1).unwrap();
            assert_eq!(first, Some(h.codegree));
        }
    }
}
