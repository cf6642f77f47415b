//! Exact rationals, univariate polynomials and quasipolynomials, and the
//! series transforms between lattice-point counts and h*-vectors.
//!
//! Every routine here is exact. Rationals are `num_rational::BigRational`
//! values, which are kept reduced with a positive denominator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rat = num_rational::BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`. A zero denominator is rejected.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(num, den))
}

/// Exact conversion of an integral rational to `i64`.
pub fn rat_to_i64(r: &Rat) -> Option<i64> {
    if r.is_integer() {
        r.numer().to_i64()
    } else {
        None
    }
}

/// Serde adapters that write rationals as `"p/q"` strings.
pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let v = RatRepr::deserialize(d)?;
        v.into_rat().map_err(serde::de::Error::custom)
    }

    /// Accepts `"p/q"` strings as well as bare JSON integers.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RatRepr {
        Str(String),
        Int(i64),
    }

    impl RatRepr {
        pub(crate) fn into_rat(self) -> Result<Rat> {
            match self {
                RatRepr::Str(s) => parse_rat(&s),
                RatRepr::Int(i) => Ok(rat(i)),
            }
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
            let strings: Vec<String> = v.iter().map(|r| r.to_string()).collect();
            strings.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Rat>, D::Error> {
            let raw = Vec::<RatRepr>::deserialize(d)?;
            raw.into_iter()
                .map(|r| r.into_rat().map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod matrix {
        use super::*;

        pub fn serialize<S: Serializer>(
            m: &[Vec<Rat>],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let strings: Vec<Vec<String>> = m
                .iter()
                .map(|row| row.iter().map(|r| r.to_string()).collect())
                .collect();
            strings.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Vec<Rat>>, D::Error> {
            let raw = Vec::<Vec<RatRepr>>::deserialize(d)?;
            raw.into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|r| r.into_rat().map_err(serde::de::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}

/// Generalized binomial coefficient `C(m, k)` for any integer `m` and
/// `k >= 0`, i.e. `m (m-1) ... (m-k+1) / k!`.
pub fn binomial(m: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(m - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Univariate polynomial with exact rational coefficients. Index = exponent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(k: usize, c: Rat) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    /// Degree, with the zero polynomial at -1.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, n: i64) -> Rat {
        self.eval(&rat(n))
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// `true` iff every coefficient is a nonnegative integer.
    pub fn is_nonneg_integral(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.is_integer() && !c.is_negative())
    }

    /// Renders the polynomial in `var`, highest degree first, e.g. `n^2+2n+1`.
    pub fn format_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono);
            } else if abs.is_integer() {
                out.push_str(&format!("{abs}{mono}"));
            } else {
                out.push_str(&format!("({abs}){mono}"));
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with("x"))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_rat::vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        serde_rat::vec::deserialize(d).map(Poly::new)
    }
}

/// Quasipolynomial of period `p`: constituent `i` is used for arguments
/// congruent to `i` mod `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiPoly {
    period: usize,
    constituents: Vec<Poly>,
}

impl QuasiPoly {
    pub fn new(constituents: Vec<Poly>) -> Result<Self> {
        if constituents.is_empty() {
            return Err(Error::Empty("quasipolynomial needs at least one constituent"));
        }
        Ok(QuasiPoly {
            period: constituents.len(),
            constituents,
        })
    }

    pub fn from_poly(p: Poly) -> Self {
        QuasiPoly {
            period: 1,
            constituents: vec![p],
        }
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn constituents(&self) -> &[Poly] {
        &self.constituents
    }

    /// Constituent used at `n`; negative `n` maps to its residue in `0..p`.
    pub fn constituent(&self, n: i64) -> &Poly {
        &self.constituents[n.rem_euclid(self.period as i64) as usize]
    }

    pub fn evaluate(&self, n: i64) -> Rat {
        self.constituent(n).eval_int(n)
    }

    /// Largest constituent degree.
    pub fn degree(&self) -> i64 {
        self.constituents.iter().map(Poly::degree).max().unwrap_or(-1)
    }

    /// Smallest divisor `q` of the period such that constituents repeat with period `q`.
    pub fn minimal_period(&self) -> usize {
        let p = self.period;
        (1..=p)
            .filter(|q| p.is_multiple_of(*q))
            .find(|&q| (0..p).all(|i| self.constituents[i] == self.constituents[i % q]))
            .unwrap_or(p)
    }

    /// Same function, constituents collapsed to the minimal period.
    pub fn collapsed(&self) -> QuasiPoly {
        let q = self.minimal_period();
        QuasiPoly {
            period: q,
            constituents: self.constituents[..q].to_vec(),
        }
    }
}

/// Numerator of an Ehrhart series written over `(1 - x^p)^(d+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HStarData {
    #[serde(with = "serde_rat::vec")]
    pub coeffs: Vec<Rat>,
    pub dim: usize,
    pub period: usize,
    pub degree: i64,
    pub codegree: i64,
}

impl HStarData {
    pub fn new(coeffs: Vec<Rat>, dim: usize, period: usize) -> Self {
        let poly = Poly::new(coeffs);
        let degree = poly.degree();
        HStarData {
            coeffs: poly.coeffs().to_vec(),
            dim,
            period,
            degree,
            codegree: dim as i64 + 1 - degree,
        }
    }

    pub fn poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    pub fn coeff(&self, k: i64) -> Rat {
        if k < 0 {
            Rat::zero()
        } else {
            self.coeffs.get(k as usize).cloned().unwrap_or_else(Rat::zero)
        }
    }

    /// Coefficients as integers, `None` if any is fractional.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// `(1 - x^p)^(d+1)`, the denominator this numerator sits over.
    pub fn denominator(&self) -> Poly {
        one_minus_xp_pow(self.period, self.dim as u32 + 1)
    }
}

fn one_minus_xp_pow(p: usize, e: u32) -> Poly {
    let mut base = vec![Rat::zero(); p + 1];
    base[0] = Rat::one();
    base[p] = -Rat::one();
    Poly::new(base).pow(e)
}

/// Exact interpolation through `(argument, value)` samples (Newton form).
pub fn interpolate(samples: &[(i64, Rat)]) -> Result<Poly> {
    for (i, (a, _)) in samples.iter().enumerate() {
        if samples[..i].iter().any(|(b, _)| b == a) {
            return Err(Error::DuplicateArgument(*a));
        }
    }
    let xs: Vec<Rat> = samples.iter().map(|(a, _)| rat(*a)).collect();
    let mut table: Vec<Rat> = samples.iter().map(|(_, v)| v.clone()).collect();
    let n = samples.len();
    for level in 1..n {
        for i in (level..n).rev() {
            table[i] = (&table[i] - &table[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    // Horner over the Newton basis.
    let mut acc = Poly::zero();
    for i in (0..n).rev() {
        let shift = Poly::new(vec![-xs[i].clone(), Rat::one()]);
        acc = &(&acc * &shift) + &Poly::constant(table[i].clone());
    }
    Ok(acc)
}

/// Multiplies the count series by `(1 - x^p)^(d+1)`.
///
/// Needs at least `p(d+1) + 1` counts. Coefficients at index `p(d+1)` and
/// beyond are guard terms and must vanish.
pub fn hstar_from_counts(counts: &[Rat], d: usize, p: usize) -> Result<HStarData> {
    if p == 0 {
        return Err(Error::Precondition("period must be positive".into()));
    }
    let width = p * (d + 1);
    if counts.len() <= width {
        return Err(Error::InconsistentCounts(format!(
            "need more than {width} counts for d={d}, p={p}, got {}",
            counts.len()
        )));
    }
    if !counts[0].is_one() {
        return Err(Error::Precondition(format!(
            "counts[0] must be 1, got {}",
            counts[0]
        )));
    }
    let den = one_minus_xp_pow(p, d as u32 + 1);
    let product: Vec<Rat> = (0..counts.len())
        .map(|i| {
            (0..=i.min(den.degree().max(0) as usize))
                .map(|j| den.coeff(j) * &counts[i - j])
                .sum()
        })
        .collect();
    if let Some((i, c)) = product
        .iter()
        .enumerate()
        .skip(width)
        .find(|(_, c)| !c.is_zero())
    {
        return Err(Error::InconsistentCounts(format!(
            "guard coefficient at x^{i} is {c}, expected 0"
        )));
    }
    Ok(HStarData::new(product[..width].to_vec(), d, p))
}

/// `ehr(n) = sum_k h*_k C(n + d - k, d)` for a lattice h*-vector.
pub fn counts_from_hstar(h: &HStarData, n: i64) -> Result<Rat> {
    if h.period != 1 {
        return Err(Error::Unsupported(format!(
            "binomial-basis reconstruction needs period 1, got {}",
            h.period
        )));
    }
    let d = h.dim as i64;
    Ok(h.coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * Rat::from_integer(binomial(n + d - k as i64, d)))
        .sum())
}

/// `true` iff `coeff(k) == coeff(top - k)` for all `0 <= k <= top`.
pub fn is_palindromic(f: &Poly, top: i64) -> bool {
    if top < f.degree() {
        return false;
    }
    (0..=top).all(|k| f.coeff(k as usize) == f.coeff((top - k) as usize))
}

/// Least common multiple of the denominators of `values`.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat(x)).collect()
    }

    fn samples(v: &[(i64, i64)]) -> Vec<(i64, Rat)> {
        v.iter().map(|&(a, b)| (a, rat(b))).collect()
    }

    #[test]
    fn interpolate_square_counts() {
        let p = interpolate(&samples(&[(0, 1), (1, 4), (2, 9)])).unwrap();
        assert_eq!(p, Poly::from_ints(&[1, 2, 1]));
        let seg = interpolate(&samples(&[(0, 1), (1, 2)])).unwrap();
        assert_eq!(seg, Poly::from_ints(&[1, 1]));
    }

    #[test]
    fn interpolate_macmahon() {
        let p = interpolate(&samples(&[(0, 1), (1, 6), (2, 21), (3, 55), (4, 120)])).unwrap();
        assert_eq!(p.degree(), 4);
        for r in -10..30 {
            let expected = binomial(r + 5, 5) - binomial(r + 2, 5);
            assert_eq!(p.eval_int(r), Rat::from_integer(expected), "r = {r}");
        }
    }

    #[test]
    fn interpolate_rejects_duplicates() {
        let err = interpolate(&samples(&[(0, 1), (0, 2)])).unwrap_err();
        assert_eq!(err, Error::DuplicateArgument(0));
    }

    #[test]
    fn evaluate_negative_and_periodic() {
        let sq = QuasiPoly::from_poly(Poly::from_ints(&[1, 2, 1]));
        assert_eq!(sq.evaluate(-3), rat(4));

        // floor(n/2) + 1 for [0, 1/2]
        let even = Poly::new(vec![rat(1), ratio(1, 2)]);
        let odd = Poly::new(vec![ratio(1, 2), ratio(1, 2)]);
        let q = QuasiPoly::new(vec![even, odd]).unwrap();
        assert_eq!(q.evaluate(5), rat(3));
        assert_eq!(q.evaluate(-5), rat(-2));
        assert_eq!(q.minimal_period(), 2);

        let zero = QuasiPoly::from_poly(Poly::zero());
        assert_eq!(zero.evaluate(-7), rat(0));
        assert_eq!(zero.evaluate(11), rat(0));
    }

    #[test]
    fn minimal_period_collapses_repeats() {
        let p = Poly::from_ints(&[1, 1]);
        let q = QuasiPoly::new(vec![p.clone(), p.clone(), p]).unwrap();
        assert_eq!(q.minimal_period(), 1);
        assert_eq!(q.collapsed().period(), 1);
    }

    #[test]
    fn hstar_of_squares() {
        let h = hstar_from_counts(&ints(&[1, 4, 9, 16]), 2, 1).unwrap();
        assert_eq!(h.coeffs, ints(&[1, 1]));
        assert_eq!((h.degree, h.codegree), (1, 2));

        let h = hstar_from_counts(&ints(&[1, 9, 25, 49]), 2, 1).unwrap();
        assert_eq!(h.coeffs, ints(&[1, 6, 1]));

        // unimodular triangle: C(n+2, 2)
        let h = hstar_from_counts(&ints(&[1, 3, 6, 10, 15]), 2, 1).unwrap();
        assert_eq!(h.coeffs, ints(&[1]));
    }

    #[test]
    fn hstar_guard_detects_wrong_dimension() {
        // square counts claimed to be one-dimensional
        let err = hstar_from_counts(&ints(&[1, 4, 9, 16]), 1, 1).unwrap_err();
        assert!(matches!(err, Error::InconsistentCounts(_)));
        let err = hstar_from_counts(&ints(&[1, 4, 9]), 2, 1).unwrap_err();
        assert!(matches!(err, Error::InconsistentCounts(_)));
    }

    #[test]
    fn hstar_rational_half_segment() {
        // floor(n/2)+1 over (1-x^2)^2
        let counts = ints(&[1, 1, 2, 2, 3, 3]);
        let h = hstar_from_counts(&counts, 1, 2).unwrap();
        assert_eq!(h.coeffs, ints(&[1, 1]));
    }

    #[test]
    fn counts_from_hstar_examples() {
        let sq = HStarData::new(ints(&[1, 1]), 2, 1);
        assert_eq!(counts_from_hstar(&sq, 1).unwrap(), rat(4));
        let simplex = HStarData::new(ints(&[1]), 3, 1);
        assert_eq!(counts_from_hstar(&simplex, 2).unwrap(), rat(10));
        let cross = HStarData::new(ints(&[1, 6, 1]), 2, 1);
        assert_eq!(counts_from_hstar(&cross, 3).unwrap(), rat(49));
        let rational = HStarData::new(ints(&[1, 1]), 1, 2);
        assert!(matches!(
            counts_from_hstar(&rational, 1),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn palindromy() {
        assert!(is_palindromic(&Poly::from_ints(&[1, 1, 1]), 2));
        assert!(!is_palindromic(&Poly::from_ints(&[1, 1]), 2));
        assert!(is_palindromic(&Poly::from_ints(&[1, 6, 1]), 2));
        assert!(is_palindromic(&Poly::from_ints(&[1, 1]), 1));
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(Poly::from_ints(&[1, 2, 1]).format_with("n"), "n^2+2n+1");
        assert_eq!(Poly::from_ints(&[1, -2, 1]).format_with("n"), "n^2-2n+1");
        assert_eq!(
            Poly::new(vec![rat(1), ratio(1, 2)]).format_with("n"),
            "(1/2)n+1"
        );
        assert_eq!(Poly::zero().format_with("n"), "0");
        assert_eq!(parse_rat("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rat("7").unwrap(), rat(7));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn binomial_generalized() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(2, 5), BigInt::zero());
        assert_eq!(binomial(-1, 2), BigInt::from(1));
        assert_eq!(binomial(-3, 0), BigInt::one());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn interpolate_round_trip(values in proptest::collection::vec(-50i64..50, 1..7)) {
                let pts: Vec<(i64, Rat)> =
                    values.iter().enumerate().map(|(i, &v)| (i as i64 * 2 - 3, rat(v))).collect();
                let p = interpolate(&pts).unwrap();
                prop_assert!(p.degree() < pts.len() as i64);
                for (a, v) in &pts {
                    prop_assert_eq!(&p.eval_int(*a), v);
                }
            }

            #[test]
            fn hstar_counts_round_trip(h in proptest::collection::vec(0i64..6, 1..4), extra in 0usize..3) {
                let mut h = h;
                h[0] = 1;
                let d = h.len() - 1 + extra;
                let data = HStarData::new(ints(&h), d, 1);
                let counts: Vec<Rat> =
                    (0..(d as i64 + 3)).map(|n| counts_from_hstar(&data, n).unwrap()).collect();
                let back = hstar_from_counts(&counts, d, 1).unwrap();
                prop_assert_eq!(&back.coeffs, &data.coeffs);
                for (n, c) in counts.iter().enumerate() {
                    prop_assert_eq!(&counts_from_hstar(&back, n as i64).unwrap(), c);
                }
            }
        }
    }
}
