//! Small dense exact linear algebra over the rationals and integers.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ratpoly::{denominator_lcm, Rat};

/// Reduced row echelon form. Zero rows are dropped; returns the pivot columns.
pub(crate) fn rref(mut rows: Vec<Vec<Rat>>, ncols: usize) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let delta = &f * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

pub(crate) fn rank(rows: &[Vec<Rat>], ncols: usize) -> usize {
    rref(rows.to_vec(), ncols).1.len()
}

/// Basis of `{x : rows · x = 0}`.
pub(crate) fn nullspace(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let (red, pivots) = rref(rows.to_vec(), ncols);
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rat::zero(); ncols];
            v[free] = Rat::one();
            for (row, &pc) in red.iter().zip(&pivots) {
                v[pc] = -row[free].clone();
            }
            v
        })
        .collect()
}

/// Solves the square system `a · x = b`; `None` if singular.
pub(crate) fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (red, pivots) = rref(aug, n + 1);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(red.into_iter().map(|row| row[n].clone()).collect())
}

pub(crate) fn inverse(a: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = a.len();
    let aug: Vec<Vec<Rat>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let (red, pivots) = rref(aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(red.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub(crate) fn det(a: &[Vec<Rat>]) -> Rat {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        let inv = m[c][c].recip();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let delta = &f * &m[c][j];
                m[i][j] -= delta;
            }
        }
    }
    d
}

/// Bareiss fraction-free determinant.
pub(crate) fn det_int(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

pub(crate) fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dot_int_rat(a: &[BigInt], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .map(|(x, y)| Rat::from_integer(x.clone()) * y)
        .sum()
}

pub(crate) fn sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn to_rat_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect()
}

/// Scales a rational vector to a primitive integer vector (same direction).
pub(crate) fn primitive_integer(v: &[Rat]) -> Vec<BigInt> {
    let l = denominator_lcm(v);
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Rat::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub(crate) fn big_to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Unsupported(format!("integer {x} exceeds 64-bit range")))
}

pub(crate) fn big_to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128()
        .ok_or_else(|| Error::Unsupported(format!("integer {x} exceeds 128-bit range")))
}

/// Index of the lattice spanned by `gens` inside `Z^n ∩ span(gens)`:
/// the gcd of all maximal minors. Zero for dependent generators.
pub(crate) fn lattice_index(gens: &[Vec<i64>]) -> BigInt {
    let k = gens.len();
    if k == 0 {
        return BigInt::one();
    }
    let n = gens[0].len();
    let mut g = BigInt::zero();
    for rows in (0..n).combinations(k) {
        let m: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|&r| gens.iter().map(|v| BigInt::from(v[r])).collect())
            .collect();
        g = g.gcd(&det_int(&m));
        if g.is_one() {
            break;
        }
    }
    g.abs()
}

/// Coordinates on an affine subspace: the subspace is the graph of an affine
/// map from the `cols` coordinates to the full space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct AffineChart {
    pub origin: Vec<Rat>,
    /// Row-reduced direction basis; `basis[i][cols[j]] = δ_ij`.
    pub basis: Vec<Vec<Rat>>,
    pub cols: Vec<usize>,
}

impl AffineChart {
    pub fn from_points(points: &[Vec<Rat>]) -> Self {
        let origin = points[0].clone();
        let n = origin.len();
        let dirs: Vec<Vec<Rat>> = points[1..].iter().map(|p| sub(p, &origin)).collect();
        let (basis, cols) = rref(dirs, n);
        AffineChart {
            origin,
            basis,
            cols,
        }
    }

    /// Linear span of `vectors` (origin at zero).
    pub fn linear_span(vectors: &[Vec<Rat>], n: usize) -> Self {
        let (basis, cols) = rref(vectors.to_vec(), n);
        AffineChart {
            origin: vec![Rat::zero(); n],
            basis,
            cols,
        }
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn ambient(&self) -> usize {
        self.origin.len()
    }

    pub fn project(&self, x: &[Rat]) -> Vec<Rat> {
        self.cols.iter().map(|&c| x[c].clone()).collect()
    }

    pub fn lift(&self, y: &[Rat]) -> Vec<Rat> {
        let mut x = self.origin.clone();
        for (i, b) in self.basis.iter().enumerate() {
            let t = &y[i] - &self.origin[self.cols[i]];
            if t.is_zero() {
                continue;
            }
            for (xj, bj) in x.iter_mut().zip(b) {
                *xj += &t * bj;
            }
        }
        x
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.lift(&self.project(x)) == x
    }

    pub fn scaled(&self, t: &Rat) -> Self {
        AffineChart {
            origin: self.origin.iter().map(|x| x * t).collect(),
            basis: self.basis.clone(),
            cols: self.cols.clone(),
        }
    }

    /// Integer form of `lift`: `x_j = (constant_j + Σ_i coef_j[i] y_i) / den`.
    pub fn int_lift(&self) -> Result<IntLift> {
        let n = self.ambient();
        let k = self.dim();
        let mut constant: Vec<Rat> = self.origin.clone();
        let mut coef = vec![vec![Rat::zero(); k]; n];
        for (i, b) in self.basis.iter().enumerate() {
            let o = &self.origin[self.cols[i]];
            for j in 0..n {
                coef[j][i] = b[j].clone();
                constant[j] -= o * &b[j];
            }
        }
        let den = denominator_lcm(constant.iter().chain(coef.iter().flatten()));
        let scale = Rat::from_integer(den.clone());
        let to_int = |r: &Rat| big_to_i128(&(r * &scale).to_integer());
        Ok(IntLift {
            den: big_to_i128(&den)?,
            constant: constant.iter().map(to_int).collect::<Result<_>>()?,
            coef: coef
                .iter()
                .map(|row| row.iter().map(to_int).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug)]
pub(crate) struct IntLift {
    pub den: i128,
    pub constant: Vec<i128>,
    pub coef: Vec<Vec<i128>>,
}

impl IntLift {
    /// Lifts chart coordinates; `None` if the lifted point is not integral.
    pub fn lift(&self, y: &[i64]) -> Option<Vec<i64>> {
        self.constant
            .iter()
            .zip(&self.coef)
            .map(|(c, row)| {
                let num: i128 = c + row.iter().zip(y).map(|(a, &b)| a * b as i128).sum::<i128>();
                (num % self.den == 0).then(|| (num / self.den) as i64)
            })
            .collect()
    }
}

/// Calls `f` on every integer point of the box `lo..=hi`.
pub(crate) fn for_each_in_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return;
    }
    let mut cur = lo.to_vec();
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            if i == cur.len() {
                return;
            }
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
            i += 1;
        }
    }
}

pub(crate) fn floor_i64(r: &Rat) -> Result<i64> {
    big_to_i64(&r.floor().to_integer())
}

pub(crate) fn ceil_i64(r: &Rat) -> Result<i64> {
    big_to_i64(&r.ceil().to_integer())
}
