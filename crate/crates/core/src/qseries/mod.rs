//! Truncated formal power series with exact coefficients.
//!
//! A [`Series`] of order `T` knows the coefficients of `q^0 … q^{T-1}`; every
//! operation returns the minimum order of its inputs (scaled by `t` for the
//! substitution `q ↦ ±q^t`), so no coefficient is ever invented.
//!
//! [`PowerSeries`] carries big integers and is used everywhere; [`RatSeries`]
//! carries big rationals and only appears where a `1/24` shows up.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::binomial_int;
use crate::error::{Error, Result};

mod frac;

pub use frac::FracSeries;

/// Exact coefficient ring.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + Send
    + Sync
where
    for<'a> &'a Self: Add<&'a Self, Output = Self>
        + Sub<&'a Self, Output = Self>
        + Mul<&'a Self, Output = Self>,
{
    fn from_int(n: i64) -> Self;

    fn from_bigint(b: &BigInt) -> Self;

    /// Multiplicative inverse if `self` is a unit of the ring.
    fn unit_inverse(&self) -> Option<Self>;

    /// Constant term as an integer, for error reporting.
    fn as_bigint(&self) -> BigInt;

    /// Exact division by a nonzero integer, `None` if the quotient leaves the ring.
    fn exact_div_int(&self, d: i64) -> Option<Self>;
}

impl Coeff for BigInt {
    fn from_int(n: i64) -> Self {
        BigInt::from(n)
    }

    fn from_bigint(b: &BigInt) -> Self {
        b.clone()
    }

    fn unit_inverse(&self) -> Option<Self> {
        if self.is_one() || (-self).is_one() {
            Some(self.clone())
        } else {
            None
        }
    }

    fn as_bigint(&self) -> BigInt {
        self.clone()
    }

    fn exact_div_int(&self, d: i64) -> Option<Self> {
        let d = BigInt::from(d);
        let (q, r) = num_integer::Integer::div_rem(self, &d);
        r.is_zero().then_some(q)
    }
}

impl Coeff for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_bigint(b: &BigInt) -> Self {
        BigRational::from_integer(b.clone())
    }

    fn unit_inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn as_bigint(&self) -> BigInt {
        self.to_integer()
    }

    fn exact_div_int(&self, d: i64) -> Option<Self> {
        (d != 0).then(|| self / BigRational::from_integer(BigInt::from(d)))
    }
}

/// `+1` or `-1`, the sign in a monomial argument `±q^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `sign^n`.
    pub fn pow(self, n: u64) -> Sign {
        match self {
            Sign::Minus if n % 2 == 1 => Sign::Minus,
            _ => Sign::Plus,
        }
    }

    pub fn mul(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Truncated power series `Σ_{n<order} c_n q^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series<C> {
    coeffs: Vec<C>,
}

pub type PowerSeries = Series<BigInt>;
pub type RatSeries = Series<BigRational>;

impl<C: Coeff> Series<C>
where
    for<'a> &'a C: Add<&'a C, Output = C> + Sub<&'a C, Output = C> + Mul<&'a C, Output = C>,
{
    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        Series { coeffs }
    }

    pub fn from_ints<I: IntoIterator<Item = i64>>(coeffs: I) -> Self {
        Series { coeffs: coeffs.into_iter().map(C::from_int).collect() }
    }

    pub fn zero(order: usize) -> Self {
        Series { coeffs: vec![C::zero(); order] }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(C::one(), 0, order)
    }

    /// `c·q^k` to the given order (zero if `k ≥ order`).
    pub fn monomial(c: C, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k < order {
            s.coeffs[k] = c;
        }
        s
    }

    /// `1 - q^n` to the given order.
    pub fn one_minus_q_pow(n: usize, order: usize) -> Self {
        let mut s = Self::one(order);
        if n < order {
            s.coeffs[n] = &s.coeffs[n] - &C::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Coefficient of `q^n`, `None` beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Option<&C> {
        self.coeffs.get(n)
    }

    pub fn set_coeff(&mut self, n: usize, c: C) {
        self.coeffs[n] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Series { coeffs: self.coeffs[..order.min(self.order())].to_vec() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Series { coeffs: (0..n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Series { coeffs: (0..n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect() }
    }

    pub fn neg(&self) -> Self {
        Series { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn scale(&self, c: &C) -> Self {
        Series { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiplication by `q^k`; the order grows by `k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Series { coeffs }
    }

    /// Division by `q^k`, requiring the first `k` coefficients to vanish.
    pub fn unshift(&self, k: usize) -> Result<Self> {
        if k > self.order() || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(Error::InvalidArgs(format!("series is not divisible by q^{k}")));
        }
        Ok(Series { coeffs: self.coeffs[k..].to_vec() })
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = vec![C::zero(); n];
        for (i, a) in self.coeffs[..n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        Series { coeffs: out }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Multiplicative inverse; the constant term must be a unit.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.order();
        if n == 0 {
            return Ok(self.clone());
        }
        let inv0 = self.coeffs[0]
            .unit_inverse()
            .ok_or_else(|| Error::NonUnitConstantTerm(self.coeffs[0].as_bigint()))?;
        let mut out: Vec<C> = Vec::with_capacity(n);
        out.push(inv0.clone());
        for k in 1..n {
            let mut acc = C::zero();
            for j in 1..=k {
                let a = &self.coeffs[j];
                if !a.is_zero() {
                    acc += &(a * &out[k - j]);
                }
            }
            out.push(-(&acc * &inv0));
        }
        Ok(Series { coeffs: out })
    }

    /// `self / other` via the inverse of `other`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    /// `A^g` for any integer `g`; negative `g` needs a unit constant term.
    pub fn pow_int(&self, g: i64) -> Result<Self> {
        let n = self.order();
        if g == 0 {
            return Ok(Self::one(n));
        }
        if let Some((k, c)) = self.binomial_shape() {
            if self.coeffs[0].is_one() {
                return Ok(self.binomial_pow(k, &c, g));
            }
        }
        let (base, e) = if g < 0 {
            (self.inverse()?, g.unsigned_abs())
        } else {
            (self.clone(), g as u64)
        };
        Ok(base.pow_u64(e))
    }

    fn pow_u64(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.order());
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.square();
            }
        }
        acc
    }

    /// `Some((k, c))` when the series is `a0 + c·q^k` with a single
    /// non-constant term.
    fn binomial_shape(&self) -> Option<(usize, C)> {
        let mut found = None;
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            if !c.is_zero() {
                if found.is_some() {
                    return None;
                }
                found = Some((i, c.clone()));
            }
        }
        found
    }

    /// `(1 + c·q^k)^g = Σ_j C(g, j) c^j q^{kj}`.
    fn binomial_pow(&self, k: usize, c: &C, g: i64) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        let gb = BigInt::from(g);
        let mut cj = C::one();
        let mut j = 0;
        while j * k < n {
            let b = binomial_int(&gb, j);
            if b.is_zero() {
                break;
            }
            let b = C::from_bigint(&b);
            out.coeffs[j * k] = &b * &cj;
            cj = &cj * c;
            j += 1;
        }
        out
    }

    /// In-place multiplication by `(1 - q^n)^g` using the sparse binomial
    /// expansion; cost `O(order²/n)` regardless of `|g|`.
    pub fn mul_one_minus_q_pow(&mut self, n: usize, g: &BigInt) {
        let order = self.order();
        if n == 0 || n >= order || g.is_zero() {
            return;
        }
        let mut terms: Vec<(usize, C)> = Vec::new();
        let mut j = 0;
        while j * n < order {
            let mut b = binomial_int(g, j);
            if b.is_zero() {
                break;
            }
            if j % 2 == 1 {
                b = -b;
            }
            terms.push((j * n, C::from_bigint(&b)));
            j += 1;
        }
        let mut out = vec![C::zero(); order];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (shift, b) in &terms {
                if i + shift >= order {
                    break;
                }
                out[i + shift] += &(a * b);
            }
        }
        self.coeffs = out;
    }

    /// In-place multiplication by `1 + c·q^k`, `k ≥ 1`.
    pub fn mul_one_plus_term(&mut self, k: usize, c: &C) {
        assert!(k >= 1, "term exponent must be positive");
        for i in (k..self.order()).rev() {
            let t = &self.coeffs[i - k] * c;
            self.coeffs[i] += &t;
        }
    }

    /// The operator `q·d/dq`: coefficient `c_n ↦ n·c_n`.
    pub fn q_d_dq(&self) -> Self {
        Series {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * &C::from_int(n as i64))
                .collect(),
        }
    }

    /// Substitution `q ↦ sign·q^t`; the order becomes `order·t`, capped by
    /// `max_order` when given.
    pub fn subst_monomial(&self, sign: Sign, t: usize, max_order: Option<usize>) -> Self {
        assert!(t >= 1, "substitution scale must be positive");
        let mut order = self.order() * t;
        if let Some(m) = max_order {
            order = order.min(m);
        }
        let mut out = vec![C::zero(); order];
        for (n, c) in self.coeffs.iter().enumerate() {
            let k = n * t;
            if k >= order {
                break;
            }
            out[k] = match sign.pow(n as u64) {
                Sign::Plus => c.clone(),
                Sign::Minus => -c.clone(),
            };
        }
        Series { coeffs: out }
    }

    /// Every `step`-th coefficient, i.e. the inverse of `q ↦ q^step` on
    /// series supported on multiples of `step`.
    pub fn decimate(&self, step: usize) -> Self {
        Series { coeffs: self.coeffs.iter().step_by(step).cloned().collect() }
    }
}

impl PowerSeries {
    pub fn to_rational(&self) -> RatSeries {
        Series { coeffs: self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect() }
    }

    /// Largest absolute coefficient, handy for diagnostics.
    pub fn max_abs(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

impl RatSeries {
    /// The integer series, if every coefficient is integral.
    pub fn to_integer(&self) -> Option<PowerSeries> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(Series::from_coeffs)
    }
}

impl<C: fmt::Display + Zero> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<C: fmt::Display + Zero> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})q")?,
                _ => write!(f, "({c})q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.coeffs.len())
    }
}
