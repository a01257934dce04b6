//! Series with a rational leading exponent, `q^{e/D} · S(q^{1/D})`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};

use super::{PowerSeries, Sign};
use crate::error::{Error, Result};

/// `q^{offset/denom} · S(x)` with `x = q^{1/denom}`.
///
/// `S` has order `T`, so the object is known for every exponent strictly
/// below [`FracSeries::bound`] `= (offset + T)/denom`. Representations are
/// normalized: `S` is either identically empty (a pure `O(q^bound)`) or has a
/// nonzero constant term, and `gcd(denom, offset, support of S) = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FracSeries {
    denom: u64,
    offset: i64,
    series: PowerSeries,
}

impl FracSeries {
    pub fn new(denom: u64, offset: i64, series: PowerSeries) -> Self {
        assert!(denom >= 1, "denominator must be positive");
        Self::normalized(denom, offset, series)
    }

    /// An ordinary power series in `q`.
    pub fn from_power_series(series: &PowerSeries) -> Self {
        Self::new(1, 0, series.clone())
    }

    /// `q^exponent · series(q)` where `series` has integer exponents.
    pub fn with_prefactor(exponent: Rational64, series: &PowerSeries) -> Self {
        let d = *exponent.denom() as u64;
        Self::new(d, *exponent.numer(), series.subst_monomial(Sign::Plus, d as usize, None))
    }

    /// `q^exponent` known up to (but excluding) `q^bound`.
    pub fn monomial(exponent: Rational64, bound: i64) -> Self {
        let order = (Rational64::from_integer(bound) - exponent).ceil().to_integer().max(0) as usize;
        Self::with_prefactor(exponent, &PowerSeries::one(order))
    }

    fn normalized(denom: u64, offset: i64, series: PowerSeries) -> Self {
        let d = denom as i64;
        let Some(v) = series.valuation() else {
            // Nothing nonzero is known: keep only the precision bound.
            let bound = (offset + series.order() as i64).div_euclid(d);
            return FracSeries { denom: 1, offset: bound, series: PowerSeries::zero(0) };
        };
        let offset = offset + v as i64;
        let series = series.unshift(v).expect("leading zeros");
        let mut g = d.gcd(&offset);
        for (k, c) in series.coeffs().iter().enumerate() {
            if g == 1 {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(&(k as i64));
            }
        }
        if g <= 1 {
            return FracSeries { denom, offset, series };
        }
        let g = g as usize;
        let order = series.order() / g;
        FracSeries {
            denom: denom / g as u64,
            offset: offset / g as i64,
            series: series.decimate(g).truncate(order),
        }
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn series(&self) -> &PowerSeries {
        &self.series
    }

    /// `true` when no nonzero coefficient is known.
    pub fn is_zero(&self) -> bool {
        self.series.order() == 0
    }

    /// Exponent of the leading term.
    pub fn leading_exponent(&self) -> Rational64 {
        Rational64::new(self.offset, self.denom as i64)
    }

    /// Exclusive upper limit of the known exponents.
    pub fn bound(&self) -> Rational64 {
        Rational64::new(self.offset + self.series.order() as i64, self.denom as i64)
    }

    /// Offset and series re-expressed over the denominator `l`, a multiple of `denom`.
    fn over(&self, l: u64) -> (i64, PowerSeries) {
        let m = l / self.denom;
        (self.offset * m as i64, self.series.subst_monomial(Sign::Plus, m as usize, None))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let l = self.denom.lcm(&other.denom);
        let (ea, sa) = self.over(l);
        let (eb, sb) = other.over(l);
        Self::new(l, ea + eb, sa.mul(&sb))
    }

    pub fn add(&self, other: &Self) -> Self {
        let l = self.denom.lcm(&other.denom);
        let (ea, sa) = self.over(l);
        let (eb, sb) = other.over(l);
        let e = ea.min(eb);
        let sum = sa.shift((ea - e) as usize).add(&sb.shift((eb - e) as usize));
        Self::new(l, e, sum)
    }

    pub fn neg(&self) -> Self {
        FracSeries { denom: self.denom, offset: self.offset, series: self.series.neg() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.denom, self.offset, self.series.scale(c))
    }

    /// Multiplication by `q^k` for an integer `k`.
    pub fn mul_q_pow(&self, k: i64) -> Self {
        Self::new(self.denom, self.offset + k * self.denom as i64, self.series.clone())
    }

    /// `A^r`; negative `r` needs a unit leading coefficient.
    pub fn pow(&self, r: i64) -> Result<Self> {
        if r == 0 {
            let order = self.series.order() / self.denom as usize;
            return Ok(Self::new(1, 0, PowerSeries::one(order)));
        }
        if r < 0 && self.is_zero() {
            return Err(Error::NonUnitConstantTerm(BigInt::zero()));
        }
        Ok(Self::new(self.denom, self.offset * r, self.series.pow_int(r)?))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.pow(-1)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Substitution `q ↦ sign·q^t`.
    ///
    /// The integer part of the prefactor exponent picks up `sign`; the
    /// fractional part uses the positive branch, so `q^{1/24} ↦ q^{t/24}`.
    /// With `sign = -1` every term of `S` must sit at an integer distance
    /// from the prefactor.
    pub fn subst(&self, sign: Sign, t: usize) -> Result<Self> {
        let d = self.denom as usize;
        let int_part = self.offset.div_euclid(self.denom as i64);
        let base = sign.pow(int_part.rem_euclid(2) as u64);
        let mut out = PowerSeries::zero(self.series.order() * t);
        for (k, c) in self.series.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = if sign == Sign::Plus {
                Sign::Plus
            } else if k % d == 0 {
                base.mul(sign.pow((k / d) as u64))
            } else {
                return Err(Error::IncompatibleExponent {
                    exponent: Rational64::new(self.offset + k as i64, self.denom as i64),
                    denom: self.denom,
                });
            };
            out.set_coeff(k * t, if s == Sign::Plus { c.clone() } else { -c.clone() });
        }
        Ok(Self::new(self.denom, self.offset * t as i64, out))
    }

    /// Coefficient of `q^exponent`.
    pub fn coeff_at(&self, exponent: Rational64) -> Result<BigInt> {
        let scaled = exponent * Rational64::from_integer(self.denom as i64);
        if !scaled.is_integer() {
            return Err(Error::IncompatibleExponent { exponent, denom: self.denom });
        }
        let k = scaled.to_integer() - self.offset;
        if k < 0 {
            return Ok(BigInt::zero());
        }
        self.series.coeff(k as usize).cloned().ok_or_else(|| {
            Error::PrecisionExceeded(format!("q^{exponent} is beyond the bound q^{}", self.bound()))
        })
    }

    /// The ordinary power series, if every exponent is a nonnegative integer.
    pub fn to_power_series(&self) -> Result<PowerSeries> {
        if self.denom != 1 || self.offset < 0 {
            return Err(Error::IncompatibleExponent {
                exponent: self.leading_exponent(),
                denom: self.denom,
            });
        }
        Ok(self.series.shift(self.offset as usize))
    }

    /// The smallest exponent, below both precision bounds, at which the two
    /// objects differ.
    pub fn first_disagreement(&self, other: &Self) -> Option<Rational64> {
        let l = self.denom.lcm(&other.denom);
        let (ea, sa) = self.over(l);
        let (eb, sb) = other.over(l);
        let bound = (ea + sa.order() as i64).min(eb + sb.order() as i64);
        let zero = BigInt::zero();
        let at = |e: i64, s: &PowerSeries, n: i64| -> BigInt {
            if n < e {
                zero.clone()
            } else {
                s.coeff((n - e) as usize).cloned().unwrap_or_default()
            }
        };
        (ea.min(eb)..bound)
            .find(|&n| at(ea, &sa, n) != at(eb, &sb, n))
            .map(|n| Rational64::new(n, l as i64))
    }

    /// Exclusive bound up to which both objects are known.
    pub fn common_bound(&self, other: &Self) -> Rational64 {
        self.bound().min(other.bound())
    }
}

impl fmt::Debug for FracSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FracSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lead = self.leading_exponent();
        if lead.is_zero() && self.denom.is_one() {
            write!(f, "{}", self.series)
        } else {
            write!(f, "q^({lead}) * [{} in q^(1/{})]", self.series, self.denom)
        }
    }
}
