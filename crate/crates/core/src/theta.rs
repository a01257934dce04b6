//! Ramanujan's theta function `f(a, b)` at signed monomial arguments, the
//! Jacobi triple product, `φ`, `ψ`, and the conductor-256 block `η₂₅₆`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use rayon::prelude::*;

use crate::elliptic::Quintuple;
use crate::error::{Error, Result};
use crate::eta::{eta_signed, IdentityCheck};
use crate::products::block_series;
use crate::qseries::{FracSeries, PowerSeries, Sign};
use crate::registry::compute_block;

/// `sign · q^{num/den}` with `num/den > 0` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonomialArg {
    sign: Sign,
    num: u64,
    den: u64,
}

impl MonomialArg {
    pub fn new(sign: Sign, num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidArgs(format!("theta argument exponent {num}/{den} must be positive")));
        }
        let g = num.gcd(&den);
        Ok(MonomialArg { sign, num: num / g, den: den / g })
    }

    /// `sign · q^k`.
    pub fn q_pow(sign: Sign, k: u64) -> Self {
        Self::new(sign, k, 1).expect("positive exponent")
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn exponent(&self) -> Rational64 {
        Rational64::new(self.num as i64, self.den as i64)
    }
}

impl fmt::Display for MonomialArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign == Sign::Minus { "-" } else { "" };
        match (self.num, self.den) {
            (1, 1) => write!(f, "{s}q"),
            (n, 1) => write!(f, "{s}q^{n}"),
            (n, d) => write!(f, "{s}q^({n}/{d})"),
        }
    }
}

impl FromStr for MonomialArg {
    type Err = Error;

    /// Accepts `q`, `-q^3`, `q^(1/2)`, `-q^3/2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgs(format!("cannot parse theta argument {s:?}"));
        let t = s.trim();
        let (sign, rest) = match t.strip_prefix('-') {
            Some(r) => (Sign::Minus, r.trim()),
            None => (Sign::Plus, t.strip_prefix('+').unwrap_or(t).trim()),
        };
        let rest = rest.strip_prefix('q').ok_or_else(bad)?;
        if rest.is_empty() {
            return Self::new(sign, 1, 1);
        }
        let e = rest.strip_prefix('^').ok_or_else(bad)?;
        let e = e.trim_start_matches('(').trim_end_matches(')');
        let (n, d) = match e.split_once('/') {
            Some((n, d)) => (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
            None => (e.trim().parse().map_err(|_| bad())?, 1),
        };
        Self::new(sign, n, d)
    }
}

/// Common denominator `L` and the numerators of both exponents over it.
fn over_common(a: MonomialArg, b: MonomialArg) -> (u64, u64, u64) {
    let l = a.den.lcm(&b.den);
    (l, a.num * (l / a.den), b.num * (l / b.den))
}

/// `f(a, b) = Σ_{n∈ℤ} a^{n(n+1)/2} b^{n(n-1)/2}`, every term below `q^T`.
pub fn theta_sum(a: MonomialArg, b: MonomialArg, order: usize) -> FracSeries {
    let (l, ea, eb) = over_common(a, b);
    let cap = order as u64 * l;
    let mut s = PowerSeries::zero(cap as usize);
    let mut add = |n: i64| -> bool {
        let up = (n * (n + 1) / 2) as u64;
        let down = (n * (n - 1) / 2) as u64;
        let e = ea * up + eb * down;
        if e >= cap {
            return false;
        }
        let sign = a.sign.pow(up).mul(b.sign.pow(down));
        let c = s.coeffs()[e as usize].clone() + BigInt::from(sign.as_i64());
        s.set_coeff(e as usize, c);
        true
    };
    // both triangular numbers grow with |n|, so each direction stops at the first overflow
    for n in 0i64.. {
        if !add(n) {
            break;
        }
    }
    for n in 1i64.. {
        if !add(-n) {
            break;
        }
    }
    FracSeries::new(l, 0, s)
}

/// `(-a; ab)_∞ (-b; ab)_∞ (ab; ab)_∞`, every factor expanded below `q^T`.
pub fn theta_product(a: MonomialArg, b: MonomialArg, order: usize) -> FracSeries {
    let (l, ea, eb) = over_common(a, b);
    let cap = order * l as usize;
    let step = (ea + eb) as usize;
    let ab_sign = a.sign.mul(b.sign);
    let mut s = PowerSeries::one(cap);
    // (x; y)_∞ = ∏_{i≥0} (1 - x y^i) with x = c·q^{e}, y = ab
    let mut pochhammer = |sign: Sign, e: usize| {
        let mut i = 0u64;
        let mut k = e;
        while k < cap {
            let c = sign.mul(ab_sign.pow(i));
            s.mul_one_plus_term(k, &BigInt::from(-c.as_i64()));
            k += step;
            i += 1;
        }
    };
    pochhammer(a.sign.mul(Sign::Minus), ea as usize);
    pochhammer(b.sign.mul(Sign::Minus), eb as usize);
    pochhammer(ab_sign, step);
    FracSeries::new(l, 0, s)
}

/// The argument pairs checked by [`verify_triple_product`].
pub fn standard_pairs() -> Vec<(MonomialArg, MonomialArg)> {
    let q = |s, k| MonomialArg::q_pow(s, k);
    vec![
        (q(Sign::Plus, 1), q(Sign::Plus, 1)),
        (q(Sign::Plus, 1), q(Sign::Plus, 3)),
        (q(Sign::Minus, 1), q(Sign::Minus, 3)),
        (q(Sign::Plus, 2), q(Sign::Plus, 2)),
        (q(Sign::Plus, 1), q(Sign::Plus, 5)),
    ]
}

/// Sum side against product side for every pair, below `q^T`.
pub fn verify_triple_product(
    pairs: &[(MonomialArg, MonomialArg)],
    order: usize,
) -> Result<Vec<(MonomialArg, MonomialArg, IdentityCheck)>> {
    let required = Rational64::from_integer(order as i64);
    pairs
        .par_iter()
        .map(|&(a, b)| {
            let check = IdentityCheck::compare(&theta_sum(a, b, order), &theta_product(a, b, order), required)?;
            Ok((a, b, check))
        })
        .collect()
}

/// `φ(q) = f(q, q) = Σ q^{n²}`.
pub fn phi(order: usize) -> PowerSeries {
    let q = MonomialArg::q_pow(Sign::Plus, 1);
    integral(theta_sum(q, q, order), order)
}

/// `ψ(q) = f(q, q³) = Σ_{n≥0} q^{n(n+1)/2}`.
pub fn psi(order: usize) -> PowerSeries {
    theta_integral(MonomialArg::q_pow(Sign::Plus, 1), MonomialArg::q_pow(Sign::Plus, 3), order)
}

/// `f(a, b)` for integer-exponent arguments, as an ordinary series of order `T`.
pub fn theta_integral(a: MonomialArg, b: MonomialArg, order: usize) -> PowerSeries {
    integral(theta_sum(a, b, order), order)
}

fn integral(s: FracSeries, order: usize) -> PowerSeries {
    if s.is_zero() {
        return PowerSeries::zero(order);
    }
    let p = s.to_power_series().expect("integer exponents");
    // normalization may shorten the tail only when it is identically zero
    let mut out = PowerSeries::zero(order);
    for (i, c) in p.coeffs().iter().enumerate().take(order) {
        out.set_coeff(i, c.clone());
    }
    out
}

/// The model used for `η₂₅₆`.
pub const ETA256_CURVE: Quintuple = Quintuple([0, 0, 0, -2, 0]);

/// `η₂₅₆` coefficients at `q^{1/4}·q^0 … q^{1/4}·q^12`, as displayed in the source.
pub const ETA256_PRINTED: [i64; 13] = [1, -4, -3, -4, -2, 0, 11, -4, 0, 12, -10, 12, 7];

/// `η₂₅₆²(q²)` at `q^1, q^3, …, q^21`, as displayed in the source.
pub const WEIGHT4_PRINTED: [(usize, i64); 11] = [
    (1, 1),
    (3, -8),
    (5, 10),
    (7, 16),
    (9, 37),
    (11, 40),
    (13, 50),
    (15, -80),
    (17, -30),
    (19, -40),
    (21, -128),
];

/// `η₂₅₆ = q^{1/4} ∏ (1 - q^n)^{a_n}` from a conductor-256 model, product to order `T`.
pub fn eta256_from(curve: Quintuple, order: usize) -> Result<FracSeries> {
    let a = compute_block(curve, 1, 4, order.saturating_sub(1))?;
    block_series(&a, 1, 4, order)
}

/// `(k, printed, computed)` for the coefficient of `q^{1/4 + k}` in `η₂₅₆`, `k = 0 … 12`.
pub fn eta256_printed_comparison() -> Result<Vec<(usize, i64, BigInt)>> {
    let e = eta256_series(ETA256_PRINTED.len())?;
    ETA256_PRINTED
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let ex = Rational64::new(1, 4) + Rational64::from_integer(k as i64);
            Ok((k, v, e.coeff_at(ex)?))
        })
        .collect()
}

/// `η₂₅₆` from [`ETA256_CURVE`], product to order `T`.
pub fn eta256_series(order: usize) -> Result<FracSeries> {
    eta256_from(ETA256_CURVE, order)
}

/// `∏ (1 - q^n)^{a_n}` for `η₂₅₆`, as an ordinary series of order `T`.
fn eta256_product(order: usize) -> Result<PowerSeries> {
    let a = compute_block(ETA256_CURVE, 1, 4, order.saturating_sub(1))?;
    let mut s = PowerSeries::one(order);
    for n in 1..order {
        s.mul_one_minus_q_pow(n, &a[n - 1]);
    }
    Ok(s)
}

/// `c_n`, the coefficient of `q^n` in `η₂₅₆²(q²) = q·P(q²)²`, for `n < T`.
pub fn weight4_coefficients(order: usize) -> Result<Vec<BigInt>> {
    let half = order / 2 + 1;
    let p2 = eta256_product(half)?.square();
    Ok((0..order)
        .map(|n| if n % 2 == 1 { p2.coeffs()[(n - 1) / 2].clone() } else { BigInt::zero() })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weight4Report {
    pub order: usize,
    /// `(n, printed, computed)` for every displayed coefficient.
    pub printed: Vec<(usize, i64, BigInt)>,
    pub printed_ok: bool,
    /// Coprime `(m, n)`, `1 < m < n`, `mn ≤ T`, with `c_{mn} ≠ c_m c_n`.
    pub multiplicativity_failures: Vec<(usize, usize)>,
    pub pairs_checked: usize,
}

impl Weight4Report {
    pub fn holds(&self) -> bool {
        self.printed_ok && self.multiplicativity_failures.is_empty()
    }
}

/// Displayed coefficients of `η₂₅₆²(q²)` and `c_{mn} = c_m c_n` for coprime `mn ≤ T`.
pub fn verify_weight4(order: usize) -> Result<Weight4Report> {
    if order < 22 {
        return Err(Error::InvalidArgs("the weight-4 check needs order at least 22".into()));
    }
    let c = weight4_coefficients(order + 1)?;
    let printed: Vec<(usize, i64, BigInt)> =
        WEIGHT4_PRINTED.iter().map(|&(n, v)| (n, v, c[n].clone())).collect();
    let printed_ok = printed.iter().all(|(_, v, got)| BigInt::from(*v) == *got)
        && (0..=21).filter(|n| n % 2 == 0).all(|n| c[n].is_zero());
    let mut failures = Vec::new();
    let mut pairs = 0;
    for m in 2..=order {
        for n in (m + 1)..=order / m {
            if m.gcd(&n) != 1 {
                continue;
            }
            pairs += 1;
            if c[m * n] != &c[m] * &c[n] {
                failures.push((m, n));
            }
        }
    }
    Ok(Weight4Report { order, printed, printed_ok, multiplicativity_failures: failures, pairs_checked: pairs })
}

/// Both `η₂₅₆` identities; `eight` is the constant `8` appearing in each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eta256Identities {
    /// `q^{-1/2} η₂₅₆²(q) = φ²(q²) ψ²(-q²) (φ⁴(q²) - 8q ψ⁴(-q²))`.
    pub theta_form: IdentityCheck,
    /// `η₂₅₆²(q) = (η¹²(-q²) - 8 η¹²(q⁴)) / (η²(-q²) η²(q⁴))` with every `η`
    /// carrying its `q^{t/24}`. Written with bare products `∏(1 - q^{tn})`
    /// the `8` picks up a factor `q`.
    pub eta_form: IdentityCheck,
}

impl Eta256Identities {
    pub fn holds(&self) -> bool {
        self.theta_form.holds && self.eta_form.holds
    }
}

pub fn verify_eta256_identities(order: usize) -> Result<Eta256Identities> {
    verify_eta256_identities_with(order, &BigInt::from(8))
}

/// The identities with `8` replaced by `eight`, checked below `q^T` (theta
/// form) and `q^{1/2+T}` (eta form).
pub fn verify_eta256_identities_with(order: usize, eight: &BigInt) -> Result<Eta256Identities> {
    let t = order;
    let half = Rational64::new(1, 2);
    let eta256 = eta256_series(t + 1)?;
    let sq = eta256.pow(2)?;

    let lhs1 = sq.mul(&FracSeries::monomial(-half, t as i64 + 1));
    let phi2 = phi(t).subst_monomial(Sign::Plus, 2, Some(t));
    let psi_m2 = psi_minus_q2(t);
    let inner = phi2.pow_int(4)?.sub(&psi_m2.pow_int(4)?.shift(1).truncate(t).scale(eight));
    let rhs1 = phi2.square().mul(&psi_m2.square()).mul(&inner);
    let theta_form = IdentityCheck::compare(
        &lhs1,
        &FracSeries::from_power_series(&rhs1),
        Rational64::from_integer(t as i64),
    )?;

    let em = eta_signed(2, Sign::Minus, t + 1);
    let e4 = eta_signed(4, Sign::Plus, t + 1);
    let num = em.pow(12)?.sub(&e4.pow(12)?.scale(eight));
    let den = em.pow(2)?.mul(&e4.pow(2)?);
    let rhs2 = num.div(&den)?;
    let eta_form = IdentityCheck::compare(&sq, &rhs2, half + Rational64::from_integer(t as i64))?;

    Ok(Eta256Identities { theta_form, eta_form })
}

/// `ψ(-q²)` by substituting into the sum form of `ψ`, order `T`.
pub fn psi_minus_q2(order: usize) -> PowerSeries {
    psi(order.div_ceil(2)).subst_monomial(Sign::Minus, 2, Some(order))
}
