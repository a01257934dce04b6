//! Product exponents `g_n` in `f = q ∏ (1 - q^n)^{g_n}` and the building-block
//! profile `g_{ť·n} = ř·a_n` read off from them.
//!
//! With `u = f/q`, the logarithmic derivative is `E_f = 1 + q·u'/u`, and
//! `1 - E_f = Σ_n n·g_n·q^n/(1 - q^n)`, so the ordinary coefficient `c_m` of
//! `1 - E_f` is the divisor sum `Σ_{d|m} d·g_d`. Möbius inversion recovers
//! `m·g_m` from the `c_d`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, mobius};
use crate::error::{Error, Result};
use crate::qseries::{FracSeries, PowerSeries};

/// `g_1 … g_upto`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentSequence {
    g: Vec<BigInt>,
}

impl ExponentSequence {
    pub fn new(g: Vec<BigInt>) -> Self {
        ExponentSequence { g }
    }

    pub fn from_ints<I: IntoIterator<Item = i64>>(g: I) -> Self {
        ExponentSequence { g: g.into_iter().map(BigInt::from).collect() }
    }

    pub fn upto(&self) -> usize {
        self.g.len()
    }

    /// `g_n` for `1 ≤ n ≤ upto`.
    pub fn get(&self, n: usize) -> Option<&BigInt> {
        n.checked_sub(1).and_then(|i| self.g.get(i))
    }

    pub fn values(&self) -> &[BigInt] {
        &self.g
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneViolation {
    /// `a_n ≤ 0`.
    NonPositive { index: usize, value: BigInt },
    /// `a_n ≤ a_{n-1}`.
    NotIncreasing { index: usize },
}

/// A building block `q^{1/(ř ť)} ∏ (1 - q^n)^{a_n}` whose `ř`-th power at
/// scale `ť` reproduces the exponents it was read from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockProfile {
    pub r_check: u64,
    pub t_check: u64,
    /// `a_1 … a_K`.
    pub a: Vec<BigInt>,
    pub gcd_prefix: BigInt,
    pub monotone_report: Vec<MonotoneViolation>,
}

impl BlockProfile {
    /// Builds a profile directly from a block sequence.
    pub fn from_sequence(r_check: u64, t_check: u64, a: Vec<BigInt>) -> Self {
        let gcd_prefix = a.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let monotone_report = monotone_report(&a);
        BlockProfile { r_check, t_check, a, gcd_prefix, monotone_report }
    }

    /// `a_n` for `1 ≤ n ≤ K`.
    pub fn a(&self, n: usize) -> Option<&BigInt> {
        n.checked_sub(1).and_then(|i| self.a.get(i))
    }

    /// Leading exponent `1/(ř ť)` of the block.
    pub fn leading_exponent(&self) -> Rational64 {
        Rational64::new(1, (self.r_check * self.t_check) as i64)
    }
}

fn monotone_report(a: &[BigInt]) -> Vec<MonotoneViolation> {
    let mut out = Vec::new();
    for (i, v) in a.iter().enumerate() {
        let index = i + 1;
        if !v.is_positive() {
            out.push(MonotoneViolation::NonPositive { index, value: v.clone() });
        }
        if i > 0 && v <= &a[i - 1] {
            out.push(MonotoneViolation::NotIncreasing { index });
        }
    }
    out
}

fn check_monic(f: &PowerSeries) -> Result<()> {
    if f.order() < 2 || !f.coeffs()[0].is_zero() || !f.coeffs()[1].is_one() {
        return Err(Error::NonMonicSeries);
    }
    Ok(())
}

/// `E_f = q·f'/f` for `f = q + O(q²)`, computed as `1 + q·u'/u` with `u = f/q`.
/// The result has order `order(f) - 1`.
pub fn log_derivative_quotient(f: &PowerSeries) -> Result<PowerSeries> {
    check_monic(f)?;
    let u = f.unshift(1)?;
    let mut e = u.q_d_dq().mul(&u.inverse()?);
    e.set_coeff(0, BigInt::one());
    Ok(e)
}

/// Coefficients `c_1 … c_N` of `1 - E_f`.
fn lambert_coefficients(f: &PowerSeries) -> Result<Vec<BigInt>> {
    let e = log_derivative_quotient(f)?;
    Ok(e.coeffs()[1..].iter().map(|c| -c).collect())
}

/// Exponents `g_1 … g_{T-2}` of a series of order `T` by Möbius inversion of
/// `c_m = Σ_{d|m} d·g_d`.
pub fn extract_exponents(f: &PowerSeries) -> Result<ExponentSequence> {
    let c = lambert_coefficients(f)?;
    let mut g = Vec::with_capacity(c.len());
    for m in 1..=c.len() {
        let mut acc = BigInt::zero();
        for d in divisors(m as u64)? {
            match mobius(m as u64 / d)? {
                1 => acc += &c[d as usize - 1],
                -1 => acc -= &c[d as usize - 1],
                _ => {}
            }
        }
        let (q, r) = acc.div_rem(&BigInt::from(m));
        if !r.is_zero() {
            return Err(Error::InternalIntegralityFailure(m));
        }
        g.push(q);
    }
    Ok(ExponentSequence { g })
}

/// Exponents by successive division: after removing the factors for
/// `n < m`, the coefficient of `q^m` in `u` is `-g_m`.
pub fn extract_exponents_by_peeling(f: &PowerSeries) -> Result<ExponentSequence> {
    check_monic(f)?;
    let mut u = f.unshift(1)?;
    let mut g = Vec::with_capacity(u.order().saturating_sub(1));
    for m in 1..u.order() {
        let gm = -u.coeffs()[m].clone();
        u.mul_one_minus_q_pow(m, &-&gm);
        g.push(gm);
    }
    Ok(ExponentSequence { g })
}

/// `q·∏_{n<T} (1 - q^n)^{g_n}` to order `T`; needs `T ≤ upto + 2`.
pub fn reconstruct(g: &ExponentSequence, order: usize) -> Result<PowerSeries> {
    if order > g.upto() + 2 {
        return Err(Error::PrecisionExceeded(format!(
            "order {order} needs g_1..g_{}, only {} known",
            order.saturating_sub(2),
            g.upto()
        )));
    }
    if order == 0 {
        return Ok(PowerSeries::zero(0));
    }
    let mut u = PowerSeries::one(order - 1);
    for n in 1..order.saturating_sub(1) {
        u.mul_one_minus_q_pow(n, &g.g[n - 1]);
    }
    Ok(u.shift(1))
}

/// Reads `a_n = g_{ť·n}/ř`, checking that `g_m = 0` off multiples of `ť`.
pub fn block_profile(g: &ExponentSequence, r_check: u64, t_check: u64) -> Result<BlockProfile> {
    if r_check == 0 || t_check == 0 {
        return Err(Error::InvalidArgs("ř and ť must be positive".into()));
    }
    let r = BigInt::from(r_check);
    let t = t_check as usize;
    let mut a = Vec::with_capacity(g.upto() / t);
    for (i, gm) in g.g.iter().enumerate() {
        let m = i + 1;
        if m % t != 0 {
            if !gm.is_zero() {
                return Err(Error::BlockMismatch(format!("g_{m} = {gm} is nonzero but {t} does not divide {m}")));
            }
            continue;
        }
        let (q, rem) = gm.div_rem(&r);
        if !rem.is_zero() {
            return Err(Error::BlockMismatch(format!("ř = {r_check} does not divide g_{m} = {gm}")));
        }
        a.push(q);
    }
    Ok(BlockProfile::from_sequence(r_check, t_check, a))
}

/// `(ř, ť)`: `ť` is the gcd of the indices carrying a nonzero exponent,
/// `ř` the gcd of the nonzero values.
pub fn infer_block(g: &ExponentSequence) -> Result<(u64, u64)> {
    let mut t = 0u64;
    let mut r = BigInt::zero();
    for (i, gm) in g.g.iter().enumerate() {
        if !gm.is_zero() {
            t = t.gcd(&(i as u64 + 1));
            r = r.gcd(gm);
        }
    }
    if t == 0 {
        return Err(Error::ZeroSequence);
    }
    let r: u64 = r.try_into().map_err(|_| Error::InvalidArgs("ř does not fit in 64 bits".into()))?;
    Ok((r, t))
}

/// The building block `η(q) = q^{1/(ř ť)} ∏_{n<T} (1 - q^n)^{a_n}`, product known to order `T`.
pub fn block_series(a: &[BigInt], r_check: u64, t_check: u64, order: usize) -> Result<FracSeries> {
    if order > a.len() + 1 {
        return Err(Error::PrecisionExceeded(format!(
            "block product to order {order} needs a_1..a_{}, only {} known",
            order - 1,
            a.len()
        )));
    }
    let mut s = PowerSeries::one(order);
    for n in 1..order {
        s.mul_one_minus_q_pow(n, &a[n - 1]);
    }
    Ok(FracSeries::with_prefactor(Rational64::new(1, (r_check * t_check) as i64), &s))
}

/// One factor `η_i^{r_i}(q^{t_i})` of a decomposition.
#[derive(Debug, Clone)]
pub struct BlockPower<'a> {
    pub block: &'a BlockProfile,
    pub r: i64,
    pub t: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogderCheck {
    pub holds: bool,
    /// Smallest `m` at which `1 - E_f` and the Lambert double sum disagree.
    pub first_mismatch: Option<usize>,
    pub order: usize,
}

/// Compares `1 - E_f` with `Σ_m (Σ_{t_i|m} r_i·a_{i,m/t_i})·m·q^m/(1 - q^m)`
/// through `q^M`.
pub fn generalized_logder_check(blocks: &[BlockPower<'_>], f: &PowerSeries, order: usize) -> Result<LogderCheck> {
    for b in blocks {
        let need = order / b.t as usize;
        if b.block.a.len() < need {
            return Err(Error::PrecisionExceeded(format!(
                "block (ř={}, ť={}) supplies a_1..a_{}, need a_{need}",
                b.block.r_check,
                b.block.t_check,
                b.block.a.len()
            )));
        }
    }
    if f.order() < order + 2 {
        return Err(Error::PrecisionExceeded(format!("series of order {} cannot reach q^{order} of 1 - E_f", f.order())));
    }
    let c = lambert_coefficients(&f.truncate(order + 2))?;

    // exponent of q^m/(1 - q^m) times m
    let mut weighted = vec![BigInt::zero(); order + 1];
    for b in blocks {
        let t = b.t as usize;
        for m in (t..=order).step_by(t) {
            weighted[m] += BigInt::from(b.r) * &b.block.a[m / t - 1] * BigInt::from(m);
        }
    }
    // ordinary coefficients of the Lambert series
    let mut lambert = vec![BigInt::zero(); order + 1];
    for m in 1..=order {
        if weighted[m].is_zero() {
            continue;
        }
        for k in (m..=order).step_by(m) {
            lambert[k] += &weighted[m];
        }
    }
    let first_mismatch = (1..=order).find(|&k| lambert[k] != c[k - 1]);
    Ok(LogderCheck { holds: first_mismatch.is_none(), first_mismatch, order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{an_expansion, curve_from_quintuple, Quintuple};
    use proptest::prelude::*;

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    fn f37(order: usize) -> PowerSeries {
        an_expansion(&curve_from_quintuple(Quintuple([0, 0, 1, -1, 0])).unwrap(), order).unwrap()
    }

    #[test]
    fn logder_examples() {
        let f = PowerSeries::from_ints([0, 1, -1, 0, 0, 0, 0, 0]);
        let e = log_derivative_quotient(&f).unwrap();
        assert_eq!(e, PowerSeries::from_ints([1, -1, -1, -1, -1, -1, -1]));
        let q = PowerSeries::from_ints([0, 1, 0, 0]);
        assert_eq!(log_derivative_quotient(&q).unwrap(), PowerSeries::from_ints([1, 0, 0]));
        assert!(matches!(
            log_derivative_quotient(&PowerSeries::from_ints([1, 1, 0])),
            Err(Error::NonMonicSeries)
        ));
        assert!(matches!(
            log_derivative_quotient(&PowerSeries::from_ints([0, 2, 0])),
            Err(Error::NonMonicSeries)
        ));
    }

    #[test]
    fn logder_of_f37_matches_divisor_sums() {
        // g = 2·(1, 2, 3, 8, …) so c_1 = 2, c_2 = 2 + 2·4 = 10
        let e = log_derivative_quotient(&f37(14)).unwrap();
        assert_eq!(e.coeff(1), Some(&BigInt::from(-2)));
        assert_eq!(e.coeff(2), Some(&BigInt::from(-10)));
        let g = extract_exponents(&f37(14)).unwrap();
        for m in 1..=12usize {
            let s: BigInt = divisors(m as u64)
                .unwrap()
                .into_iter()
                .map(|d| BigInt::from(d) * g.get(d as usize).unwrap())
                .sum();
            assert_eq!(-e.coeffs()[m].clone(), s);
        }
    }

    #[test]
    fn extract_examples() {
        let f = PowerSeries::from_ints([0, 1, -1, 0, 0, 0, 0]);
        assert_eq!(ints(extract_exponents(&f).unwrap().values()), vec![1, 0, 0, 0, 0]);

        let delta = reconstruct(&ExponentSequence::from_ints(vec![24; 20]), 22).unwrap();
        assert_eq!(ints(extract_exponents(&delta).unwrap().values()), vec![24; 20]);

        let g = extract_exponents(&f37(26)).unwrap();
        let printed = [1, 2, 3, 8, 16, 41, 97, 242, 598, 1532, 3898, 10067];
        let doubled: Vec<i64> = printed.iter().map(|x| 2 * x).collect();
        assert_eq!(ints(&g.values()[..12]), doubled);
    }

    #[test]
    fn reconstruct_examples() {
        let one = ExponentSequence::from_ints([1]);
        assert_eq!(reconstruct(&one, 3).unwrap(), PowerSeries::from_ints([0, 1, -1]));
        assert!(matches!(reconstruct(&one, 4), Err(Error::PrecisionExceeded(_))));

        // (1 - q^6)^4 (1 - q^12)^4 shifted by q
        let mut g = vec![0i64; 12];
        g[5] = 4;
        g[11] = 4;
        let f = reconstruct(&ExponentSequence::from_ints(g), 14).unwrap();
        let mut expect = vec![0i64; 14];
        expect[1] = 1;
        expect[7] = -4;
        expect[13] = 2;
        assert_eq!(f, PowerSeries::from_ints(expect));
    }

    #[test]
    fn roundtrip_on_f37() {
        let f = f37(40);
        let g = extract_exponents(&f).unwrap();
        assert_eq!(reconstruct(&g, 40).unwrap(), f);
        assert_eq!(extract_exponents_by_peeling(&f).unwrap(), g);
    }

    #[test]
    fn block_profile_examples() {
        let mut g36 = vec![0i64; 72];
        for m in (6..=72).step_by(6) {
            g36[m - 1] = 4;
        }
        let g36 = ExponentSequence::from_ints(g36);
        let p = block_profile(&g36, 4, 6).unwrap();
        assert_eq!(ints(&p.a), vec![1; 12]);
        assert_eq!(p.gcd_prefix, BigInt::one());
        assert_eq!(infer_block(&g36).unwrap(), (4, 6));

        let a101 = [0, 2, 2, 2, 4, 7, 10, 18, 30, 52, 84, 152];
        let g101 = ExponentSequence::from_ints(a101);
        let p = block_profile(&g101, 1, 1).unwrap();
        assert!(p.monotone_report.contains(&MonotoneViolation::NonPositive { index: 1, value: BigInt::zero() }));
        assert!(p.monotone_report.contains(&MonotoneViolation::NotIncreasing { index: 3 }));
        assert!(p.monotone_report.contains(&MonotoneViolation::NotIncreasing { index: 4 }));
        assert_eq!(infer_block(&g101).unwrap(), (1, 1));

        let g37 = extract_exponents(&f37(26)).unwrap();
        assert_eq!(infer_block(&g37).unwrap(), (2, 1));
        assert!(matches!(block_profile(&g37, 2, 2), Err(Error::BlockMismatch(_))));
        assert!(matches!(block_profile(&g37, 3, 1), Err(Error::BlockMismatch(_))));
        assert!(matches!(infer_block(&ExponentSequence::from_ints([0, 0])), Err(Error::ZeroSequence)));
    }

    #[test]
    fn logder_check_on_single_blocks() {
        let f43 = an_expansion(&curve_from_quintuple(Quintuple([0, 1, 1, 0, 0])).unwrap(), 30).unwrap();
        let g = extract_exponents(&f43).unwrap();
        let block = block_profile(&g, 1, 1).unwrap();
        let check = generalized_logder_check(&[BlockPower { block: &block, r: 1, t: 1 }], &f43, 12).unwrap();
        assert!(check.holds);

        let f36 = an_expansion(&curve_from_quintuple(Quintuple([0, 0, 0, 0, 1])).unwrap(), 40).unwrap();
        let block36 = BlockProfile::from_sequence(4, 6, vec![BigInt::one(); 6]);
        let check = generalized_logder_check(&[BlockPower { block: &block36, r: 4, t: 6 }], &f36, 36).unwrap();
        assert!(check.holds);

        let mut perturbed = block.clone();
        perturbed.a[2] += 1;
        let check = generalized_logder_check(&[BlockPower { block: &perturbed, r: 1, t: 1 }], &f43, 12).unwrap();
        assert_eq!(check.first_mismatch, Some(3));

        let mut perturbed36 = block36.clone();
        perturbed36.a[2] += 1;
        let check = generalized_logder_check(&[BlockPower { block: &perturbed36, r: 4, t: 6 }], &f36, 36).unwrap();
        assert_eq!(check.first_mismatch, Some(18));

        let short = BlockProfile::from_sequence(1, 1, vec![BigInt::one(); 3]);
        assert!(matches!(
            generalized_logder_check(&[BlockPower { block: &short, r: 1, t: 1 }], &f43, 12),
            Err(Error::PrecisionExceeded(_))
        ));
    }

    #[test]
    fn exponents_of_products_add() {
        let a = ExponentSequence::from_ints([1, -2, 0, 3, 1, 0, 0, -1, 2, 0]);
        let b = ExponentSequence::from_ints([0, 1, 1, -1, 5, 2, 0, 0, -3, 1]);
        let fa = reconstruct(&a, 12).unwrap();
        let fb = reconstruct(&b, 12).unwrap();
        // (q·A)(q·B) = q·(q·A·B): divide one q back out
        let prod = fa.mul(&fb).unshift(1).unwrap();
        let g = extract_exponents(&prod).unwrap();
        let sum: Vec<BigInt> = a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect();
        assert_eq!(g.values(), &sum[..g.upto()]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn reconstruct_then_extract_is_identity(g in prop::collection::vec(-10i64..=10, 24)) {
            let seq = ExponentSequence::from_ints(g);
            let f = reconstruct(&seq, 26).unwrap();
            prop_assert_eq!(extract_exponents(&f).unwrap(), seq.clone());
            prop_assert_eq!(extract_exponents_by_peeling(&f).unwrap(), seq);
        }

        #[test]
        fn extraction_is_integral_on_monic_series(tail in prop::collection::vec(-1000i64..1000, 38)) {
            let mut v = vec![0, 1];
            v.extend(tail);
            let f = PowerSeries::from_ints(v);
            let g = extract_exponents(&f).unwrap();
            prop_assert_eq!(reconstruct(&g, 40).unwrap(), f);
        }
    }
}
