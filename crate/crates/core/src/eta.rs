//! Dedekind eta, eta at signed arguments, eta quotients and the `E₂` identity.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::One;

use crate::arith::sigma1;
use crate::error::{Error, Result};
use crate::qseries::{FracSeries, PowerSeries, RatSeries, Sign};

/// `∏_{n≥1} (1 - q^n)` to order `T`, from Euler's pentagonal number theorem.
pub fn euler_product(order: usize) -> PowerSeries {
    let mut out = PowerSeries::zero(order);
    if order == 0 {
        return out;
    }
    out.set_coeff(0, BigInt::one());
    for k in 1i64.. {
        let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let lo = (k * (3 * k - 1) / 2) as usize;
        let hi = (k * (3 * k + 1) / 2) as usize;
        if lo >= order {
            break;
        }
        out.set_coeff(lo, sign.clone());
        if hi < order {
            out.set_coeff(hi, sign);
        }
    }
    out
}

/// The same product by multiplying out every factor.
pub fn euler_product_dense(order: usize) -> PowerSeries {
    let mut out = PowerSeries::one(order);
    let one = BigInt::one();
    for n in 1..order {
        out.mul_one_minus_q_pow(n, &one);
    }
    out
}

/// `η(q) = q^{1/24} ∏ (1 - q^n)`, with the product known to order `T`.
pub fn dedekind_eta(order: usize) -> FracSeries {
    FracSeries::with_prefactor(Rational64::new(1, 24), &euler_product(order))
}

/// `η(±q^t) := q^{t/24} ∏ (1 - (±1)^n q^{tn})`, the product known to order `T`.
///
/// The prefactor always takes the positive branch of `(±q^t)^{1/24}`; the
/// sign only enters the product.
pub fn eta_signed(t: usize, sign: Sign, order: usize) -> FracSeries {
    assert!(t >= 1, "eta scale must be positive");
    let inner = euler_product(order.div_ceil(t)).subst_monomial(sign, t, Some(order));
    FracSeries::with_prefactor(Rational64::new(t as i64, 24), &inner)
}

/// `∏ η(q^t)^{r_t}`, stored with scales ascending and nonzero exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EtaQuotient {
    terms: Vec<(u64, i64)>,
}

impl EtaQuotient {
    /// Merges repeated scales and drops zero exponents.
    pub fn new<I: IntoIterator<Item = (u64, i64)>>(terms: I) -> Result<Self> {
        let mut merged = std::collections::BTreeMap::new();
        for (t, r) in terms {
            if t == 0 {
                return Err(Error::InvalidArgs("eta scale must be positive".into()));
            }
            *merged.entry(t).or_insert(0i64) += r;
        }
        Ok(EtaQuotient { terms: merged.into_iter().filter(|&(_, r)| r != 0).collect() })
    }

    pub fn terms(&self) -> &[(u64, i64)] {
        &self.terms
    }

    /// `Σ r_t`; the weight is half of it.
    pub fn weight_numerator(&self) -> i64 {
        self.terms.iter().map(|&(_, r)| r).sum()
    }

    /// `Σ t·r_t / 24`.
    pub fn leading_exponent(&self) -> Rational64 {
        Rational64::new(self.terms.iter().map(|&(t, r)| t as i64 * r).sum(), 24)
    }

    /// Exponent `g_m = Σ_{t | m} r_t` of `(1 - q^m)` in the product.
    pub fn exponent_at(&self, m: u64) -> i64 {
        self.terms.iter().filter(|&&(t, _)| m.is_multiple_of(t)).map(|&(_, r)| r).sum()
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(t, r)| {
                let arg = if t == 1 { "q".to_string() } else { format!("q^{t}") };
                if r == 1 {
                    format!("η({arg})")
                } else {
                    format!("η({arg})^{r}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `∏ (1 - q^{tn})^{r_t}` to order `T`, without the `q` prefactor.
pub fn eta_quotient_product(eq: &EtaQuotient, order: usize) -> PowerSeries {
    let mut out = PowerSeries::one(order);
    for &(t, r) in eq.terms() {
        let r = BigInt::from(r);
        let t = t as usize;
        let mut m = t;
        while m < order {
            out.mul_one_minus_q_pow(m, &r);
            m += t;
        }
    }
    out
}

/// The eta quotient as `q^{Σtr/24} · ∏ (1 - q^{tn})^{r_t}`, the product known to order `T`.
pub fn eta_quotient_series(eq: &EtaQuotient, order: usize) -> FracSeries {
    FracSeries::with_prefactor(eq.leading_exponent(), &eta_quotient_product(eq, order))
}

/// `E₂ = 1/24 - Σ σ₁(n) q^n` to order `T`.
pub fn e2_series(order: usize) -> RatSeries {
    let mut out = RatSeries::zero(order);
    if order > 0 {
        out.set_coeff(0, BigRational::new(BigInt::one(), BigInt::from(24)));
    }
    for n in 1..order {
        let s = sigma1(n as u64).expect("positive index");
        out.set_coeff(n, BigRational::from_integer(-BigInt::from(s)));
    }
    out
}

/// Outcome of comparing two sides of an identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub holds: bool,
    /// Smallest exponent where the sides differ.
    pub first_mismatch: Option<Rational64>,
    /// Exclusive bound up to which both sides were known.
    pub bound: Rational64,
}

impl IdentityCheck {
    /// Compares the two sides; both must be known strictly below `required`.
    pub fn compare(lhs: &FracSeries, rhs: &FracSeries, required: Rational64) -> Result<Self> {
        let bound = lhs.common_bound(rhs);
        if bound < required {
            return Err(Error::PrecisionExceeded(format!(
                "identity sides are only known below q^{bound}, q^{required} needed"
            )));
        }
        let first_mismatch = lhs.first_disagreement(rhs);
        Ok(IdentityCheck { holds: first_mismatch.is_none(), first_mismatch, bound })
    }
}

/// `q (dη/dq) / η` for `η = q^{1/24} P`, i.e. `1/24 + q P'/P`.
pub fn eta_log_derivative(product: &PowerSeries) -> Result<RatSeries> {
    let p = product.to_rational();
    let mut out = p.q_d_dq().div(&p)?;
    if out.order() > 0 {
        let c0 = out.coeffs()[0].clone() + BigRational::new(BigInt::one(), BigInt::from(24));
        out.set_coeff(0, c0);
    }
    Ok(out)
}

/// First index where `1/24 + q P'/P` differs from `E₂`, for a candidate product `P`.
pub fn e2_mismatch(product: &PowerSeries) -> Result<Option<usize>> {
    let lhs = eta_log_derivative(product)?;
    let rhs = e2_series(product.order());
    Ok((0..product.order()).find(|&n| lhs.coeffs()[n] != rhs.coeffs()[n]))
}

/// `q η'/η = E₂` to order `T`.
pub fn verify_e2_identity(order: usize) -> Result<IdentityCheck> {
    if order < 2 {
        return Err(Error::InvalidArgs("the E2 check needs order at least 2".into()));
    }
    let mismatch = e2_mismatch(&euler_product(order))?;
    Ok(IdentityCheck {
        holds: mismatch.is_none(),
        first_mismatch: mismatch.map(|n| Rational64::from_integer(n as i64)),
        bound: Rational64::from_integer(order as i64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{an_expansion, curve_from_quintuple, Quintuple};
    use crate::products::extract_exponents;
    use num_traits::Zero;

    fn ints(s: &PowerSeries) -> Vec<i64> {
        s.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    #[test]
    fn pentagonal_examples() {
        assert_eq!(ints(&euler_product(13)), vec![1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]);
        assert_eq!(ints(&euler_product(2)), vec![1, -1]);
        assert_eq!(euler_product(60), euler_product_dense(60));
    }

    #[test]
    fn pentagonal_matches_dense_to_500() {
        assert_eq!(euler_product(500), euler_product_dense(500));
    }

    #[test]
    fn eta_leading_exponents() {
        let eta = dedekind_eta(10);
        assert_eq!(eta.leading_exponent(), Rational64::new(1, 24));
        assert_eq!(eta.coeff_at(Rational64::new(1, 24)).unwrap(), BigInt::one());
        assert_eq!(eta.pow(24).unwrap().leading_exponent(), Rational64::from_integer(1));
        let eta6 = eta.subst(Sign::Plus, 6).unwrap().pow(4).unwrap();
        assert_eq!(eta6.leading_exponent(), Rational64::from_integer(1));
    }

    #[test]
    fn signed_eta() {
        let e = eta_signed(2, Sign::Minus, 12);
        // ∏ (1 - (-1)^n q^{2n}) = 1 + q^2 - q^4 - q^10 - ...
        let inner: Vec<i64> = (0..6).map(|k| {
            let ex = Rational64::new(1, 12) + Rational64::from_integer(2 * k);
            i64::try_from(&e.coeff_at(ex).unwrap()).unwrap()
        }).collect();
        assert_eq!(inner, vec![1, 1, -1, 0, 0, -1]);
        assert_eq!(e.pow(12).unwrap().leading_exponent(), Rational64::from_integer(1));
        for t in 1..=8 {
            let via_subst = dedekind_eta(40).subst(Sign::Plus, t).unwrap();
            assert_eq!(eta_signed(t, Sign::Plus, 40 * t), via_subst, "t = {t}");
            let minus = dedekind_eta(40).subst(Sign::Minus, t).unwrap();
            assert_eq!(eta_signed(t, Sign::Minus, 40 * t), minus, "t = {t}");
        }
    }

    #[test]
    fn quotient_normalization() {
        let eq = EtaQuotient::new([(2, -1), (1, 2), (2, 0), (3, 1), (3, -1)]).unwrap();
        assert_eq!(eq.terms(), &[(1, 2), (2, -1)]);
        assert_eq!(eq.leading_exponent(), Rational64::zero());
        assert_eq!(eq.weight_numerator(), 1);
        assert_eq!(eq.to_string(), "η(q)^2 η(q^2)^-1");
        assert!(EtaQuotient::new([(0, 1)]).is_err());
    }

    #[test]
    fn eta6_to_the_fourth_is_f36() {
        let eq = EtaQuotient::new([(6, 4)]).unwrap();
        let s = eta_quotient_series(&eq, 30).to_power_series().unwrap();
        let f36 = an_expansion(&curve_from_quintuple(Quintuple([0, 0, 0, 0, 1])).unwrap(), 31).unwrap();
        assert_eq!(s, f36.truncate(s.order()));
        let nz: Vec<(usize, i64)> = ints(&s).into_iter().enumerate().filter(|&(_, c)| c != 0).collect();
        assert_eq!(nz[..4], [(1, 1), (7, -4), (13, 2), (19, 8)]);
    }

    #[test]
    fn delta_shape() {
        let eq = EtaQuotient::new([(1, 24)]).unwrap();
        let s = eta_quotient_series(&eq, 10);
        assert_eq!(s.leading_exponent(), Rational64::from_integer(1));
        let tau: Vec<i64> = ints(&s.to_power_series().unwrap());
        assert_eq!(&tau[..6], &[0, 1, -24, 252, -1472, 4830]);
    }

    #[test]
    fn recovered_exponents_are_periodic() {
        let cases = [
            vec![(6u64, 4i64)],
            vec![(1, 2), (11, 2)],
            vec![(2, 2), (4, -1), (8, 2), (16, -1)],
            vec![(1, 1), (2, 1), (7, 1), (14, 1)],
            vec![(1, 3), (3, -2), (9, 3)],
        ];
        for terms in cases {
            let eq = EtaQuotient::new(terms).unwrap();
            let f = eta_quotient_product(&eq, 60).shift(1);
            let g = extract_exponents(&f).unwrap();
            let period: u64 = eq.terms().iter().fold(1, |l, &(t, _)| num_integer::lcm(l, t));
            for m in 1..=g.upto() as u64 {
                let gm = i64::try_from(g.get(m as usize).unwrap()).unwrap();
                assert_eq!(gm, eq.exponent_at(m), "{eq} at {m}");
                if m > period {
                    assert_eq!(g.get(m as usize), g.get((m - period) as usize), "{eq} period at {m}");
                }
            }
        }
    }

    #[test]
    fn e2_examples() {
        let e = e2_series(6);
        let expect = [(1, 24), (-1, 1), (-3, 1), (-4, 1), (-7, 1), (-6, 1)];
        for (c, (n, d)) in e.coeffs().iter().zip(expect) {
            assert_eq!(*c, BigRational::new(BigInt::from(n), BigInt::from(d)));
        }
        for p in [2i64, 3, 5, 7, 11, 13] {
            assert_eq!(e2_series(20).coeffs()[p as usize], BigRational::from_integer(BigInt::from(-(p + 1))));
        }
        assert_eq!(e2_series(1).order(), 1);
    }

    #[test]
    fn e2_identity() {
        assert!(verify_e2_identity(300).unwrap().holds);
        assert!(verify_e2_identity(2).unwrap().holds);
        let mut p = euler_product(50);
        p.set_coeff(2, BigInt::zero());
        assert_eq!(e2_mismatch(&p).unwrap(), Some(2));
    }
}
