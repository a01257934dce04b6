//! Elliptic curves over ℚ in long Weierstrass form and the coefficients
//! `f_n` of the attached weight-two newform.
//!
//! `f_p` comes from counting points over `F_p` at good primes and from the
//! reduction type at bad ones; the rest follows from the Hecke recursion.
//! Models are assumed globally minimal, conductors are never computed.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{legendre, primes_below, smallest_prime_factors};
use crate::error::{Error, Result};
use crate::qseries::PowerSeries;

/// `[a1, a2, a3, a4, a6]` for `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Quintuple(pub [i64; 5]);

impl fmt::Display for Quintuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = self.0;
        write!(f, "[{a1},{a2},{a3},{a4},{a6}]")
    }
}

impl std::str::FromStr for Quintuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim_matches(|c| c == '[' || c == ']').split(',').collect();
        if parts.len() != 5 {
            return Err(Error::InvalidArgs(format!("expected five comma-separated integers, got {s:?}")));
        }
        let mut a = [0i64; 5];
        for (slot, p) in a.iter_mut().zip(parts) {
            *slot = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgs(format!("not an integer: {p:?}")))?;
        }
        Ok(Quintuple(a))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    pub a: Quintuple,
    pub b2: BigInt,
    pub b4: BigInt,
    pub b6: BigInt,
    pub b8: BigInt,
    pub c4: BigInt,
    pub c6: BigInt,
    pub disc: BigInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionKind {
    Good,
    MultiplicativeSplit,
    MultiplicativeNonsplit,
    Additive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionInfo {
    pub prime: u64,
    pub kind: ReductionKind,
    pub ap: i64,
}

/// Builds the curve and its standard invariants.
pub fn curve_from_quintuple(q: Quintuple) -> Result<Curve> {
    let [a1, a2, a3, a4, a6] = q.0.map(BigInt::from);
    let b2 = &a1 * &a1 + 4 * &a2;
    let b4 = 2 * &a4 + &a1 * &a3;
    let b6 = &a3 * &a3 + 4 * &a6;
    let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
    let c4 = &b2 * &b2 - 24 * &b4;
    let b2_cubed: BigInt = &b2 * &b2 * &b2;
    let c6: BigInt = -b2_cubed + 36 * &b2 * &b4 - 216 * &b6;
    let b2b2b8: BigInt = &b2 * &b2 * &b8;
    let disc: BigInt = -b2b2b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6;
    if disc.is_zero() {
        return Err(Error::SingularCurve);
    }
    Ok(Curve { a: q, b2, b4, b6, b8, c4, c6, disc })
}

impl Curve {
    fn reduced(&self, p: u64) -> [u64; 5] {
        self.a.0.map(|x| x.rem_euclid(p as i64) as u64)
    }

    fn divides(p: u64, n: &BigInt) -> bool {
        (n % BigInt::from(p)).is_zero()
    }

    fn valuation(p: u64, n: &BigInt) -> u32 {
        if n.is_zero() {
            return u32::MAX;
        }
        let p = BigInt::from(p);
        let mut m = n.abs();
        let mut v = 0;
        loop {
            let (q, r) = m.div_rem(&p);
            if !r.is_zero() {
                return v;
            }
            m = q;
            v += 1;
        }
    }
}

/// `#E(F_p)` including the point at infinity.
///
/// Odd `p` uses `p + 1 + Σ_x χ((a1·x + a3)² + 4(x³ + a2·x² + a4·x + a6))`
/// with the quadratic character tabulated once per prime; `p = 2` is
/// enumerated directly.
pub fn count_points(c: &Curve, p: u64) -> u64 {
    if p == 2 {
        return count_points_naive(c, 2);
    }
    let [a1, a2, a3, a4, a6] = c.reduced(p);
    let mut chi = vec![-1i64; p as usize];
    chi[0] = 0;
    for x in 1..p {
        chi[(x * x % p) as usize] = 1;
    }
    let mut sum = 0i64;
    for x in 0..p {
        let lin = (a1 * x + a3) % p;
        let cubic = (((x + a2) % p * x % p + a4) % p * x % p + a6) % p;
        let d = (lin * lin + 4 * cubic) % p;
        sum += chi[d as usize];
    }
    (p as i64 + 1 + sum) as u64
}

/// Reference count by enumerating every `(x, y) ∈ F_p²`.
pub fn count_points_naive(c: &Curve, p: u64) -> u64 {
    let [a1, a2, a3, a4, a6] = c.reduced(p);
    let mut n = 1;
    for x in 0..p {
        let rhs = (((x + a2) % p * x % p + a4) % p * x % p + a6) % p;
        for y in 0..p {
            let lhs = (y * y + (a1 * x + a3) % p * y) % p;
            if lhs == rhs {
                n += 1;
            }
        }
    }
    n
}

pub fn reduction_at(c: &Curve, p: u64) -> Result<ReductionInfo> {
    if p >= 5 && Curve::valuation(p, &c.c4) >= 4 && Curve::valuation(p, &c.disc) >= 12 {
        return Err(Error::NonMinimalModel(p));
    }
    let (kind, ap) = if !Curve::divides(p, &c.disc) {
        let ap = p as i64 + 1 - count_points(c, p) as i64;
        assert!(ap * ap <= 4 * p as i64, "Hasse bound violated at p = {p}");
        (ReductionKind::Good, ap)
    } else if !Curve::divides(p, &c.c4) {
        if p < 5 {
            return Err(Error::UnsupportedReduction {
                p,
                reason: "split/nonsplit multiplicative reduction at 2 or 3",
            });
        }
        let minus_c6 = (-&c.c6).mod_floor(&BigInt::from(p)).to_i64().expect("residue fits");
        if legendre(minus_c6, p)? == 1 {
            (ReductionKind::MultiplicativeSplit, 1)
        } else {
            (ReductionKind::MultiplicativeNonsplit, -1)
        }
    } else {
        (ReductionKind::Additive, 0)
    };
    Ok(ReductionInfo { prime: p, kind, ap })
}

/// The newform coefficients `f_0 = 0, f_1 = 1, f_2, …, f_{order-1}`.
pub fn an_expansion(c: &Curve, order: usize) -> Result<PowerSeries> {
    if order < 2 {
        return Err(Error::InvalidArgs(format!("expansion order must be at least 2, got {order}")));
    }
    let primes = primes_below(order);
    let local: Vec<ReductionInfo> =
        primes.par_iter().map(|&p| reduction_at(c, p)).collect::<Result<_>>()?;

    let spf = smallest_prime_factors(order);
    let mut f = vec![0i64; order];
    f[1] = 1;
    let mut ap = vec![0i64; order];
    let mut good = vec![false; order];
    for info in &local {
        ap[info.prime as usize] = info.ap;
        good[info.prime as usize] = info.kind == ReductionKind::Good;
    }
    for n in 2..order {
        let p = spf[n] as usize;
        let mut m = n;
        let mut k = 0;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        let pk = n / m;
        if m > 1 {
            f[n] = f[pk] * f[m];
        } else if k == 1 {
            f[n] = ap[p];
        } else if good[p] {
            f[n] = ap[p] * f[n / p] - p as i64 * f[n / (p * p)];
        } else {
            f[n] = ap[p] * f[n / p];
        }
    }
    Ok(PowerSeries::from_ints(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(a: [i64; 5]) -> Curve {
        curve_from_quintuple(Quintuple(a)).unwrap()
    }

    #[test]
    fn invariants_of_small_curves() {
        let c36 = curve([0, 0, 0, 0, 1]);
        assert_eq!(c36.c4, BigInt::zero());
        assert_eq!(c36.disc, BigInt::from(-432));
        let c37 = curve([0, 0, 1, -1, 0]);
        assert_eq!(c37.disc, BigInt::from(37));
        assert!(matches!(curve_from_quintuple(Quintuple([0; 5])), Err(Error::SingularCurve)));
    }

    #[test]
    fn discriminant_relation() {
        for a in [[0, 0, 1, -1, 0], [1, 0, 0, -2, 1], [0, 1, 1, -2, 0], [0, 0, 0, -72, 0], [1, -1, 1, 0, 0]] {
            let c = curve(a);
            assert_eq!(BigInt::from(1728) * &c.disc, &c.c4 * &c.c4 * &c.c4 - &c.c6 * &c.c6);
        }
    }

    #[test]
    fn point_counts() {
        let c37 = curve([0, 0, 1, -1, 0]);
        assert_eq!(count_points(&c37, 2), 5);
        assert_eq!(count_points(&c37, 3), 7);
        for a in [[0, 0, 1, -1, 0], [1, 1, 1, 1, 0], [0, 0, 0, 0, 1]] {
            let c = curve(a);
            for p in [3, 5, 7, 11, 13] {
                assert_eq!(count_points(&c, p), count_points_naive(&c, p));
            }
        }
    }

    #[test]
    fn reduction_types() {
        let c36 = curve([0, 0, 0, 0, 1]);
        let r = reduction_at(&c36, 2).unwrap();
        assert_eq!((r.kind, r.ap), (ReductionKind::Additive, 0));
        let c37 = curve([0, 0, 1, -1, 0]);
        let r = reduction_at(&c37, 2).unwrap();
        assert_eq!((r.kind, r.ap), (ReductionKind::Good, -2));
        let r = reduction_at(&c37, 37).unwrap();
        assert!(matches!(r.kind, ReductionKind::MultiplicativeSplit | ReductionKind::MultiplicativeNonsplit));
        // the split criterion agrees with counting points on the nodal cubic
        assert_eq!(r.ap, 37 + 1 - count_points(&c37, 37) as i64);
    }

    #[test]
    fn multiplicative_at_two_is_refused() {
        // conductor 14: multiplicative at 2 and 7
        let c = curve([1, 0, 1, 4, -6]);
        assert!(matches!(reduction_at(&c, 2), Err(Error::UnsupportedReduction { p: 2, .. })));
        let r = reduction_at(&c, 7).unwrap();
        assert_eq!(r.ap, 7 + 1 - count_points(&c, 7) as i64);
    }

    #[test]
    fn non_minimal_models_are_rejected() {
        // y² = x³ + 5^4·x + 5^6 is a scaling of y² = x³ + x + 1 by u = 5
        let c = curve([0, 0, 0, 625, 15625]);
        assert!(matches!(reduction_at(&c, 5), Err(Error::NonMinimalModel(5))));
    }

    #[test]
    fn expansion_for_conductor_37() {
        let c37 = curve([0, 0, 1, -1, 0]);
        assert_eq!(an_expansion(&c37, 5).unwrap(), PowerSeries::from_ints([0, 1, -2, -3, 2]));
        assert!(an_expansion(&c37, 1).is_err());
    }

    #[test]
    fn expansion_for_conductor_36_is_supported_on_one_mod_six() {
        let f = an_expansion(&curve([0, 0, 0, 0, 1]), 120).unwrap();
        assert_eq!(f.coeff(2), Some(&BigInt::zero()));
        assert_eq!(f.coeff(3), Some(&BigInt::zero()));
        for (n, c) in f.coeffs().iter().enumerate() {
            if n % 6 != 1 {
                assert!(c.is_zero(), "f_{n} = {c}");
            }
        }
    }

    #[test]
    fn hasse_and_multiplicativity() {
        let c = curve([0, 1, 1, -2, 0]);
        let f = an_expansion(&c, 501).unwrap();
        for p in primes_below(501) {
            if p == 389 {
                continue;
            }
            let ap = f.coeff(p as usize).unwrap().to_i64().unwrap();
            assert!(ap * ap <= 4 * p as i64);
        }
        for m in 1..=200usize {
            for n in 1..=200 / m {
                if m.gcd(&n) == 1 {
                    assert_eq!(f.coeffs()[m * n], &f.coeffs()[m] * &f.coeffs()[n]);
                }
            }
        }
    }

    #[test]
    fn quintuple_parsing() {
        let q: Quintuple = "0,0,1,-1,0".parse().unwrap();
        assert_eq!(q, Quintuple([0, 0, 1, -1, 0]));
        assert_eq!("[0, 1, 1, 0, 0]".parse::<Quintuple>().unwrap(), Quintuple([0, 1, 1, 0, 0]));
        assert!("1,2,3".parse::<Quintuple>().is_err());
        assert_eq!(q.to_string(), "[0,0,1,-1,0]");
    }
}
