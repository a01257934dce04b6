//! Candidate decompositions `f = ∏ η_i^{r_i}(q^{t_i})` of a newform into
//! building blocks, and the classical eta-quotient search per level.
//!
//! A block `η_i` with `(ř_i, ť_i)` has weight `2/ř_i` and leading exponent
//! `1/(ř_i ť_i)`, so a weight-two product with leading term `q` must satisfy
//! `Σ r_i/ř_i = 1` and `Σ r_i t_i/(ř_i ť_i) = 1`. Every result here is a fact
//! about the searched bounds only.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::divisors;
use crate::elliptic::{an_expansion, curve_from_quintuple};
use crate::error::{Error, Result};
use crate::eta::{eta_quotient_series, EtaQuotient};
use crate::products::extract_exponents;
use crate::qseries::{FracSeries, PowerSeries};
use crate::registry::{extend_block, BlockRecord, Registry};

/// Default number of agreeing coefficients below which a comparison is undecided.
pub const DEFAULT_OVERLAP_FLOOR: usize = 20;

/// Default bound on `|r_t|` in the eta-quotient search.
pub const DEFAULT_ETA_EXPONENT_BOUND: i64 = 24;

/// Limit on the number of assignments the eta-quotient search may enumerate.
pub const ETA_SEARCH_LIMIT: u64 = 20_000_000;

/// `η_block^r(q^t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Part {
    pub block: u64,
    pub t: u64,
    pub r: i64,
    pub r_check: u64,
    pub t_check: u64,
}

impl Part {
    /// Contribution `r/ř` to the weight sum.
    pub fn weight_share(&self) -> Rational64 {
        Rational64::new(self.r, self.r_check as i64)
    }

    /// Contribution `r t/(ř ť)` to the leading exponent.
    pub fn exponent_share(&self) -> Rational64 {
        Rational64::new(self.r * self.t as i64, (self.r_check * self.t_check) as i64)
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arg = if self.t == 1 { "q".to_string() } else { format!("q^{}", self.t) };
        write!(f, "η{}({arg})^{}", self.block, self.r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// Not compared yet.
    Pending,
    /// Equal for every exponent below `order`.
    Match { order: usize },
    /// First differing exponent.
    MismatchAt { exponent: usize },
    /// Agreement below `overlap`, which is under the configured floor.
    Undecided { overlap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SearchCandidate {
    pub parts: Vec<Part>,
    pub match_order: Option<usize>,
    pub verdict: Verdict,
}

impl SearchCandidate {
    /// Sorts parts by `(block, t)`; `None` if two parts share both.
    pub fn canonical(mut parts: Vec<Part>) -> Option<Self> {
        parts.sort();
        if parts.windows(2).any(|w| (w[0].block, w[0].t) == (w[1].block, w[1].t)) {
            return None;
        }
        Some(SearchCandidate { parts, match_order: None, verdict: Verdict::Pending })
    }

    pub fn weight_sum(&self) -> Rational64 {
        self.parts.iter().map(Part::weight_share).sum()
    }

    pub fn leading_exponent(&self) -> Rational64 {
        self.parts.iter().map(Part::exponent_share).sum()
    }

    pub fn satisfies_constraints(&self) -> bool {
        let one = Rational64::from_integer(1);
        self.weight_sum() == one && self.leading_exponent() == one
    }
}

impl fmt::Display for SearchCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    /// Number of parts, 1 to 3.
    pub s: usize,
    pub max_r: i64,
    pub max_t: u64,
    /// Restrict every `t_i` to divisors of this number.
    pub t_divides: Option<u64>,
}

/// All `s`-part products with `0 < |r_i| ≤ R`, `1 ≤ t_i ≤ Tmax` satisfying
/// both constraint sums, in canonical order. The same block may appear at
/// several scales.
pub fn enumerate_candidates(blocks: &[BlockRecord], bounds: &SearchBounds) -> Result<Vec<SearchCandidate>> {
    if !(1..=3).contains(&bounds.s) {
        return Err(Error::InvalidArgs(format!("s = {} is outside 1..=3", bounds.s)));
    }
    if bounds.max_r < 1 || bounds.max_t < 1 {
        return Ok(Vec::new());
    }
    let mut ids: Vec<(u64, u64, u64)> = blocks.iter().map(|b| (b.conductor, b.r_check, b.t_check)).collect();
    ids.sort();
    ids.dedup();
    let t_ok = |t: u64| t >= 1 && t <= bounds.max_t && bounds.t_divides.is_none_or(|n| n % t == 0);
    let mut free = Vec::new();
    for &(block, r_check, t_check) in &ids {
        for t in (1..=bounds.max_t).filter(|&t| t_ok(t)) {
            for r in (-bounds.max_r..=bounds.max_r).filter(|&r| r != 0) {
                free.push(Part { block, t, r, r_check, t_check });
            }
        }
    }

    let one = Rational64::from_integer(1);
    // the last part is forced by the two constraints once the others are chosen
    let close = |prefix: &[Part], out: &mut BTreeSet<Vec<Part>>| {
        let sw: Rational64 = prefix.iter().map(Part::weight_share).sum();
        let se: Rational64 = prefix.iter().map(Part::exponent_share).sum();
        let (dw, de) = (one - sw, one - se);
        if dw.is_zero() {
            return;
        }
        for &(block, r_check, t_check) in &ids {
            let r = dw * Rational64::from_integer(r_check as i64);
            let t = de / dw * Rational64::from_integer(t_check as i64);
            if !r.is_integer() || !t.is_integer() {
                continue;
            }
            let (r, t) = (r.to_integer(), t.to_integer());
            if r == 0 || r.abs() > bounds.max_r || t < 1 || !t_ok(t as u64) {
                continue;
            }
            let mut parts = prefix.to_vec();
            parts.push(Part { block, t: t as u64, r, r_check, t_check });
            if let Some(c) = SearchCandidate::canonical(parts) {
                out.insert(c.parts);
            }
        }
    };

    let mut found = BTreeSet::new();
    match bounds.s {
        1 => close(&[], &mut found),
        2 => {
            let sets: Vec<BTreeSet<Vec<Part>>> = free
                .par_iter()
                .map(|p| {
                    let mut s = BTreeSet::new();
                    close(std::slice::from_ref(p), &mut s);
                    s
                })
                .collect();
            found.extend(sets.into_iter().flatten());
        }
        _ => {
            let sets: Vec<BTreeSet<Vec<Part>>> = (0..free.len())
                .into_par_iter()
                .map(|i| {
                    let mut s = BTreeSet::new();
                    for p2 in &free[i..] {
                        close(&[free[i], *p2], &mut s);
                    }
                    s
                })
                .collect();
            found.extend(sets.into_iter().flatten());
        }
    }
    Ok(found
        .into_iter()
        .map(|parts| SearchCandidate { parts, match_order: None, verdict: Verdict::Pending })
        .collect())
}

/// Block sequences, extended on demand; one writer at a time.
#[derive(Debug, Default)]
pub struct BlockStore {
    records: RwLock<BTreeMap<u64, Arc<BlockRecord>>>,
}

impl BlockStore {
    pub fn new(records: impl IntoIterator<Item = BlockRecord>) -> Self {
        let map = records.into_iter().map(|r| (r.conductor, Arc::new(r))).collect();
        BlockStore { records: RwLock::new(map) }
    }

    pub fn from_registry(reg: &Registry) -> Self {
        Self::new(reg.records.iter().cloned())
    }

    pub fn get(&self, block: u64) -> Option<Arc<BlockRecord>> {
        self.records.read().expect("block store lock").get(&block).cloned()
    }

    /// The record with at least `k` known block exponents.
    pub fn ensure(&self, block: u64, k: usize) -> Result<Arc<BlockRecord>> {
        let rec = self.get(block).ok_or(Error::UnknownLevel(block))?;
        if rec.sequence().len() >= k {
            return Ok(rec);
        }
        let mut map = self.records.write().expect("block store lock");
        let current = map.get(&block).cloned().ok_or(Error::UnknownLevel(block))?;
        if current.sequence().len() >= k {
            return Ok(current);
        }
        let extended = Arc::new(extend_block(&current, k.max(current.a_printed.len()))?);
        map.insert(block, extended.clone());
        Ok(extended)
    }
}

/// `∏ η_i^{r_i}(q^{t_i})` from the given block prefixes, known below `q^M`.
pub fn assemble_from(cand: &SearchCandidate, seqs: &BTreeMap<u64, Arc<BlockRecord>>, order: usize) -> Result<FracSeries> {
    let lead = cand.leading_exponent();
    let span = (Rational64::from_integer(order as i64) - lead).ceil().to_integer().max(0) as usize;
    let mut s = PowerSeries::one(span);
    for p in &cand.parts {
        let rec = seqs.get(&p.block).ok_or(Error::UnknownLevel(p.block))?;
        let a = rec.sequence();
        let t = p.t as usize;
        let need = span.saturating_sub(1) / t;
        if a.len() < need {
            return Err(Error::PrecisionExceeded(format!(
                "block {} at scale {t} needs a_{need}, only a_1..a_{} known",
                p.block,
                a.len()
            )));
        }
        let r = BigInt::from(p.r);
        for n in 1..=need {
            s.mul_one_minus_q_pow(t * n, &(&r * &a[n - 1]));
        }
    }
    Ok(FracSeries::with_prefactor(lead, &s))
}

/// [`assemble_from`] with the store extending blocks as needed.
pub fn assemble(cand: &SearchCandidate, store: &BlockStore, order: usize) -> Result<FracSeries> {
    let mut seqs = BTreeMap::new();
    for p in &cand.parts {
        let need = order.saturating_sub(1) / p.t as usize;
        seqs.insert(p.block, store.ensure(p.block, need.max(1))?);
    }
    assemble_from(cand, &seqs, order)
}

/// Verdict for an assembled product against a target known to `target.order()`.
pub fn compare_series(assembled: &FracSeries, target: &PowerSeries, floor: usize) -> (Verdict, Option<usize>) {
    let t = FracSeries::from_power_series(target);
    if let Some(e) = assembled.first_disagreement(&t) {
        // with both constraints satisfied every exponent is an integer
        let exponent = e.ceil().to_integer().max(0) as usize;
        return (Verdict::MismatchAt { exponent }, None);
    }
    let overlap = assembled.common_bound(&t).floor().to_integer().max(0) as usize;
    if overlap < floor {
        (Verdict::Undecided { overlap }, None)
    } else {
        (Verdict::Match { order: overlap }, Some(overlap))
    }
}

/// Fills in the verdict of `cand` against `target`.
pub fn match_against(
    cand: &SearchCandidate,
    target: &PowerSeries,
    store: &BlockStore,
    floor: usize,
) -> Result<SearchCandidate> {
    let assembled = assemble(cand, store, target.order())?;
    let (verdict, match_order) = compare_series(&assembled, target, floor);
    Ok(SearchCandidate { parts: cand.parts.clone(), match_order, verdict })
}

/// Enumerates and screens candidates against `target`, in canonical order.
pub fn search(
    store: &BlockStore,
    blocks: &[u64],
    bounds: &SearchBounds,
    target: &PowerSeries,
    floor: usize,
) -> Result<Vec<SearchCandidate>> {
    let records: Vec<BlockRecord> = blocks
        .iter()
        .map(|&b| store.get(b).map(|r| (*r).clone()).ok_or(Error::UnknownLevel(b)))
        .collect::<Result<_>>()?;
    let cands = enumerate_candidates(&records, bounds)?;
    // extend every block once, up front, so that the parallel phase only reads
    for &b in blocks {
        let min_t = cands.iter().flat_map(|c| &c.parts).filter(|p| p.block == b).map(|p| p.t).min();
        if let Some(t) = min_t {
            store.ensure(b, (target.order().saturating_sub(1) / t as usize).max(1))?;
        }
    }
    cands.par_iter().map(|c| match_against(c, target, store, floor)).collect()
}

/// The newform of the registry record at `level`, to order `M`.
pub fn level_newform(reg: &Registry, level: u64, order: usize) -> Result<PowerSeries> {
    let rec = reg.get(level).ok_or(Error::UnknownLevel(level))?;
    let curve = rec.curves.first().ok_or(Error::UnknownLevel(level))?;
    an_expansion(&curve_from_quintuple(*curve)?, order)
}

/// Eta quotients `∏_{t|N} η(q^t)^{r_t}` with `Σ r_t = 4`, `Σ t r_t = 24` and
/// `|r_t| ≤ bound` equal to the level-`N` registry newform below `q^M`.
pub fn eta_quotient_search(reg: &Registry, level: u64, order: usize, bound: i64) -> Result<Vec<EtaQuotient>> {
    let f = level_newform(reg, level, order)?;
    eta_quotient_search_scales(&f, &divisors(level)?, bound)
}

/// The same search over an explicit set of scales against a given target.
///
/// Matching `f` below `q^M` is the same as matching its exponents
/// `g_1 … g_{M-2}`, and the quotient has `g_m = Σ_{t|m} r_t`; so every
/// `r_t` with `t ≤ M-2` is read off from `g`, and only the larger scales are
/// enumerated, the last two of them solved from the two sum constraints.
pub fn eta_quotient_search_scales(target: &PowerSeries, scales: &[u64], bound: i64) -> Result<Vec<EtaQuotient>> {
    let order = target.order();
    if order < 3 {
        return Err(Error::InvalidArgs("target order must be at least 3".into()));
    }
    let g = extract_exponents(target)?;
    let known = g.upto() as u64;
    let mut scales = scales.to_vec();
    scales.sort_unstable();
    scales.dedup();
    if scales.first() == Some(&0) {
        return Err(Error::InvalidArgs("scales must be positive".into()));
    }

    let mut fixed: Vec<(u64, i64)> = Vec::new();
    for m in 1..=known {
        let partial: i64 = fixed.iter().filter(|&&(t, _)| m % t == 0).map(|&(_, r)| r).sum();
        let gm = g.get(m as usize).expect("within range");
        if scales.binary_search(&m).is_ok() {
            let r = gm - BigInt::from(partial);
            match i64::try_from(&r) {
                Ok(r) if r.abs() <= bound => fixed.push((m, r)),
                _ => return Ok(Vec::new()),
            }
        } else if *gm != BigInt::from(partial) {
            return Ok(Vec::new());
        }
    }
    let free: Vec<u64> = scales.iter().copied().filter(|&t| t > known).collect();
    let sum_r: i64 = fixed.iter().map(|&(_, r)| r).sum();
    let sum_tr: i64 = fixed.iter().map(|&(t, r)| t as i64 * r).sum();
    let (need_r, need_tr) = (4 - sum_r, 24 - sum_tr);

    let mut found = Vec::new();
    let push = |extra: &[(u64, i64)], found: &mut Vec<EtaQuotient>| -> Result<()> {
        let eq = EtaQuotient::new(fixed.iter().chain(extra).copied())?;
        found.push(eq);
        Ok(())
    };
    match free.len() {
        0 => {
            if need_r == 0 && need_tr == 0 {
                push(&[], &mut found)?;
            }
        }
        1 => {
            let t = free[0] as i64;
            if need_r.abs() <= bound && t * need_r == need_tr {
                push(&[(free[0], need_r)], &mut found)?;
            }
        }
        n => {
            let width = (2 * bound + 1) as u64;
            let space = width.checked_pow(n as u32 - 2);
            if space.is_none_or(|s| s > ETA_SEARCH_LIMIT) {
                return Err(Error::SearchSpaceTooLarge(format!(
                    "{n} scales above q^{known} with |r| ≤ {bound}; raise the order or lower the bound"
                )));
            }
            let (head, tail) = free.split_at(n - 2);
            let (ta, tb) = (tail[0] as i64, tail[1] as i64);
            let mut r = vec![-bound; head.len()];
            loop {
                let sr: i64 = r.iter().sum();
                let str_: i64 = head.iter().zip(&r).map(|(&t, &x)| t as i64 * x).sum();
                let (a, b) = (need_r - sr, need_tr - str_);
                // r_a + r_b = a, ta r_a + tb r_b = b
                let num = b - tb * a;
                let den = ta - tb;
                if num % den == 0 {
                    let ra = num / den;
                    let rb = a - ra;
                    if ra.abs() <= bound && rb.abs() <= bound {
                        let mut extra: Vec<(u64, i64)> = head.iter().copied().zip(r.iter().copied()).collect();
                        extra.push((tail[0], ra));
                        extra.push((tail[1], rb));
                        push(&extra, &mut found)?;
                    }
                }
                // odometer over the head exponents
                let mut i = 0;
                while i < r.len() && r[i] == bound {
                    r[i] = -bound;
                    i += 1;
                }
                if i == r.len() {
                    break;
                }
                r[i] += 1;
            }
        }
    }
    // confirm by expansion
    let target_frac = FracSeries::from_power_series(target);
    let mut confirmed: Vec<EtaQuotient> = found
        .into_iter()
        .filter(|eq| eta_quotient_series(eq, order - 1).first_disagreement(&target_frac).is_none())
        .collect();
    confirmed.sort();
    confirmed.dedup();
    Ok(confirmed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn reg() -> Registry {
        Registry::builtin()
    }

    fn recs(ids: &[u64]) -> Vec<BlockRecord> {
        let r = reg();
        ids.iter().map(|&i| r.get(i).unwrap().clone()).collect()
    }

    fn bounds(s: usize, max_r: i64, max_t: u64) -> SearchBounds {
        SearchBounds { s, max_r, max_t, t_divides: None }
    }

    /// Independent constraint check in big rationals.
    fn constraints_hold(c: &SearchCandidate) -> bool {
        let mut w = BigRational::zero();
        let mut e = BigRational::zero();
        for p in &c.parts {
            let r = BigInt::from(p.r);
            w += BigRational::new(r.clone(), BigInt::from(p.r_check));
            e += BigRational::new(r * BigInt::from(p.t), BigInt::from(p.r_check * p.t_check));
        }
        let one = BigRational::from_integer(BigInt::from(1));
        w == one && e == one
    }

    #[test]
    fn single_part_is_forced() {
        for rec in reg().records {
            let c = enumerate_candidates(std::slice::from_ref(&rec), &bounds(1, 6, 8)).unwrap();
            assert_eq!(c.len(), 1, "{}", rec.conductor);
            assert_eq!((c[0].parts[0].r, c[0].parts[0].t), (rec.r_check as i64, rec.t_check));
        }
        let c = enumerate_candidates(&recs(&[36]), &bounds(1, 3, 8)).unwrap();
        assert!(c.is_empty());
        assert!(enumerate_candidates(&recs(&[36]), &bounds(1, 0, 8)).unwrap().is_empty());
        assert!(enumerate_candidates(&recs(&[36]), &bounds(4, 6, 8)).is_err());
    }

    #[test]
    fn two_parts_match_brute_force() {
        let blocks = recs(&[37, 43]);
        let b = bounds(2, 6, 12);
        let got = enumerate_candidates(&blocks, &b).unwrap();
        assert!(!got.is_empty());
        assert!(got.iter().all(constraints_hold));
        let mut brute = BTreeSet::new();
        let mut all = Vec::new();
        for rec in &blocks {
            for t in 1..=12 {
                for r in (-6..=6).filter(|&r| r != 0) {
                    all.push(Part { block: rec.conductor, t, r, r_check: rec.r_check, t_check: rec.t_check });
                }
            }
        }
        for x in &all {
            for y in &all {
                if let Some(c) = SearchCandidate::canonical(vec![*x, *y]) {
                    if constraints_hold(&c) {
                        brute.insert(c.parts);
                    }
                }
            }
        }
        let got_parts: Vec<Vec<Part>> = got.iter().map(|c| c.parts.clone()).collect();
        assert_eq!(got_parts, brute.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn three_parts_satisfy_constraints_and_are_order_invariant() {
        let a = enumerate_candidates(&recs(&[36, 37, 88]), &bounds(3, 3, 6)).unwrap();
        let b = enumerate_candidates(&recs(&[88, 36, 37]), &bounds(3, 3, 6)).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
        assert!(a.iter().all(|c| c.parts.len() == 3 && constraints_hold(c)));
        assert!(a.iter().all(|c| c.parts.windows(2).all(|w| w[0] < w[1])));
    }

    #[test]
    fn divisor_filter() {
        let b = SearchBounds { s: 2, max_r: 6, max_t: 12, t_divides: Some(6) };
        let got = enumerate_candidates(&recs(&[37, 43]), &b).unwrap();
        assert!(got.iter().all(|c| c.parts.iter().all(|p| 6 % p.t == 0)));
    }

    #[test]
    fn every_table_row_is_a_fixed_point() {
        let r = reg();
        let store = BlockStore::from_registry(&r);
        for rec in &r.records {
            let cand = enumerate_candidates(std::slice::from_ref(rec), &bounds(1, 4, 6)).unwrap().remove(0);
            let f = level_newform(&r, rec.conductor, 30).unwrap();
            let got = assemble(&cand, &store, 30).unwrap();
            assert_eq!(got.leading_exponent(), Rational64::from_integer(1));
            assert_eq!(got.to_power_series().unwrap(), f, "{}", rec.conductor);
            let m = match_against(&cand, &f, &store, DEFAULT_OVERLAP_FLOOR).unwrap();
            assert_eq!(m.verdict, Verdict::Match { order: 30 });
        }
    }

    #[test]
    fn verdicts() {
        let r = reg();
        let store = BlockStore::from_registry(&r);
        let c43 = enumerate_candidates(&recs(&[43]), &bounds(1, 1, 1)).unwrap().remove(0);
        let f37 = level_newform(&r, 37, 30).unwrap();
        let m = match_against(&c43, &f37, &store, 20).unwrap();
        // f_43 = q - 2q^2 …, f_37 = q - 2q^2 - 3q^3 …; they part at q^3
        assert_eq!(m.verdict, Verdict::MismatchAt { exponent: 3 });
        let f43 = level_newform(&r, 43, 6).unwrap();
        let m = match_against(&c43, &f43, &store, 20).unwrap();
        assert_eq!(m.verdict, Verdict::Undecided { overlap: 6 });
    }

    #[test]
    fn short_prefix_is_reported() {
        let r = reg();
        let c = enumerate_candidates(&recs(&[389]), &bounds(1, 1, 1)).unwrap().remove(0);
        let seqs: BTreeMap<u64, Arc<BlockRecord>> =
            [(389, Arc::new(r.get(389).unwrap().clone()))].into_iter().collect();
        match assemble_from(&c, &seqs, 30) {
            Err(Error::PrecisionExceeded(msg)) => assert!(msg.contains("block 389"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn search_is_deterministic() {
        let r = reg();
        let f = level_newform(&r, 43, 40).unwrap();
        let b = bounds(2, 6, 12);
        let one = search(&BlockStore::from_registry(&r), &[37, 43], &b, &f, 20).unwrap();
        let two = search(&BlockStore::from_registry(&r), &[43, 37], &b, &f, 20).unwrap();
        assert_eq!(one, two);
        assert!(one.iter().all(|c| !matches!(c.verdict, Verdict::Pending)));
        assert_eq!(
            serde_json::to_string(&one).unwrap(),
            serde_json::to_string(&search(&BlockStore::from_registry(&r), &[37, 43], &b, &f, 20).unwrap()).unwrap()
        );
    }

    #[test]
    fn eta_quotient_levels() {
        let r = reg();
        let got = eta_quotient_search(&r, 36, 30, DEFAULT_ETA_EXPONENT_BOUND).unwrap();
        assert_eq!(got, vec![EtaQuotient::new([(6, 4)]).unwrap()]);
        assert!(eta_quotient_search(&r, 37, 20, DEFAULT_ETA_EXPONENT_BOUND).unwrap().is_empty());
        assert!(matches!(eta_quotient_search(&r, 1, 20, 24), Err(Error::UnknownLevel(1))));
    }

    fn brute_eta(target: &PowerSeries, scales: &[u64], bound: i64) -> Vec<EtaQuotient> {
        let n = scales.len();
        let mut out = Vec::new();
        let mut r = vec![-bound; n];
        let tf = FracSeries::from_power_series(target);
        loop {
            let sr: i64 = r.iter().sum();
            let st: i64 = scales.iter().zip(&r).map(|(&t, &x)| t as i64 * x).sum();
            if sr == 4 && st == 24 {
                let eq = EtaQuotient::new(scales.iter().copied().zip(r.iter().copied())).unwrap();
                if eta_quotient_series(&eq, target.order() - 1).first_disagreement(&tf).is_none() {
                    out.push(eq);
                }
            }
            let mut i = 0;
            while i < n && r[i] == bound {
                r[i] = -bound;
                i += 1;
            }
            if i == n {
                break;
            }
            r[i] += 1;
        }
        out.sort();
        out
    }

    #[test]
    fn eta_search_matches_brute_force() {
        let r = reg();
        let f36 = level_newform(&r, 36, 30).unwrap();
        assert_eq!(eta_quotient_search_scales(&f36, &[1, 2, 3, 6], 4).unwrap(), brute_eta(&f36, &[1, 2, 3, 6], 4));
        let cases: [(&[(u64, i64)], &[u64]); 3] = [
            (&[(1, 2), (11, 2)], &[1, 11]),
            (&[(2, 2), (10, 2)], &[1, 2, 5, 10]),
            (&[(1, 1), (2, 1), (7, 1), (14, 1)], &[1, 2, 7, 14]),
        ];
        for (terms, scales) in cases {
            let eq = EtaQuotient::new(terms.iter().copied()).unwrap();
            let f = eta_quotient_series(&eq, 24).to_power_series().unwrap().truncate(25);
            let solver = eta_quotient_search_scales(&f, scales, 3).unwrap();
            assert_eq!(solver, vec![eq.clone()], "{eq}");
            assert_eq!(solver, brute_eta(&f, scales, 3), "{eq}");
            // with so few coefficients most scales stay free and get enumerated
            let short = f.truncate(6);
            assert_eq!(eta_quotient_search_scales(&short, scales, 3).unwrap(), brute_eta(&short, scales, 3), "{eq}");
        }
    }

    #[test]
    fn eta_search_space_guard() {
        let f = level_newform(&reg(), 2304, 4).unwrap();
        assert!(matches!(
            eta_quotient_search_scales(&f, &divisors(2304).unwrap(), 24),
            Err(Error::SearchSpaceTooLarge(_))
        ));
    }
}
