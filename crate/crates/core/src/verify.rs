//! Every offline check of the tabulated data and identities, as one report.
//!
//! Items run in parallel; the report lists them in a fixed order and carries
//! no timings, so identical runs serialize to identical bytes.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::primes_below;
use crate::elliptic::{an_expansion, count_points, count_points_naive, curve_from_quintuple, Quintuple};
use crate::error::Result;
use crate::eta::{verify_e2_identity, EtaQuotient};
use crate::lmfdb::{bundled, bundled_labels, crosscheck};
use crate::products::{extract_exponents, extract_exponents_by_peeling, reconstruct, ExponentSequence};
use crate::qseries::PowerSeries;
use crate::registry::{check_registry, Registry};
use crate::search::{enumerate_candidates, eta_quotient_search, SearchBounds, DEFAULT_ETA_EXPONENT_BOUND};
use crate::theta::{
    eta256_printed_comparison, standard_pairs, verify_eta256_identities, verify_triple_product, verify_weight4,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyItem {
    pub id: &'static str,
    pub title: &'static str,
    pub status: ItemStatus,
    pub summary: String,
    pub details: Value,
}

impl VerifyItem {
    pub fn passed(&self) -> bool {
        self.status == ItemStatus::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub items: Vec<VerifyItem>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(VerifyItem::passed)
    }

    pub fn item(&self, id: &str) -> Option<&VerifyItem> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyItem> {
        self.items.iter().filter(|i| !i.passed())
    }
}

type Check = fn(&Registry) -> Result<(bool, String, Value)>;

const ITEMS: &[(&str, &str, Check)] = &[
    ("table1", "block sequences a_1..a_12 of all tabulated rows", table1),
    ("two_curve_rows", "models of one row share f_n for n <= 100", two_curve_rows),
    ("e2", "q eta'/eta = E2 to order 300", e2),
    ("roundtrip", "reconstruct/extract roundtrip and integrality", roundtrip),
    ("triple_product", "Jacobi triple product for five argument pairs to order 200", triple_product),
    ("eta256_printed", "printed coefficients of eta_256", eta256_printed),
    ("eta256_identities", "both eta_256 identities to order 50", eta256_identities),
    ("weight4", "weight-4 coefficients and multiplicativity for mn <= 200", weight4),
    ("constraint_forcing", "one-part search returns exactly (r, t) of each block", constraint_forcing),
    ("eta_quotient_search", "level 36 gives eta(q^6)^4, level 37 gives nothing", eta_quotient),
    ("point_count_oracle", "character-sum point counts equal enumeration for p <= 50", point_count_oracle),
    ("extraction_oracle", "Mobius and peeling extraction agree to order 40", extraction_oracle),
    ("lmfdb_fixtures", "bundled database records agree with point counting", lmfdb_fixtures),
];

/// Identifiers of all items, in report order.
pub fn item_ids() -> Vec<&'static str> {
    ITEMS.iter().map(|(id, _, _)| *id).collect()
}

pub fn verify_all(reg: &Registry) -> VerifyReport {
    let items = ITEMS
        .par_iter()
        .map(|&(id, title, check)| {
            let (status, summary, details) = match check(reg) {
                Ok((ok, summary, details)) => (if ok { ItemStatus::Pass } else { ItemStatus::Fail }, summary, details),
                Err(e) => (ItemStatus::Fail, format!("error: {e}"), Value::Null),
            };
            VerifyItem { id, title, status, summary, details }
        })
        .collect();
    VerifyReport { items }
}

fn table1(reg: &Registry) -> Result<(bool, String, Value)> {
    let rows = check_registry(reg, 12);
    let failed: Vec<_> = rows.iter().filter(|r| !r.passed).collect();
    let summary = if failed.is_empty() {
        format!("{}/{} rows reproduced", rows.len(), rows.len())
    } else {
        let which: Vec<String> =
            failed.iter().map(|r| format!("{}: {}", r.conductor, r.problem.as_deref().unwrap_or("?"))).collect();
        format!("{}/{} rows reproduced; {}", rows.len() - failed.len(), rows.len(), which.join("; "))
    };
    Ok((failed.is_empty(), summary, serde_json::to_value(&rows).expect("rows serialize")))
}

fn two_curve_rows(reg: &Registry) -> Result<(bool, String, Value)> {
    let mut details = Vec::new();
    let mut ok = true;
    for rec in reg.records.iter().filter(|r| r.curves.len() > 1) {
        let series: Vec<PowerSeries> = rec
            .curves
            .iter()
            .map(|&c| an_expansion(&curve_from_quintuple(c)?, 101))
            .collect::<Result<_>>()?;
        let first = (1..101).find(|&n| series.iter().any(|s| s.coeffs()[n] != series[0].coeffs()[n]));
        ok &= first.is_none();
        details.push(json!({ "conductor": rec.conductor, "first_difference": first }));
    }
    Ok((ok, format!("{} rows with several models checked", details.len()), Value::Array(details)))
}

fn e2(_: &Registry) -> Result<(bool, String, Value)> {
    let c = verify_e2_identity(300)?;
    let summary = match c.first_mismatch {
        None => format!("holds below q^{}", c.bound),
        Some(e) => format!("first mismatch at q^{e}"),
    };
    Ok((c.holds, summary, json!({ "bound": c.bound.to_string() })))
}

fn roundtrip(_: &Registry) -> Result<(bool, String, Value)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e65_7766);
    let mut roundtrip_failures = 0;
    for _ in 0..100 {
        let g = ExponentSequence::from_ints((0..24).map(|_| rng.gen_range(-10..=10)));
        let f = reconstruct(&g, 26)?;
        if extract_exponents(&f)? != g {
            roundtrip_failures += 1;
        }
    }
    let mut integrality_failures = 0;
    for _ in 0..200 {
        let mut c: Vec<i64> = (0..40).map(|_| rng.gen_range(-50..=50)).collect();
        c[0] = 0;
        c[1] = 1;
        if extract_exponents(&PowerSeries::from_ints(c)).is_err() {
            integrality_failures += 1;
        }
    }
    let ok = roundtrip_failures == 0 && integrality_failures == 0;
    Ok((
        ok,
        format!("{roundtrip_failures}/100 roundtrip failures, {integrality_failures}/200 extraction failures"),
        json!({ "roundtrip_failures": roundtrip_failures, "extraction_failures": integrality_failures }),
    ))
}

fn triple_product(_: &Registry) -> Result<(bool, String, Value)> {
    let checks = verify_triple_product(&standard_pairs(), 200)?;
    let ok = checks.iter().all(|(_, _, c)| c.holds);
    let details = checks
        .iter()
        .map(|(a, b, c)| {
            json!({
                "a": a.to_string(),
                "b": b.to_string(),
                "holds": c.holds,
                "first_mismatch": c.first_mismatch.map(|e| e.to_string()),
            })
        })
        .collect();
    let held = checks.iter().filter(|(_, _, c)| c.holds).count();
    Ok((ok, format!("{held}/{} pairs agree", checks.len()), Value::Array(details)))
}

fn eta256_printed(_: &Registry) -> Result<(bool, String, Value)> {
    let rows = eta256_printed_comparison()?;
    let bad: Vec<String> = rows
        .iter()
        .filter(|(_, p, c)| BigInt::from(*p) != *c)
        .map(|(k, p, c)| format!("q^(1/4+{k}): printed {p}, computed {c}"))
        .collect();
    let details = rows
        .iter()
        .map(|(k, p, c)| json!({ "k": k, "printed": p.to_string(), "computed": c.to_string() }))
        .collect();
    let summary = if bad.is_empty() {
        format!("{}/{} coefficients reproduced", rows.len(), rows.len())
    } else {
        format!("{}/{} coefficients reproduced; {}", rows.len() - bad.len(), rows.len(), bad.join("; "))
    };
    Ok((bad.is_empty(), summary, Value::Array(details)))
}

fn eta256_identities(_: &Registry) -> Result<(bool, String, Value)> {
    let r = verify_eta256_identities(50)?;
    let side = |c: &crate::eta::IdentityCheck| {
        json!({ "holds": c.holds, "first_mismatch": c.first_mismatch.map(|e| e.to_string()), "bound": c.bound.to_string() })
    };
    let word = |b: bool| if b { "ok" } else { "fails" };
    Ok((
        r.holds(),
        format!("theta form {}, eta form {}", word(r.theta_form.holds), word(r.eta_form.holds)),
        json!({ "theta_form": side(&r.theta_form), "eta_form": side(&r.eta_form) }),
    ))
}

fn weight4(_: &Registry) -> Result<(bool, String, Value)> {
    let r = verify_weight4(200)?;
    let printed: Vec<Value> = r
        .printed
        .iter()
        .map(|(n, p, c)| json!({ "n": n, "printed": p.to_string(), "computed": c.to_string() }))
        .collect();
    Ok((
        r.holds(),
        format!(
            "printed coefficients {}, {} coprime pairs checked, {} multiplicativity failures",
            if r.printed_ok { "reproduced" } else { "differ" },
            r.pairs_checked,
            r.multiplicativity_failures.len()
        ),
        json!({ "printed": printed, "multiplicativity_failures": r.multiplicativity_failures }),
    ))
}

fn constraint_forcing(reg: &Registry) -> Result<(bool, String, Value)> {
    let bounds = SearchBounds { s: 1, max_r: 6, max_t: 12, t_divides: None };
    let mut ok = true;
    let mut details = Vec::new();
    for rec in &reg.records {
        let cands = enumerate_candidates(std::slice::from_ref(rec), &bounds)?;
        let found: Vec<(i64, u64)> = cands.iter().map(|c| (c.parts[0].r, c.parts[0].t)).collect();
        ok &= found == [(rec.r_check as i64, rec.t_check)];
        details.push(json!({ "conductor": rec.conductor, "found": found }));
    }
    Ok((ok, format!("{} blocks checked with |r| <= 6, t <= 12", reg.records.len()), Value::Array(details)))
}

fn eta_quotient(reg: &Registry) -> Result<(bool, String, Value)> {
    let bound = DEFAULT_ETA_EXPONENT_BOUND;
    let at36 = eta_quotient_search(reg, 36, 30, bound)?;
    let at37 = eta_quotient_search(reg, 37, 30, bound)?;
    let expected = EtaQuotient::new([(6, 4)])?;
    let ok = at36 == [expected] && at37.is_empty();
    let show = |v: &[EtaQuotient]| v.iter().map(|e| e.to_string()).collect::<Vec<_>>();
    Ok((
        ok,
        format!(
            "level 36: {} found, level 37: {} found (|r_t| <= {bound}, order 30; a bounded search only)",
            at36.len(),
            at37.len()
        ),
        json!({ "36": show(&at36), "37": show(&at37), "bound": bound, "order": 30 }),
    ))
}

fn point_count_oracle(reg: &Registry) -> Result<(bool, String, Value)> {
    let curves: Vec<Quintuple> = reg.records.iter().flat_map(|r| r.curves.iter().copied()).collect();
    let primes = primes_below(51);
    let mut mismatches = Vec::new();
    for q in &curves {
        let c = curve_from_quintuple(*q)?;
        for &p in &primes {
            if count_points(&c, p) != count_points_naive(&c, p) {
                mismatches.push(format!("{q} at p = {p}"));
            }
        }
    }
    Ok((
        mismatches.is_empty(),
        format!("{} curves x {} primes, {} mismatches", curves.len(), primes.len(), mismatches.len()),
        json!({ "mismatches": mismatches }),
    ))
}

fn extraction_oracle(reg: &Registry) -> Result<(bool, String, Value)> {
    let mut mismatches = Vec::new();
    for rec in &reg.records {
        for q in &rec.curves {
            let f = an_expansion(&curve_from_quintuple(*q)?, 40)?;
            if extract_exponents(&f)? != extract_exponents_by_peeling(&f)? {
                mismatches.push(q.to_string());
            }
        }
    }
    Ok((mismatches.is_empty(), format!("{} mismatching models", mismatches.len()), json!({ "mismatches": mismatches })))
}

fn lmfdb_fixtures(_: &Registry) -> Result<(bool, String, Value)> {
    let mut ok = true;
    let mut details = Vec::new();
    for label in bundled_labels() {
        let rec = bundled(label).expect("listed fixture exists");
        let report = crosscheck(&rec, &curve_from_quintuple(rec.quintuple)?, rec.upto())?;
        ok &= report.agrees();
        details.push(json!({ "label": label, "upto": report.upto, "first_mismatch": report.first_mismatch() }));
    }
    Ok((ok, format!("{} bundled records checked", details.len()), Value::Array(details)))
}
