use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use newform_core::elliptic::{an_expansion, curve_from_quintuple, Quintuple};
use newform_core::eta::verify_e2_identity;
use newform_core::lmfdb::{crosscheck, Client, ClientConfig, Source};
use newform_core::products::{block_profile, extract_exponents, infer_block, MonotoneViolation};
use newform_core::qseries::PowerSeries;
use newform_core::registry::{
    check_registry, default_registry_path, extend_block, load_registry, save_registry, Registry,
};
use newform_core::search::{
    eta_quotient_search, level_newform, search, BlockStore, SearchBounds, Verdict,
};
use newform_core::theta::{standard_pairs, verify_eta256_identities, verify_triple_product, verify_weight4};
use newform_core::verify::{verify_all, ItemStatus};
use newform_core::{Error, Result};

use crate::output::{columns, dec, dec_list, join, Report, Status};

const SEARCH_DISCLAIMER: &str =
    "bounded search: only products inside the stated bounds were examined; an empty result says nothing beyond them";

fn inputs(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

/// Runs `body`, turning a library error into an error document.
fn run(command: &str, args: Value, body: impl FnOnce(&mut Report) -> Result<()>) -> Report {
    let args = inputs(args);
    let mut r = Report::new(command, args.clone());
    match body(&mut r) {
        Ok(()) => r,
        Err(e) => Report::error(command, args, &e),
    }
}

pub fn an(curve: Quintuple, order: usize) -> Report {
    run("an", json!({ "curve": curve.to_string(), "order": order }), |r| {
        let f = an_expansion(&curve_from_quintuple(curve)?, order)?;
        let coeffs = &f.coeffs()[1..];
        r.doc.results = json!({ "first_index": 1, "coefficients": dec_list(coeffs) });
        let rows: Vec<Vec<String>> =
            coeffs.iter().enumerate().map(|(i, c)| vec![(i + 1).to_string(), c.to_string()]).collect();
        r.plain = format!("f_n for {curve}, n = 1..{}\n{}\n", order - 1, join(coeffs));
        r.table(&["n", "f_n"], rows);
        Ok(())
    })
}

fn monotone_note(v: &MonotoneViolation) -> String {
    match v {
        MonotoneViolation::NonPositive { index, value } => format!("a_{index} = {value} is not positive"),
        MonotoneViolation::NotIncreasing { index } => format!("a_{index} does not exceed a_{}", index - 1),
    }
}

pub fn exponents(curve: Quintuple, order: usize) -> Report {
    run("exponents", json!({ "curve": curve.to_string(), "order": order }), |r| {
        if order < 1 {
            return Err(Error::InvalidArgs("order must be at least 1".into()));
        }
        let f = an_expansion(&curve_from_quintuple(curve)?, order + 2)?;
        let g = extract_exponents(&f)?;
        let mut results = json!({ "g": dec_list(g.values()) });
        let mut plain = format!("g_1..g_{order} for {curve}\n{}\n", join(g.values()));
        let mut rows: Vec<Vec<String>> =
            g.values().iter().enumerate().map(|(i, v)| vec!["g".into(), (i + 1).to_string(), v.to_string()]).collect();
        match infer_block(&g) {
            Ok((rc, tc)) => {
                let p = block_profile(&g, rc, tc)?;
                results["inferred"] = json!({ "r_check": rc, "t_check": tc });
                results["a"] = dec_list(&p.a);
                results["gcd_prefix"] = dec(&p.gcd_prefix);
                results["monotone_report"] = Value::Array(p.monotone_report.iter().map(|v| monotone_note(v).into()).collect());
                let _ = writeln!(plain, "inferred (ř, ť) = ({rc}, {tc})\na_1..a_{}\n{}", p.a.len(), join(&p.a));
                rows.extend(p.a.iter().enumerate().map(|(i, v)| vec!["a".into(), (i + 1).to_string(), v.to_string()]));
                r.doc.diagnostics.extend(p.monotone_report.iter().map(monotone_note));
            }
            Err(e) => {
                results["inferred"] = Value::Null;
                r.doc.diagnostics.push(format!("no block profile: {e}"));
            }
        }
        r.doc.results = results;
        r.plain = plain;
        r.table(&["sequence", "n", "value"], rows);
        Ok(())
    })
}

pub struct Table1Args {
    pub verify: bool,
    pub extend: Option<usize>,
    pub registry: Option<PathBuf>,
    pub save: bool,
}

pub fn table1(a: Table1Args) -> Report {
    let args = json!({
        "verify": a.verify,
        "extend": a.extend,
        "registry": a.registry.as_ref().map(|p| p.display().to_string()),
        "save": a.save,
    });
    run("table1", args, |r| {
        let reg = match &a.registry {
            Some(p) => load_registry(p)?,
            None => Registry::builtin(),
        };
        if a.save && a.extend.is_none() {
            return Err(Error::InvalidArgs("--save needs --extend".into()));
        }
        let header = ["N", "curves", "ř", "ť", "a_n", "status"];
        let curves = |c: &[Quintuple]| c.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
        let mut rows = Vec::new();
        let mut out = Vec::new();
        let mut ok = true;
        if a.verify || a.extend.is_some() {
            let k = a.extend.unwrap_or(12);
            for (rec, check) in reg.records.iter().zip(check_registry(&reg, k)) {
                ok &= check.passed;
                let status = if check.passed { "PASS" } else { "FAIL" };
                if let Some(p) = &check.problem {
                    r.doc.diagnostics.push(format!("{}: {p}", rec.conductor));
                }
                rows.push(vec![
                    rec.conductor.to_string(),
                    curves(&rec.curves),
                    rec.r_check.to_string(),
                    rec.t_check.to_string(),
                    join(&check.computed),
                    status.into(),
                ]);
                out.push(json!({
                    "conductor": rec.conductor,
                    "curves": rec.curves.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                    "r_check": rec.r_check,
                    "t_check": rec.t_check,
                    "printed": dec_list(&rec.a_printed),
                    "computed": dec_list(&check.computed),
                    "inferred": check.inferred.map(|(x, y)| json!([x, y])),
                    "curves_agree": check.curves_agree,
                    "passed": check.passed,
                }));
            }
        } else {
            for rec in &reg.records {
                rows.push(vec![
                    rec.conductor.to_string(),
                    curves(&rec.curves),
                    rec.r_check.to_string(),
                    rec.t_check.to_string(),
                    join(rec.sequence()),
                    String::new(),
                ]);
                out.push(json!({
                    "conductor": rec.conductor,
                    "curves": rec.curves.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                    "r_check": rec.r_check,
                    "t_check": rec.t_check,
                    "a": dec_list(rec.sequence()),
                }));
            }
        }
        if a.save && ok {
            let k = a.extend.unwrap_or(12);
            let records = reg.records.par_iter().map(|rec| extend_block(rec, k)).collect::<Result<Vec<_>>>()?;
            let path = a.registry.clone().unwrap_or_else(default_registry_path);
            save_registry(&path, &Registry { records, extra: reg.extra.clone() })?;
            eprintln!("registry written to {}", path.display());
        }
        let passed = rows.iter().filter(|row| row[5] == "PASS").count();
        r.doc.results = json!({ "rows": out });
        r.plain = columns(&header, &rows);
        if a.verify || a.extend.is_some() {
            let _ = writeln!(r.plain, "{passed}/{} rows PASS", rows.len());
        }
        r.table(&header, rows);
        r.doc.status = Status::from_ok(ok);
        Ok(())
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaCheck {
    Triple,
    Eta256,
    E2,
    Weight4,
}

pub fn theta(check: ThetaCheck, order: usize) -> Report {
    let name = match check {
        ThetaCheck::Triple => "triple_product",
        ThetaCheck::Eta256 => "eta256",
        ThetaCheck::E2 => "e2",
        ThetaCheck::Weight4 => "weight4",
    };
    run("theta", json!({ "check": name, "order": order }), |r| {
        let mismatch = |m: Option<num_rational::Rational64>| m.map(|e| e.to_string());
        let verdict = |b: bool| if b { "ok" } else { "FAIL" };
        let mut rows = Vec::new();
        let ok = match check {
            ThetaCheck::Triple => {
                let checks = verify_triple_product(&standard_pairs(), order)?;
                let mut list = Vec::new();
                for (a, b, c) in &checks {
                    rows.push(vec![format!("f({a}, {b})"), verdict(c.holds).into(), mismatch(c.first_mismatch).unwrap_or_default()]);
                    list.push(json!({ "a": a.to_string(), "b": b.to_string(), "holds": c.holds, "first_mismatch": mismatch(c.first_mismatch) }));
                }
                r.doc.results = json!({ "pairs": list });
                checks.iter().all(|(_, _, c)| c.holds)
            }
            ThetaCheck::Eta256 => {
                let res = verify_eta256_identities(order)?;
                for (label, c) in [("theta form", &res.theta_form), ("eta form", &res.eta_form)] {
                    rows.push(vec![label.into(), verdict(c.holds).into(), mismatch(c.first_mismatch).unwrap_or_default()]);
                }
                r.doc.results = json!({
                    "theta_form": { "holds": res.theta_form.holds, "first_mismatch": mismatch(res.theta_form.first_mismatch) },
                    "eta_form": { "holds": res.eta_form.holds, "first_mismatch": mismatch(res.eta_form.first_mismatch) },
                });
                res.holds()
            }
            ThetaCheck::E2 => {
                let c = verify_e2_identity(order)?;
                rows.push(vec!["q η'/η = E₂".into(), verdict(c.holds).into(), mismatch(c.first_mismatch).unwrap_or_default()]);
                r.doc.results = json!({ "holds": c.holds, "first_mismatch": mismatch(c.first_mismatch) });
                c.holds
            }
            ThetaCheck::Weight4 => {
                let w = verify_weight4(order)?;
                rows.push(vec!["printed coefficients".into(), verdict(w.printed_ok).into(), String::new()]);
                let first = w.multiplicativity_failures.first().map(|(m, n)| format!("({m}, {n})"));
                rows.push(vec![
                    format!("c_mn = c_m c_n, {} coprime pairs", w.pairs_checked),
                    verdict(w.multiplicativity_failures.is_empty()).into(),
                    first.unwrap_or_default(),
                ]);
                r.doc.results = json!({
                    "printed": w.printed.iter().map(|(n, p, c)| json!({ "n": n, "printed": p.to_string(), "computed": c.to_string() })).collect::<Vec<_>>(),
                    "printed_ok": w.printed_ok,
                    "pairs_checked": w.pairs_checked,
                    "multiplicativity_failures": w.multiplicativity_failures,
                });
                w.holds()
            }
        };
        let header = ["identity", "verdict", "first mismatch"];
        r.plain = columns(&header, &rows);
        r.table(&header, rows);
        r.doc.status = Status::from_ok(ok);
        Ok(())
    })
}

/// A quintuple, or a registry level written as `N` or `N.x`.
fn target_series(reg: &Registry, target: &str, order: usize) -> Result<PowerSeries> {
    if target.contains(',') {
        let q: Quintuple = target.parse()?;
        return an_expansion(&curve_from_quintuple(q)?, order);
    }
    let level = target.split('.').next().unwrap_or_default();
    let level: u64 = level
        .parse()
        .map_err(|_| Error::InvalidArgs(format!("target must be a quintuple or a level label, got {target:?}")))?;
    level_newform(reg, level, order)
}

pub struct SearchArgs {
    pub blocks: Vec<u64>,
    pub s: usize,
    pub max_r: i64,
    pub max_t: u64,
    pub t_divides: Option<u64>,
    pub order: usize,
    pub target: String,
    pub floor: usize,
}

pub fn search_cmd(a: SearchArgs) -> Report {
    let args = json!({
        "blocks": a.blocks, "s": a.s, "max_r": a.max_r, "max_t": a.max_t,
        "t_divides": a.t_divides, "order": a.order, "target": a.target, "floor": a.floor,
    });
    run("search", args, |r| {
        let reg = Registry::builtin();
        let target = target_series(&reg, &a.target, a.order)?;
        let store = BlockStore::from_registry(&reg);
        let bounds = SearchBounds { s: a.s, max_r: a.max_r, max_t: a.max_t, t_divides: a.t_divides };
        let found = search(&store, &a.blocks, &bounds, &target, a.floor)?;
        let mut rows = Vec::new();
        let mut list = Vec::new();
        for c in &found {
            let v = match c.verdict {
                Verdict::Pending => "pending".to_string(),
                Verdict::Match { order } => format!("match below q^{order}"),
                Verdict::MismatchAt { exponent } => format!("mismatch at q^{exponent}"),
                Verdict::Undecided { overlap } => format!("undecided, agrees below q^{overlap}"),
            };
            rows.push(vec![c.to_string(), v]);
            list.push(json!({ "product": c.to_string(), "parts": c.parts, "verdict": c.verdict, "match_order": c.match_order }));
        }
        let matches = found.iter().filter(|c| matches!(c.verdict, Verdict::Match { .. })).count();
        r.doc.results = json!({ "candidates": list, "matches": matches, "disclaimer": SEARCH_DISCLAIMER });
        let header = ["product", "verdict"];
        r.plain = columns(&header, &rows);
        let _ = writeln!(r.plain, "{} candidates, {matches} matching\n{SEARCH_DISCLAIMER}", found.len());
        r.table(&header, rows);
        Ok(())
    })
}

pub fn etaquotient(level: u64, order: usize, bound: i64) -> Report {
    run("etaquotient", json!({ "level": level, "order": order, "bound": bound }), |r| {
        let found = eta_quotient_search(&Registry::builtin(), level, order, bound)?;
        let rows: Vec<Vec<String>> = found.iter().map(|e| vec![e.to_string()]).collect();
        r.doc.results = json!({
            "quotients": found.iter().map(|e| json!({ "product": e.to_string(), "terms": e.terms() })).collect::<Vec<_>>(),
            "disclaimer": SEARCH_DISCLAIMER,
        });
        r.plain = if found.is_empty() {
            format!("no eta quotient of level {level} with |r_t| <= {bound} matches below q^{order}\n")
        } else {
            rows.iter().map(|row| format!("{}\n", row[0])).collect()
        };
        let _ = writeln!(r.plain, "{SEARCH_DISCLAIMER}");
        r.table(&["product"], rows);
        Ok(())
    })
}

pub fn lmfdb(label: &str, upto: usize, refresh: bool, curve: Option<Quintuple>) -> Report {
    let args = json!({ "label": label, "upto": upto, "refresh": refresh, "curve": curve.map(|q| q.to_string()) });
    run("lmfdb", args, |r| {
        let client = Client::new(ClientConfig::from_env());
        let (rec, source) = client.fetch(label, upto, refresh)?;
        eprintln!(
            "{label}: {}",
            match source {
                Source::Cache => "from cache",
                Source::Bundled => "from bundled fixture",
                Source::Network => "downloaded",
            }
        );
        let model = curve.unwrap_or(rec.quintuple);
        let report = crosscheck(&rec, &curve_from_quintuple(model)?, upto)?;
        let rows: Vec<Vec<String>> = report.mismatches.iter().map(|(n, a, b)| vec![n.to_string(), a.clone(), b.clone()]).collect();
        r.doc.results = json!({
            "label": rec.label,
            "database_curve": rec.quintuple.to_string(),
            "checked_curve": model.to_string(),
            "upto": upto,
            "agrees": report.agrees(),
            "first_mismatch": report.first_mismatch(),
            "mismatches": report.mismatches,
        });
        r.plain = match report.first_mismatch() {
            None => format!("{label}: f_1..f_{upto} agree with point counting on {model}\n"),
            Some(n) => format!("{label}: first disagreement with {model} at f_{n}\n{}", columns(&["n", "database", "local"], &rows)),
        };
        r.table(&["n", "database", "local"], rows);
        r.doc.status = Status::from_ok(report.agrees());
        Ok(())
    })
}

pub fn verify_all_cmd() -> Report {
    run("verify-all", json!({}), |r| {
        let report = verify_all(&Registry::builtin());
        let rows: Vec<Vec<String>> = report
            .items
            .iter()
            .map(|i| {
                let s = if i.status == ItemStatus::Pass { "PASS" } else { "FAIL" };
                vec![s.to_string(), i.id.to_string(), i.summary.clone()]
            })
            .collect();
        for i in report.failures() {
            r.doc.diagnostics.push(format!("{}: {}", i.id, i.summary));
        }
        r.doc.results = serde_json::to_value(&report).expect("report serializes");
        let header = ["status", "item", "summary"];
        r.plain = columns(&header, &rows);
        r.table(&header, rows);
        r.doc.status = Status::from_ok(report.all_passed());
        Ok(())
    })
}
