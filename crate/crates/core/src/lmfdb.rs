//! Cross-checking against the public LMFDB database.
//!
//! Records are looked up in the local cache first, then among the bundled
//! fixtures, and only then over HTTP (with the `remote` feature). Setting
//! `NEWFORM_OFFLINE=1` forbids the last step. Cache files are never
//! overwritten: a refresh writes `<label>.v<N+1>.json` next to the old one.
//!
//! Bundled fixtures: `37.a` from the published expansion of the rank-one
//! curve of conductor 37, and `36.a` from the expansion of `η(q⁶)⁴`. Neither
//! is derived from point counting.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::elliptic::{an_expansion, Curve, Quintuple};
use crate::error::{Error, Result};
use crate::qseries::PowerSeries;
use crate::registry::cache_dir;

pub const OFFLINE_ENV: &str = "NEWFORM_OFFLINE";
pub const BASE_URL_ENV: &str = "NEWFORM_LMFDB_URL";
pub const DEFAULT_BASE_URL: &str = "https://www.lmfdb.org/api";

const BUNDLED: &[(&str, &str)] = &[
    ("36.a", include_str!("../fixtures/lmfdb/36.a.json")),
    ("37.a", include_str!("../fixtures/lmfdb/37.a.json")),
];

/// Isogeny-class labels for registry conductors where the class is unambiguous.
pub const REGISTRY_LABELS: &[(u64, &str)] = &[
    (36, "36.a"),
    (37, "37.a"),
    (43, "43.a"),
    (53, "53.a"),
    (61, "61.a"),
    (79, "79.a"),
    (83, "83.a"),
    (389, "389.a"),
];

pub fn label_for_conductor(conductor: u64) -> Option<&'static str> {
    REGISTRY_LABELS.iter().find(|(n, _)| *n == conductor).map(|(_, l)| *l)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemoteRecord {
    pub label: String,
    pub quintuple: Quintuple,
    /// `f_0, f_1, …, f_K` with `f_0 = 0` and `f_1 = 1`.
    #[serde(with = "crate::registry::decimal_vec")]
    pub coefficients: Vec<BigInt>,
    /// Seconds since the Unix epoch; 0 for bundled records.
    pub fetched_at: u64,
    pub source_url: String,
}

impl RemoteRecord {
    /// Largest `K` with `f_K` known.
    pub fn upto(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn series(&self) -> PowerSeries {
        PowerSeries::from_coeffs(self.coefficients.clone())
    }

    fn validate(&self) -> Result<()> {
        if !valid_label(&self.label) {
            return Err(Error::ParseFailure { message: format!("bad label {:?}", self.label), raw: String::new() });
        }
        if self.coefficients.len() > 1 && !self.coefficients[1].is_one() {
            return Err(Error::ParseFailure {
                message: format!("{}: f_1 is {}, not 1", self.label, self.coefficients[1]),
                raw: String::new(),
            });
        }
        Ok(())
    }
}

fn valid_label(label: &str) -> bool {
    let mut it = label.split('.');
    let (Some(n), Some(c), None) = (it.next(), it.next(), it.next()) else {
        return false;
    };
    !n.is_empty()
        && n.bytes().all(|b| b.is_ascii_digit())
        && !c.is_empty()
        && c.bytes().all(|b| b.is_ascii_lowercase())
}

pub fn bundled(label: &str) -> Option<RemoteRecord> {
    BUNDLED
        .iter()
        .find(|(l, _)| *l == label)
        .map(|(_, text)| serde_json::from_str(text).expect("bundled fixture parses"))
}

pub fn bundled_labels() -> Vec<&'static str> {
    BUNDLED.iter().map(|(l, _)| *l).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClientConfig {
    pub base_url: String,
    pub cache_dir: PathBuf,
    pub offline: bool,
}

impl ClientConfig {
    /// From `NEWFORM_CACHE_DIR`, `NEWFORM_OFFLINE` and `NEWFORM_LMFDB_URL`.
    pub fn from_env() -> Self {
        let offline = std::env::var(OFFLINE_ENV).map(|v| v == "1").unwrap_or(false);
        let base_url = std::env::var(BASE_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string());
        ClientConfig { base_url, cache_dir: cache_dir().join("lmfdb"), offline }
    }
}

/// Where a record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Cache,
    Bundled,
    Network,
}

#[derive(Debug)]
pub struct Client {
    config: ClientConfig,
    inflight: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl Client {
    pub fn new(config: ClientConfig) -> Self {
        Client { config, inflight: Mutex::new(HashMap::new()) }
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    /// A record with at least `f_1 … f_K`. `refresh` skips cache and fixtures.
    pub fn fetch(&self, label: &str, upto: usize, refresh: bool) -> Result<(RemoteRecord, Source)> {
        if !valid_label(label) {
            return Err(Error::InvalidArgs(format!("not an isogeny-class label: {label:?}")));
        }
        let gate = {
            let mut map = self.inflight.lock().expect("inflight lock");
            map.entry(label.to_string()).or_default().clone()
        };
        let _guard = gate.lock().expect("label lock");

        if !refresh {
            if let Some(rec) = self.cached(label)? {
                if rec.upto() >= upto {
                    return Ok((rec, Source::Cache));
                }
            }
            if let Some(rec) = bundled(label) {
                if rec.upto() >= upto {
                    return Ok((rec, Source::Bundled));
                }
            }
        }
        if self.config.offline {
            return Err(Error::NetworkUnavailable(format!("{label} is not cached and {OFFLINE_ENV}=1")));
        }
        let rec = self.download(label, upto)?;
        self.store(&rec)?;
        Ok((rec, Source::Network))
    }

    fn versions(&self, label: &str) -> Result<Vec<(u32, PathBuf)>> {
        let dir = &self.config.cache_dir;
        if !dir.exists() {
            return Ok(Vec::new());
        }
        let prefix = format!("{label}.v");
        let mut out = Vec::new();
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
            let Some(v) = name.strip_prefix(&prefix).and_then(|r| r.strip_suffix(".json")) else { continue };
            if let Ok(v) = v.parse::<u32>() {
                out.push((v, path));
            }
        }
        out.sort();
        Ok(out)
    }

    /// Latest cached version of the record.
    pub fn cached(&self, label: &str) -> Result<Option<RemoteRecord>> {
        let Some((_, path)) = self.versions(label)?.pop() else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(&path)?;
        let rec: RemoteRecord = serde_json::from_str(&text)
            .map_err(|e| Error::ParseFailure { message: format!("{}: {e}", path.display()), raw: text.clone() })?;
        rec.validate()?;
        Ok(Some(rec))
    }

    /// Writes the record as a new version; returns its path.
    pub fn store(&self, rec: &RemoteRecord) -> Result<PathBuf> {
        rec.validate()?;
        let dir = &self.config.cache_dir;
        std::fs::create_dir_all(dir)?;
        let next = self.versions(&rec.label)?.last().map_or(1, |(v, _)| v + 1);
        let path = dir.join(format!("{}.v{next}.json", rec.label));
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        let body = serde_json::to_string_pretty(rec).map_err(|e| Error::SchemaViolation(e.to_string()))?;
        tmp.write_all(body.as_bytes())?;
        tmp.persist_noclobber(&path).map_err(|e| Error::Io(e.error))?;
        Ok(path)
    }

    #[cfg(feature = "remote")]
    fn download(&self, label: &str, upto: usize) -> Result<RemoteRecord> {
        let (curve_url, form_url) = query_urls(&self.config.base_url, label);
        let curve_raw = http_get(&curve_url)?;
        let form_raw = http_get(&form_url)?;
        let fetched_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let rec = parse_payloads(label, &curve_raw, &form_raw, form_url, fetched_at)?;
        if rec.upto() < upto {
            return Err(Error::InsufficientData(format!("{label}: server returned f_1..f_{}, need f_{upto}", rec.upto())));
        }
        Ok(rec)
    }

    #[cfg(not(feature = "remote"))]
    fn download(&self, label: &str, _upto: usize) -> Result<RemoteRecord> {
        Err(Error::NetworkUnavailable(format!("{label}: built without the `remote` feature")))
    }
}

#[cfg(feature = "remote")]
fn http_get(url: &str) -> Result<String> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(std::time::Duration::from_secs(30)))
        .build()
        .into();
    match agent.get(url).call() {
        Ok(mut resp) => resp
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::NetworkUnavailable(format!("{url}: {e}"))),
        Err(ureq::Error::StatusCode(404)) => Err(Error::NotFound(url.to_string())),
        Err(e) => Err(Error::NetworkUnavailable(format!("{url}: {e}"))),
    }
}

/// Query URLs for the curve models and the newform traces of an isogeny class.
pub fn query_urls(base: &str, label: &str) -> (String, String) {
    let base = base.trim_end_matches('/');
    let (n, class) = label.split_once('.').unwrap_or((label, ""));
    (
        format!("{base}/ec_curvedata/?lmfdb_iso={label}&_format=json&_fields=ainvs,lmfdb_number"),
        format!("{base}/mf_newforms/?label={n}.2.a.{class}&_format=json&_fields=label,traces"),
    )
}

#[derive(Deserialize)]
struct Page<T> {
    data: Vec<T>,
}

#[derive(Deserialize)]
struct CurveRow {
    ainvs: Vec<i64>,
    #[serde(default)]
    lmfdb_number: Option<u32>,
}

#[derive(Deserialize)]
struct FormRow {
    traces: Vec<serde_json::Value>,
}

/// Builds a record from the two API payloads; the raw text is kept on failure.
pub fn parse_payloads(
    label: &str,
    curve_raw: &str,
    form_raw: &str,
    source_url: String,
    fetched_at: u64,
) -> Result<RemoteRecord> {
    let fail = |message: String, raw: &str| Error::ParseFailure { message, raw: raw.to_string() };
    let curves: Page<CurveRow> =
        serde_json::from_str(curve_raw).map_err(|e| fail(format!("{label} curve data: {e}"), curve_raw))?;
    let forms: Page<FormRow> =
        serde_json::from_str(form_raw).map_err(|e| fail(format!("{label} newform data: {e}"), form_raw))?;
    if curves.data.is_empty() || forms.data.is_empty() {
        return Err(Error::NotFound(label.to_string()));
    }
    let curve = curves
        .data
        .iter()
        .min_by_key(|c| c.lmfdb_number.unwrap_or(u32::MAX))
        .expect("nonempty");
    let a: [i64; 5] = curve
        .ainvs
        .as_slice()
        .try_into()
        .map_err(|_| fail(format!("{label}: expected five a-invariants"), curve_raw))?;
    let mut coefficients = vec![BigInt::from(0)];
    for v in &forms.data[0].traces {
        let c = match v {
            serde_json::Value::Number(n) => n.to_string().parse::<BigInt>().ok(),
            serde_json::Value::String(s) => s.parse::<BigInt>().ok(),
            _ => None,
        }
        .ok_or_else(|| fail(format!("{label}: non-integer trace {v}"), form_raw))?;
        coefficients.push(c);
    }
    let rec = RemoteRecord { label: label.to_string(), quintuple: Quintuple(a), coefficients, fetched_at, source_url };
    rec.validate().map_err(|_| fail(format!("{label}: first trace is not 1"), form_raw))?;
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrosscheckReport {
    pub label: String,
    pub upto: usize,
    /// `(n, remote f_n, local f_n)` for every disagreement.
    pub mismatches: Vec<(usize, String, String)>,
}

impl CrosscheckReport {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn first_mismatch(&self) -> Option<usize> {
        self.mismatches.first().map(|m| m.0)
    }
}

/// Compares `f_1 … f_K` of the record with point counting on `curve`.
pub fn crosscheck(rec: &RemoteRecord, curve: &Curve, upto: usize) -> Result<CrosscheckReport> {
    if rec.upto() < upto {
        return Err(Error::InsufficientData(format!("{} has f_1..f_{}, need f_{upto}", rec.label, rec.upto())));
    }
    let local = an_expansion(curve, upto + 1)?;
    let mismatches = (1..=upto)
        .filter(|&n| rec.coefficients[n] != local.coeffs()[n])
        .map(|n| (n, rec.coefficients[n].to_string(), local.coeffs()[n].to_string()))
        .collect();
    Ok(CrosscheckReport { label: rec.label.clone(), upto, mismatches })
}

/// Convenience for tests and the CLI: a client rooted at `dir`, offline.
pub fn offline_client(dir: &Path) -> Client {
    Client::new(ClientConfig { base_url: DEFAULT_BASE_URL.to_string(), cache_dir: dir.to_path_buf(), offline: true })
}
