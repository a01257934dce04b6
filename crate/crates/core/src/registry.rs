//! Building-block records: the seventeen single-block rows shipped with the
//! crate, their extension to longer prefixes, and a JSON persistence format.
//!
//! Sequence values are written as decimal strings so that no consumer has to
//! cope with integers wider than 64 bits. Unknown fields survive a load/save
//! round trip.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::elliptic::{an_expansion, curve_from_quintuple, Quintuple};
use crate::error::{Error, Result};
use crate::products::{block_profile, extract_exponents, infer_block};

/// Environment variable naming the cache directory (registry and remote records).
pub const CACHE_DIR_ENV: &str = "NEWFORM_CACHE_DIR";

pub const REGISTRY_FILE: &str = "registry.json";

/// One building block: `f_N = η_N^ř(q^ť)` with `η_N = q^{1/(ř ť)} ∏ (1 - q^n)^{a_n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub conductor: u64,
    /// Models used for computation; all give the same expansion.
    pub curves: Vec<Quintuple>,
    pub r_check: u64,
    pub t_check: u64,
    #[serde(with = "decimal_vec")]
    pub a_printed: Vec<BigInt>,
    #[serde(default, with = "decimal_opt_vec")]
    pub a_extended: Option<Vec<BigInt>>,
    /// Length of `a_extended`.
    #[serde(default)]
    pub order: Option<usize>,
    /// Quintuples exactly as originally tabulated, when they differ from `curves`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed_curves: Option<Vec<Quintuple>>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl BlockRecord {
    /// The longest known block prefix.
    pub fn sequence(&self) -> &[BigInt] {
        self.a_extended.as_deref().unwrap_or(&self.a_printed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Registry {
    pub records: Vec<BlockRecord>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl Registry {
    pub fn builtin() -> Self {
        Registry { records: builtin_table1(), extra: BTreeMap::new() }
    }

    pub fn get(&self, conductor: u64) -> Option<&BlockRecord> {
        self.records.iter().find(|r| r.conductor == conductor)
    }

    pub fn conductors(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.conductor).collect()
    }
}

type Row = (u64, &'static [[i64; 5]], u64, u64, [i64; 12]);

const TABLE1: &[Row] = &[
    (36, &[[0, 0, 0, 0, 1]], 4, 6, [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]),
    (37, &[[0, 0, 1, -1, 0]], 2, 1, [1, 2, 3, 8, 16, 41, 97, 242, 598, 1532, 3898, 10067]),
    (43, &[[0, 1, 1, 0, 0]], 1, 1, [2, 3, 4, 12, 22, 52, 114, 268, 608, 1448, 3418, 8210]),
    (53, &[[1, -1, 1, 0, 0]], 1, 1, [1, 3, 4, 7, 13, 31, 57, 123, 259, 559, 1195, 2624]),
    (61, &[[1, 0, 0, -2, 1]], 1, 1, [1, 2, 3, 7, 10, 20, 38, 77, 149, 314, 626, 1295]),
    (79, &[[1, 1, 1, -2, 0]], 1, 1, [1, 1, 2, 5, 6, 11, 18, 36, 61, 118, 213, 400]),
    (83, &[[1, 1, 1, 1, 0]], 1, 1, [1, 1, 2, 4, 5, 11, 16, 31, 53, 97, 174, 330]),
    (88, &[[0, 0, 0, -4, 4]], 1, 2, [3, 6, 19, 48, 163, 506, 1683, 5618, 19123, 65634, 228102, 797858]),
    (89, &[[1, 1, 1, -1, 0]], 1, 1, [1, 1, 2, 3, 4, 10, 13, 25, 43, 79, 135, 246]),
    (92, &[[0, 0, 0, -1, 1]], 1, 2, [3, 5, 18, 43, 138, 426, 1371, 4428, 14683, 48882, 164970, 560368]),
    (101, &[[0, 1, 1, -1, -1]], 1, 1, [0, 2, 2, 2, 4, 7, 10, 18, 30, 52, 84, 152]),
    (243, &[[0, 0, 1, 0, -1], [0, 0, 1, 0, 20]], 1, 3, [2, 5, 10, 32, 80, 234, 668, 1988, 5888, 17840, 54284, 166950]),
    (256, &[[0, 0, 0, -2, 0], [0, 0, 0, 8, 0]], 1, 4, [4, 9, 36, 129, 516, 2041, 8516, 35780, 153252, 663305, 2901860, 12795009]),
    (288, &[[0, 0, 0, -12, 0], [0, 0, 0, 3, 0]], 2, 4, [2, 3, 13, 46, 166, 593, 2266, 8712, 34147, 135033, 540090, 2176712]),
    (389, &[[0, 1, 1, -2, 0]], 1, 1, [2, 3, 4, 11, 20, 51, 110, 259, 582, 1395, 3262, 7822]),
    (675, &[[0, 0, 1, 0, -169], [0, 0, 1, 0, 6]], 1, 3, [2, 5, 10, 20, 56, 129, 362, 945, 2590, 7093, 19772, 55306]),
    (2304, &[[0, 0, 0, -72, 0], [0, 0, 0, 18, 0]], 1, 4, [4, 6, 16, 42, 132, 381, 1220, 3851, 12532, 40994, 135908, 453455]),
];

/// The conductor-53 row is tabulated with the conductor-37 model; the
/// conductor-53 curve reproduces the tabulated sequence.
const PRINTED_53: [i64; 5] = [0, 0, 1, -1, 0];

/// The seventeen tabulated single-block newforms.
pub fn builtin_table1() -> Vec<BlockRecord> {
    TABLE1
        .iter()
        .map(|&(conductor, curves, r_check, t_check, a)| BlockRecord {
            conductor,
            curves: curves.iter().copied().map(Quintuple).collect(),
            r_check,
            t_check,
            a_printed: a.iter().copied().map(BigInt::from).collect(),
            a_extended: None,
            order: None,
            printed_curves: (conductor == 53).then(|| vec![Quintuple(PRINTED_53)]),
            extra: BTreeMap::new(),
        })
        .collect()
}

/// `a_1 … a_K` of the block, computed from one model by point counting.
pub fn compute_block(curve: Quintuple, r_check: u64, t_check: u64, k: usize) -> Result<Vec<BigInt>> {
    let c = curve_from_quintuple(curve)?;
    let f = an_expansion(&c, k * t_check as usize + 2)?;
    let g = extract_exponents(&f)?;
    let mut a = block_profile(&g, r_check, t_check)?.a;
    a.truncate(k);
    Ok(a)
}

/// Recomputes the block to `K ≥ 12` terms from the first model; the printed
/// prefix must be reproduced.
pub fn extend_block(rec: &BlockRecord, k: usize) -> Result<BlockRecord> {
    if k < rec.a_printed.len() {
        return Err(Error::InvalidArgs(format!(
            "extension length {k} is shorter than the printed prefix ({})",
            rec.a_printed.len()
        )));
    }
    let curve = *rec.curves.first().ok_or_else(|| Error::InvalidArgs("record has no curve".into()))?;
    let a = compute_block(curve, rec.r_check, rec.t_check, k)?;
    if let Some(index) = rec.a_printed.iter().zip(&a).position(|(p, c)| p != c) {
        return Err(Error::TableMismatch {
            conductor: rec.conductor,
            index: index + 1,
            printed: rec.a_printed[index].clone(),
            computed: a[index].clone(),
        });
    }
    Ok(BlockRecord { a_extended: Some(a), order: Some(k), ..rec.clone() })
}

/// Outcome of recomputing one record from each of its models.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowCheck {
    pub conductor: u64,
    pub passed: bool,
    pub inferred: Option<(u64, u64)>,
    #[serde(with = "decimal_vec")]
    pub computed: Vec<BigInt>,
    pub curves_agree: bool,
    pub problem: Option<String>,
}

/// Recomputes `a_1 … a_K` from every model of the record (`K` at least the
/// printed length) and compares against the printed prefix and inferred `(ř, ť)`.
pub fn check_record(rec: &BlockRecord, k: usize) -> RowCheck {
    let k = k.max(rec.a_printed.len());
    let fail = |problem: String| RowCheck {
        conductor: rec.conductor,
        passed: false,
        inferred: None,
        computed: Vec::new(),
        curves_agree: false,
        problem: Some(problem),
    };
    let per_curve: Vec<Result<Vec<BigInt>>> = rec
        .curves
        .iter()
        .map(|&c| compute_block(c, rec.r_check, rec.t_check, k))
        .collect();
    let mut seqs = Vec::new();
    for (c, r) in rec.curves.iter().zip(per_curve) {
        match r {
            Ok(a) => seqs.push(a),
            Err(e) => return fail(format!("curve {c}: {e}")),
        }
    }
    let Some(first) = seqs.first().cloned() else {
        return fail("record has no curve".into());
    };
    let curves_agree = seqs.iter().all(|s| *s == first);
    let inferred = rec.curves.first().and_then(|&c| {
        let f = an_expansion(&curve_from_quintuple(c).ok()?, k * rec.t_check as usize + 2).ok()?;
        infer_block(&extract_exponents(&f).ok()?).ok()
    });
    let mismatch = rec.a_printed.iter().zip(&first).position(|(p, c)| p != c);
    let problem = match (mismatch, curves_agree, inferred) {
        (Some(i), _, _) => Some(format!("a_{} printed {} computed {}", i + 1, rec.a_printed[i], first[i])),
        (None, false, _) => Some("models disagree".to_string()),
        (None, true, Some(rt)) if rt != (rec.r_check, rec.t_check) => {
            Some(format!("inferred (ř, ť) = {rt:?} differs from the record"))
        }
        _ => None,
    };
    RowCheck {
        conductor: rec.conductor,
        passed: problem.is_none(),
        inferred,
        computed: first,
        curves_agree,
        problem,
    }
}

/// [`check_record`] over every record, rows in parallel, results in registry order.
pub fn check_registry(reg: &Registry, k: usize) -> Vec<RowCheck> {
    reg.records.par_iter().map(|r| check_record(r, k)).collect()
}

pub fn cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
        return PathBuf::from(dir);
    }
    let home = std::env::var_os("HOME").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    home.join(".cache").join("newform")
}

pub fn default_registry_path() -> PathBuf {
    cache_dir().join(REGISTRY_FILE)
}

/// Writes the registry atomically (temporary file, then rename).
pub fn save_registry(path: &Path, reg: &Registry) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    let body = serde_json::to_string_pretty(reg).map_err(|e| Error::SchemaViolation(e.to_string()))?;
    tmp.write_all(body.as_bytes())?;
    tmp.write_all(b"\n")?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn load_registry(path: &Path) -> Result<Registry> {
    let text = std::fs::read_to_string(path)?;
    parse_registry(&text)
}

pub fn parse_registry(text: &str) -> Result<Registry> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let reg: Registry = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        Error::SchemaViolation(format!(
            "line {}, column {}, field `{}`: {}",
            inner.line(),
            inner.column(),
            e.path(),
            inner
        ))
    })?;
    for (i, r) in reg.records.iter().enumerate() {
        let bad = |what: &str| Error::SchemaViolation(format!("records[{i}] (conductor {}): {what}", r.conductor));
        if r.r_check == 0 || r.t_check == 0 {
            return Err(bad("r_check and t_check must be positive"));
        }
        if r.curves.is_empty() {
            return Err(bad("no curves"));
        }
        if let (Some(a), Some(k)) = (&r.a_extended, r.order) {
            if a.len() != k {
                return Err(bad("order does not match a_extended length"));
            }
        }
    }
    Ok(reg)
}

pub(crate) mod decimal_vec {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse::<BigInt>().map_err(|_| D::Error::custom(format!("not a decimal integer: {s:?}"))))
            .collect()
    }
}

mod decimal_opt_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => super::decimal_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super::decimal_vec")] Vec<BigInt>);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}
