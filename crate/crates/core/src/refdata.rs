//! Reference datasets shipped in `data/`.
//!
//! Every file is plain CSV preceded by a `#` header block with two tagged
//! lines, `# provenance: <tag>` and `# source: <citation>`. The files are
//! embedded at compile time; setting `EFFCHARGE_DATA_DIR` makes the loaders
//! read the same file names from that directory instead.

use crate::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

pub const DATA_DIR_ENV: &str = "EFFCHARGE_DATA_DIR";

const MANIFEST: &str = include_str!("../data/SHA256SUMS");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dataset {
    Table1,
    Table2,
    HfDensityNe,
    HfDensityAr,
    FormFactorFits,
}

impl Dataset {
    pub const ALL: [Dataset; 5] =
        [Dataset::Table1, Dataset::Table2, Dataset::HfDensityNe, Dataset::HfDensityAr, Dataset::FormFactorFits];

    pub fn file_name(self) -> &'static str {
        match self {
            Dataset::Table1 => "table1.csv",
            Dataset::Table2 => "table2.csv",
            Dataset::HfDensityNe => "hf_density_ne.csv",
            Dataset::HfDensityAr => "hf_density_ar.csv",
            Dataset::FormFactorFits => "formfactor_fits.csv",
        }
    }

    fn embedded(self) -> &'static str {
        match self {
            Dataset::Table1 => include_str!("../data/table1.csv"),
            Dataset::Table2 => include_str!("../data/table2.csv"),
            Dataset::HfDensityNe => include_str!("../data/hf_density_ne.csv"),
            Dataset::HfDensityAr => include_str!("../data/hf_density_ar.csv"),
            Dataset::FormFactorFits => include_str!("../data/formfactor_fits.csv"),
        }
    }

    /// HF density dataset for a nuclear charge, if one is shipped.
    pub fn hf_density(z: u32) -> Option<Dataset> {
        match z {
            10 => Some(Dataset::HfDensityNe),
            18 => Some(Dataset::HfDensityAr),
            _ => None,
        }
    }

    /// SHA-256 of the shipped file as listed in `data/SHA256SUMS`.
    pub fn expected_sha256(self) -> Option<&'static str> {
        MANIFEST.lines().find_map(|l| {
            let (hash, name) = l.split_once(char::is_whitespace)?;
            (name.trim() == self.file_name()).then_some(hash)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    PublishedTable,
    ExternalHf,
    ExternalFit,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::PublishedTable => "published-table",
            Provenance::ExternalHf => "external-HF",
            Provenance::ExternalFit => "external-fit",
        }
    }

    fn parse(tag: &str) -> Option<Self> {
        [Provenance::PublishedTable, Provenance::ExternalHf, Provenance::ExternalFit].into_iter().find(|p| p.tag() == tag)
    }
}

/// Raw file contents and where they came from.
#[derive(Debug, Clone)]
pub struct DataFile {
    pub dataset: Dataset,
    pub origin: String,
    pub text: String,
}

impl DataFile {
    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.text.as_bytes()))
    }

    /// True when the contents match the shipped checksum.
    pub fn is_pristine(&self) -> bool {
        self.dataset.expected_sha256() == Some(self.sha256().as_str())
    }
}

pub fn data_dir_override() -> Option<PathBuf> {
    std::env::var_os(DATA_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

pub fn read_dataset(dataset: Dataset) -> Result<DataFile> {
    match data_dir_override() {
        Some(dir) => {
            let path = dir.join(dataset.file_name());
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            Ok(DataFile { dataset, origin: path.display().to_string(), text })
        }
        None => Ok(DataFile { dataset, origin: "embedded".into(), text: dataset.embedded().to_owned() }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RecordKey {
    pub z: u32,
    pub n: u32,
    pub state: String,
}

impl RecordKey {
    pub fn ground(z: u32, n: u32) -> Self {
        RecordKey { z, n, state: "ground".into() }
    }
}

impl fmt::Display for RecordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z={} N={} {}", self.z, self.n, self.state)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceRecord {
    pub key: RecordKey,
    pub quantities: Vec<(String, f64)>,
    pub provenance: Provenance,
    pub source: String,
}

impl ReferenceRecord {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.quantities.iter().find(|q| q.0 == name).map(|q| q.1)
    }
}

#[derive(Debug, Clone)]
struct Header {
    provenance: Provenance,
    source: String,
}

fn parse_header(text: &str) -> Result<Header> {
    let mut provenance = None;
    let mut source = None;
    for (i, line) in text.lines().enumerate() {
        let Some(body) = line.strip_prefix('#') else { break };
        let body = body.trim();
        if let Some(tag) = body.strip_prefix("provenance:") {
            let p = Provenance::parse(tag.trim())
                .ok_or_else(|| Error::Parse { line: i + 1, message: format!("unknown provenance tag {:?}", tag.trim()) })?;
            provenance = Some(p);
        } else if let Some(s) = body.strip_prefix("source:") {
            source = Some(s.trim().to_owned());
        }
    }
    match (provenance, source) {
        (Some(provenance), Some(source)) if !source.is_empty() => Ok(Header { provenance, source }),
        _ => Err(Error::Parse { line: 1, message: "missing provenance or source line in header".into() }),
    }
}

/// Data rows as `(line number, fields)` after checking the column names.
fn parse_rows(text: &str, columns: &[&str]) -> Result<Vec<(usize, Vec<String>)>> {
    let mut reader =
        csv::ReaderBuilder::new().comment(Some(b'#')).has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut header_seen = false;
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if !header_seen {
            let got: Vec<&str> = rec.iter().collect();
            if got != columns {
                return Err(Error::Parse { line, message: format!("expected columns {columns:?}, found {got:?}") });
            }
            header_seen = true;
            continue;
        }
        if rec.len() != columns.len() {
            return Err(Error::Parse { line, message: format!("expected {} fields, found {}", columns.len(), rec.len()) });
        }
        rows.push((line, rec.iter().map(str::to_owned).collect()));
    }
    if !header_seen {
        return Err(Error::Parse { line: 0, message: "no column header".into() });
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 0, message: "no data rows".into() });
    }
    Ok(rows)
}

fn number(line: usize, column: &str, field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse { line, message: format!("column {column}: not a number: {field:?}") })
}

pub const TABLE1_COLUMNS: [&str; 5] = ["species", "E2", "E_var", "E_MCHF", "E_HF"];
pub const TABLE2_COLUMNS: [&str; 5] = ["Z", "Zstar", "E0", "E2_single", "E_HF"];
pub const HF_DENSITY_COLUMNS: [&str; 2] = ["r", "radial_density"];
pub const FIT_COLUMNS: [&str; 13] = ["symbol", "Z", "c", "a1", "a2", "a3", "a4", "a5", "b1", "b2", "b3", "b4", "b5"];

/// `(Z, N, state)` for the species labels of `table1.csv`.
pub fn table1_key(species: &str) -> Option<RecordKey> {
    let (z, n, state) = match species {
        "H-" => (1, 2, "ground"),
        "He" => (2, 2, "ground"),
        "Li" => (3, 3, "ground"),
        "He 2 3S" => (2, 2, "2 3S"),
        "He 2 1S" => (2, 2, "2 1S"),
        _ => return None,
    };
    Some(RecordKey { z, n, state: state.into() })
}

/// Parse a table dataset from text. Only `Table1` and `Table2` hold records.
pub fn parse_reference(dataset: Dataset, text: &str) -> Result<Vec<ReferenceRecord>> {
    let columns: &[&str] = match dataset {
        Dataset::Table1 => &TABLE1_COLUMNS,
        Dataset::Table2 => &TABLE2_COLUMNS,
        other => return Err(Error::domain(format!("{} is not a record table", other.file_name()))),
    };
    if text.trim().is_empty() {
        return Err(Error::Parse { line: 0, message: "empty file".into() });
    }
    let header = parse_header(text)?;
    let rows = parse_rows(text, columns)?;
    let mut records = Vec::with_capacity(rows.len());
    let mut keys = BTreeSet::new();
    for (line, fields) in rows {
        let key = match dataset {
            Dataset::Table1 => table1_key(&fields[0])
                .ok_or_else(|| Error::Parse { line, message: format!("unknown species {:?}", fields[0]) })?,
            _ => {
                let z: u32 = fields[0]
                    .parse()
                    .map_err(|_| Error::Parse { line, message: format!("column Z: not an integer: {:?}", fields[0]) })?;
                RecordKey::ground(z, z)
            }
        };
        if !keys.insert(key.clone()) {
            return Err(Error::Parse { line, message: format!("duplicate record {key}") });
        }
        let quantities = columns[1..]
            .iter()
            .zip(&fields[1..])
            .map(|(c, f)| Ok(((*c).to_owned(), number(line, c, f)?)))
            .collect::<Result<Vec<_>>>()?;
        records.push(ReferenceRecord { key, quantities, provenance: header.provenance, source: header.source.clone() });
    }
    if dataset == Dataset::Table2 {
        validate_table2(&records)?;
    }
    Ok(records)
}

fn validate_table2(records: &[ReferenceRecord]) -> Result<()> {
    if records.len() != 100 {
        return Err(Error::domain(format!("table2 must hold 100 rows, found {}", records.len())));
    }
    for (i, r) in records.iter().enumerate() {
        if r.key.z as usize != i + 1 {
            return Err(Error::domain(format!("table2 row {} has Z={}, expected {}", i + 1, r.key.z, i + 1)));
        }
    }
    for w in records.windows(2) {
        if w[1].get("E_HF") >= w[0].get("E_HF") {
            return Err(Error::domain(format!("table2 E_HF not decreasing at Z={}", w[1].key.z)));
        }
    }
    Ok(())
}

/// Load and validate a table dataset.
pub fn load_reference(dataset: Dataset) -> Result<Vec<ReferenceRecord>> {
    parse_reference(dataset, &read_dataset(dataset)?.text)
}

/// Tabulated radial density `4 pi r^2 rho(r)`.
#[derive(Debug, Clone, Serialize)]
pub struct RadialCurve {
    pub z: u32,
    pub r: Vec<f64>,
    pub values: Vec<f64>,
    pub provenance: Provenance,
    pub source: String,
}

impl RadialCurve {
    /// Linear interpolation, zero outside the tabulated range.
    pub fn interpolate(&self, r: f64) -> f64 {
        let (Some(&lo), Some(&hi)) = (self.r.first(), self.r.last()) else { return 0.0 };
        if r < lo || r > hi {
            return 0.0;
        }
        let i = self.r.partition_point(|&x| x <= r).clamp(1, self.r.len() - 1);
        let t = (r - self.r[i - 1]) / (self.r[i] - self.r[i - 1]);
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }

    /// Trapezoid integral over the tabulated range.
    pub fn integral(&self) -> f64 {
        self.r.windows(2).zip(self.values.windows(2)).map(|(r, v)| 0.5 * (r[1] - r[0]) * (v[0] + v[1])).sum()
    }
}

pub fn parse_hf_density(z: u32, text: &str) -> Result<RadialCurve> {
    if text.trim().is_empty() {
        return Err(Error::Parse { line: 0, message: "empty file".into() });
    }
    let header = parse_header(text)?;
    let mut r = Vec::new();
    let mut values = Vec::new();
    for (line, f) in parse_rows(text, &HF_DENSITY_COLUMNS)? {
        let x = number(line, "r", &f[0])?;
        if r.last().is_some_and(|&p| x <= p) {
            return Err(Error::Parse { line, message: "r must be strictly increasing".into() });
        }
        r.push(x);
        values.push(number(line, "radial_density", &f[1])?);
    }
    Ok(RadialCurve { z, r, values, provenance: header.provenance, source: header.source })
}

pub fn load_hf_density(z: u32) -> Result<RadialCurve> {
    let ds = Dataset::hf_density(z).ok_or_else(|| Error::domain(format!("no HF density shipped for Z={z}")))?;
    parse_hf_density(z, &read_dataset(ds)?.text)
}

/// `f(s) = c + sum_i a_i exp(-b_i s^2)` with `s` in 1/angstrom.
#[derive(Debug, Clone, Serialize)]
pub struct GaussianFit {
    pub symbol: String,
    pub z: u32,
    pub c: f64,
    pub a: [f64; 5],
    pub b: [f64; 5],
    pub provenance: Provenance,
    pub source: String,
}

impl GaussianFit {
    pub fn eval(&self, s: f64) -> f64 {
        self.c + self.a.iter().zip(&self.b).map(|(a, b)| a * (-b * s * s).exp()).sum::<f64>()
    }
}

pub fn parse_formfactor_fits(text: &str) -> Result<Vec<GaussianFit>> {
    if text.trim().is_empty() {
        return Err(Error::Parse { line: 0, message: "empty file".into() });
    }
    let header = parse_header(text)?;
    let mut out: Vec<GaussianFit> = Vec::new();
    for (line, f) in parse_rows(text, &FIT_COLUMNS)? {
        let z: u32 = f[1].parse().map_err(|_| Error::Parse { line, message: format!("column Z: not an integer: {:?}", f[1]) })?;
        if out.iter().any(|g| g.z == z) {
            return Err(Error::Parse { line, message: format!("duplicate fit for Z={z}") });
        }
        let mut v = [0.0; 11];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = number(line, FIT_COLUMNS[k + 2], &f[k + 2])?;
        }
        out.push(GaussianFit {
            symbol: f[0].clone(),
            z,
            c: v[0],
            a: v[1..6].try_into().unwrap(),
            b: v[6..11].try_into().unwrap(),
            provenance: header.provenance,
            source: header.source.clone(),
        });
    }
    Ok(out)
}

pub fn load_formfactor_fits() -> Result<Vec<GaussianFit>> {
    parse_formfactor_fits(&read_dataset(Dataset::FormFactorFits)?.text)
}

pub fn formfactor_fit(z: u32) -> Result<GaussianFit> {
    load_formfactor_fits()?
        .into_iter()
        .find(|g| g.z == z)
        .ok_or_else(|| Error::domain(format!("no form-factor fit shipped for Z={z}")))
}

/// Pass when either bound is met; an absent bound never passes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Tolerance {
    pub relative: Option<f64>,
    pub absolute: Option<f64>,
}

impl Tolerance {
    pub fn relative(r: f64) -> Self {
        Tolerance { relative: Some(r), absolute: None }
    }

    pub fn absolute(a: f64) -> Self {
        Tolerance { relative: None, absolute: Some(a) }
    }

    pub fn accepts(&self, abs_delta: f64, rel_delta: f64) -> bool {
        self.absolute.is_some_and(|t| abs_delta.abs() <= t) || self.relative.is_some_and(|t| rel_delta.abs() <= t)
    }
}

/// A computed number and the reference column it is checked against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComputedValue {
    pub key: RecordKey,
    pub quantity: String,
    pub reference: String,
    pub value: f64,
}

impl ComputedValue {
    /// Compared against the reference column of the same name.
    pub fn new(key: RecordKey, quantity: &str, value: f64) -> Self {
        ComputedValue { key, quantity: quantity.into(), reference: quantity.into(), value }
    }

    pub fn against(key: RecordKey, quantity: &str, reference: &str, value: f64) -> Self {
        ComputedValue { key, quantity: quantity.into(), reference: reference.into(), value }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonEntry {
    pub key: RecordKey,
    pub quantity: String,
    pub reference_quantity: String,
    pub computed: f64,
    pub reference: f64,
    pub abs_delta: f64,
    pub rel_delta: f64,
    pub pass: bool,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Uncovered {
    pub key: RecordKey,
    pub quantity: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonSummary {
    pub compared: usize,
    pub passed: usize,
    pub failed: usize,
    pub uncovered: usize,
    pub max_abs_delta: f64,
    pub max_rel_delta: f64,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub tolerance: Tolerance,
    pub entries: Vec<ComparisonEntry>,
    pub uncovered: Vec<Uncovered>,
    pub summary: ComparisonSummary,
}

/// `rel_delta = (computed - reference) / reference`.
pub fn compare(computed: &[ComputedValue], reference: &[ReferenceRecord], tolerance: Tolerance) -> ComparisonReport {
    let mut entries = Vec::new();
    let mut uncovered = Vec::new();
    for c in computed {
        let hit = reference.iter().find(|r| r.key == c.key).and_then(|r| Some((r, r.get(&c.reference)?)));
        let Some((rec, refv)) = hit else {
            uncovered.push(Uncovered { key: c.key.clone(), quantity: c.quantity.clone() });
            continue;
        };
        let abs_delta = c.value - refv;
        let rel_delta = if refv != 0.0 {
            abs_delta / refv
        } else if abs_delta == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        entries.push(ComparisonEntry {
            key: c.key.clone(),
            quantity: c.quantity.clone(),
            reference_quantity: c.reference.clone(),
            computed: c.value,
            reference: refv,
            abs_delta,
            rel_delta,
            pass: tolerance.accepts(abs_delta, rel_delta),
            source: rec.source.clone(),
        });
    }
    let passed = entries.iter().filter(|e| e.pass).count();
    let summary = ComparisonSummary {
        compared: entries.len(),
        passed,
        failed: entries.len() - passed,
        uncovered: uncovered.len(),
        max_abs_delta: entries.iter().map(|e| e.abs_delta.abs()).fold(0.0, f64::max),
        max_rel_delta: entries.iter().map(|e| e.rel_delta.abs()).fold(0.0, f64::max),
        all_pass: passed == entries.len(),
    };
    ComparisonReport { tolerance, entries, uncovered, summary }
}
