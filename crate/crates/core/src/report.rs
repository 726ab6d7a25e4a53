//! Artifact emission: CSV tables with JSON headers and embedded checksums,
//! JSON reports, and atomic file writes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::asymptotics::OrbitClassification;
use crate::config::{CircleConfig, PartitionPair};
use crate::error::{Error, Result};
use crate::kernels::{ChainModel, StepDistribution};
use crate::mixing::{CutoffSweep, MixingCurve};
use crate::spectral::SpectrumEntry;
use crate::SCHEMA_VERSION;

/// Render a float with 17 significant digits (lossless for f64).
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Hex-encoded SHA-256 digest of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Write `bytes` to `path` atomically: write a sibling temporary file, then
/// rename it over the destination.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// A CSV artifact: a JSON metadata header on the first line (prefixed with
/// `# `), a column-name line, and string-rendered data rows. The header
/// carries the schema version and a SHA-256 checksum of the data section
/// (column line plus rows).
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    /// Metadata object; `schema_version` and `checksum` are added on render.
    pub meta: Value,
    /// Column names.
    pub columns: Vec<String>,
    /// Data rows, already rendered to strings.
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    /// Assemble a table; `meta` must be a JSON object.
    pub fn new(meta: Value, columns: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self> {
        if !meta.is_object() {
            return Err(Error::invalid("table metadata must be a JSON object"));
        }
        for row in &rows {
            if row.len() != columns.len() {
                return Err(Error::invalid(format!(
                    "row has {} cells but the table has {} columns",
                    row.len(),
                    columns.len()
                )));
            }
        }
        Ok(CsvTable {
            meta,
            columns,
            rows,
        })
    }

    fn data_section(&self) -> String {
        let mut data = self.columns.join(",");
        data.push('\n');
        for row in &self.rows {
            data.push_str(&row.join(","));
            data.push('\n');
        }
        data
    }

    /// Serialize to the on-disk format with checksum and schema version
    /// stamped into the header.
    pub fn render(&self) -> Result<String> {
        let data = self.data_section();
        let mut meta = self.meta.clone();
        let object = meta
            .as_object_mut()
            .ok_or_else(|| Error::invalid("table metadata must be a JSON object"))?;
        object.insert("schema_version".to_string(), json!(SCHEMA_VERSION));
        object.insert("checksum".to_string(), json!(sha256_hex(data.as_bytes())));
        let header = serde_json::to_string(&meta)?;
        Ok(format!("# {header}\n{data}"))
    }

    /// Render and write atomically.
    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render()?.as_bytes())
    }

    /// Parse the on-disk format and verify the embedded checksum against
    /// the data section.
    pub fn parse_and_verify(text: &str) -> Result<CsvTable> {
        let Some((header_line, data)) = text.split_once('\n') else {
            return Err(Error::invalid("artifact is missing a data section"));
        };
        let Some(header_json) = header_line.strip_prefix("# ") else {
            return Err(Error::invalid("artifact is missing the `# ` header line"));
        };
        let mut meta: Value = serde_json::from_str(header_json)
            .map_err(|e| Error::invalid(format!("artifact header is not JSON: {e}")))?;
        let object = meta
            .as_object_mut()
            .ok_or_else(|| Error::invalid("artifact header is not a JSON object"))?;
        let recorded = object
            .remove("checksum")
            .and_then(|v| v.as_str().map(str::to_string))
            .ok_or_else(|| Error::invalid("artifact header lacks a checksum"))?;
        let actual = sha256_hex(data.as_bytes());
        if recorded != actual {
            return Err(Error::invalid(format!(
                "artifact checksum mismatch: header says {recorded}, data hashes to {actual}"
            )));
        }
        object.remove("schema_version");
        let mut lines = data.lines();
        let columns: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::invalid("artifact has no column line"))?
            .split(',')
            .map(str::to_string)
            .collect();
        let rows = lines
            .map(|line| line.split(',').map(str::to_string).collect())
            .collect();
        CsvTable::new(meta, columns, rows)
    }

    /// Read a file and verify its checksum.
    pub fn read(path: &Path) -> Result<CsvTable> {
        CsvTable::parse_and_verify(&fs::read_to_string(path)?)
    }
}

/// Render configuration positions as a space-separated list, largest first.
pub fn render_config(config: &CircleConfig) -> String {
    config
        .positions()
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Render a displacement-partition pair as `mu parts / nu parts`, each part
/// list space-separated; the empty pair renders as `0/0` shorthand `-`.
pub fn render_partition_pair(pair: &PartitionPair) -> String {
    if pair.mu.is_empty() && pair.nu.is_empty() {
        return "-".to_string();
    }
    let side = |parts: &[u32]| {
        parts
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!("{}/{}", side(&pair.mu), side(&pair.nu))
}

/// Canonical fingerprint of a step law: `ℓ:weight` pairs in increasing ℓ,
/// weights at 17 significant digits, joined by `;`.
pub fn step_law_fingerprint(p: &StepDistribution) -> String {
    p.support()
        .map(|(ell, w)| format!("{ell}:{}", format_float(w)))
        .collect::<Vec<_>>()
        .join(";")
}

fn model_meta(model: &ChainModel) -> Value {
    json!({
        "n": model.n(),
        "k": model.k(),
        "p": step_law_fingerprint(model.p()),
    })
}

/// Per-orbit spectrum table: orbit representative and size, re/im of
/// λ^(ℓ) for ℓ = 0..=k, the mixture eigenvalue (re, im, modulus), and the
/// ground weight d.
pub fn spectrum_table(model: &ChainModel, entries: &[SpectrumEntry]) -> Result<CsvTable> {
    let k = model.k() as usize;
    let mut columns = vec!["orbit_rep".to_string(), "orbit_size".to_string()];
    for ell in 0..=k {
        columns.push(format!("re_lambda_{ell}"));
        columns.push(format!("im_lambda_{ell}"));
    }
    columns.extend(
        ["re_lambda_mix", "im_lambda_mix", "abs_lambda_mix", "d"]
            .iter()
            .map(|s| s.to_string()),
    );
    let mut rows = Vec::with_capacity(entries.len());
    for entry in entries {
        let mut row = vec![
            render_config(&entry.orbit.representative),
            entry.orbit.size.to_string(),
        ];
        if entry.lambda_by_ell.len() != k + 1 {
            return Err(Error::invalid(format!(
                "spectrum entry has {} eigenvalue slots; expected {}",
                entry.lambda_by_ell.len(),
                k + 1
            )));
        }
        for lambda in &entry.lambda_by_ell {
            row.push(format_float(lambda.re));
            row.push(format_float(lambda.im));
        }
        row.push(format_float(entry.lambda_mixture.re));
        row.push(format_float(entry.lambda_mixture.im));
        row.push(format_float(entry.lambda_mixture.norm()));
        row.push(format_float(entry.d));
        rows.push(row);
    }
    let mut meta = model_meta(model);
    let object = meta.as_object_mut().expect("constructed as object");
    object.insert("kind".to_string(), json!("spectrum"));
    object.insert("orbit_count".to_string(), json!(entries.len()));
    CsvTable::new(meta, columns, rows)
}

/// Write a spectrum CSV plus a JSON sidecar (same stem, `.json` extension)
/// carrying the model parameters and the CSV checksum.
pub fn write_spectrum(path: &Path, model: &ChainModel, entries: &[SpectrumEntry]) -> Result<PathBuf> {
    let table = spectrum_table(model, entries)?;
    let rendered = table.render()?;
    write_atomic(path, rendered.as_bytes())?;
    let verified = CsvTable::parse_and_verify(&rendered)?;
    let checksum = {
        let data = verified.data_section();
        sha256_hex(data.as_bytes())
    };
    let sidecar = path.with_extension("json");
    let mut meta = table.meta.clone();
    let object = meta.as_object_mut().expect("constructed as object");
    object.insert("schema_version".to_string(), json!(SCHEMA_VERSION));
    object.insert("checksum".to_string(), json!(checksum));
    object.insert(
        "csv".to_string(),
        json!(path.file_name().and_then(|s| s.to_str())),
    );
    write_atomic(&sidecar, (serde_json::to_string_pretty(&meta)? + "\n").as_bytes())?;
    Ok(sidecar)
}

/// Mixing-curve table: t, tv, l2_sq, lower_bound.
pub fn mixing_curve_table(model: &ChainModel, curve: &MixingCurve) -> Result<CsvTable> {
    let columns = ["t", "tv", "l2_sq", "lower_bound"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows = curve
        .times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            vec![
                t.to_string(),
                format_float(curve.tv[i]),
                format_float(curve.l2_sq[i]),
                format_float(curve.lower_bound[i]),
            ]
        })
        .collect();
    let mut meta = model_meta(model);
    let object = meta.as_object_mut().expect("constructed as object");
    object.insert("kind".to_string(), json!("mixing_curve"));
    object.insert("start".to_string(), json!(render_config(&curve.start)));
    CsvTable::new(meta, columns, rows)
}

/// Cutoff-sweep table: one row per (instance, centering, window point) with
/// columns n, k, gamma, centering, s, t, profile_value; the per-threshold
/// mixing times ride in the header under `t_eps`.
pub fn cutoff_sweep_table(sweep: &CutoffSweep) -> Result<CsvTable> {
    let columns = ["n", "k", "gamma", "centering", "s", "t", "profile_value"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for record in &sweep.records {
        for (centering, profile) in [
            ("log_n", &record.profile_log_n),
            ("log_k", &record.profile_log_k),
        ] {
            for point in profile {
                rows.push(vec![
                    record.n.to_string(),
                    record.k.to_string(),
                    format_float(record.gamma),
                    centering.to_string(),
                    format_float(point.s),
                    point.t.to_string(),
                    format_float(point.value),
                ]);
            }
        }
    }
    let t_eps: Vec<Value> = sweep
        .records
        .iter()
        .map(|record| {
            json!({
                "n": record.n,
                "k": record.k,
                "t_eps": record.t_eps,
            })
        })
        .collect();
    let meta = json!({
        "kind": "cutoff_sweep",
        "family": sweep.family,
        "t_eps": t_eps,
    });
    CsvTable::new(meta, columns, rows)
}

/// Orbit-classification dump: orbit_rep, class, w1, tau.
pub fn classification_table(
    n: u32,
    k: u32,
    constants: (f64, f64),
    records: &[OrbitClassification],
) -> Result<CsvTable> {
    let columns = ["orbit_rep", "class", "w1", "tau"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows = records
        .iter()
        .map(|record| {
            vec![
                render_config(&record.orbit.representative),
                record.class.to_string(),
                format_float(record.transport_cost),
                record
                    .tau
                    .as_ref()
                    .map(render_partition_pair)
                    .unwrap_or_default(),
            ]
        })
        .collect();
    let meta = json!({
        "kind": "classification",
        "n": n,
        "k": k,
        "c1": constants.0,
        "c2": constants.1,
    });
    CsvTable::new(meta, columns, rows)
}

/// Kernel export: one row per nonzero transition (row_index, col_index,
/// weight) of the mixture kernel, states indexed in lexicographic order.
pub fn kernel_table(model: &ChainModel) -> Result<CsvTable> {
    let kernel = model.kernel()?;
    let columns = ["row_index", "col_index", "weight"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows = kernel
        .entries()
        .map(|(i, j, w)| vec![i.to_string(), j.to_string(), format_float(w)])
        .collect();
    let mut meta = model_meta(model);
    let object = meta.as_object_mut().expect("constructed as object");
    object.insert("kind".to_string(), json!("kernel"));
    object.insert("dimension".to_string(), json!(kernel.dimension()));
    CsvTable::new(meta, columns, rows)
}

/// Serialize any report to pretty JSON and write it atomically.
pub fn write_json_report<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::StepDistribution;
    use crate::mixing::exact_tv_curve;
    use crate::spectral::full_spectrum;

    fn small_table() -> CsvTable {
        CsvTable::new(
            json!({"kind": "demo", "n": 5}),
            vec!["a".to_string(), "b".to_string()],
            vec![
                vec!["1".to_string(), format_float(0.5)],
                vec!["2".to_string(), format_float(-1.25e-3)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn floats_render_with_seventeen_significant_digits() {
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
        assert_eq!(format_float(1.0 / 3.0), "3.3333333333333331e-1");
        let x = 0.1 + 0.2;
        assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn render_and_verify_round_trip() {
        let table = small_table();
        let rendered = table.render().unwrap();
        assert!(rendered.starts_with("# {"));
        let parsed = CsvTable::parse_and_verify(&rendered).unwrap();
        assert_eq!(parsed, table);
        assert_eq!(parsed.render().unwrap(), rendered);
    }

    #[test]
    fn corrupted_data_fails_verification() {
        let rendered = small_table().render().unwrap();
        let corrupted = rendered.replace("5.0000000000000000e-1", "5.0000000000000001e-1");
        assert_ne!(rendered, corrupted);
        assert!(CsvTable::parse_and_verify(&corrupted).is_err());
    }

    #[test]
    fn writes_are_atomic_and_reload_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/demo.csv");
        let table = small_table();
        table.write(&path).unwrap();
        assert!(!path.with_extension("csv.tmp").exists());
        let reread = CsvTable::read(&path).unwrap();
        assert_eq!(reread.render().unwrap(), table.render().unwrap());
    }

    #[test]
    fn spectrum_artifact_covers_every_orbit_with_sidecar() {
        let model = ChainModel::new(5, 2, StepDistribution::delta(1)).unwrap();
        let entries = full_spectrum(&model).unwrap();
        let table = spectrum_table(&model, &entries).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.columns.len(), 2 + 2 * 3 + 4);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spectrum.csv");
        let sidecar = write_spectrum(&path, &model, &entries).unwrap();
        let meta: Value =
            serde_json::from_str(&fs::read_to_string(&sidecar).unwrap()).unwrap();
        let table_meta: Value = serde_json::from_str(
            fs::read_to_string(&path)
                .unwrap()
                .lines()
                .next()
                .unwrap()
                .strip_prefix("# ")
                .unwrap(),
        )
        .unwrap();
        assert_eq!(meta["checksum"], table_meta["checksum"]);
        assert_eq!(meta["n"], json!(5));
    }

    #[test]
    fn mixing_curve_artifact_has_one_row_per_time() {
        let model = ChainModel::new(6, 3, StepDistribution::lazy_symmetric()).unwrap();
        let curve = exact_tv_curve(&model, 10, &model.ground()).unwrap();
        let table = mixing_curve_table(&model, &curve).unwrap();
        assert_eq!(table.rows.len(), 11);
        assert_eq!(table.rows[0][0], "0");
        assert!(table.rows[0][1].parse::<f64>().unwrap() > 0.9);
    }

    #[test]
    fn kernel_rows_sum_to_one_per_state() {
        let model = ChainModel::new(6, 3, StepDistribution::lazy_symmetric()).unwrap();
        let table = kernel_table(&model).unwrap();
        let mut sums = std::collections::BTreeMap::new();
        for row in &table.rows {
            *sums.entry(row[0].clone()).or_insert(0.0) +=
                row[2].parse::<f64>().unwrap();
        }
        assert_eq!(sums.len(), 20);
        for (_, total) in sums {
            assert!((total - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn classification_dump_renders_partitions() {
        let records = crate::asymptotics::classify_orbits(10, 4, 10_000, 1.0, 10.0).unwrap();
        let table = classification_table(10, 4, (1.0, 10.0), &records).unwrap();
        assert_eq!(table.rows.len(), records.len());
        let ground_row = table
            .rows
            .iter()
            .find(|row| row[0] == "3 2 1 0")
            .expect("ground orbit present");
        assert_eq!(ground_row[1], "J3");
        assert_eq!(ground_row[3], "-");
        assert_eq!(ground_row[2].parse::<f64>().unwrap(), 0.0);
    }

    #[test]
    fn identical_inputs_render_identical_bytes() {
        let model = ChainModel::new(6, 3, StepDistribution::lazy_symmetric()).unwrap();
        let entries = full_spectrum(&model).unwrap();
        let first = spectrum_table(&model, &entries).unwrap().render().unwrap();
        let second = spectrum_table(&model, &entries).unwrap().render().unwrap();
        assert_eq!(first, second);
    }
}
