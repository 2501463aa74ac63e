//! CSV datasets, report files, run logs and the `key = value` config format.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::dataset::{Dataset, Origin};
use crate::dea::{Orientation, UnitEvaluation};
use crate::error::{Error, Result};
use crate::improve::{ImproveParams, ImprovementResult, LogRecord, OrientationFilter};
use crate::terminal::TerminalReport;

/// Formats `v` with 9 significant digits, dropping trailing zeros.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".to_string() } else { v.to_string() };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{v:.8e}");
        let (mant, e) = s.split_once('e').expect("scientific format has an exponent");
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{e}")
    }
}

fn load_err(row: usize, column: &str, message: impl Into<String>) -> Error {
    Error::Load { row, column: column.to_string(), message: message.into() }
}

enum Role {
    Id,
    Input(usize),
    Output(usize),
    Artificial,
    Provenance,
}

fn role_of(name: &str) -> Option<Role> {
    let index = |rest: &str| rest.parse::<usize>().ok().filter(|&k| k >= 1).map(|k| k - 1);
    match name {
        "id" => Some(Role::Id),
        "artificial" => Some(Role::Artificial),
        "provenance" => Some(Role::Provenance),
        _ => {
            if let Some(rest) = name.strip_prefix('x') {
                index(rest).map(Role::Input)
            } else if let Some(rest) = name.strip_prefix('y') {
                index(rest).map(Role::Output)
            } else {
                None
            }
        }
    }
}

/// Reads a dataset. Rows are numbered from 1 (the first data line) in errors;
/// row 0 is the header.
pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut roles = Vec::with_capacity(headers.len());
    let (mut m, mut r) = (0usize, 0usize);
    let mut seen = std::collections::HashSet::new();
    for h in headers.iter() {
        let role = role_of(h).ok_or_else(|| load_err(0, h, "unknown column"))?;
        if !seen.insert(h.to_string()) {
            return Err(load_err(0, h, "repeated column"));
        }
        match role {
            Role::Input(k) => m = m.max(k + 1),
            Role::Output(i) => r = r.max(i + 1),
            _ => {}
        }
        roles.push(role);
    }
    if !roles.iter().any(|r| matches!(r, Role::Id)) {
        return Err(load_err(0, "id", "missing id column"));
    }
    for k in 0..m {
        if !roles.iter().any(|x| matches!(x, Role::Input(j) if *j == k)) {
            return Err(load_err(0, &format!("x{}", k + 1), "missing input column"));
        }
    }
    for i in 0..r {
        if !roles.iter().any(|x| matches!(x, Role::Output(j) if *j == i)) {
            return Err(load_err(0, &format!("y{}", i + 1), "missing output column"));
        }
    }
    if m == 0 || r == 0 {
        return Err(load_err(0, "", "need at least one x and one y column"));
    }
    let mut ids = Vec::new();
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut origins = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let row = line + 1;
        let record = record?;
        if record.len() != headers.len() {
            return Err(load_err(row, "", format!("expected {} cells, found {}", headers.len(), record.len())));
        }
        let mut x = vec![0.0; m];
        let mut y = vec![0.0; r];
        let mut id = String::new();
        let mut origin = Origin::Original;
        for ((cell, role), name) in record.iter().zip(&roles).zip(headers.iter()) {
            let number = || -> Result<f64> {
                if cell.is_empty() {
                    return Err(load_err(row, name, "missing value"));
                }
                let v: f64 = cell.parse().map_err(|_| load_err(row, name, format!("not a number: `{cell}`")))?;
                if !v.is_finite() {
                    return Err(load_err(row, name, "value is not finite"));
                }
                if v < 0.0 {
                    return Err(load_err(row, name, format!("negative value {v}")));
                }
                Ok(v)
            };
            match role {
                Role::Id => {
                    if cell.is_empty() {
                        return Err(load_err(row, name, "missing id"));
                    }
                    id = cell.to_string();
                }
                Role::Input(k) => x[*k] = number()?,
                Role::Output(i) => y[*i] = number()?,
                Role::Artificial => {
                    origin = match cell {
                        "" | "0" => Origin::Original,
                        "1" => Origin::Artificial,
                        _ => return Err(load_err(row, name, "expected 0 or 1")),
                    }
                }
                Role::Provenance => {}
            }
        }
        if let Some(first) = ids.iter().position(|i| *i == id) {
            return Err(load_err(row, "id", format!("duplicate id `{id}` (first on row {})", first + 1)));
        }
        ids.push(id);
        inputs.push(x);
        outputs.push(y);
        origins.push(origin);
    }
    if ids.is_empty() {
        return Err(load_err(0, "", "no data rows"));
    }
    for k in 0..m {
        if inputs.iter().all(|x: &Vec<f64>| x[k] == 0.0) {
            return Err(load_err(0, &format!("x{}", k + 1), "column is entirely zero"));
        }
    }
    for i in 0..r {
        if outputs.iter().all(|y: &Vec<f64>| y[i] == 0.0) {
            return Err(load_err(0, &format!("y{}", i + 1), "column is entirely zero"));
        }
    }
    Dataset::with_origins(ids, inputs, outputs, origins)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file)
}

/// Writes a dataset with exact round-trip float formatting. The
/// `artificial` column appears when any unit is artificial or when
/// `provenance` is given; `provenance` adds one label per unit.
pub fn write_csv<W: Write>(ds: &Dataset, writer: W, provenance: Option<&[String]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let (m, r) = (ds.num_inputs(), ds.num_outputs());
    let flag = provenance.is_some() || ds.origins().contains(&Origin::Artificial);
    let mut header = vec!["id".to_string()];
    header.extend((0..m + r).map(|c| ds.column_label(c)));
    if flag {
        header.push("artificial".into());
    }
    if provenance.is_some() {
        header.push("provenance".into());
    }
    w.write_record(&header)?;
    for j in 0..ds.len() {
        let mut rec = vec![ds.id(j).to_string()];
        rec.extend(ds.input(j).iter().chain(ds.output(j)).map(|v| v.to_string()));
        if flag {
            rec.push(if ds.origin(j) == Origin::Artificial { "1" } else { "0" }.into());
        }
        if let Some(p) = provenance {
            rec.push(p.get(j).cloned().unwrap_or_default());
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>, provenance: Option<&[String]>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(ds, BufWriter::new(file), provenance)
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Per-unit score, slacks and class for one orientation. Units without an
/// output evaluation get an empty score.
pub fn efficiency_report(ds: &Dataset, evals: &[UnitEvaluation], orientation: Orientation) -> Result<String> {
    let (m, r) = (ds.num_inputs(), ds.num_outputs());
    let mut header = vec!["id".to_string(), "orientation".into(), "score".into()];
    header.extend((0..m + r).map(|c| format!("slack_{}", ds.column_label(c))));
    header.push("class".into());
    let rows: Vec<Vec<String>> = evals
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let res = match orientation {
                Orientation::Input => Some(&e.input),
                Orientation::Output => e.output.as_ref(),
            };
            let mut row = vec![ds.id(j).to_string(), orientation.to_string()];
            match res {
                Some(res) => {
                    row.push(fmt_sig(res.score));
                    row.extend(res.input_slacks.iter().chain(&res.output_slacks).map(|&v| fmt_sig(v)));
                }
                None => row.extend(std::iter::repeat_n(String::new(), 1 + m + r)),
            }
            row.push(e.class.to_string());
            row
        })
        .collect();
    csv_text(&header, &rows)
}

pub fn classification_report(ds: &Dataset, evals: &[UnitEvaluation], zero_tol: f64) -> Result<String> {
    let header: Vec<String> = ["id", "class", "theta", "eta", "weak_input", "weak_output", "weak_projection"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = evals
        .iter()
        .enumerate()
        .map(|(j, e)| {
            vec![
                ds.id(j).to_string(),
                e.class.to_string(),
                fmt_sig(e.theta()),
                e.eta().map(fmt_sig).unwrap_or_default(),
                (e.weak_in(Orientation::Input, zero_tol) as u8).to_string(),
                (e.weak_in(Orientation::Output, zero_tol) as u8).to_string(),
                (e.weak_projection(zero_tol) as u8).to_string(),
            ]
        })
        .collect();
    csv_text(&header, &rows)
}

pub fn terminal_report(report: &TerminalReport) -> Result<String> {
    let header: Vec<String> = ["id", "class", "terminal", "directions"].iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<String>> = report
        .entries
        .iter()
        .map(|e| {
            vec![
                e.id.clone(),
                e.class.to_string(),
                (!e.directions.is_empty() as u8).to_string(),
                e.directions.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(";"),
            ]
        })
        .collect();
    csv_text(&header, &rows)
}

/// Before/after table for the original units of an improvement run.
pub fn improvement_report(result: &ImprovementResult) -> Result<String> {
    let header: Vec<String> = [
        "id",
        "class_before",
        "theta_before",
        "eta_before",
        "weak_before",
        "class_after",
        "theta_after",
        "eta_after",
        "weak_after",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows: Vec<Vec<String>> = result
        .before
        .iter()
        .zip(&result.after)
        .map(|(b, a)| {
            vec![
                b.id.clone(),
                b.class.to_string(),
                fmt_sig(b.theta),
                b.eta.map(fmt_sig).unwrap_or_default(),
                (b.weak_projection as u8).to_string(),
                a.class.to_string(),
                fmt_sig(a.theta),
                a.eta.map(fmt_sig).unwrap_or_default(),
                (a.weak_projection as u8).to_string(),
            ]
        })
        .collect();
    csv_text(&header, &rows)
}

pub fn run_log(records: &[LogRecord]) -> String {
    records.iter().map(|r| format!("{r}\n")).collect()
}

/// Provenance labels for every unit of the improved dataset.
pub fn provenance_labels(result: &ImprovementResult) -> Vec<String> {
    let ds = &result.improved;
    (0..ds.len())
        .map(|j| match ds.origin(j) {
            Origin::Original => String::new(),
            Origin::Artificial => result
                .artificials
                .iter()
                .find(|a| a.id == ds.id(j))
                .map(|a| a.provenance.to_string())
                .unwrap_or_default(),
        })
        .collect()
}

/// Writes `improved.csv`, `run.log`, `report.csv` and `artificials.csv`
/// into `dir`.
pub fn write_improvement(result: &ImprovementResult, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let labels = provenance_labels(result);
    save_csv(&result.improved, dir.join("improved.csv"), Some(&labels))?;
    write_text(dir.join("run.log"), &run_log(&result.log))?;
    write_text(dir.join("report.csv"), &improvement_report(result)?)?;
    let ds = &result.improved;
    let (m, r) = (ds.num_inputs(), ds.num_outputs());
    let mut header = vec!["id".to_string()];
    header.extend((0..m + r).map(|c| ds.column_label(c)));
    header.extend(["provenance".into(), "offset".into(), "status".into()]);
    let rows: Vec<Vec<String>> = result
        .artificials
        .iter()
        .map(|a| {
            let mut row = vec![a.id.clone()];
            row.extend(a.point.x().iter().chain(a.point.y()).map(|v| v.to_string()));
            row.extend([a.provenance.to_string(), fmt_sig(a.offset), a.status.as_str().to_string()]);
            row
        })
        .collect();
    write_text(dir.join("artificials.csv"), &csv_text(&header, &rows)?)
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub params: ImproveParams,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub rho: Option<f64>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

/// Parses `key = value` lines; `#` starts a comment. Unknown keys and
/// repeated keys are rejected.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen = std::collections::HashSet::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Config { line: line_no, message };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(err(format!("key `{key}` given twice")));
        }
        let float = || value.parse::<f64>().map_err(|_| err(format!("`{key}` expects a number, got `{value}`")));
        let int = || value.parse::<u64>().map_err(|_| err(format!("`{key}` expects an integer, got `{value}`")));
        let p = &mut cfg.params;
        match key {
            "along_step" => p.along_step = float()?,
            "exterior_offset" => p.exterior_offset = float()?,
            "shrink_factor" => p.shrink_factor = float()?,
            "radial_offset" => p.radial_offset = float()?,
            "max_halvings" => p.max_halvings = int()? as usize,
            "max_passes" => p.max_passes = int()? as usize,
            "zero_tol" => p.zero_tol = float()?,
            "shrink_all" => {
                p.shrink_all = match value {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    _ => return Err(err(format!("`shrink_all` expects true or false, got `{value}`"))),
                }
            }
            "orientation" => {
                p.orientations = match value {
                    "both" => OrientationFilter::Both,
                    "input" => OrientationFilter::Input,
                    "output" => OrientationFilter::Output,
                    _ => return Err(err(format!("`orientation` expects input, output or both, got `{value}`"))),
                }
            }
            "samples" => cfg.samples = Some(int()? as usize),
            "seed" => cfg.seed = Some(int()?),
            "rho" => cfg.rho = Some(float()?),
            "input" => cfg.input = Some(PathBuf::from(value)),
            "output" => cfg.output = Some(PathBuf::from(value)),
            _ => return Err(err(format!("unknown key `{key}`"))),
        }
    }
    cfg.params.validate().map_err(|e| Error::Config { line: 0, message: e.to_string() })?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}
