//! Tables, verdicts and atomic output.

use std::fmt::{self, Write as _};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn from_check(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Verdict(Verdict),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            // Shortest representation that round-trips.
            Cell::Real(v) => write!(f, "{v:e}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Verdict(v) => write!(f, "{v}"),
            Cell::Empty => Ok(()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Verdict> for Cell {
    fn from(v: Verdict) -> Self {
        Cell::Verdict(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match table `{}`", self.name);
        self.rows.push(row);
    }

    /// Verdicts found in the `verdict` column, in row order.
    pub fn verdicts(&self) -> Vec<Verdict> {
        let Some(col) = self.columns.iter().position(|c| c == "verdict") else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter_map(|r| match r[col] {
                Cell::Verdict(v) => Some(v),
                _ => None,
            })
            .collect()
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let col = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[col]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

/// Outcome of one run. The first table is the primary one.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub tables: Vec<Table>,
    /// Not part of any written file.
    pub wall_clock: Duration,
}

#[derive(Serialize)]
struct TableSummary<'a> {
    name: &'a str,
    file: String,
    rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    data: Option<&'a Table>,
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: Experiment,
    seed: u64,
    verdict: Verdict,
    counts: Counts,
    tables: Vec<TableSummary<'a>>,
    config: &'a ExperimentConfig,
}

impl RunReport {
    pub fn experiment(&self) -> Experiment {
        self.config.experiment
    }

    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn primary(&self) -> &Table {
        &self.tables[0]
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for v in self.tables.iter().flat_map(|t| t.verdicts()) {
            match v {
                Verdict::Pass => c.pass += 1,
                Verdict::Fail => c.fail += 1,
                Verdict::Inconclusive => c.inconclusive += 1,
            }
        }
        c
    }

    pub fn any_fail(&self) -> bool {
        self.counts().fail > 0
    }

    pub fn verdict(&self) -> Verdict {
        let c = self.counts();
        if c.fail > 0 {
            Verdict::Fail
        } else if c.inconclusive > 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }

    /// `(file name, contents)` for every CSV, then the JSON summary.
    pub fn files(&self) -> Result<Vec<(PathBuf, String)>> {
        let out = self.config.out();
        let stem = out.with_extension("");
        let path_for = |i: usize, t: &Table| -> PathBuf {
            if i == 0 {
                stem.with_extension("csv")
            } else {
                PathBuf::from(format!("{}.{}.csv", stem.display(), t.name))
            }
        };
        let mut files = Vec::new();
        let mut summaries = Vec::new();
        for (i, t) in self.tables.iter().enumerate() {
            let path = path_for(i, t);
            let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
            summaries.push(TableSummary { name: &t.name, file, rows: t.rows.len(), data: (i > 0).then_some(t) });
            files.push((path, t.to_csv()));
        }
        let summary = Summary {
            experiment: self.experiment(),
            seed: self.seed(),
            verdict: self.verdict(),
            counts: self.counts(),
            tables: summaries,
            config: &self.config,
        };
        let mut json = serde_json::to_string_pretty(&summary)?;
        json.push('\n');
        files.push((stem.with_extension("json"), json));
        Ok(files)
    }

    /// Write every file atomically; returns the paths written.
    pub fn write(&self) -> Result<Vec<PathBuf>> {
        let files = self.files()?;
        for (path, contents) in &files {
            write_atomic(path, contents.as_bytes())?;
        }
        Ok(files.into_iter().map(|(p, _)| p).collect())
    }
}

/// Write to a sibling temporary file, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::io(path, e));
    }
    Ok(())
}
