//! Run reports: one structured JSON document, one CSV per table, and a
//! separate wall-clock file so the report itself stays byte-reproducible.

use std::io;
use std::path::{Path, PathBuf};

use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

use crate::format::fmt_f64;

pub const SCHEMA_VERSION: u64 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => num(*v),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// JSON number, or a string for non-finite values.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or_else(|| Value::String(v.to_string()), Value::Number)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

fn axes(d: usize) -> impl Iterator<Item = String> {
    (1..=d).map(|i| format!("N{i}"))
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn averages_header(d: usize) -> Vec<String> {
    axes(d).chain(strings(&["norm_l2", "dist_limit_l2", "evaluator"])).collect()
}

pub fn maximal_header() -> Vec<String> {
    strings(&[
        "cutoff",
        "family_size",
        "norm",
        "lower_bound",
        "ratio",
        "iterations",
        "converged",
        "evaluator",
    ])
}

pub fn besicovitch_header(d: usize) -> Vec<String> {
    std::iter::once("m".to_string())
        .chain(axes(d))
        .chain(strings(&["discrepancy", "passed", "evaluator"]))
        .collect()
}

pub fn certificates_header() -> Vec<String> {
    strings(&[
        "onset",
        "epsilon",
        "lambda",
        "tau_complement",
        "tail_sup",
        "dominant_norm",
        "tail_size",
        "sound",
        "evaluator",
    ])
}

pub fn verify_header() -> Vec<String> {
    strings(&[
        "map_index",
        "kind",
        "subunital_margin",
        "trace_margin",
        "choi_min_eig",
        "passed",
        "positivity",
        "evaluator",
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
    Skipped,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Failed => "failed",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TaskOutcome {
    pub task: String,
    pub status: Status,
    pub error: Option<String>,
    pub summary: Map<String, Value>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub scenario: String,
    pub digest: String,
    pub seed: Option<u64>,
    pub tasks: Vec<TaskOutcome>,
    pub tables: Vec<Table>,
    /// Extra text files, e.g. certificate projections.
    pub artifacts: Vec<(String, String)>,
    /// Seconds per task; written apart from the report.
    pub timings: Vec<(String, f64)>,
}

impl RunReport {
    pub fn failed(&self) -> bool {
        self.tasks.iter().any(|t| t.status == Status::Failed)
    }

    pub fn task(&self, name: &str) -> Option<&TaskOutcome> {
        self.tasks.iter().find(|t| t.task == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> Value {
        let count = |s: Status| self.tasks.iter().filter(|t| t.status == s).count() as u64;
        let mut counts = Map::new();
        counts.insert("tasks_ok".into(), count(Status::Ok).into());
        counts.insert("tasks_failed".into(), count(Status::Failed).into());
        counts.insert("tasks_skipped".into(), count(Status::Skipped).into());
        let rows: usize = self.tables.iter().map(|t| t.rows.len()).sum();
        counts.insert("table_rows".into(), (rows as u64).into());

        let tasks = self
            .tasks
            .iter()
            .map(|t| {
                let mut m = Map::new();
                m.insert("task".into(), t.task.clone().into());
                m.insert("status".into(), t.status.name().into());
                m.insert("error".into(), t.error.clone().map_or(Value::Null, Value::String));
                m.insert("summary".into(), Value::Object(t.summary.clone()));
                Value::Object(m)
            })
            .collect();

        let mut tables = Map::new();
        for t in &self.tables {
            let mut m = Map::new();
            m.insert("header".into(), t.header.clone().into());
            m.insert(
                "rows".into(),
                Value::Array(
                    t.rows
                        .iter()
                        .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                        .collect(),
                ),
            );
            tables.insert(t.name.clone(), Value::Object(m));
        }

        let mut scenario = Map::new();
        scenario.insert("name".into(), self.scenario.clone().into());
        scenario.insert("digest".into(), self.digest.clone().into());
        scenario.insert("seed".into(), self.seed.map_or(Value::Null, Value::from));

        let mut root = Map::new();
        root.insert("schema_version".into(), SCHEMA_VERSION.into());
        root.insert("tool".into(), "ncergo".into());
        root.insert("tool_version".into(), TOOL_VERSION.into());
        root.insert("scenario".into(), Value::Object(scenario));
        root.insert("counts".into(), Value::Object(counts));
        root.insert("tasks".into(), Value::Array(tasks));
        root.insert("tables".into(), Value::Object(tables));
        Value::Object(root)
    }
}

/// Pretty JSON whose floats carry 17 significant digits.
struct ReportFormatter(PrettyFormatter<'static>);

impl Formatter for ReportFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn render_json(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ReportFormatter(PrettyFormatter::new()));
    serde::Serialize::serialize(v, &mut ser).expect("in-memory write");
    buf.push(b'\n');
    String::from_utf8(buf).expect("json is utf-8")
}

pub fn render_csv(t: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.header).expect("in-memory write");
    for r in &t.rows {
        w.write_record(r.iter().map(Cell::csv)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv is utf-8")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Structured,
    Tabular,
    Both,
}

impl OutputFormat {
    fn structured(self) -> bool {
        self != OutputFormat::Tabular
    }

    fn tabular(self) -> bool {
        self != OutputFormat::Structured
    }
}

/// Writes the report into `dir` and returns the paths written.
pub fn emit_report(report: &RunReport, dir: &Path, fmt: OutputFormat) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: &str| -> io::Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    if fmt.structured() {
        put("report.json", &render_json(&report.to_json()))?;
    }
    if fmt.tabular() {
        for t in &report.tables {
            put(&format!("{}.csv", t.name), &render_csv(t))?;
        }
    }
    for (name, body) in &report.artifacts {
        put(name, body)?;
    }
    let mut timing = Map::new();
    for (task, secs) in &report.timings {
        timing.insert(task.clone(), num(*secs));
    }
    put("timing.json", &render_json(&Value::Object(timing)))?;
    Ok(written)
}
