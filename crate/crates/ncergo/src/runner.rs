//! Dependency-ordered execution of scenario tasks.

use std::collections::BTreeSet;
use std::time::Instant;

use ncergo_core::averages::DEFAULT_BUDGET;
use ncergo_core::bau::{certify_ladder, residual_family};
use ncergo_core::weights::BesicovitchCheck;
use ncergo_core::{
    limit_oracle, maximal_inequality_report, verify_besicovitch, verify_certificate,
    weighted_average_direct, weighted_average_factorized, weighted_average_grid, AbsoluteContraction,
    BesicovitchWeight, Element, Evaluator, IndexBox, MultiIndex, SolverOptions, Threshold,
    TrigPolynomial, WeightFamily, C64,
};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{Resolver, Scenario};
use crate::format::write_element;
use crate::report::{self, num, Cell, RunReport, Status, Table, TaskOutcome};

/// Declaration order is execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    Verify,
    Average,
    Maximal,
    Besicovitch,
    Certify,
}

impl Task {
    pub const ALL: [Task; 5] = [Task::Verify, Task::Average, Task::Maximal, Task::Besicovitch, Task::Certify];

    pub fn name(&self) -> &'static str {
        match self {
            Task::Verify => "verify",
            Task::Average => "average",
            Task::Maximal => "maximal",
            Task::Besicovitch => "besicovitch",
            Task::Certify => "certify",
        }
    }

    pub fn parse(s: &str) -> Option<Task> {
        Task::ALL.into_iter().find(|t| t.name() == s)
    }

    /// Tasks that must succeed first. Certification waits for the average
    /// task only when the scenario configures one.
    pub fn prerequisites(&self, scenario: &Scenario) -> Vec<Task> {
        match self {
            Task::Verify | Task::Besicovitch => vec![],
            Task::Average | Task::Maximal => vec![Task::Verify],
            Task::Certify if scenario.config.average.is_some() => vec![Task::Verify, Task::Average],
            Task::Certify => vec![Task::Verify],
        }
    }

    fn configured(&self, scenario: &Scenario) -> bool {
        let c = &scenario.config;
        match self {
            Task::Verify => true,
            Task::Average => c.average.is_some(),
            Task::Maximal => c.maximal.is_some(),
            Task::Besicovitch => c.besicovitch.is_some(),
            Task::Certify => c.certify.is_some(),
        }
    }
}

/// Every task the scenario has a section for, plus verification.
pub fn configured_tasks(scenario: &Scenario) -> Vec<Task> {
    Task::ALL.into_iter().filter(|t| t.configured(scenario)).collect()
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed_override: Option<u64>,
    pub budget: Option<u64>,
    /// Command-line changes applied to the scenario, folded into the digest.
    pub overrides: Vec<String>,
}

/// sha256 over the scenario text and everything that changes its meaning.
pub fn digest(scenario: &Scenario, opts: &RunOptions) -> String {
    let mut h = Sha256::new();
    h.update(scenario.source.as_bytes());
    if let Some(s) = opts.seed_override {
        h.update(format!("\nseed-override={s}").as_bytes());
    }
    if let Some(b) = opts.budget {
        h.update(format!("\nbudget={b}").as_bytes());
    }
    for o in &opts.overrides {
        h.update(format!("\noverride={o}").as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

struct TaskData {
    summary: Map<String, Value>,
    table: Option<Table>,
    artifacts: Vec<(String, String)>,
}

impl TaskData {
    fn new() -> Self {
        TaskData {
            summary: Map::new(),
            table: None,
            artifacts: Vec::new(),
        }
    }

    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.into(), v.into());
    }
}

struct Context<'a> {
    scenario: &'a Scenario,
    resolver: Resolver<'a>,
    budget: u64,
    maps: Option<Vec<AbsoluteContraction>>,
}

type TaskResult = Result<TaskData, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

impl Context<'_> {
    fn dim(&self) -> usize {
        self.scenario.config.dimension
    }

    fn maps(&self) -> Result<&[AbsoluteContraction], String> {
        self.maps.as_deref().ok_or_else(|| "contractions unavailable".to_string())
    }

    fn x(&self) -> Result<Element, String> {
        self.resolver.element(&self.scenario.config.x, "x").map_err(err)
    }

    /// The configured weight, or the constant 1 (plain ergodic averages).
    fn weight(&self) -> Result<WeightFamily, String> {
        match &self.scenario.config.weight {
            Some(w) => self.resolver.weight(w, self.dim()).map_err(err),
            None => Ok(WeightFamily::Trig(
                TrigPolynomial::constant(self.dim(), C64::new(1.0, 0.0)).map_err(err)?,
            )),
        }
    }

    /// Limit of the averages: exact for polynomials, through the
    /// approximant for Besicovitch weights.
    fn limit(&self, w: &WeightFamily, eps: Option<f64>, x: &Element, data: &mut TaskData) -> Result<Element, String> {
        let maps = self.maps()?;
        let poly = match w {
            WeightFamily::Trig(p) => p,
            WeightFamily::Besicovitch(b) => {
                let eps = eps
                    .or(self.scenario.config.besicovitch.as_ref().map(|t| t.epsilon))
                    .or(b.levels().last().map(|l| l.0))
                    .ok_or("besicovitch weight declares no approximants")?;
                let (level, p) = b.approximant(eps).map_err(err)?;
                data.put("limit_level", num(level));
                p
            }
        };
        let lim = limit_oracle(poly, maps, x).map_err(err)?;
        data.put("limit_warnings", lim.warnings.len() as u64);
        Ok(lim.value)
    }

    fn verify(&mut self) -> TaskResult {
        let mut data = TaskData::new();
        let mut rows = Vec::new();
        let mut maps = Vec::new();
        for (i, c) in self.scenario.config.contractions.iter().enumerate() {
            let t = self
                .resolver
                .contraction(c, &format!("contraction/{i}"))
                .map_err(|e| format!("contraction {i}: {e}"))?;
            let v = t.verification();
            rows.push(vec![
                Cell::Int(i as u64),
                Cell::Text(t.kind().name().into()),
                Cell::Float(v.subunital_margin),
                Cell::Float(v.trace_margin),
                Cell::Float(v.choi_min_eig),
                Cell::Bool(v.passed),
                Cell::Text(t.positivity().name().into()),
                Cell::Text("transfer_matrix".into()),
            ]);
            maps.push(t);
        }
        data.put("maps", maps.len() as u64);
        data.table = Some(Table {
            name: "verify".into(),
            header: report::verify_header(),
            rows,
        });
        self.maps = Some(maps);
        Ok(data)
    }

    fn average(&mut self) -> TaskResult {
        let task = self.scenario.config.average.as_ref().ok_or("no [average] section")?;
        let maps = self.maps()?;
        let d = self.dim();
        let mut data = TaskData::new();
        let w = self.weight()?;
        let x = self.x()?;
        let evaluator = Evaluator::parse(&task.evaluator).ok_or("unknown evaluator")?;
        let lower = MultiIndex::positive(task.lower.clone().unwrap_or_else(|| vec![1; d])).map_err(err)?;
        let upper = MultiIndex::positive(task.upper.clone()).map_err(err)?;
        let region = IndexBox::new(lower, upper).map_err(err)?;

        let values: Vec<(MultiIndex, Element)> = match evaluator {
            Evaluator::Grid => weighted_average_grid(&w, maps, &x, &region, self.budget)
                .map_err(err)?
                .iter()
                .map(|(n, v)| (n, v.clone()))
                .collect(),
            Evaluator::Direct => region
                .iter()
                .map(|n| weighted_average_direct(&w, maps, &x, &n, self.budget).map(|v| (n, v)))
                .collect::<Result<_, _>>()
                .map_err(err)?,
            Evaluator::Factorized => {
                let p = w
                    .as_trig()
                    .ok_or("factorized evaluation needs a trigonometric polynomial weight")?;
                region
                    .iter()
                    .map(|n| weighted_average_factorized(p, maps, &x, &n).map(|v| (n, v)))
                    .collect::<Result<_, _>>()
                    .map_err(err)?
            }
        };

        let limit = match self.limit(&w, task.limit_epsilon, &x, &mut data) {
            Ok(l) => Some(l),
            Err(e) => {
                data.put("limit_error", e);
                None
            }
        };
        data.put("limit_available", limit.is_some());
        let mut rows = Vec::with_capacity(values.len());
        for (n, v) in &values {
            let mut row: Vec<Cell> = n.components().iter().map(|&c| Cell::Int(c as u64)).collect();
            row.push(Cell::Float(v.lp_norm(2.0).map_err(err)?));
            row.push(match &limit {
                Some(l) => Cell::Float((v - l).lp_norm(2.0).map_err(err)?),
                None => Cell::Empty,
            });
            row.push(Cell::Text(evaluator.name().into()));
            rows.push(row);
        }
        data.put("evaluator", evaluator.name());
        data.put("points", values.len() as u64);
        data.put("box_lower", region.lower().components().to_vec());
        data.put("box_upper", region.upper().components().to_vec());
        data.table = Some(Table {
            name: "averages".into(),
            header: report::averages_header(d),
            rows,
        });
        Ok(data)
    }

    fn maximal(&mut self) -> TaskResult {
        let task = self.scenario.config.maximal.as_ref().ok_or("no [maximal] section")?;
        let maps = self.maps()?;
        let x = self.x()?;
        let mut opts = SolverOptions::default();
        if let Some(t) = task.tol {
            opts.tol = t;
        }
        if let Some(m) = task.max_iterations {
            opts.max_iterations = m;
        }
        let p = self.scenario.config.p;
        let rep = maximal_inequality_report(maps, &x, p, &task.cutoffs, self.budget, task.cauchy_slack, &opts)
            .map_err(err)?;
        let mut data = TaskData::new();
        data.put("p", num(p));
        data.put("x_norm", num(rep.x_norm));
        data.put("monotone", rep.monotone);
        data.put("cauchy", rep.cauchy);
        data.put("cauchy_slack", num(rep.cauchy_slack));
        data.put("truncated", rep.truncated);
        data.put(
            "iterations",
            rep.rungs.iter().map(|r| r.iterations as u64).sum::<u64>(),
        );
        let rows = rep
            .rungs
            .iter()
            .map(|r| {
                vec![
                    Cell::Int(r.cutoff as u64),
                    Cell::Int(r.family_size as u64),
                    Cell::Float(r.norm),
                    Cell::Float(r.lower_bound),
                    Cell::Float(r.ratio),
                    Cell::Int(r.iterations as u64),
                    Cell::Bool(r.converged),
                    Cell::Text("grid".into()),
                ]
            })
            .collect();
        data.table = Some(Table {
            name: "maximal".into(),
            header: report::maximal_header(),
            rows,
        });
        Ok(data)
    }

    fn besicovitch(&mut self) -> TaskResult {
        let task = self.scenario.config.besicovitch.as_ref().ok_or("no [besicovitch] section")?;
        let w = self.weight()?;
        let b = match w {
            WeightFamily::Besicovitch(b) => b,
            WeightFamily::Trig(p) => BesicovitchWeight::from_polynomial(p, task.epsilon).map_err(err)?,
        };
        let check = BesicovitchCheck {
            epsilon: task.epsilon,
            cutoff: MultiIndex::positive(task.cutoff.clone()).map_err(err)?,
            ladder: self.scenario.ladder(&task.ladder).map_err(err)?,
            onset: task.onset,
            budget: self.budget,
        };
        let rep = verify_besicovitch(&b, &check).map_err(err)?;
        let mut data = TaskData::new();
        data.put("epsilon", num(rep.epsilon));
        data.put("level", num(rep.level));
        data.put("configured_onset", rep.configured_onset as u64);
        data.put("observed_onset", rep.observed_onset.map_or(Value::Null, |m| (m as u64).into()));
        data.put("passed", rep.passed);
        data.put("evidence", rep.evidence);
        let rows = rep
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![Cell::Int(r.m as u64)];
                row.extend(r.shape.components().iter().map(|&c| Cell::Int(c as u64)));
                row.push(Cell::Float(r.discrepancy));
                row.push(Cell::Bool(r.passed));
                row.push(Cell::Text("prefix_scan".into()));
                row
            })
            .collect();
        data.table = Some(Table {
            name: "besicovitch".into(),
            header: report::besicovitch_header(self.dim()),
            rows,
        });
        Ok(data)
    }

    fn certify(&mut self) -> TaskResult {
        let task = self.scenario.config.certify.as_ref().ok_or("no [certify] section")?;
        let maps = self.maps()?;
        let mut data = TaskData::new();
        let w = self.weight()?;
        let x = self.x()?;
        let limit = self.limit(&w, task.limit_epsilon, &x, &mut data)?;
        let residuals = residual_family(&w, maps, &x, &limit, task.horizon, self.budget).map_err(err)?;
        let threshold = match (task.epsilon, task.lambda) {
            (Some(e), None) => Threshold::Epsilon(e),
            (None, Some(l)) => Threshold::Lambda(l),
            _ => return Err("certify needs exactly one of epsilon and lambda".into()),
        };
        let mut opts = SolverOptions::default();
        if let Some(t) = task.tol {
            opts.tol = t;
        }
        let p = self.scenario.config.p;
        let certs = certify_ladder(&residuals, &task.onsets, p, threshold, &opts).map_err(err)?;
        let mut rows = Vec::new();
        let mut details = Vec::new();
        for c in &certs {
            let recheck = verify_certificate(c, &residuals).map_err(err)?;
            rows.push(vec![
                Cell::Int(c.onset as u64),
                Cell::Float(c.epsilon),
                Cell::Float(c.lambda),
                Cell::Float(c.tau_complement),
                Cell::Float(c.tail_sup),
                Cell::Float(c.dominant_norm),
                Cell::Int(c.tail_size as u64),
                Cell::Bool(c.sound),
                Cell::Text("grid".into()),
            ]);
            let mut m = Map::new();
            m.insert("onset".into(), (c.onset as u64).into());
            m.insert("raw_sup".into(), num(c.raw_sup));
            m.insert("tight".into(), c.tight.into());
            m.insert("chebyshev_consistent".into(), c.chebyshev_consistent.into());
            m.insert("recheck_tail_sup".into(), num(recheck.tail_sup));
            m.insert("recheck_tau_complement".into(), num(recheck.tau_complement));
            m.insert("recheck_passed".into(), recheck.passed().into());
            let file = format!("projection_onset_{}.txt", c.onset);
            m.insert("projection".into(), file.clone().into());
            details.push(Value::Object(m));
            data.artifacts.push((file, write_element(c.e.element())));
        }
        data.put("p", num(p));
        data.put("horizon", task.horizon as u64);
        data.put("residuals", residuals.len() as u64);
        data.put("certificates", details);
        data.table = Some(Table {
            name: "certificates".into(),
            header: report::certificates_header(),
            rows,
        });
        Ok(data)
    }

    fn run(&mut self, t: Task) -> TaskResult {
        match t {
            Task::Verify => self.verify(),
            Task::Average => self.average(),
            Task::Maximal => self.maximal(),
            Task::Besicovitch => self.besicovitch(),
            Task::Certify => self.certify(),
        }
    }
}

/// Runs `tasks` and their prerequisites in dependency order. Failures are
/// recorded per task; dependents of a failed task are skipped.
pub fn run_scenario(scenario: &Scenario, tasks: &[Task], opts: &RunOptions) -> RunReport {
    let mut plan: BTreeSet<Task> = BTreeSet::new();
    let mut stack: Vec<Task> = tasks.to_vec();
    while let Some(t) = stack.pop() {
        if plan.insert(t) {
            stack.extend(t.prerequisites(scenario));
        }
    }
    let seed = opts.seed_override.or(scenario.config.seed);
    let mut report = RunReport {
        scenario: scenario.config.name.clone(),
        digest: digest(scenario, opts),
        seed,
        tasks: Vec::new(),
        tables: Vec::new(),
        artifacts: Vec::new(),
        timings: Vec::new(),
    };
    let alg = match scenario.algebra() {
        Ok(a) => a,
        Err(e) => {
            for t in plan {
                report.tasks.push(TaskOutcome {
                    task: t.name().into(),
                    status: Status::Failed,
                    error: Some(e.to_string()),
                    summary: Map::new(),
                });
            }
            return report;
        }
    };
    let mut ctx = Context {
        scenario,
        resolver: Resolver {
            alg,
            seed,
            base_dir: &scenario.base_dir,
        },
        budget: opts.budget.or(scenario.config.budget).unwrap_or(DEFAULT_BUDGET),
        maps: None,
    };
    let mut failed: BTreeSet<Task> = BTreeSet::new();
    for t in plan {
        let blockers: Vec<&str> = t
            .prerequisites(scenario)
            .into_iter()
            .filter(|p| failed.contains(p))
            .map(|p| p.name())
            .collect();
        if !blockers.is_empty() {
            failed.insert(t);
            report.tasks.push(TaskOutcome {
                task: t.name().into(),
                status: Status::Skipped,
                error: Some(format!("skipped: prerequisite {} failed", blockers.join(", "))),
                summary: Map::new(),
            });
            continue;
        }
        let start = Instant::now();
        let out = ctx.run(t);
        report.timings.push((t.name().into(), start.elapsed().as_secs_f64()));
        match out {
            Ok(data) => {
                report.tasks.push(TaskOutcome {
                    task: t.name().into(),
                    status: Status::Ok,
                    error: None,
                    summary: data.summary,
                });
                report.tables.extend(data.table);
                report.artifacts.extend(data.artifacts);
            }
            Err(e) => {
                failed.insert(t);
                report.tasks.push(TaskOutcome {
                    task: t.name().into(),
                    status: Status::Failed,
                    error: Some(e),
                    summary: Map::new(),
                });
            }
        }
    }
    report
}
