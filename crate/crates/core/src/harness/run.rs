use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use super::config::{AnalyticQuery, BoundsTarget, Experiment, ExperimentConfig, PlanConfig, TwiConfig};
use super::output::{Cell, ColumnLabels, Manifest, ResultRow, ResultTable};
use super::reproduce::{figure7_table, figure8_table, pairwise_bound};
use super::{Figure, HarnessError};
use crate::analytics::{
    causality_conditions_case1, causality_conditions_case2, p_cv_case1, p_cv_case2, p_sim_violation_n,
    p_sim_violation_pair, twi_two_sensor_min_window, CausalityConditionReport,
};
use crate::bounds::{appendix_d_lower_bound, two_rate_exact, verify_lemma1};
use crate::inputs::InputModel;
use crate::model::{Duration, RandomSeed, TransmissionTimeModel};
use crate::planner::{
    latency_budget_case2, p_miss_known_edge, p_miss_unknown_edge, quantize_to_slots, validate_twi_on_grid,
};
use crate::sim::{
    estimate_chain, estimate_chain_windows, estimate_sim_violation, CausalChainScenario, ChainEstimate,
    FanOutScenario, SweepMode,
};
use crate::timestamp::{event_throughput_loss, TwiSpec};
use crate::TimePoint;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses all cores.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub table: ResultTable,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
    pub manifest: Manifest,
}

const CSV_FILE: &str = "results.csv";
const MANIFEST_FILE: &str = "manifest.json";

fn seed_for(twi: &TwiConfig, seed: RandomSeed, j: usize) -> RandomSeed {
    match twi.mode {
        SweepMode::CommonRandomNumbers => seed,
        SweepMode::Independent => seed.derive(j as u64),
    }
}

fn chain_estimates(
    scenario: &CausalChainScenario,
    twi: &TwiConfig,
    trials: u64,
    seed: RandomSeed,
) -> Vec<(Duration, crate::Result<ChainEstimate>)> {
    let specs = match twi.specs() {
        Ok(s) => s,
        Err(e) => return twi.windows.iter().map(|&w| (w, Err(e.clone()))).collect(),
    };
    if twi.mode == SweepMode::CommonRandomNumbers {
        match estimate_chain_windows(scenario, &specs, trials, seed) {
            Ok(ests) => return ests.into_iter().map(|e| (e.window, Ok(e))).collect(),
            Err(e) => return twi.windows.iter().map(|&w| (w, Err(e.clone()))).collect(),
        }
    }
    specs
        .iter()
        .enumerate()
        .map(|(j, t)| (t.window, estimate_chain(scenario, t, trials, seed_for(twi, seed, j))))
        .collect()
}

fn inputs_label(inputs: &[InputModel]) -> String {
    inputs.iter().map(InputModel::tag).collect::<Vec<_>>().join(";")
}

fn chain_table(scenario: &CausalChainScenario, twi: &TwiConfig, trials: u64, seed: RandomSeed) -> ResultTable {
    let mut table = ResultTable::new(
        ColumnLabels::new(None, Some("pairwise_bound"), Some("p_correct_order")),
        &["N", "W", "inputs"],
        &["min_pairwise", "tied_trials", "estimate_minus_bound"],
    );
    let label = inputs_label(&scenario.inputs);
    for (j, (w, est)) in chain_estimates(scenario, twi, trials, seed).into_iter().enumerate() {
        let params = vec![Cell::from(scenario.n()), Cell::Num(w.secs()), Cell::Text(label.clone())];
        let id = format!("chain_w{j}");
        table.rows.push(match est {
            Ok(est) => {
                let bound = pairwise_bound(&est);
                let mut row = ResultRow::new(id, params);
                row.bound_value = Some(bound);
                row.estimate = Some(est.joint);
                let min_pair = est.pairwise.iter().map(|e| e.p_hat).fold(1.0, f64::min);
                row.extras = vec![
                    Cell::Num(min_pair),
                    Cell::from(est.tied_trials),
                    Cell::Num(est.joint.p_hat - bound),
                ];
                row
            }
            Err(e) => ResultRow::failed(id, params, e),
        });
    }
    table
}

fn fanout_table(scenario: &FanOutScenario, twi: &TwiConfig, trials: u64, seed: RandomSeed) -> ResultTable {
    let mut table = ResultTable::new(ColumnLabels::new(None, None, Some("p_sim_violation")), &["N", "W"], &[]);
    let specs = twi.specs();
    for (j, &w) in twi.windows.iter().enumerate() {
        let params = vec![Cell::from(scenario.n()), Cell::Num(w.secs())];
        let id = format!("fanout_w{j}");
        let est = specs
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|s| estimate_sim_violation(scenario, &s[j], trials, seed_for(twi, seed, j)));
        table.rows.push(match est {
            Ok(e) => {
                let mut row = ResultRow::new(id, params);
                row.estimate = Some(e);
                row
            }
            Err(e) => ResultRow::failed(id, params, e),
        });
    }
    table
}

fn condition_cells(r: &CausalityConditionReport) -> Vec<Cell> {
    vec![
        Cell::Bool(r.never_violated),
        Cell::Bool(r.certainly_violated),
        Cell::Num(r.w_min.secs()),
        Cell::Num(r.w_min_raw),
    ]
}

fn analytic_table(queries: &[AnalyticQuery]) -> ResultTable {
    let mut table = ResultTable::new(
        ColumnLabels::new(Some("value"), None, None),
        &["op", "query"],
        &["never_violated", "certainly_violated", "w_min", "w_min_raw"],
    );
    for (i, q) in queries.iter().enumerate() {
        let json = serde_json::to_value(q).expect("query serializes");
        let op = json["op"].as_str().unwrap_or_default().to_owned();
        let params = vec![Cell::Text(op), Cell::Text(json.to_string())];
        let id = format!("q{i}");
        let value: crate::Result<(f64, Vec<Cell>)> = match q {
            AnalyticQuery::TwoSensorMinWindow { t_s1, t_s2, tau_s1, tau_s2 } => {
                twi_two_sensor_min_window(*t_s1, *t_s2, *tau_s1, *tau_s2).map(|w| (w.secs(), vec![]))
            }
            AnalyticQuery::PSimPair { t_1, t_2, w } => Ok((p_sim_violation_pair(*t_1, *t_2, *w), vec![])),
            AnalyticQuery::PSimN { arrivals, w } => p_sim_violation_n(arrivals, *w).map(|p| (p, vec![])),
            AnalyticQuery::PCvCase1 { t_s, t_d, w } => Ok((p_cv_case1(*t_s, *t_d, *w), vec![])),
            AnalyticQuery::PCvCase2 { t_s, t_d, w } => Ok((p_cv_case2(*t_s, *t_d, *w), vec![])),
            AnalyticQuery::Case1Conditions { params, t_ab } => {
                causality_conditions_case1(params, *t_ab).map(|r| (r.w_min.secs(), condition_cells(&r)))
            }
            AnalyticQuery::Case2Conditions { params, t_ab } => {
                causality_conditions_case2(params, *t_ab).map(|r| (r.w_min.secs(), condition_cells(&r)))
            }
            AnalyticQuery::TwoRate { n } => two_rate_exact(*n).map(|p| (p, vec![])),
            AnalyticQuery::EventThroughputLoss { w, t_0 } => event_throughput_loss(*w, *t_0).map(|p| (p, vec![])),
        };
        table.rows.push(match value {
            Ok((v, extras)) => {
                let mut row = ResultRow::new(id, params);
                row.analytic_value = Some(v);
                row.extras = extras;
                row
            }
            Err(e) => ResultRow::failed(id, params, e),
        });
    }
    table
}

fn lemma1_table(models: &[TransmissionTimeModel; 3], trials: u64, seed: RandomSeed) -> ResultTable {
    let mut table = ResultTable::new(
        ColumnLabels::new(None, None, None),
        &["t1", "t2", "t3"],
        &["lhs", "rhs", "lhs_std_err", "rhs_std_err", "conditioning_count", "verdict"],
    );
    let params: Vec<Cell> = models.iter().map(|m| Cell::Text(m.tag())).collect();
    table.rows.push(match verify_lemma1([&models[0], &models[1], &models[2]], trials, seed) {
        Ok(r) => {
            let mut row = ResultRow::new("lemma1", params);
            let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
            row.extras = vec![
                Cell::Num(r.lhs),
                Cell::Num(r.rhs),
                Cell::Num(r.lhs_std_err),
                Cell::Num(r.rhs_std_err),
                Cell::from(r.conditioning_count),
                Cell::Text(verdict.as_str().unwrap_or_default().to_owned()),
            ];
            row
        }
        Err(e) => ResultRow::failed("lemma1", params, e),
    });
    table
}

/// Pairwise violation with `T_1 ~ Exp(λ)` against the exponential-tail
/// lower bound, one row per window. Windows share random numbers.
fn exponential_tail_table(
    lambda: f64,
    tau: Duration,
    windows: &[Duration],
    t2: &TransmissionTimeModel,
    trials: u64,
    seed: RandomSeed,
) -> ResultTable {
    let mut table = ResultTable::new(
        ColumnLabels::new(None, Some("lower_bound"), Some("p_violation")),
        &["lambda", "tau", "W"],
        &["margin_std_err"],
    );
    let params = |w: Duration| vec![Cell::Num(lambda), Cell::Num(tau.secs()), Cell::Num(w.secs())];
    let scenario = CausalChainScenario::new(
        vec![tau],
        vec![
            InputModel::link(TransmissionTimeModel::exponential(lambda)),
            InputModel::link(t2.clone()),
        ],
    );
    let twis: Vec<TwiSpec> = windows.iter().map(|&w| TwiSpec::uniform(w)).collect();
    let ests = scenario.and_then(|s| estimate_chain_windows(&s, &twis, trials, seed));
    for (j, &w) in windows.iter().enumerate() {
        let id = format!("tail_w{j}");
        let lb = appendix_d_lower_bound(lambda, tau.secs(), w.secs(), t2);
        table.rows.push(match (&ests, lb) {
            (Ok(ests), Ok(lb)) => {
                let est = ests[j].pairwise[0].complement();
                let mut row = ResultRow::new(id, params(w));
                row.bound_value = Some(lb);
                row.estimate = Some(est);
                let margin = if est.std_err > 0.0 {
                    (est.p_hat - lb) / est.std_err
                } else if est.p_hat >= lb {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                };
                row.extras = vec![Cell::Num(margin)];
                row
            }
            (Err(e), _) => ResultRow::failed(id, params(w), e),
            (_, Err(e)) => ResultRow::failed(id, params(w), e),
        });
    }
    table
}

fn plan_table(plan: &PlanConfig) -> ResultTable {
    let mut table = ResultTable::new(
        ColumnLabels::new(None, None, None),
        &["W", "t_model"],
        &[
            "p_miss_known_edge",
            "p_miss_unknown_edge",
            "p_miss_unknown_edge_exact",
            "slots",
            "on_slot_grid",
            "max_t_ab",
            "radio_budget",
        ],
    );
    let budget = plan
        .budget
        .as_ref()
        .map(|b| latency_budget_case2(b.t_s, b.tau_a, b.tau_s, b.sender_budget));
    for (j, &w) in plan.windows.iter().enumerate() {
        let params = vec![Cell::Num(w.secs()), Cell::Text(plan.t_model.tag())];
        let id = format!("plan_w{j}");
        let computed = (|| -> crate::Result<Vec<Cell>> {
            let known = p_miss_known_edge(&plan.t_model, w)?;
            let unknown = if w.secs() > 0.0 {
                Some(p_miss_unknown_edge(&plan.t_model, w)?)
            } else {
                None
            };
            let (slots, on_grid) = match plan.slot {
                Some(g) => (
                    Cell::Int(quantize_to_slots(TimePoint::from_secs(w.secs()), g)),
                    Cell::Bool(validate_twi_on_grid(w, g)),
                ),
                None => (Cell::Empty, Cell::Empty),
            };
            let (max_t_ab, radio) = match &budget {
                Some(Ok(b)) => (Cell::Num(b.max_t_ab.secs()), Cell::Num(b.radio_budget.secs())),
                Some(Err(e)) => return Err(e.clone()),
                None => (Cell::Empty, Cell::Empty),
            };
            Ok(vec![
                Cell::Num(known),
                unknown.map(|u| u.paper_value).into(),
                unknown.map(|u| u.exact_value).into(),
                slots,
                on_grid,
                max_t_ab,
                radio,
            ])
        })();
        table.rows.push(match computed {
            Ok(extras) => {
                let mut row = ResultRow::new(id, params);
                row.extras = extras;
                row
            }
            Err(e) => ResultRow::failed(id, params, e),
        });
    }
    table
}

/// Computes the result table without touching the filesystem. Runs on the
/// current rayon pool.
pub fn compute_table(cfg: &ExperimentConfig) -> Result<ResultTable, HarnessError> {
    cfg.validate()?;
    let (trials, seed) = (cfg.trials, cfg.seed);
    Ok(match &cfg.experiment {
        Experiment::Analytic { queries } => analytic_table(queries),
        Experiment::ChainSim { scenario, twi } => chain_table(scenario, twi, trials, seed),
        Experiment::FanOutSim { scenario, twi } => fanout_table(scenario, twi, trials, seed),
        Experiment::BoundsCheck { target } => match target {
            BoundsTarget::Chain { scenario, twi } => chain_table(scenario, twi, trials, seed),
            BoundsTarget::Lemma1 { models } => lemma1_table(models, trials, seed),
            BoundsTarget::ExponentialTail { lambda, tau, windows, t2 } => {
                exponential_tail_table(*lambda, *tau, windows, t2, trials, seed)
            }
        },
        Experiment::Plan(plan) => plan_table(plan),
        Experiment::Reproduce { figure } => match figure {
            Figure::TwoRate => figure7_table(trials, seed)?,
            Figure::WindowSweep => figure8_table(trials, seed)?,
        },
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".to_owned())
}

pub(crate) fn config_hash(cfg: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(cfg.to_json().as_bytes()))
}

/// Runs an experiment and writes `results.csv` and `manifest.json` into
/// `cfg.output_path`.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunReport, HarnessError> {
    cfg.validate()?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(|e| crate::Error::domain(format!("cannot start worker threads: {e}")))?;
    let threads = pool.current_num_threads();
    let table = pool.install(|| compute_table(cfg))?;
    let wall_time_secs = clock.elapsed().as_secs_f64();

    let dir = PathBuf::from(&cfg.output_path);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let csv_path = dir.join(CSV_FILE);
    let file = fs::File::create(&csv_path).map_err(io_err(&csv_path))?;
    table
        .write_csv(std::io::BufWriter::new(file))
        .map_err(io_err(&csv_path))?;

    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        schema_version: cfg.schema_version,
        kind: cfg.experiment.kind_name().to_owned(),
        config_sha256: config_hash(cfg),
        seed: cfg.seed.0,
        trials: cfg.trials,
        threads,
        git_describe: git_describe(),
        started_unix_secs: started,
        wall_time_secs,
        csv_file: CSV_FILE.to_owned(),
        rows: table.rows.len(),
        failed_rows: table.rows.iter().filter(|r| r.error.is_some()).count(),
    };
    let manifest_path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(&manifest_path, json).map_err(io_err(&manifest_path))?;

    Ok(RunReport {
        table,
        csv_path,
        manifest_path,
        manifest,
    })
}
