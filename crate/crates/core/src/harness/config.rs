use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::analytics::{Case1Params, Case2Params};
use crate::model::{Duration, RandomSeed, TimePoint, TransmissionTimeModel};
use crate::planner::SlotGrid;
use crate::sim::{CausalChainScenario, FanOutScenario, SweepMode};
use crate::timestamp::TwiSpec;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TRIALS: u64 = 100_000;

/// A complete, validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(flatten)]
    pub experiment: Experiment,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: RandomSeed,
    #[serde(default = "default_output")]
    pub output_path: String,
}

fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

fn default_output() -> String {
    "results".to_owned()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    Analytic {
        queries: Vec<AnalyticQuery>,
    },
    ChainSim {
        scenario: CausalChainScenario,
        #[serde(default)]
        twi: TwiConfig,
    },
    FanOutSim {
        scenario: FanOutScenario,
        #[serde(default)]
        twi: TwiConfig,
    },
    BoundsCheck {
        target: BoundsTarget,
    },
    Plan(PlanConfig),
    Reproduce {
        figure: Figure,
    },
}

impl Experiment {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Experiment::Analytic { .. } => "analytic",
            Experiment::ChainSim { .. } => "chain_sim",
            Experiment::FanOutSim { .. } => "fan_out_sim",
            Experiment::BoundsCheck { .. } => "bounds_check",
            Experiment::Plan(_) => "plan",
            Experiment::Reproduce { .. } => "reproduce",
        }
    }
}

/// Window phase policy in configs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OffsetConfig {
    #[default]
    Uniform,
    Fixed(Duration),
}

/// A single window or a sweep of windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwiConfig {
    #[serde(default = "default_windows")]
    pub windows: Vec<Duration>,
    #[serde(default)]
    pub offset: OffsetConfig,
    #[serde(default)]
    pub mode: SweepMode,
}

fn default_windows() -> Vec<Duration> {
    vec![Duration::ZERO]
}

impl Default for TwiConfig {
    fn default() -> Self {
        Self {
            windows: default_windows(),
            offset: OffsetConfig::default(),
            mode: SweepMode::default(),
        }
    }
}

impl TwiConfig {
    pub fn specs(&self) -> crate::Result<Vec<TwiSpec>> {
        self.windows
            .iter()
            .map(|&w| match self.offset {
                OffsetConfig::Uniform => Ok(TwiSpec::uniform(w)),
                OffsetConfig::Fixed(o) => TwiSpec::fixed(w, o),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum AnalyticQuery {
    TwoSensorMinWindow {
        t_s1: Duration,
        t_s2: Duration,
        tau_s1: Duration,
        tau_s2: Duration,
    },
    PSimPair {
        t_1: TimePoint,
        t_2: TimePoint,
        w: Duration,
    },
    PSimN {
        arrivals: Vec<TimePoint>,
        w: Duration,
    },
    PCvCase1 {
        t_s: TimePoint,
        t_d: TimePoint,
        w: Duration,
    },
    PCvCase2 {
        t_s: TimePoint,
        t_d: TimePoint,
        w: Duration,
    },
    Case1Conditions {
        params: Case1Params,
        t_ab: Duration,
    },
    Case2Conditions {
        params: Case2Params,
        t_ab: Duration,
    },
    TwoRate {
        n: u32,
    },
    EventThroughputLoss {
        w: Duration,
        t_0: Duration,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundsTarget {
    /// Joint ordering estimate against the pairwise-product bounds.
    Chain {
        scenario: CausalChainScenario,
        #[serde(default)]
        twi: TwiConfig,
    },
    Lemma1 {
        models: [TransmissionTimeModel; 3],
    },
    /// Pairwise violation for `T_1 ~ Exp(λ)` against the exponential-tail bound.
    ExponentialTail {
        lambda: f64,
        tau: Duration,
        windows: Vec<Duration>,
        t2: TransmissionTimeModel,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetConfig {
    pub t_s: Duration,
    pub tau_a: Duration,
    pub tau_s: Duration,
    pub sender_budget: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanConfig {
    pub t_model: TransmissionTimeModel,
    pub windows: Vec<Duration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<SlotGrid>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Figure {
    /// Two-rate chain: exact `(N+1)/2^N` against its pairwise bound.
    TwoRate,
    /// Exponential transmission times: ordering probability over `W/τ`.
    WindowSweep,
}

impl TryFrom<u32> for Figure {
    type Error = String;
    fn try_from(v: u32) -> Result<Self, String> {
        match v {
            7 => Ok(Figure::TwoRate),
            8 => Ok(Figure::WindowSweep),
            other => Err(format!("unknown figure {other}; expected 7 or 8")),
        }
    }
}

impl From<Figure> for u32 {
    fn from(f: Figure) -> u32 {
        match f {
            Figure::TwoRate => 7,
            Figure::WindowSweep => 8,
        }
    }
}

fn semantic(field: &str, reason: impl ToString) -> HarnessError {
    HarnessError::Semantic {
        field: field.to_owned(),
        reason: reason.to_string(),
    }
}

fn check_sweep(field: &str, windows: &[Duration]) -> Result<(), HarnessError> {
    if windows.is_empty() {
        return Err(semantic(field, "sweep list must not be empty"));
    }
    if windows.windows(2).any(|p| p[1] <= p[0]) {
        return Err(semantic(field, "sweep list must be strictly increasing"));
    }
    Ok(())
}

fn check_twi(prefix: &str, twi: &TwiConfig) -> Result<(), HarnessError> {
    check_sweep(&format!("{prefix}.windows"), &twi.windows)?;
    twi.specs().map_err(|e| semantic(&format!("{prefix}.offset"), e))?;
    Ok(())
}

fn scenario_error(e: crate::Error) -> HarnessError {
    match e {
        crate::Error::InvalidParameter { name, reason } => semantic(&format!("scenario.{name}"), reason),
        other => semantic("scenario", other),
    }
}

impl ExperimentConfig {
    /// Checks every cross-field invariant.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(semantic(
                "schema_version",
                format!("unsupported version {}; this build reads {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.trials == 0 {
            return Err(semantic("trials", "must be at least 1"));
        }
        match &self.experiment {
            Experiment::Analytic { queries } => {
                if queries.is_empty() {
                    return Err(semantic("queries", "need at least one query"));
                }
            }
            Experiment::ChainSim { scenario, twi } => {
                scenario.validate().map_err(scenario_error)?;
                check_twi("twi", twi)?;
            }
            Experiment::FanOutSim { scenario, twi } => {
                scenario.validate().map_err(scenario_error)?;
                check_twi("twi", twi)?;
            }
            Experiment::BoundsCheck { target } => match target {
                BoundsTarget::Chain { scenario, twi } => {
                    scenario.validate().map_err(scenario_error)?;
                    check_twi("target.twi", twi)?;
                }
                BoundsTarget::Lemma1 { models } => {
                    for (i, m) in models.iter().enumerate() {
                        m.validate().map_err(|e| semantic(&format!("target.models[{i}]"), e))?;
                    }
                    if self.trials < crate::bounds::LEMMA1_MIN_TRIALS {
                        return Err(semantic(
                            "trials",
                            format!("lemma check needs at least {} trials", crate::bounds::LEMMA1_MIN_TRIALS),
                        ));
                    }
                }
                BoundsTarget::ExponentialTail { lambda, windows, t2, .. } => {
                    if !(lambda.is_finite() && *lambda > 0.0) {
                        return Err(semantic("target.lambda", "rate must be positive"));
                    }
                    check_sweep("target.windows", windows)?;
                    t2.validate().map_err(|e| semantic("target.t2", e))?;
                }
            },
            Experiment::Plan(plan) => {
                plan.t_model.validate().map_err(|e| semantic("t_model", e))?;
                check_sweep("windows", &plan.windows)?;
            }
            Experiment::Reproduce { .. } => {}
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn parse_error(origin: &str, e: serde_path_to_error::Error<serde_json::Error>) -> HarnessError {
    let inner = e.inner();
    HarnessError::Parse {
        origin: origin.to_owned(),
        field: e.path().to_string(),
        line: inner.line(),
        column: inner.column(),
        message: inner.to_string(),
    }
}

fn typed<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T, HarnessError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| parse_error(origin, e))
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum Kind {
    Analytic,
    ChainSim,
    FanOutSim,
    BoundsCheck,
    Plan,
    Reproduce,
}

#[derive(Deserialize)]
struct Envelope {
    kind: Kind,
}

// One document type per kind, so that field paths and positions survive
// deserialization (a flattened, internally tagged enum would buffer them away).
macro_rules! document {
    ($name:ident { $($(#[$attr:meta])* $field:ident : $ty:ty,)* }) => {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct $name {
            schema_version: u32,
            #[allow(dead_code)]
            kind: serde::de::IgnoredAny,
            #[serde(default = "default_trials")]
            trials: u64,
            #[serde(default)]
            seed: RandomSeed,
            #[serde(default = "default_output")]
            output_path: String,
            $($(#[$attr])* $field: $ty,)*
        }
    };
}

document!(AnalyticDoc { queries: Vec<AnalyticQuery>, });
document!(ChainDoc { scenario: CausalChainScenario, #[serde(default)] twi: TwiConfig, });
document!(FanOutDoc { scenario: FanOutScenario, #[serde(default)] twi: TwiConfig, });
document!(BoundsDoc { target: BoundsTarget, });
document!(PlanDoc {
    t_model: TransmissionTimeModel,
    windows: Vec<Duration>,
    #[serde(default)]
    budget: Option<BudgetConfig>,
    #[serde(default)]
    slot: Option<SlotGrid>,
});
document!(ReproduceDoc { figure: Figure, });

macro_rules! assemble {
    ($doc:expr, |$d:ident| $experiment:expr) => {{
        let $d = $doc;
        let experiment = $experiment;
        ExperimentConfig {
            schema_version: $d.schema_version,
            experiment,
            trials: $d.trials,
            seed: $d.seed,
            output_path: $d.output_path,
        }
    }};
}

/// Parses and validates a config from JSON text. `origin` names the source
/// in diagnostics.
pub fn parse_config(text: &str, origin: &str) -> Result<ExperimentConfig, HarnessError> {
    let Envelope { kind } = typed(text, origin)?;
    let cfg = match kind {
        Kind::Analytic => assemble!(typed::<AnalyticDoc>(text, origin)?, |d| Experiment::Analytic {
            queries: d.queries
        }),
        Kind::ChainSim => assemble!(typed::<ChainDoc>(text, origin)?, |d| Experiment::ChainSim {
            scenario: d.scenario,
            twi: d.twi
        }),
        Kind::FanOutSim => assemble!(typed::<FanOutDoc>(text, origin)?, |d| Experiment::FanOutSim {
            scenario: d.scenario,
            twi: d.twi
        }),
        Kind::BoundsCheck => assemble!(typed::<BoundsDoc>(text, origin)?, |d| Experiment::BoundsCheck {
            target: d.target
        }),
        Kind::Plan => assemble!(typed::<PlanDoc>(text, origin)?, |d| Experiment::Plan(PlanConfig {
            t_model: d.t_model,
            windows: d.windows,
            budget: d.budget,
            slot: d.slot,
        })),
        Kind::Reproduce => assemble!(typed::<ReproduceDoc>(text, origin)?, |d| Experiment::Reproduce {
            figure: d.figure
        }),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, HarnessError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_CHAIN: &str = r#"{
        "schema_version": 1,
        "kind": "chain_sim",
        "scenario": {
            "action_times": [0.5],
            "inputs": [
                {"input": "link", "t_ab": {"type": "two_point", "low": 1.0, "high": 2.0, "p_low": 0.5}},
                {"input": "link", "t_ab": {"type": "two_point", "low": 1.0, "high": 2.0, "p_low": 0.5}}
            ]
        }
    }"#;

    #[test]
    fn minimal_chain_gets_defaults() {
        let cfg = parse_config(MINIMAL_CHAIN, "inline").unwrap();
        assert_eq!(cfg.trials, DEFAULT_TRIALS);
        assert_eq!(cfg.seed, RandomSeed(0));
        match &cfg.experiment {
            Experiment::ChainSim { twi, scenario } => {
                assert_eq!(twi.windows, vec![Duration::ZERO]);
                assert_eq!(scenario.n(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_action_time_count_names_field() {
        let text = MINIMAL_CHAIN.replace("[0.5]", "[0.5, 0.5]");
        let err = parse_config(&text, "inline").unwrap_err();
        match err {
            HarnessError::Semantic { field, .. } => assert_eq!(field, "scenario.action_times"),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(parse_config(&text, "x").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn shared_sensor_is_rejected() {
        let sensor = r#"{"input": "sensor", "sensor_id": 1, "t_s": 0.01, "tau_s": 0.001, "mode": "synchronous"}"#;
        let text = format!(
            r#"{{"schema_version": 1, "kind": "chain_sim",
                "scenario": {{"action_times": [0.5], "inputs": [{sensor}, {sensor}]}}}}"#
        );
        let err = parse_config(&text, "inline").unwrap_err();
        assert!(matches!(err, HarnessError::Semantic { ref field, .. } if field == "scenario.inputs"), "{err:?}");
    }

    #[test]
    fn parse_errors_carry_location() {
        let text = MINIMAL_CHAIN.replace("\"p_low\": 0.5}},\n", "\"p_low\": \"x\"}},\n");
        let err = parse_config(&text, "cfg.json").unwrap_err();
        match err {
            HarnessError::Parse { field, line, .. } => {
                assert!(field.contains("scenario.inputs[0]"), "{field}");
                assert!(line >= 6, "{line}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sweeps_must_increase() {
        let text = MINIMAL_CHAIN.replace(
            "\"kind\": \"chain_sim\",",
            "\"kind\": \"chain_sim\", \"twi\": {\"windows\": [1.0, 0.5]},",
        );
        assert!(matches!(
            parse_config(&text, "inline"),
            Err(HarnessError::Semantic { ref field, .. }) if field == "twi.windows"
        ));
    }

    #[test]
    fn figure_numbers() {
        let cfg: ExperimentConfig =
            parse_config(r#"{"schema_version": 1, "kind": "reproduce", "figure": 8}"#, "x").unwrap();
        assert_eq!(cfg.experiment, Experiment::Reproduce { figure: Figure::WindowSweep });
        assert!(parse_config(r#"{"schema_version": 1, "kind": "reproduce", "figure": 3}"#, "x").is_err());
        assert!(parse_config(r#"{"schema_version": 2, "kind": "reproduce", "figure": 7}"#, "x").is_err());
    }
}
