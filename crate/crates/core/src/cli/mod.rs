//! Scenario runner behind the `mzi-modes` binary: one function per
//! subcommand, each a deterministic function of its configuration.

mod config;
mod table;

pub use config::ScenarioConfig;
pub use table::{format_number, json_number, Cell, Format, Table};

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::PathBuf;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::estimation::{
    ingest_events, max_likelihood_fit, precision_pipeline, sample_events, BinSpec, EventRecord,
    PipelineConfig,
};
use crate::fisher::{
    classical_fisher, enhancement_sweep, fisher_rl, optimal_fringes, optimal_fringes_fisher,
    optimal_overlap, quantum_fisher, EnhancementMode,
};
use crate::model::{coincidence_probability, double_probability, InterferometerParams};
use crate::spatial::{overlap_from_geometry, spatial_fisher, SpatialModePair, SpatialModel};
use crate::three_photon::{three_photon_sweep, three_photon_sweep_optimised};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_VISIBILITY: f64 = 0.93;
/// Displacement used by the position-resolved commands when `d` is absent.
pub const DEFAULT_D_OVER_SIGMA: f64 = 1.64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Fringes,
    Enhancement,
    Qfi,
    OptimalFringes,
    SpatialFisher,
    Simulate,
    Estimate,
    Mlfit,
    ThreePhoton,
}

const THETA_KEYS: [&str; 4] = ["theta", "theta_min", "theta_max", "theta_points"];

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Fringes,
        Command::Enhancement,
        Command::Qfi,
        Command::OptimalFringes,
        Command::SpatialFisher,
        Command::Simulate,
        Command::Estimate,
        Command::Mlfit,
        Command::ThreePhoton,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Fringes => "fringes",
            Command::Enhancement => "enhancement",
            Command::Qfi => "qfi",
            Command::OptimalFringes => "optimal-fringes",
            Command::SpatialFisher => "spatial-fisher",
            Command::Simulate => "simulate",
            Command::Estimate => "estimate",
            Command::Mlfit => "mlfit",
            Command::ThreePhoton => "three-photon",
        }
    }

    /// Configuration keys the command accepts.
    pub fn keys(self) -> Vec<&'static str> {
        let mut keys: Vec<&'static str> = match self {
            Command::Fringes | Command::Qfi => vec!["visibility", "overlap", "d", "sigma"],
            Command::Enhancement => vec![
                "mode",
                "v_min",
                "v_max",
                "v_points",
                "theta_min",
                "theta_max",
                "theta_points",
            ],
            Command::OptimalFringes => vec!["visibility"],
            Command::SpatialFisher => vec!["visibility", "d", "sigma"],
            Command::Simulate => vec!["theta_true", "visibility", "d", "sigma", "events"],
            Command::Estimate => vec![
                "input",
                "theta0",
                "visibility",
                "d",
                "sigma",
                "subset_size",
                "bin_width",
                "bootstrap_resamples",
            ],
            Command::Mlfit => vec!["input", "d", "sigma"],
            Command::ThreePhoton => vec!["visibility", "d", "sigma", "optimise_d"],
        };
        if matches!(
            self,
            Command::Fringes
                | Command::Qfi
                | Command::OptimalFringes
                | Command::SpatialFisher
                | Command::ThreePhoton
        ) {
            keys.extend(THETA_KEYS);
        }
        keys.push("seed");
        keys
    }
}

impl std::str::FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// Result of a command before encoding.
#[derive(Debug, Clone)]
pub enum Output {
    Table(Table),
    Events {
        metadata: BTreeMap<String, String>,
        events: Vec<EventRecord>,
    },
    /// JSON document with the per-subset estimates for CSV output.
    Report { doc: Value, estimates: Vec<f64> },
}

impl Output {
    pub fn write(&self, out: &mut dyn Write, format: Format) -> std::io::Result<()> {
        match (self, format) {
            (Output::Table(t), _) => t.write(out, format),
            (Output::Events { metadata, events }, Format::Csv) => {
                crate::estimation::write_events(out, events, metadata)
            }
            (Output::Events { metadata, events }, Format::Json) => {
                let doc = json!({ "metadata": metadata, "events": events });
                serde_json::to_writer_pretty(&mut *out, &doc)?;
                writeln!(out)
            }
            (Output::Report { doc, .. }, Format::Json) => {
                serde_json::to_writer_pretty(&mut *out, doc)?;
                writeln!(out)
            }
            (Output::Report { doc, estimates }, Format::Csv) => {
                for (key, v) in doc.as_object().expect("report is an object") {
                    match v {
                        Value::Object(_) => {}
                        Value::Array(items) => {
                            let parts: Vec<String> = items.iter().map(scalar).collect();
                            writeln!(out, "#{key}={}", parts.join(";"))?;
                        }
                        _ => writeln!(out, "#{key}={}", scalar(v))?,
                    }
                }
                if let Some(refs) = doc["fisher_refs"].as_object() {
                    for (k, v) in refs {
                        writeln!(out, "#{k}={}", scalar(v))?;
                    }
                }
                let mut t = Table::new(&["subset", "estimate"]);
                for (i, e) in estimates.iter().enumerate() {
                    t.push(vec![Cell::Int(i as u64), (*e).into()]);
                }
                t.write(out, Format::Csv)
            }
        }
    }
}

/// Runs `command` without writing anything.
pub fn execute(command: Command, config: &ScenarioConfig) -> Result<Output> {
    config.reject_unknown(&command.keys(), command.name())?;
    match command {
        Command::Fringes => fringes(config).map(Output::Table),
        Command::Enhancement => enhancement(config).map(Output::Table),
        Command::Qfi => qfi(config).map(Output::Table),
        Command::OptimalFringes => optimal_fringes_table(config).map(Output::Table),
        Command::SpatialFisher => spatial_fisher_table(config).map(Output::Table),
        Command::ThreePhoton => three_photon(config).map(Output::Table),
        Command::Simulate => simulate(config),
        Command::Estimate => estimate(config),
        Command::Mlfit => mlfit(config).map(Output::Table),
    }
}

/// Runs `command` and writes its result to `out`.
pub fn run(command: Command, config: &ScenarioConfig, format: Format, out: &mut dyn Write) -> Result<()> {
    execute(command, config)?
        .write(out, format)
        .map_err(|source| Error::Io {
            path: PathBuf::from("<output>"),
            source,
        })
}

fn visibility(config: &ScenarioConfig) -> Result<f64> {
    config.number_or("visibility", DEFAULT_VISIBILITY)
}

/// `overlap`, or the geometric overlap of `d`; `D = 1` when neither is given.
fn overlap(config: &ScenarioConfig) -> Result<f64> {
    match (config.number("overlap")?, config.length("d")?) {
        (Some(_), Some(_)) => Err(Error::Config("give either `overlap` or `d`, not both".into())),
        (Some(o), None) => Ok(o),
        (None, Some(d)) => Ok(overlap_from_geometry(&SpatialModePair::from_ratio(d)?)),
        (None, None) => Ok(1.0),
    }
}

fn fringes(config: &ScenarioConfig) -> Result<Table> {
    let (v, d) = (visibility(config)?, overlap(config)?);
    let mut t = Table::new(&["theta", "p_c", "p_d", "single_photon"]);
    for theta in config.theta_grid(181)? {
        let p = InterferometerParams::new(theta, v, d)?;
        let c = (0.5 * theta).cos();
        t.push(vec![
            theta.into(),
            coincidence_probability(&p).into(),
            double_probability(&p).into(),
            (c * c).into(),
        ]);
    }
    Ok(t)
}

fn enhancement(config: &ScenarioConfig) -> Result<Table> {
    let modes: Vec<(&str, EnhancementMode)> = match config.raw("mode").unwrap_or("both") {
        "fixed" => vec![("fixed", EnhancementMode::FullOverlap)],
        "optimal" => vec![("optimal", EnhancementMode::OptimalOverlap)],
        "both" => vec![
            ("fixed", EnhancementMode::FullOverlap),
            ("optimal", EnhancementMode::OptimalOverlap),
        ],
        other => {
            return Err(Error::Config(format!(
                "`mode` = `{other}` (use fixed, optimal or both)"
            )))
        }
    };
    let vs = config::grid(
        "visibility",
        config.number_or("v_min", 0.0)?,
        config.number_or("v_max", 1.0)?,
        config.count_or("v_points", 21)?,
    )?;
    let thetas = config.theta_grid(37)?;
    let mut t = Table::new(&["mode", "visibility", "theta", "overlap", "fisher", "epsilon"]);
    for (name, mode) in modes {
        for p in enhancement_sweep(&vs, &thetas, mode)? {
            t.push(vec![
                name.into(),
                p.visibility.into(),
                p.theta.into(),
                p.overlap.into(),
                p.fisher.into(),
                p.epsilon.into(),
            ]);
        }
    }
    Ok(t)
}

fn qfi(config: &ScenarioConfig) -> Result<Table> {
    let (v, d) = (visibility(config)?, overlap(config)?);
    let mut t = Table::new(&[
        "theta",
        "F_pair",
        "F_RL",
        "F_Q",
        "epsilon_pair",
        "epsilon_RL",
        "epsilon_Q",
    ]);
    for theta in config.theta_grid(181)? {
        let p = InterferometerParams::new(theta, v, d)?;
        let (a, b, c) = (classical_fisher(&p), fisher_rl(&p), quantum_fisher(&p));
        t.push(vec![
            theta.into(),
            a.value.into(),
            b.value.into(),
            c.value.into(),
            a.epsilon().into(),
            b.epsilon().into(),
            c.epsilon().into(),
        ]);
    }
    Ok(t)
}

fn optimal_fringes_table(config: &ScenarioConfig) -> Result<Table> {
    let v = visibility(config)?;
    let d = optimal_overlap(v)?;
    let mut t = Table::new(&["theta", "overlap", "p_c_plus", "p_c_minus", "p_d", "fisher"]);
    for theta in config.theta_grid(181)? {
        let p = InterferometerParams::new(theta, v, d)?;
        let f = optimal_fringes(&p);
        t.push(vec![
            theta.into(),
            d.into(),
            f.coincidence_plus.into(),
            f.coincidence_minus.into(),
            f.double.into(),
            optimal_fringes_fisher(&p).value.into(),
        ]);
    }
    Ok(t)
}

fn spatial_fisher_table(config: &ScenarioConfig) -> Result<Table> {
    let v = visibility(config)?;
    let pair = config.pair_or(DEFAULT_D_OVER_SIGMA)?;
    let mut t = Table::new(&[
        "theta",
        "F_c",
        "F_d",
        "F_spatial",
        "F_pair",
        "F_Q",
        "epsilon_spatial",
    ]);
    for theta in config.theta_grid(181)? {
        let model = SpatialModel::new(theta, v, pair)?;
        let f = spatial_fisher(&model)?;
        t.push(vec![
            theta.into(),
            f.coincidence.into(),
            f.double.into(),
            f.total.into(),
            classical_fisher(model.params()).value.into(),
            quantum_fisher(model.params()).value.into(),
            f.report().epsilon().into(),
        ]);
    }
    Ok(t)
}

fn three_photon(config: &ScenarioConfig) -> Result<Table> {
    let v = visibility(config)?;
    let thetas = config.theta_grid(41)?;
    let points = if config.flag_or("optimise_d", false)? {
        if config.contains("d") {
            return Err(Error::Config("`optimise_d = true` chooses d itself; drop `d`".into()));
        }
        three_photon_sweep_optimised(&thetas, v)?
    } else {
        three_photon_sweep(&thetas, v, config.pair_or(0.0)?)?
    };
    let mut t = Table::new(&[
        "theta",
        "d_over_sigma",
        "p30",
        "p21",
        "p12",
        "p03",
        "F3",
        "epsilon",
    ]);
    for p in points {
        let c = p.counts;
        t.push(vec![
            p.theta.into(),
            p.d_over_sigma.into(),
            c.p30.into(),
            c.p21.into(),
            c.p12.into(),
            c.p03.into(),
            p.fisher.into(),
            p.epsilon.into(),
        ]);
    }
    Ok(t)
}

fn simulate(config: &ScenarioConfig) -> Result<Output> {
    let theta = config.angle_or("theta_true", FRAC_PI_2)?;
    let v = visibility(config)?;
    let pair = config.pair_or(DEFAULT_D_OVER_SIGMA)?;
    let n = config.count_or("events", 6000)?;
    let seed = config.seed_or(DEFAULT_SEED)?;
    let events = sample_events(theta, v, pair, n, seed)?;
    let metadata = BTreeMap::from([
        ("theta_true".to_owned(), format_number(theta)),
        ("visibility".to_owned(), format_number(v)),
        ("d_over_sigma".to_owned(), format_number(pair.d_over_sigma())),
        ("seed".to_owned(), seed.to_string()),
    ]);
    Ok(Output::Events { metadata, events })
}

/// Events from `input` plus the mode pair and visibility, falling back on the
/// file's metadata for values not configured.
fn load_events(config: &ScenarioConfig) -> Result<(Vec<EventRecord>, SpatialModePair, Option<f64>)> {
    let input = config
        .raw("input")
        .ok_or_else(|| Error::Config("`input` (event file) is required".into()))?;
    let file = ingest_events(input)?;
    let meta = |key: &str| -> Result<Option<f64>> {
        file.metadata
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("{input}: metadata `{key}` = `{v}` is not a number")))
            })
            .transpose()
    };
    let d = match config.length("d")? {
        Some(d) => d,
        None => meta("d_over_sigma")?.ok_or_else(|| {
            Error::Config(format!("{input} has no d_over_sigma metadata; set `d`"))
        })?,
    };
    let v = match config.number("visibility")? {
        Some(v) => Some(v),
        None => meta("visibility")?,
    };
    Ok((file.events, SpatialModePair::from_ratio(d)?, v))
}

fn estimate(config: &ScenarioConfig) -> Result<Output> {
    let (events, pair, v) = load_events(config)?;
    let v = v.unwrap_or(DEFAULT_VISIBILITY);
    let mut pc = PipelineConfig::new(config.angle_or("theta0", FRAC_PI_2)?, v, pair);
    pc.subset_size = config.count_or("subset_size", pc.subset_size)?;
    pc.bin_width = config.length("bin_width")?.unwrap_or(BinSpec::DEFAULT_BIN_WIDTH);
    pc.bootstrap_resamples = config.count_or("bootstrap_resamples", pc.bootstrap_resamples)?;
    pc.seed = config.seed_or(DEFAULT_SEED)?;
    let r = precision_pipeline(&events, &pc)?;
    let doc = json!({
        "theta0": json_number(r.theta0),
        "n_events": r.n_events,
        "n_coincidences": r.n_coincidences,
        "n_subsets": r.n_subsets,
        "subset_size": r.subset_size,
        "estimates_mean": json_number(r.mean),
        "estimates_std": json_number(r.std),
        "cramer_rao_std": json_number(r.cramer_rao_std),
        "epsilon": json_number(r.epsilon),
        "epsilon_ci_2sigma": [json_number(r.epsilon_ci.0), json_number(r.epsilon_ci.1)],
        "fisher_refs": {
            "F_c": json_number(r.fisher_c),
            "F_pair": json_number(r.fisher_pair),
            "F_Q": json_number(r.fisher_quantum),
        },
        "seed": pc.seed,
        "config": {
            "visibility": json_number(v),
            "d_over_sigma": json_number(pair.d_over_sigma()),
            "bin_width_over_sigma": json_number(pc.bin_width),
            "bootstrap_resamples": pc.bootstrap_resamples,
            "entries": config.entries(),
        },
    });
    Ok(Output::Report {
        doc,
        estimates: r.estimates,
    })
}

fn mlfit(config: &ScenarioConfig) -> Result<Table> {
    let (events, pair, _) = load_events(config)?;
    let fit = max_likelihood_fit(&events, &pair)?;
    let mut t = Table::new(&[
        "theta",
        "visibility",
        "loglik",
        "boundary",
        "identifiable",
        "n_coincidences",
        "n_doubles",
    ]);
    t.push(vec![
        fit.theta.into(),
        fit.visibility.into(),
        fit.loglik.into(),
        Cell::Bool(fit.boundary),
        Cell::Bool(fit.identifiable),
        Cell::Int(fit.n_coincidences as u64),
        Cell::Int(fit.n_doubles as u64),
    ]);
    Ok(t)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format_number(n.as_f64().expect("f64")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
