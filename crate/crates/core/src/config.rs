//! Run configuration: a plain-text `key = value` format with `[section]`
//! headers and `#` comments, plus `--section-key value` command-line
//! overrides, and the driver that executes one experiment and writes its
//! CSV and manifest.
//!
//! ```text
//! [model]
//! n_a = 5
//! n_b = 5
//! g = 1.0
//!
//! [experiment]
//! kind = trace
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiments::{
    convergence_study, fit_power_law, oracle_check, run_charging, sensitivity_a, sweep_split,
    sweep_total_atoms, RunSettings, ScalingFit, SplitRule, SweepResult,
};
use crate::model::{ModelParams, Switch};
use crate::propagate::{Method, PropagatorConfig, TimeGrid, DENSE_MAX_DIM};
use crate::VERSION;

const SECTIONS: &[(&str, &[&str])] = &[
    (
        "model",
        &["omega_q", "omega_a", "omega_b", "g", "g1", "g2", "a", "n_a", "n_b", "n_ph", "switch"],
    ),
    ("grid", &["t_max", "dt"]),
    ("propagator", &["method", "krylov_dim", "tol", "max_step"]),
    ("experiment", &["kind", "n_list", "split", "n_total", "cutoffs", "a_list", "refine"]),
    ("run", &["output", "workers"]),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Trace,
    SweepN,
    SweepSplit,
    Convergence,
    SensitivityA,
    OracleCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Trace,
        ExperimentKind::SweepN,
        ExperimentKind::SweepSplit,
        ExperimentKind::Convergence,
        ExperimentKind::SensitivityA,
        ExperimentKind::OracleCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Trace => "trace",
            ExperimentKind::SweepN => "sweep-n",
            ExperimentKind::SweepSplit => "sweep-split",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::SensitivityA => "sensitivity-a",
            ExperimentKind::OracleCheck => "oracle-check",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Experiment keys this kind requires (first) or accepts.
    fn experiment_keys(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            ExperimentKind::Trace | ExperimentKind::OracleCheck => (&[], &[]),
            ExperimentKind::SweepN => (&["n_list"], &["split"]),
            ExperimentKind::SweepSplit => (&["n_total"], &[]),
            ExperimentKind::Convergence => (&["cutoffs"], &[]),
            ExperimentKind::SensitivityA => (&["a_list"], &[]),
        }
    }

    /// Model keys the experiment sets itself.
    fn controlled_model_keys(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::SweepN | ExperimentKind::SweepSplit => &["n_a", "n_b"],
            ExperimentKind::Convergence => &["n_ph"],
            ExperimentKind::SensitivityA => &["a"],
            _ => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub n_list: Vec<u32>,
    pub split: SplitRule,
    pub n_total: u32,
    pub cutoffs: Vec<u32>,
    pub a_list: Vec<f64>,
}

/// Fully validated configuration for one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub grid: TimeGrid,
    pub propagator: PropagatorConfig,
    pub switch: Switch,
    pub refine: bool,
    pub experiment: ExperimentSpec,
    pub output: PathBuf,
    pub workers: usize,
}

/// Unvalidated key/value pairs, keyed by (section, key).
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    values: BTreeMap<(String, String), String>,
}

fn known(section: &str, key: &str) -> bool {
    SECTIONS
        .iter()
        .any(|(s, keys)| *s == section && keys.contains(&key))
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        let mut section: Option<String> = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: "unterminated section header".into(),
                })?;
                let name = name.trim();
                if !SECTIONS.iter().any(|(s, _)| *s == name) {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("unknown section `{name}`"),
                    });
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let section = section.as_deref().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "key outside of any section".into(),
            })?;
            let key = key.trim();
            if !known(section, key) {
                return Err(Error::UnknownKey(format!("{section}.{key}")));
            }
            let entry = (section.to_string(), key.to_string());
            if raw.values.contains_key(&entry) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate key `{section}.{key}`"),
                });
            }
            raw.values.insert(entry, value.trim().to_string());
        }
        Ok(raw)
    }

    /// Applies `--section-key value` (or `--section-key=value`) overrides.
    pub fn apply_flags<S: AsRef<str>>(&mut self, args: &[S]) -> Result<()> {
        let mut it = args.iter().map(AsRef::as_ref);
        while let Some(arg) = it.next() {
            let flag = arg
                .strip_prefix("--")
                .ok_or_else(|| Error::Conflict(format!("expected a `--section-key` flag, got `{arg}`")))?;
            let (name, inline) = match flag.split_once('=') {
                Some((n, v)) => (n, Some(v.to_string())),
                None => (flag, None),
            };
            let (section, key) = name
                .split_once('-')
                .ok_or_else(|| Error::UnknownKey(name.to_string()))?;
            let key = key.replace('-', "_");
            if !known(section, &key) {
                return Err(Error::UnknownKey(format!("{section}.{key}")));
            }
            let value = match inline {
                Some(v) => v,
                None => it
                    .next()
                    .ok_or_else(|| Error::Conflict(format!("flag `{arg}` is missing its value")))?
                    .to_string(),
            };
            self.values.insert((section.to_string(), key), value);
        }
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.values
            .get(&(section.to_string(), key.to_string()))
            .map(String::as_str)
    }

    fn has(&self, section: &str, key: &str) -> bool {
        self.get(section, key).is_some()
    }

    fn parsed<T: std::str::FromStr>(&self, section: &str, key: &str, default: T) -> Result<T> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| validation(section, key, format!("cannot parse `{v}`"))),
        }
    }

    fn list<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Vec<T>> {
        let Some(v) = self.get(section, key) else {
            return Ok(Vec::new());
        };
        let inner = v.trim().trim_start_matches('[').trim_end_matches(']');
        inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| validation(section, key, format!("cannot parse list item `{s}`"))))
            .collect()
    }

    /// Applies defaults and validates every field before anything runs.
    pub fn resolve(&self) -> Result<RunConfig> {
        let kind_text = self
            .get("experiment", "kind")
            .ok_or_else(|| validation("experiment", "kind", "missing experiment kind".into()))?;
        let kind = ExperimentKind::parse(kind_text).ok_or_else(|| {
            validation("experiment", "kind", format!("unknown experiment `{kind_text}`"))
        })?;

        let (required, optional) = kind.experiment_keys();
        for key in required {
            if !self.has("experiment", key) {
                return Err(Error::Conflict(format!("experiment `{}` requires experiment.{key}", kind.name())));
            }
        }
        for key in ["n_list", "split", "n_total", "cutoffs", "a_list"] {
            if self.has("experiment", key) && !required.contains(&key) && !optional.contains(&key) {
                return Err(Error::Conflict(format!("experiment.{key} does not apply to `{}`", kind.name())));
            }
        }
        for key in kind.controlled_model_keys() {
            if self.has("model", key) {
                return Err(Error::Conflict(format!("model.{key} is set by experiment `{}`", kind.name())));
            }
        }

        let d = ModelParams::default();
        let model = ModelParams {
            omega_q: self.parsed("model", "omega_q", d.omega_q)?,
            omega_a: self.parsed("model", "omega_a", d.omega_a)?,
            omega_b: self.parsed("model", "omega_b", d.omega_b)?,
            g: self.parsed("model", "g", d.g)?,
            g1: self.parsed("model", "g1", d.g1)?,
            g2: self.parsed("model", "g2", d.g2)?,
            a_exchange: self.parsed("model", "a", d.a_exchange)?,
            n_a: self.parsed("model", "n_a", d.n_a)?,
            n_b: self.parsed("model", "n_b", d.n_b)?,
            n_ph: self.parsed("model", "n_ph", d.n_ph)?,
        };
        let switch = match self.get("model", "switch").unwrap_or("1") {
            "1" | "on" => Switch::On,
            "0" | "off" => Switch::Off,
            other => return Err(validation("model", "switch", format!("expected 0 or 1, got `{other}`"))),
        };

        let dg = TimeGrid::default();
        let t_max = self.parsed("grid", "t_max", dg.t_max())?;
        let dt = self.parsed("grid", "dt", dg.dt())?;
        let grid = TimeGrid::new(t_max, dt).map_err(|e| field_error(e, "grid"))?;

        let dp = PropagatorConfig::default();
        let method_text = self.get("propagator", "method").unwrap_or("krylov");
        let method = Method::parse(method_text)
            .ok_or_else(|| validation("propagator", "method", format!("unknown method `{method_text}`")))?;
        let propagator = PropagatorConfig {
            method,
            krylov_dim: self.parsed("propagator", "krylov_dim", dp.krylov_dim)?,
            tol: self.parsed("propagator", "tol", dp.tol)?,
            max_step: self.parsed("propagator", "max_step", dp.max_step)?,
        };
        propagator.validate().map_err(|e| field_error(e, "propagator"))?;

        let split_text = self.get("experiment", "split").unwrap_or("symmetric");
        let split = SplitRule::parse(split_text)
            .ok_or_else(|| validation("experiment", "split", format!("unknown split rule `{split_text}`")))?;
        let experiment = ExperimentSpec {
            kind,
            n_list: self.list("experiment", "n_list")?,
            split,
            n_total: self.parsed("experiment", "n_total", 0)?,
            cutoffs: self.list("experiment", "cutoffs")?,
            a_list: self.list("experiment", "a_list")?,
        };
        let refine = self.parsed("experiment", "refine", true)?;
        let output = PathBuf::from(self.get("run", "output").unwrap_or("out"));
        let workers = self.parsed("run", "workers", 0usize)?;

        let config = RunConfig {
            model,
            grid,
            propagator,
            switch,
            refine,
            experiment,
            output,
            workers,
        };
        config.validate()?;
        Ok(config)
    }
}

fn validation(section: &str, key: &str, message: String) -> Error {
    Error::Validation {
        key: format!("{section}.{key}"),
        message,
    }
}

fn field_error(e: Error, section: &str) -> Error {
    match e {
        Error::InvalidParameter { field, reason } => validation(section, field, reason),
        Error::CutoffTooSmall { n_ph, required } => validation(
            section,
            "n_ph",
            format!("cutoff below initial photon number (n_ph = {n_ph} < {required})"),
        ),
        other => other,
    }
}

fn check_model(p: &ModelParams) -> Result<()> {
    p.validate().map_err(|e| field_error(e, "model"))
}

impl RunConfig {
    /// Parses `text` and applies command-line overrides on top.
    pub fn from_sources<S: AsRef<str>>(text: &str, flags: &[S]) -> Result<Self> {
        let mut raw = RawConfig::parse(text)?;
        raw.apply_flags(flags)?;
        raw.resolve()
    }

    pub fn settings(&self) -> RunSettings {
        RunSettings {
            grid: self.grid,
            propagator: self.propagator,
            switch: self.switch,
            refine: self.refine,
            workers: self.workers,
        }
    }

    fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        match e.kind {
            ExperimentKind::Trace | ExperimentKind::SensitivityA => check_model(&self.model)?,
            ExperimentKind::OracleCheck => {
                check_model(&self.model)?;
                let n = self.model.n_ph as usize + 1;
                let dim = n * n * (self.model.n_a as usize + 1) * (self.model.n_b as usize + 1);
                if dim > DENSE_MAX_DIM {
                    return Err(Error::Conflict(format!(
                        "oracle-check needs dimension <= {DENSE_MAX_DIM}, model gives {dim}"
                    )));
                }
            }
            ExperimentKind::SweepN => {
                if e.n_list.is_empty() {
                    return Err(validation("experiment", "n_list", "empty list".into()));
                }
                if e.n_list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(validation("experiment", "n_list", "must be strictly increasing".into()));
                }
                for &n in &e.n_list {
                    let (n_a, n_b) = e.split.split(n).map_err(|err| match err {
                        Error::InvalidSplit(m) => Error::Conflict(m),
                        other => other,
                    })?;
                    check_model(&ModelParams { n_a, n_b, ..self.model.clone() })?;
                }
            }
            ExperimentKind::SweepSplit => {
                if e.n_total < 4 {
                    return Err(validation("experiment", "n_total", "needs at least 4 atoms".into()));
                }
                check_model(&ModelParams { n_a: 2, n_b: e.n_total - 2, ..self.model.clone() })?;
            }
            ExperimentKind::Convergence => {
                if e.cutoffs.is_empty() {
                    return Err(validation("experiment", "cutoffs", "empty list".into()));
                }
                if e.cutoffs.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(validation("experiment", "cutoffs", "must be strictly increasing".into()));
                }
                check_model(&ModelParams { n_ph: e.cutoffs[0], ..self.model.clone() })?;
            }
        }
        if e.kind == ExperimentKind::SensitivityA {
            if e.a_list.is_empty() {
                return Err(validation("experiment", "a_list", "empty list".into()));
            }
            if e.a_list.iter().any(|a| !a.is_finite()) {
                return Err(validation("experiment", "a_list", "values must be finite".into()));
            }
        }
        Ok(())
    }

    /// The resolved configuration in the input format. Feeding it back
    /// reproduces the run.
    pub fn to_config_text(&self) -> String {
        let kind = self.experiment.kind;
        let controlled = kind.controlled_model_keys();
        let m = &self.model;
        let mut out = String::new();
        let mut push = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        push("[model]".into());
        let model_values: [(&str, String); 11] = [
            ("omega_q", format!("{:?}", m.omega_q)),
            ("omega_a", format!("{:?}", m.omega_a)),
            ("omega_b", format!("{:?}", m.omega_b)),
            ("g", format!("{:?}", m.g)),
            ("g1", format!("{:?}", m.g1)),
            ("g2", format!("{:?}", m.g2)),
            ("a", format!("{:?}", m.a_exchange)),
            ("n_a", m.n_a.to_string()),
            ("n_b", m.n_b.to_string()),
            ("n_ph", m.n_ph.to_string()),
            ("switch", if self.switch == Switch::On { "1" } else { "0" }.to_string()),
        ];
        for (key, value) in model_values {
            if !controlled.contains(&key) {
                push(format!("{key} = {value}"));
            }
        }
        push(String::new());
        push("[grid]".into());
        push(format!("t_max = {:?}", self.grid.t_max()));
        push(format!("dt = {:?}", self.grid.dt()));
        push(String::new());
        push("[propagator]".into());
        push(format!("method = {}", self.propagator.method.name()));
        push(format!("krylov_dim = {}", self.propagator.krylov_dim));
        push(format!("tol = {:?}", self.propagator.tol));
        push(format!("max_step = {:?}", self.propagator.max_step));
        push(String::new());
        push("[experiment]".into());
        push(format!("kind = {}", kind.name()));
        let join = |xs: Vec<String>| xs.join(", ");
        match kind {
            ExperimentKind::SweepN => {
                push(format!("n_list = {}", join(self.experiment.n_list.iter().map(u32::to_string).collect())));
                push(format!("split = {}", self.experiment.split));
            }
            ExperimentKind::SweepSplit => push(format!("n_total = {}", self.experiment.n_total)),
            ExperimentKind::Convergence => {
                push(format!("cutoffs = {}", join(self.experiment.cutoffs.iter().map(u32::to_string).collect())))
            }
            ExperimentKind::SensitivityA => {
                push(format!("a_list = {}", join(self.experiment.a_list.iter().map(|a| format!("{a:?}")).collect())))
            }
            _ => {}
        }
        push(format!("refine = {}", self.refine));
        push(String::new());
        push("[run]".into());
        push(format!("output = {}", self.output.display()));
        push(format!("workers = {}", self.workers));
        out
    }
}

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// What a successful run produced.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    /// Human-readable summary lines (also written to the manifest as comments).
    pub notes: Vec<String>,
}

pub const TRACE_COLUMNS: [&str; 5] = ["t", "E", "E_over_N", "P", "P_over_N"];
pub const SWEEP_COLUMNS: [&str; 12] = [
    "N", "N_a", "N_b", "E_max", "t_E", "P_max", "t_P", "boundary_E", "boundary_P", "N_ph", "A", "t_max",
];
pub const CONVERGENCE_COLUMNS: [&str; 7] = ["N_ph", "E_max", "t_E", "P_max", "t_P", "delta_E", "converged"];
pub const SENSITIVITY_COLUMNS: [&str; 7] = ["A", "E_max", "t_E", "P_max", "t_P", "boundary_E", "boundary_P"];
pub const ORACLE_COLUMNS: [&str; 2] = ["t", "deviation"];

fn sweep_rows(sweep: &SweepResult) -> Vec<Vec<String>> {
    let t_max = sweep.meta.settings.grid.t_max();
    sweep
        .rows
        .iter()
        .map(|r| {
            let s = &r.summary;
            vec![
                r.params.n_total().to_string(),
                r.params.n_a.to_string(),
                r.params.n_b.to_string(),
                fmt_float(s.e_max),
                fmt_float(s.t_e),
                fmt_float(s.p_max),
                fmt_float(s.t_p),
                s.boundary_e.to_string(),
                s.boundary_p.to_string(),
                r.params.n_ph.to_string(),
                fmt_float(r.params.a_exchange),
                fmt_float(t_max),
            ]
        })
        .collect()
}

fn fit_note(fit: &ScalingFit) -> String {
    format!(
        "power-law fit: exponent = {:.6}, intercept = {:.6}, max |log residual| = {:.3e}",
        fit.exponent, fit.intercept, fit.residual
    )
}

/// Executes the experiment, returning the header and rows of its CSV.
type Table = (Vec<&'static str>, Vec<Vec<String>>, Vec<String>);

fn execute(config: &RunConfig) -> Result<Table> {
    let settings = config.settings();
    let e = &config.experiment;
    let mut notes = Vec::new();
    let (header, rows): (Vec<&'static str>, Vec<Vec<String>>) = match e.kind {
        ExperimentKind::Trace => {
            let run = run_charging(&config.model, &settings)?;
            let n = f64::from(config.model.n_total()) * config.model.omega_q;
            let t = &run.trace;
            let rows = (0..t.len())
                .map(|k| {
                    vec![
                        fmt_float(t.time(k)),
                        fmt_float(t.energy[k]),
                        fmt_float(t.energy[k] / n),
                        fmt_float(t.power[k]),
                        fmt_float(t.power[k] / n),
                    ]
                })
                .collect();
            let s = run.summary;
            notes.push(format!(
                "E_max = {} at t_E = {}; P_max = {} at t_P = {}",
                fmt_float(s.e_max),
                fmt_float(s.t_e),
                fmt_float(s.p_max),
                fmt_float(s.t_p)
            ));
            (TRACE_COLUMNS.to_vec(), rows)
        }
        ExperimentKind::SweepN => {
            let sweep = sweep_total_atoms(&e.n_list, e.split, &config.model, &settings)?;
            if sweep.rows.len() >= 4 {
                notes.push(fit_note(&fit_power_law(&sweep)?));
            }
            (SWEEP_COLUMNS.to_vec(), sweep_rows(&sweep))
        }
        ExperimentKind::SweepSplit => {
            let sweep = sweep_split(e.n_total, &config.model, &settings)?;
            (SWEEP_COLUMNS.to_vec(), sweep_rows(&sweep))
        }
        ExperimentKind::Convergence => {
            let study = convergence_study(&config.model, &e.cutoffs, &settings)?;
            let rows = study
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n_ph.to_string(),
                        fmt_float(r.summary.e_max),
                        fmt_float(r.summary.t_e),
                        fmt_float(r.summary.p_max),
                        fmt_float(r.summary.t_p),
                        r.delta_e.map(fmt_float).unwrap_or_default(),
                        r.delta_e.is_some_and(|d| d < study.threshold).to_string(),
                    ]
                })
                .collect();
            notes.push(match study.converged_at {
                Some(c) => format!("converged at n_ph = {c} (threshold {})", fmt_float(study.threshold)),
                None => format!("not converged (threshold {})", fmt_float(study.threshold)),
            });
            (CONVERGENCE_COLUMNS.to_vec(), rows)
        }
        ExperimentKind::SensitivityA => {
            let sweep = sensitivity_a(&config.model, &e.a_list, &settings)?;
            let rows = sweep
                .rows
                .iter()
                .map(|r| {
                    let s = &r.summary;
                    vec![
                        fmt_float(r.params.a_exchange),
                        fmt_float(s.e_max),
                        fmt_float(s.t_e),
                        fmt_float(s.p_max),
                        fmt_float(s.t_p),
                        s.boundary_e.to_string(),
                        s.boundary_p.to_string(),
                    ]
                })
                .collect();
            (SENSITIVITY_COLUMNS.to_vec(), rows)
        }
        ExperimentKind::OracleCheck => {
            let check = oracle_check(&config.model, &settings)?;
            notes.push(format!("max deviation = {:.3e}", check.max_deviation()));
            let rows = check
                .times
                .iter()
                .zip(&check.deviations)
                .map(|(t, d)| vec![fmt_float(*t), fmt_float(*d)])
                .collect();
            (ORACLE_COLUMNS.to_vec(), rows)
        }
    };
    Ok((header, rows, notes))
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Runs the configured experiment and writes `<kind>.csv` and `manifest.txt`
/// into the output directory. Partial files are removed on failure.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let (header, rows, notes) = execute(config)?;
    fs::create_dir_all(&config.output)?;
    let csv = config.output.join(format!("{}.csv", config.experiment.kind.name()));
    let manifest = config.output.join("manifest.txt");
    let written = (|| -> Result<()> {
        write_csv(&csv, &header, &rows)?;
        let mut text = format!("# {VERSION}\n");
        for note in &notes {
            text.push_str(&format!("# {note}\n"));
        }
        text.push_str(&config.to_config_text());
        fs::write(&manifest, text)?;
        Ok(())
    })();
    if let Err(e) = written {
        let _ = fs::remove_file(&csv);
        let _ = fs::remove_file(&manifest);
        return Err(e);
    }
    Ok(RunOutcome { csv, manifest, notes })
}
