//! Parameter sweeps over `(lambda, r, theta)`, figure presets and the plain
//! `key = value` configuration format.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ising::{CouplingRatio, IsingChain};
use crate::phases::{phase_record, unwrap_phases, PhaseKinds, PhaseRecord, DEFAULT_RANK_EPS};
use crate::states::{LoopSpec, DEFAULT_LOOP_STEPS, MIN_LOOP_STEPS};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Number of grid points, both ends included.
    pub lambda_steps: usize,
    pub r_list: Vec<usize>,
    pub theta_list: Vec<f64>,
    pub kinds: PhaseKinds,
    pub loop_steps: usize,
    pub quad_tol: f64,
    pub rank_eps: f64,
    pub unwrap: bool,
    pub output_path: PathBuf,
    /// Worker threads; 0 picks the number of available cores.
    pub workers: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            lambda_min: 0.1,
            lambda_max: 2.0,
            lambda_steps: 20,
            r_list: vec![1],
            theta_list: vec![PI / 3.0],
            kinds: PhaseKinds::BOTH,
            loop_steps: DEFAULT_LOOP_STEPS,
            quad_tol: 1e-10,
            rank_eps: DEFAULT_RANK_EPS,
            unwrap: true,
            output_path: PathBuf::from("sweep.csv"),
            workers: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.lambda_min >= 0.0 && self.lambda_min.is_finite()) {
            return bad(format!("lambda_min = {} must be finite and >= 0", self.lambda_min));
        }
        if !(self.lambda_max >= self.lambda_min && self.lambda_max.is_finite()) {
            return bad(format!("lambda_max = {} must be finite and >= lambda_min", self.lambda_max));
        }
        if self.lambda_steps == 0 {
            return bad("lambda_steps must be >= 1".into());
        }
        if self.r_list.is_empty() || self.r_list.contains(&0) {
            return bad("r_list must be a non-empty list of positive integers".into());
        }
        if self.theta_list.is_empty() || self.theta_list.iter().any(|t| !t.is_finite()) {
            return bad("theta_list must be a non-empty list of finite angles".into());
        }
        if !self.kinds.interferometric && !self.kinds.uhlmann {
            return bad("kinds must name at least one phase".into());
        }
        if self.loop_steps < MIN_LOOP_STEPS {
            return bad(format!("loop_steps = {} must be >= {MIN_LOOP_STEPS}", self.loop_steps));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol.is_finite()) {
            return bad(format!("quad_tol = {} must be > 0", self.quad_tol));
        }
        if !(self.rank_eps > 0.0 && self.rank_eps < 0.5) {
            return bad(format!("rank_eps = {} must lie in (0, 0.5)", self.rank_eps));
        }
        Ok(())
    }

    pub fn lambda_grid(&self) -> Vec<f64> {
        let n = self.lambda_steps;
        if n == 1 {
            return vec![self.lambda_min];
        }
        let span = self.lambda_max - self.lambda_min;
        (0..n)
            .map(|i| if i + 1 == n { self.lambda_max } else { self.lambda_min + span * i as f64 / (n - 1) as f64 })
            .collect()
    }

    pub fn apply(&mut self, o: &ConfigOverrides) {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = &o.$f { self.$f = v.clone(); })* };
        }
        set!(lambda_min, lambda_max, lambda_steps, r_list, theta_list, kinds, loop_steps, quad_tol, rank_eps, unwrap, output_path, workers);
    }
}

/// A partial configuration: what a config file or a set of flags specifies.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigOverrides {
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub lambda_steps: Option<usize>,
    pub r_list: Option<Vec<usize>>,
    pub theta_list: Option<Vec<f64>>,
    pub kinds: Option<PhaseKinds>,
    pub loop_steps: Option<usize>,
    pub quad_tol: Option<f64>,
    pub rank_eps: Option<f64>,
    pub unwrap: Option<bool>,
    pub output_path: Option<PathBuf>,
    pub workers: Option<usize>,
}

fn parse_real(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::Config(format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Config(format!("`{s}` is not finite")));
    }
    Ok(v)
}

fn parse_count(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Config(format!("`{s}` is not a non-negative integer")))
}

/// Parses an angle in radians: a plain number, or a multiple of `pi` such
/// as `pi`, `-pi/3`, `2pi/3`, `2*pi/3` or `0.5pi`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let err = || Error::Config(format!("`{s}` is not an angle"));
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), Some(parse_real(b).map_err(|_| err())?)),
        None => (t, None),
    };
    let lower = num.to_ascii_lowercase();
    let value = match lower.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim_end().trim_end_matches('*').trim();
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => parse_real(c).map_err(|_| err())?,
            };
            c * PI
        }
        None => parse_real(num).map_err(|_| err())?,
    };
    let value = match den {
        Some(0.0) => return Err(err()),
        Some(d) => value / d,
        None => value,
    };
    if value.is_finite() { Ok(value) } else { Err(err()) }
}

/// Comma-separated list of [`parse_angle`] items.
pub fn parse_angle_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_angle).collect()
}

pub fn parse_r_list(s: &str) -> Result<Vec<usize>> {
    s.split(',').map(parse_count).collect()
}

impl FromStr for PhaseKinds {
    type Err = Error;

    /// `interferometric`, `uhlmann`, `both`, or a comma list of the first two.
    fn from_str(s: &str) -> Result<Self> {
        let mut kinds = PhaseKinds { interferometric: false, uhlmann: false };
        for item in s.split(',') {
            match item.trim().to_ascii_lowercase().as_str() {
                "interferometric" | "int" => kinds.interferometric = true,
                "uhlmann" | "u" => kinds.uhlmann = true,
                "both" => kinds = PhaseKinds::BOTH,
                other => return Err(Error::Config(format!("unknown phase kind `{other}`"))),
            }
        }
        Ok(kinds)
    }
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("`{s}` is not a boolean"))),
    }
}

/// Reads `key = value` lines. Blank lines and lines starting with `#` are
/// ignored; unknown or repeated keys are errors.
pub fn parse_config(text: &str) -> Result<ConfigOverrides> {
    let mut o = ConfigOverrides::default();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |e: Error| match e {
            Error::Config(msg) => Error::Config(format!("line {}: {msg}", i + 1)),
            other => other,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
        let key = key.trim();
        let value = value.trim();
        if !seen.insert(key.to_string()) {
            return Err(Error::Config(format!("line {}: `{key}` given twice", i + 1)));
        }
        match key {
            "lambda_min" => o.lambda_min = Some(parse_real(value).map_err(at)?),
            "lambda_max" => o.lambda_max = Some(parse_real(value).map_err(at)?),
            "lambda_steps" => o.lambda_steps = Some(parse_count(value).map_err(at)?),
            "r_list" => o.r_list = Some(parse_r_list(value).map_err(at)?),
            "theta_list" => o.theta_list = Some(parse_angle_list(value).map_err(at)?),
            "kinds" => o.kinds = Some(value.parse().map_err(at)?),
            "loop_steps" => o.loop_steps = Some(parse_count(value).map_err(at)?),
            "quad_tol" => o.quad_tol = Some(parse_real(value).map_err(at)?),
            "rank_eps" => o.rank_eps = Some(parse_real(value).map_err(at)?),
            "unwrap" => o.unwrap = Some(parse_bool(value).map_err(at)?),
            "output_path" => {
                if value.is_empty() {
                    return Err(Error::Config(format!("line {}: empty output_path", i + 1)));
                }
                o.output_path = Some(PathBuf::from(value));
            }
            "workers" => o.workers = Some(parse_count(value).map_err(at)?),
            other => return Err(Error::Config(format!("line {}: unknown key `{other}`", i + 1))),
        }
    }
    Ok(o)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
        }
    }

    /// - fig1: interferometric, theta = pi/3, r in {1, 2, 5, 10}, lambda in [0.1, 2] (77 points).
    /// - fig2: Uhlmann, theta in {pi/3, pi/4, pi/12}, r in {1, 10}, lambda in [1e-6, 2] (81 points).
    /// - fig3: both, theta = pi/3, r in {1, 2, 5, 10}, lambda in [0.8, 1.2] (81 points).
    pub fn config(self) -> SweepConfig {
        let base = SweepConfig { output_path: PathBuf::from(format!("{}.csv", self.name())), ..Default::default() };
        match self {
            Preset::Fig1 => SweepConfig {
                lambda_min: 0.1,
                lambda_max: 2.0,
                lambda_steps: 77,
                r_list: vec![1, 2, 5, 10],
                theta_list: vec![PI / 3.0],
                kinds: PhaseKinds::INTERFEROMETRIC,
                ..base
            },
            Preset::Fig2 => SweepConfig {
                lambda_min: 1e-6,
                lambda_max: 2.0,
                lambda_steps: 81,
                r_list: vec![1, 10],
                theta_list: vec![PI / 3.0, PI / 4.0, PI / 12.0],
                kinds: PhaseKinds::UHLMANN,
                ..base
            },
            Preset::Fig3 => SweepConfig {
                lambda_min: 0.8,
                lambda_max: 1.2,
                lambda_steps: 81,
                r_list: vec![1, 2, 5, 10],
                theta_list: vec![PI / 3.0],
                kinds: PhaseKinds::BOTH,
                ..base
            },
        }
    }
}

pub fn preset(name: &str) -> Result<SweepConfig> {
    Ok(name.parse::<Preset>()?.config())
}

/// One grid point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub lambda: f64,
    pub r: usize,
    pub theta: f64,
    pub phases: PhaseRecord,
    pub delta_gamma_unwrapped: Option<f64>,
    pub delta_gamma_u_unwrapped: Option<f64>,
    pub quad_tol: f64,
    /// `ok` or an error tag such as `rank_deficient`.
    pub status: String,
    /// Full error message; not written to CSV.
    pub detail: Option<String>,
}

impl SweepRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn evaluate(chain: &IsingChain, r: usize, theta: f64, config: &SweepConfig) -> SweepRecord {
    let lambda = chain.params().lambda;
    let (phases, error) = match LoopSpec::new(theta, config.loop_steps) {
        Ok(spec) => phase_record(chain, r, &spec, config.kinds, config.rank_eps),
        Err(e) => (PhaseRecord { steps_used: config.loop_steps, ..Default::default() }, Some(e)),
    };
    SweepRecord {
        lambda,
        r,
        theta,
        phases,
        delta_gamma_unwrapped: None,
        delta_gamma_u_unwrapped: None,
        quad_tol: config.quad_tol,
        status: error.as_ref().map_or("ok", Error::tag).to_string(),
        detail: error.map(|e| e.to_string()),
    }
}

/// Evaluates every grid point, ordered by `(theta, r, lambda)`. Failures at
/// individual points become status tags; only an invalid configuration or a
/// thread-pool failure is an error.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let chains = config
        .lambda_grid()
        .into_iter()
        .map(|lambda| IsingChain::new(CouplingRatio::with_tolerance(lambda, config.quad_tol)?))
        .collect::<Result<Vec<_>>>()?;
    let n_lambda = chains.len();
    let points: Vec<(f64, usize, usize)> = config
        .theta_list
        .iter()
        .flat_map(|&theta| config.r_list.iter().flat_map(move |&r| (0..n_lambda).map(move |i| (theta, r, i))))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let mut records: Vec<SweepRecord> =
        pool.install(|| points.par_iter().map(|&(theta, r, i)| evaluate(&chains[i], r, theta, config)).collect());

    if config.unwrap {
        for family in records.chunks_mut(n_lambda) {
            let dg = unwrap_phases(&family.iter().map(|x| x.phases.delta_gamma).collect::<Vec<_>>());
            let dgu = unwrap_phases(&family.iter().map(|x| x.phases.delta_gamma_u).collect::<Vec<_>>());
            for ((rec, a), b) in family.iter_mut().zip(dg).zip(dgu) {
                rec.delta_gamma_unwrapped = a;
                rec.delta_gamma_u_unwrapped = b;
            }
        }
    }
    Ok(records)
}
