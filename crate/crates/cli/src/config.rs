//! Experiment configuration: a flat TOML file, flag overrides, and defaults.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use gamma_core::fock::{default_cutoff, default_phase_cutoff};
use gamma_core::{
    cat_state, coherent_state, fock_state, phase_state, random_pure_state, CatSign, DeltaParams, GammaParams,
    PureState, C64,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Coherent,
    Phase,
    Fock,
    Cat,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Echo,
    Tables,
    Saturation,
    Roughness,
    RoughnessEnsemble,
    Wigner,
}

pub const WIGNER_TARGETS: [&str; 6] = ["rho", "rho_D", "rho_ND", "Rop", "Rop_D", "Rop_ND"];
pub const TABLE_GAMMAS: [f64; 8] = [1.0, 2.0, 3.0, 4.0, 1.7, 3.5, -0.5, -1.0];

/// Keys accepted in a config file. Every key is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub hbar: Option<f64>,
    pub omega: Option<f64>,
    pub lambda: Option<f64>,
    pub delta_scale: Option<f64>,

    pub state: Option<StateKind>,
    pub alpha: Option<f64>,
    pub alpha_im: Option<f64>,
    pub r: Option<usize>,
    pub n: Option<usize>,
    pub cat_sign: Option<i32>,
    pub seed: Option<u64>,
    pub n_max: Option<usize>,

    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub time: Option<f64>,

    pub grid_points: Option<usize>,
    pub half_width: Option<f64>,

    pub out: Option<PathBuf>,
    pub format: Option<Format>,

    pub gammas: Option<Vec<f64>>,
    pub sweep_r: Option<Vec<usize>>,
    pub sweep_alpha: Option<Vec<f64>>,
    pub sweep_gamma: Option<Vec<f64>>,
    pub basis_sizes: Option<Vec<usize>>,
    pub seeds_per_size: Option<usize>,
    pub targets: Option<Vec<String>>,
}

/// Flags shared by every subcommand; each overrides the matching config key.
#[derive(Clone, Debug, Default, Args)]
pub struct Overrides {
    /// Flat TOML config file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Overrides {
    fn apply(&self, raw: &mut RawConfig) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if self.$field.is_some() { raw.$field = self.$field.clone(); })*
            };
        }
        take!(gamma, epsilon, state, alpha, r, t_max, dt, grid_points, seed, out, format);
    }
}

/// Fully defaulted and validated configuration, echoed into output headers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub gamma: f64,
    pub epsilon: f64,
    pub hbar: f64,
    pub omega: f64,
    pub lambda: f64,
    pub delta_scale: f64,

    pub state: StateKind,
    pub alpha: f64,
    pub alpha_im: f64,
    pub r: usize,
    pub n: usize,
    pub cat_sign: i32,
    pub seed: u64,
    pub n_max: usize,

    pub t_max: f64,
    pub dt: f64,
    pub time: f64,

    pub grid_points: usize,
    /// Non-positive means "pick from the state's number statistics".
    pub half_width: f64,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub format: Format,

    pub gammas: Vec<f64>,
    pub sweep_r: Vec<usize>,
    pub sweep_alpha: Vec<f64>,
    pub sweep_gamma: Vec<f64>,
    pub basis_sizes: Vec<usize>,
    pub seeds_per_size: usize,
    pub targets: Vec<String>,
}

pub fn load(overrides: &Overrides) -> Result<RawConfig> {
    let mut raw = match &overrides.config {
        Some(path) => read_file(path)?,
        None => RawConfig::default(),
    };
    overrides.apply(&mut raw);
    Ok(raw)
}

pub fn read_file(path: &Path) -> Result<RawConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text).with_context(|| format!("in config {}", path.display()))
}

pub fn parse(text: &str) -> Result<RawConfig> {
    toml::from_str(text).map_err(|e| anyhow!("{}", e.message().trim()))
}

fn key_error(key: &str, problem: impl std::fmt::Display) -> anyhow::Error {
    anyhow!("invalid `{key}`: {problem}")
}

fn finite(key: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(key_error(key, "must be finite"))
    }
}

fn positive(key: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(key_error(key, format!("must be positive, got {value}")))
    }
}

impl RawConfig {
    /// Fills defaults for `command` and validates every key.
    pub fn resolve(self, command: Command) -> Result<Config> {
        // sampling a Wigner field per time step is far costlier than an echo
        // sample, so the roughness commands default to coarser time grids
        let (t_max_default, dt_default) = match command {
            Command::Roughness => (20.0, 0.05),
            Command::RoughnessEnsemble => (1000.0, 50.0),
            _ => (2000.0, 0.01),
        };

        let state = match (self.state, self.alpha.is_some(), self.r.is_some()) {
            (Some(s), _, _) => s,
            (None, true, true) => bail!("both `alpha` and `r` are set; choose a `state` explicitly"),
            (None, false, true) => StateKind::Phase,
            (None, _, false) => StateKind::Coherent,
        };

        let t_max = self.t_max.unwrap_or(t_max_default);
        if !(t_max.is_finite() && t_max > 0.0) {
            bail!(key_error("t_max", format!("must be positive, got {t_max}")));
        }
        let dt = positive("dt", self.dt.unwrap_or(dt_default))?;
        if dt > t_max {
            bail!(key_error("dt", format!("{dt} exceeds t_max = {t_max}")));
        }

        let grid_points = self.grid_points.unwrap_or(gamma_core::phase_space::DEFAULT_GRID_POINTS);
        if grid_points < 3 || grid_points.is_multiple_of(2) {
            bail!(key_error("grid_points", format!("must be odd and at least 3, got {grid_points}")));
        }
        let half_width = match self.half_width {
            Some(h) => positive("half_width", h)?,
            None => 0.0,
        };

        let cat_sign = self.cat_sign.unwrap_or(1);
        CatSign::from_sign(cat_sign).map_err(|_| key_error("cat_sign", "must be +1 or -1"))?;

        let targets = self
            .targets
            .unwrap_or_else(|| vec!["rho".into(), "rho_D".into(), "rho_ND".into()]);
        if targets.is_empty() {
            bail!(key_error("targets", "must list at least one target"));
        }
        if let Some(bad) = targets.iter().find(|t| !WIGNER_TARGETS.contains(&t.as_str())) {
            bail!(key_error("targets", format!("unknown target {bad:?}, expected one of {WIGNER_TARGETS:?}")));
        }

        let alpha = finite("alpha", self.alpha.unwrap_or(2.0))?;
        let alpha_im = finite("alpha_im", self.alpha_im.unwrap_or(0.0))?;
        let r = self.r.unwrap_or(6);
        let n = self.n.unwrap_or(0);
        let n_max = match self.n_max {
            Some(0) => bail!(key_error("n_max", "must be at least 1")),
            Some(v) => v,
            None => match state {
                StateKind::Coherent | StateKind::Cat => default_cutoff(C64::new(alpha, alpha_im)),
                StateKind::Phase => default_phase_cutoff(r),
                StateKind::Fock => n + 2,
                StateKind::Random => 10,
            },
        };

        let seeds_per_size = self.seeds_per_size.unwrap_or(50);
        if seeds_per_size == 0 {
            bail!(key_error("seeds_per_size", "must be at least 1"));
        }
        let basis_sizes = self.basis_sizes.unwrap_or_else(|| vec![4, 8, 16, 32]);
        if basis_sizes.iter().any(|&n| n < 2) {
            bail!(key_error("basis_sizes", "sizes must be at least 2"));
        }

        let sweep_gamma = self.sweep_gamma.unwrap_or_else(|| vec![2.4, 3.1]);
        for g in &sweep_gamma {
            finite("sweep_gamma", *g)?;
        }
        let sweep_alpha = self
            .sweep_alpha
            .unwrap_or_else(|| (2..=8).map(|k| 0.5 * k as f64).collect());
        for a in &sweep_alpha {
            finite("sweep_alpha", *a)?;
        }
        let gammas = self.gammas.unwrap_or_else(|| TABLE_GAMMAS.to_vec());
        for g in &gammas {
            finite("gammas", *g)?;
        }

        let config = Config {
            gamma: finite("gamma", self.gamma.unwrap_or(1.7))?,
            epsilon: finite("epsilon", self.epsilon.unwrap_or(1.0))?,
            hbar: positive("hbar", self.hbar.unwrap_or(1.0))?,
            omega: finite("omega", self.omega.unwrap_or(0.0))?,
            lambda: finite("lambda", self.lambda.unwrap_or(1.0))?,
            delta_scale: finite("delta_scale", self.delta_scale.unwrap_or(1.0))?,
            state,
            alpha,
            alpha_im,
            r,
            n,
            cat_sign,
            seed: self.seed.unwrap_or(0),
            n_max,
            t_max,
            dt,
            time: finite("time", self.time.unwrap_or(0.0))?,
            grid_points,
            half_width,
            out: self.out,
            format: self.format.unwrap_or_default(),
            gammas,
            sweep_r: self.sweep_r.unwrap_or_else(|| (3..=15).collect()),
            sweep_alpha,
            sweep_gamma,
            basis_sizes,
            seeds_per_size,
            targets,
        };
        // surface model-level problems (e.g. ε ≤ 0 with negative γ) under their keys
        config.delta().map_err(|e| key_error("gamma/epsilon/delta_scale", e))?;
        config.gamma_params().validate().map_err(|e| key_error("gamma/epsilon/hbar/lambda", e))?;
        Ok(config)
    }
}

impl Config {
    pub fn delta(&self) -> Result<DeltaParams> {
        Ok(DeltaParams::new(self.gamma, self.epsilon, self.delta_scale)?)
    }

    pub fn gamma_params(&self) -> GammaParams {
        GammaParams {
            omega: self.omega,
            lambda: self.lambda,
            gamma: self.gamma,
            epsilon: self.epsilon,
            hbar: self.hbar,
            delta_scale: self.delta_scale,
        }
    }

    pub fn alpha_c(&self) -> C64 {
        C64::new(self.alpha, self.alpha_im)
    }

    pub fn initial_state(&self) -> Result<PureState> {
        let psi = match self.state {
            StateKind::Coherent => coherent_state(self.alpha_c(), self.n_max),
            StateKind::Phase => phase_state(self.r, self.n_max),
            StateKind::Fock => fock_state(self.n, self.n_max),
            StateKind::Cat => cat_state(self.alpha_c(), CatSign::from_sign(self.cat_sign)?, self.n_max),
            StateKind::Random => Ok(random_pure_state(self.n_max, self.seed)),
        };
        psi.with_context(|| format!("building the {:?} initial state (n_max = {})", self.state, self.n_max))
    }

    /// Human-readable state label, e.g. "coherent alpha=2".
    pub fn state_label(&self) -> String {
        match self.state {
            StateKind::Coherent => format!("coherent alpha={}", fmt_alpha(self.alpha, self.alpha_im)),
            StateKind::Phase => format!("phase r={}", self.r),
            StateKind::Fock => format!("fock n={}", self.n),
            StateKind::Cat => format!(
                "cat{} alpha={}",
                if self.cat_sign > 0 { "+" } else { "-" },
                fmt_alpha(self.alpha, self.alpha_im)
            ),
            StateKind::Random => format!("random seed={} n_max={}", self.seed, self.n_max),
        }
    }
}

fn fmt_alpha(re: f64, im: f64) -> String {
    if im == 0.0 {
        format!("{re}")
    } else {
        format!("{re}{im:+}i")
    }
}

/// Number of samples per period when dt divides 2π/|scale| into a whole number.
pub fn samples_per_period(period: f64, dt: f64) -> Option<u64> {
    let q = period / dt;
    let rounded = q.round();
    ((q - rounded).abs() < 1e-9 * q.max(1.0) && rounded >= 1.0).then_some(rounded as u64)
}
