use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use tricoul::kinematics::{check_exponents, DEFAULT_MU, DEFAULT_NU};
use tricoul::residual::{RayPath, RaySpec, StepPolicy};
use tricoul::{JacobiConfig, JacobiMomentum, Pair, Vec3};

use crate::CliError;

/// Every key accepted in a config file; each has a `--key` flag.
pub const KEYS: &[&str] = &[
    "alpha",
    "q",
    "mu",
    "nu",
    "z",
    "ray",
    "ray-dir",
    "ray-offset",
    "ray-pair",
    "ray-scale",
    "t-min",
    "t-max",
    "t-samples",
    "step",
    "out",
    "allow-small-k",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RayKind {
    /// `z = offset + t·dir`
    Linear,
    /// `x_j` fixed at `ray-scale` along the first half of `ray-dir`, `y_j = t` along the second half.
    Screen,
    /// As `Screen`, with `|x_j| = ray-scale·t^0.75`.
    Overlap,
}

impl FromStr for RayKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "linear" => Ok(RayKind::Linear),
            "screen" => Ok(RayKind::Screen),
            "overlap" => Ok(RayKind::Overlap),
            _ => Err(format!("unknown ray kind {s:?} (linear, screen, overlap)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub alpha: f64,
    pub q: JacobiMomentum,
    pub mu: f64,
    pub nu: f64,
    pub z: Option<JacobiConfig>,
    pub ray: RayKind,
    pub ray_dir: [f64; 6],
    pub ray_offset: [f64; 6],
    pub ray_pair: Pair,
    pub ray_scale: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_samples: usize,
    pub step: StepPolicy,
    pub out: Option<PathBuf>,
    pub allow_small_k: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: 1.0,
            q: JacobiMomentum::from_array([0.4, 0.9, -0.3, -0.6, 0.2, 0.8]),
            mu: DEFAULT_MU,
            nu: DEFAULT_NU,
            z: None,
            ray: RayKind::Linear,
            ray_dir: [0.5, 0.3, -0.2, 0.4, -0.6, 0.3],
            ray_offset: [0.0; 6],
            ray_pair: Pair::One,
            ray_scale: 3.0,
            t_min: 1e2,
            t_max: 1e4,
            t_samples: 12,
            step: StepPolicy::default(),
            out: None,
            allow_small_k: false,
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("config line {}: expected key = value", n + 1)))?;
        let k = k.trim().to_string();
        if !KEYS.contains(&k.as_str()) {
            return Err(CliError::Input(format!("config line {}: unknown key {k:?}", n + 1)));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn scalar<T: FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| CliError::Input(format!("--{key}: cannot parse {v:?}: {e}")))
}

fn list6(key: &str, v: &str) -> Result<[f64; 6], CliError> {
    let vals: Vec<f64> = v.split(',').map(|s| scalar(key, s.trim())).collect::<Result<_, _>>()?;
    vals.try_into().map_err(|_| CliError::Input(format!("--{key}: expected 6 comma-separated numbers")))
}

fn boolean(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Input(format!("--{key}: expected true or false, got {v:?}"))),
    }
}

impl RunConfig {
    /// Builds a config from merged key/value pairs and checks its preconditions.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
        let mut c = RunConfig::default();
        for (k, v) in map {
            match k.as_str() {
                "alpha" => c.alpha = scalar(k, v)?,
                "q" => c.q = JacobiMomentum::from_array(list6(k, v)?),
                "mu" => c.mu = scalar(k, v)?,
                "nu" => c.nu = scalar(k, v)?,
                "z" => c.z = Some(JacobiConfig::from_array(list6(k, v)?)),
                "ray" => c.ray = v.parse().map_err(CliError::Input)?,
                "ray-dir" => c.ray_dir = list6(k, v)?,
                "ray-offset" => c.ray_offset = list6(k, v)?,
                "ray-pair" => {
                    let n: u8 = scalar(k, v)?;
                    c.ray_pair = Pair::try_from(n).map_err(|e| CliError::Input(format!("--ray-pair: {e}")))?;
                }
                "ray-scale" => c.ray_scale = scalar(k, v)?,
                "t-min" => c.t_min = scalar(k, v)?,
                "t-max" => c.t_max = scalar(k, v)?,
                "t-samples" => c.t_samples = scalar(k, v)?,
                "step" => c.step = StepPolicy::Fixed(scalar(k, v)?),
                "out" => c.out = Some(PathBuf::from(v)),
                "allow-small-k" => c.allow_small_k = boolean(k, v)?,
                _ => return Err(CliError::Input(format!("unknown key {k:?}"))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(CliError::Input(format!("--alpha must be a finite value >= 0, got {}", self.alpha)));
        }
        check_exponents(self.mu, self.nu)?;
        let k = self.q.pair_momenta();
        let kmin = k.iter().copied().fold(f64::INFINITY, f64::min);
        if self.q.norm() == 0.0 || !self.q.norm().is_finite() {
            return Err(CliError::Input("--q must be nonzero".into()));
        }
        if !self.allow_small_k && kmin < 0.1 * self.q.norm() {
            return Err(CliError::Input(format!(
                "--q: min_j k_j = {kmin:.3e} is below 0.1|q| = {:.3e}; pass --allow-small-k to override",
                0.1 * self.q.norm()
            )));
        }
        if let StepPolicy::Fixed(h) = self.step {
            if h.is_nan() || h <= 0.0 {
                return Err(CliError::Input(format!("--step must be positive, got {h}")));
            }
        }
        if self.t_samples < 3 {
            return Err(CliError::Input("--t-samples must be at least 3".into()));
        }
        if self.ray_scale.is_nan() || self.ray_scale <= 0.0 {
            return Err(CliError::Input("--ray-scale must be positive".into()));
        }
        Ok(())
    }

    pub fn ray_spec(&self) -> Result<RaySpec, CliError> {
        let path = match self.ray {
            RayKind::Linear => RayPath::linear(self.ray_dir, JacobiConfig::from_array(self.ray_offset))?,
            RayKind::Screen | RayKind::Overlap => {
                let d = self.ray_dir;
                let exponent = if self.ray == RayKind::Screen { 0.0 } else { 0.75 };
                RayPath::screen(
                    self.ray_pair,
                    Vec3::new(d[0], d[1], d[2]),
                    Vec3::new(d[3], d[4], d[5]),
                    self.ray_scale,
                    exponent,
                )?
            }
        };
        Ok(RaySpec::geometric(path, self.t_min, self.t_max, self.t_samples)?)
    }

    pub fn step_description(&self) -> String {
        match self.step {
            StepPolicy::Fixed(h) => format!("fixed h={h:.16e}"),
            StepPolicy::Adaptive { wavelength_fraction, screen_fraction } => {
                format!("adaptive h=min({wavelength_fraction}*2pi/|q|, {screen_fraction}*min_j|x_j|)")
            }
        }
    }
}
