//! Flat key = value experiment configuration.
//!
//! The file format is one `key = value` pair per line; `#` starts a comment.
//! Unknown keys, malformed values and violated constraints are all collected
//! and reported together in a single error.

use crate::error::{Error, Result};
use crate::preset::NarrowbandDomain;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PresetKind {
    GaussGauss,
    CellIndicator,
    NarrowbandRankone,
}

impl PresetKind {
    pub fn name(self) -> &'static str {
        match self {
            PresetKind::GaussGauss => "gauss-gauss",
            PresetKind::CellIndicator => "cell-indicator",
            PresetKind::NarrowbandRankone => "narrowband-rankone",
        }
    }
}

/// Fully resolved experiment configuration (defaults plus file overrides).
#[derive(Debug, Clone)]
pub struct Config {
    // lambda grid
    pub delta_u: f64,
    pub m_bins: usize,
    pub steps_per_b: usize,
    // symbol grid
    pub n: usize,
    pub nz_axes: Vec<usize>,
    pub lz_axes: Vec<f64>,
    // matrix oracle
    pub n_xi: usize,
    pub l_xi: f64,
    // lattice and index box
    pub a: f64,
    pub k_max: i64,
    pub l_max: i64,
    pub m_max: i64,
    pub p_max: i64,
    pub s_max: i64,
    // window preset
    pub preset: PresetKind,
    pub sigma_z: f64,
    pub z0: Vec<f64>,
    pub u_center: f64,
    pub sigma_u: f64,
    pub t_center: f64,
    pub nb_domain: NarrowbandDomain,
    pub nb_bin: Option<usize>,
    pub cell_base_bin: Option<usize>,
    pub cell_a_init: Option<f64>,
    pub cell_sep_sigmas: f64,
    pub cell_samples_per_sigma: f64,
    // normalization and tolerances
    pub c_j: f64,
    pub eps_support_rel: f64,
    pub tol_orthogonality: f64,
    pub tol_classification: f64,
    pub tol_oracle: f64,
    // reproducibility and budgets
    pub seed: u64,
    pub bessel_stride: usize,
    pub bessel_budget: f64,
    pub bessel_trials: usize,
    /// Raw key = value pairs as parsed, echoed into reports.
    pub raw: BTreeMap<String, String>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            delta_u: 0.125,
            m_bins: 16,
            steps_per_b: 8,
            n: 1,
            nz_axes: vec![32, 32],
            lz_axes: vec![4.0, 4.0],
            n_xi: 64,
            l_xi: 6.0,
            a: 1.0,
            k_max: 0,
            l_max: 0,
            m_max: 0,
            p_max: 0,
            s_max: 8,
            preset: PresetKind::GaussGauss,
            sigma_z: 1.0,
            z0: vec![0.0, 0.0],
            u_center: 0.0,
            sigma_u: 0.5,
            t_center: 0.0,
            nb_domain: NarrowbandDomain::DualBin,
            nb_bin: None,
            cell_base_bin: None,
            cell_a_init: None,
            cell_sep_sigmas: 4.2,
            cell_samples_per_sigma: 5.5,
            c_j: 0.5,
            eps_support_rel: 1e-10,
            tol_orthogonality: 1e-8,
            tol_classification: 1e-6,
            tol_oracle: 1e-6,
            seed: 1,
            bessel_stride: 1,
            bessel_budget: 2e9,
            bessel_trials: 50,
            raw: BTreeMap::new(),
        }
    }
}

impl Config {
    pub fn b(&self) -> f64 {
        self.steps_per_b as f64 * self.delta_u
    }

    pub fn count(&self) -> usize {
        self.m_bins * self.steps_per_b
    }
}

fn parse_list<T: std::str::FromStr>(v: &str) -> std::result::Result<Vec<T>, String> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| format!("bad list element {s:?}"))
        })
        .collect()
}

/// Parse and validate a configuration file. All violations are collected and
/// returned together.
pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Config> {
    let mut cfg = Config::default();
    let mut errors: Vec<String> = Vec::new();
    let mut explicit_b: Option<f64> = None;

    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(format!("line {}: expected key = value", lineno + 1));
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        cfg.raw.insert(key.to_string(), value.to_string());
        let num = |errors: &mut Vec<String>| -> Option<f64> {
            match value.parse::<f64>() {
                Ok(v) => Some(v),
                Err(_) => {
                    errors.push(format!("key {key}: {value:?} is not a number"));
                    None
                }
            }
        };
        macro_rules! set_num {
            ($field:expr, $conv:expr) => {
                if let Some(v) = num(&mut errors) {
                    $field = $conv(v);
                }
            };
        }
        match key {
            "delta_u" => set_num!(cfg.delta_u, |v| v),
            "m_bins" => set_num!(cfg.m_bins, |v: f64| v as usize),
            "steps_per_b" => set_num!(cfg.steps_per_b, |v: f64| v as usize),
            "b" => set_num!(explicit_b, Some),
            "n" => set_num!(cfg.n, |v: f64| v as usize),
            "nz" => {
                if let Some(v) = num(&mut errors) {
                    cfg.nz_axes = vec![v as usize; 2 * cfg.n.max(1)];
                }
            }
            "nz_axes" => match parse_list::<usize>(value) {
                Ok(v) => cfg.nz_axes = v,
                Err(e) => errors.push(format!("key {key}: {e}")),
            },
            "lz" => {
                if let Some(v) = num(&mut errors) {
                    cfg.lz_axes = vec![v; 2 * cfg.n.max(1)];
                }
            }
            "lz_axes" => match parse_list::<f64>(value) {
                Ok(v) => cfg.lz_axes = v,
                Err(e) => errors.push(format!("key {key}: {e}")),
            },
            "n_xi" => set_num!(cfg.n_xi, |v: f64| v as usize),
            "l_xi" => set_num!(cfg.l_xi, |v| v),
            "a" => set_num!(cfg.a, |v| v),
            "k_max" => set_num!(cfg.k_max, |v: f64| v as i64),
            "l_max" => set_num!(cfg.l_max, |v: f64| v as i64),
            "m_max" => set_num!(cfg.m_max, |v: f64| v as i64),
            "p_max" => set_num!(cfg.p_max, |v: f64| v as i64),
            "s_max" => set_num!(cfg.s_max, |v: f64| v as i64),
            "preset" => {
                cfg.preset = match value {
                    "gauss-gauss" => PresetKind::GaussGauss,
                    "cell-indicator" => PresetKind::CellIndicator,
                    "narrowband-rankone" => PresetKind::NarrowbandRankone,
                    other => {
                        errors.push(format!(
                            "key preset: unknown preset {other:?} \
                             (expected gauss-gauss | cell-indicator | narrowband-rankone)"
                        ));
                        cfg.preset
                    }
                }
            }
            "sigma_z" => set_num!(cfg.sigma_z, |v| v),
            "z0" => match parse_list::<f64>(value) {
                Ok(v) => cfg.z0 = v,
                Err(e) => errors.push(format!("key {key}: {e}")),
            },
            "u_center" => set_num!(cfg.u_center, |v| v),
            "sigma_u" => set_num!(cfg.sigma_u, |v| v),
            "t_center" => set_num!(cfg.t_center, |v| v),
            "nb_domain" => {
                cfg.nb_domain = match value {
                    "dual" => NarrowbandDomain::DualBin,
                    "group" => NarrowbandDomain::GroupBin,
                    other => {
                        errors.push(format!(
                            "key nb_domain: {other:?} (expected dual | group)"
                        ));
                        cfg.nb_domain
                    }
                }
            }
            "nb_bin" => set_num!(cfg.nb_bin, |v: f64| Some(v as usize)),
            "cell_base_bin" => set_num!(cfg.cell_base_bin, |v: f64| Some(v as usize)),
            "cell_a_init" => set_num!(cfg.cell_a_init, Some),
            "cell_sep_sigmas" => set_num!(cfg.cell_sep_sigmas, |v| v),
            "cell_samples_per_sigma" => set_num!(cfg.cell_samples_per_sigma, |v| v),
            "c_j" => set_num!(cfg.c_j, |v| v),
            "eps_support_rel" => set_num!(cfg.eps_support_rel, |v| v),
            "tol_orthogonality" => set_num!(cfg.tol_orthogonality, |v| v),
            "tol_classification" => set_num!(cfg.tol_classification, |v| v),
            "tol_oracle" => set_num!(cfg.tol_oracle, |v| v),
            "seed" => set_num!(cfg.seed, |v: f64| v as u64),
            "bessel_stride" => set_num!(cfg.bessel_stride, |v: f64| v as usize),
            "bessel_budget" => set_num!(cfg.bessel_budget, |v| v),
            "bessel_trials" => set_num!(cfg.bessel_trials, |v: f64| v as usize),
            other => errors.push(format!("unknown key {other:?}")),
        }
    }

    validate(&cfg, explicit_b, &mut errors);
    if errors.is_empty() {
        Ok(cfg)
    } else {
        let mut msg = String::from("invalid configuration:\n");
        for e in &errors {
            let _ = writeln!(msg, "  - {e}");
        }
        Err(Error::Config(msg))
    }
}

fn validate(cfg: &Config, explicit_b: Option<f64>, errors: &mut Vec<String>) {
    if !(cfg.delta_u > 0.0) {
        errors.push("delta_u must be positive".into());
    }
    if cfg.m_bins < 2 {
        errors.push("m_bins must be >= 2".into());
    }
    if cfg.steps_per_b < 1 {
        errors.push("steps_per_b must be >= 1".into());
    }
    if let Some(b) = explicit_b {
        let derived = cfg.b();
        if (b - derived).abs() > 1e-12 * derived.max(1.0) {
            errors.push(format!(
                "b = {b} violates b = steps_per_b * delta_u = {derived}; \
                 adjust delta_u or steps_per_b (b is derived, the key is a consistency check)"
            ));
        }
    }
    if cfg.n < 1 {
        errors.push("n must be >= 1".into());
    }
    if cfg.nz_axes.len() != 2 * cfg.n {
        errors.push(format!(
            "nz/nz_axes must give {} axis point counts (got {})",
            2 * cfg.n,
            cfg.nz_axes.len()
        ));
    }
    if cfg.nz_axes.iter().any(|&p| p < 2 || p % 2 != 0) {
        errors.push("every z-axis point count must be even and >= 2".into());
    }
    if cfg.lz_axes.len() != 2 * cfg.n {
        errors.push(format!(
            "lz/lz_axes must give {} axis half-widths (got {})",
            2 * cfg.n,
            cfg.lz_axes.len()
        ));
    }
    if cfg.lz_axes.iter().any(|&l| !(l > 0.0)) {
        errors.push("every z-axis half-width must be positive".into());
    }
    if cfg.z0.len() != 2 * cfg.n {
        errors.push(format!(
            "z0 must give {} coordinates (got {})",
            2 * cfg.n,
            cfg.z0.len()
        ));
    }
    if !(cfg.a > 0.0) {
        errors.push("a must be positive".into());
    }
    if cfg.k_max < 0 || cfg.l_max < 0 || cfg.m_max < 0 || cfg.p_max < 0 || cfg.s_max < 0 {
        errors.push("index box bounds must be nonnegative".into());
    }
    if 2 * cfg.p_max + 1 > cfg.steps_per_b as i64 {
        errors.push(format!(
            "p box ({} values) exceeds the {} distinct lattice translations \
             (need 2*p_max + 1 <= steps_per_b)",
            2 * cfg.p_max + 1,
            cfg.steps_per_b
        ));
    }
    if cfg.c_j != 0.5 && cfg.c_j != 1.0 {
        errors.push("c_j must be 0.5 or 1".into());
    }
    if cfg.n_xi < 2 || !cfg.n_xi.is_multiple_of(2) {
        errors.push("n_xi must be even and >= 2".into());
    }
    if !(cfg.l_xi > 0.0) {
        errors.push("l_xi must be positive".into());
    }
    if cfg.preset == PresetKind::CellIndicator && cfg.n != 1 {
        errors.push("cell-indicator preset requires n = 1".into());
    }
    if cfg.bessel_stride == 0 {
        errors.push("bessel_stride must be >= 1".into());
    }
}
