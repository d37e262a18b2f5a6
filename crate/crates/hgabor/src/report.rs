//! Structured JSON reports and CSV tables.
//!
//! Reports carry no timestamps and serialize fields in declaration order, so
//! a run is reproducible bit-for-bit given (config, seed) in single-threaded
//! mode. Every warning appears exactly once with a machine-readable code.

use crate::analysis::Flag;
use crate::error::Result;
use crate::gabor::{GaborIndex, WeightTable};
use crate::Real;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Warning {
    /// Machine-readable code: aliasing | boundary_mass | hypothesis_violated
    /// | truncation | resource_guard | preset.
    pub code: String,
    pub message: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct SelftestReport {
    pub checks: Vec<IdentityCheck>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub hypothesis_ok: bool,
    pub orthogonality_residual: f64,
    pub orthogonality_tolerance: f64,
    /// Flags are only asserted when the hypothesis holds.
    pub orthonormal: Option<Flag<Real>>,
    pub parseval_sequence: Option<Flag<Real>>,
    pub frame_sequence: Option<bool>,
    pub riesz_sequence: Option<bool>,
    pub frame_bounds: Option<(f64, f64)>,
    pub riesz_bounds: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub preset: String,
    pub effective_a: f64,
    pub b: f64,
    pub c_j: f64,
    pub window_norm_sq: f64,
    /// Per-family relative deviation of sum_r Delta_t w(r) from ||G||^2.
    pub total_mass_worst_rel: f64,
    pub classification: ClassificationReport,
    /// Mass fraction outside the central half of each axis (u first, then z).
    pub boundary_mass: Vec<f64>,
    pub max_shift_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GramReport {
    pub members: usize,
    pub hermitian_residual: f64,
    pub diag_worst_rel: f64,
    pub cross_family_max: f64,
    pub cross_family_frobenius: f64,
    /// Worst relative mismatch of same-family entries against the
    /// weight-integral prediction (only meaningful under the hypothesis).
    pub w_formula_worst_rel: f64,
    pub eig_min: f64,
    pub eig_max: f64,
    pub eig_min_nonzero: f64,
    pub rank_threshold_rel: f64,
    pub truncation_allowance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BesselReport {
    pub b1: f64,
    pub b2: f64,
    pub stride: f64,
    pub alpha_ops: f64,
    pub bound: f64,
    pub trials: usize,
    pub worst_ratio: f64,
    pub best_ratio: f64,
    pub all_below_bound: bool,
    pub nonvacuity_frac: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub warnings: Vec<Warning>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selftest: Option<SelftestReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analyze: Option<AnalyzeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram: Option<GramReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bessel: Option<BesselReport>,
}

impl Report {
    pub fn new(command: &str, seed: u64, config: BTreeMap<String, String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            seed,
            config,
            warnings: Vec::new(),
            selftest: None,
            analyze: None,
            gram: None,
            bessel: None,
        }
    }

    pub fn warn(&mut self, code: &str, message: String, value: f64) {
        self.warnings.push(Warning {
            code: code.to_string(),
            message,
            value,
        });
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        let text = serde_json::to_string_pretty(self).expect("report serialization");
        f.write_all(text.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

fn fmt_ints(v: &[i64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Columns: k, l, m, bin, nu, w, in_omega (k and l ';'-joined for n > 1).
pub fn write_w_table(path: &Path, wt: &WeightTable<Real>, nu: &[Real]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "k,l,m,bin,nu,w,in_omega")?;
    for e in &wt.entries {
        for (r, (&w, &inside)) in e.w.iter().zip(&e.omega).enumerate() {
            writeln!(
                f,
                "{},{},{},{},{:.17e},{:.17e},{}",
                fmt_ints(&e.index.k),
                fmt_ints(&e.index.l),
                e.index.m,
                r,
                nu[r],
                w,
                inside as u8
            )?;
        }
    }
    Ok(())
}

/// Columns: i, j, re, im.
pub fn write_gram_csv(path: &Path, mat: &nalgebra::DMatrix<crate::Cplx>) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "i,j,re,im")?;
    for i in 0..mat.nrows() {
        for j in 0..mat.ncols() {
            let v = mat[(i, j)];
            writeln!(f, "{},{},{:.17e},{:.17e}", i, j, v.re, v.im)?;
        }
    }
    Ok(())
}

/// Columns: index, eigenvalue (ascending).
pub fn write_eigs_csv(path: &Path, eigs: &[Real]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "index,eigenvalue")?;
    for (i, e) in eigs.iter().enumerate() {
        writeln!(f, "{},{:.17e}", i, e)?;
    }
    Ok(())
}

/// Columns: k, l, m, p, re, im.
pub fn write_alpha_csv(
    path: &Path,
    families: &[GaborIndex],
    p_range: &[i64],
    alpha: &[Vec<crate::Cplx>],
) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "k,l,m,p,re,im")?;
    for (fi, idx) in families.iter().enumerate() {
        for (pi, &p) in p_range.iter().enumerate() {
            let v = alpha[fi][pi];
            writeln!(
                f,
                "{},{},{},{},{:.17e},{:.17e}",
                fmt_ints(&idx.k),
                fmt_ints(&idx.l),
                idx.m,
                p,
                v.re,
                v.im
            )?;
        }
    }
    Ok(())
}
