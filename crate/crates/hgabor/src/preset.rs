//! Window presets and seeded random test-data generators.
//!
//! Three presets:
//! - `gauss_gauss`: Gaussian z-symbol times a Gaussian u-profile on the
//!   positive sheet, with an optional dual-center phase that places the
//!   lambda-spectrum mid-cell.
//! - `narrowband_rankone`: Gaussian z-symbol times a profile concentrated on
//!   a single bin, either a single dual bin (default; makes the s != 0 terms
//!   of the Bessel alpha kernel vanish exactly) or a single u bin.
//! - `cell_indicator`: four single-u-bin cells, each a Gaussian z-bump in its
//!   own y slot, with the lattice parameter a and the cell weights tuned by a
//!   Newton solve so that the whole 3x3x3 modulation box is an orthogonal
//!   system at every dual bin. Slot geometry makes k- and l-pairs orthogonal
//!   by support disjointness; the Newton conditions kill the remaining
//!   m-pair phase sums.

use crate::error::{Error, Result};
use crate::rstar::{ift_rstar, DualScalarField, RStarGrid, ScalarField, SHEETS};
use crate::scalar::{cis2pi, Scalar, C};
use crate::symbol::{sym_norm_sq, OperatorField, SymbolGrid};
use rand::Rng;
use rustfft::FftPlanner;

/// Parameters of the separable Gaussian window.
#[derive(Debug, Clone)]
pub struct GaussGaussParams<S> {
    pub z0: Vec<S>,
    pub sigma_z: S,
    pub u_center: S,
    pub sigma_u: S,
    /// Dual-center phase e^{2 pi i t_center u}; 0 keeps the lambda-spectrum at
    /// the cell edge, M/2 * Delta_t centers it mid-cell.
    pub t_center: S,
}

impl<S: Scalar> GaussGaussParams<S> {
    pub fn standard(n: usize) -> Self {
        Self {
            z0: vec![S::zero(); 2 * n],
            sigma_z: S::one(),
            u_center: S::zero(),
            sigma_u: S::one(),
            t_center: S::zero(),
        }
    }
}

fn gauss_profile<S: Scalar>(x: S, center: S, sigma: S) -> S {
    let d = (x - center) / sigma;
    (-S::PI() * d * d).exp()
}

fn gauss_symbol<S: Scalar>(zgrid: &SymbolGrid<S>, z0: &[S], sigma: S) -> Vec<C<S>> {
    let nz = zgrid.total_points();
    let axes = zgrid.axes();
    let mut ids = vec![0usize; axes];
    let mut out = Vec::with_capacity(nz);
    for zi in 0..nz {
        zgrid.unflatten(zi, &mut ids);
        let mut v = S::one();
        for a in 0..axes {
            v *= gauss_profile(zgrid.coord(a, ids[a]), z0[a], sigma);
        }
        out.push(C::new(v, S::zero()));
    }
    out
}

/// Positive-sheet window g_lambda(z) = e^{-pi (u - u_c)^2 / s_u^2}
/// e^{2 pi i t_c u} e^{-pi ||z - z0||^2 / s_z^2}.
pub fn gauss_gauss<S: Scalar>(
    rgrid: &RStarGrid<S>,
    zgrid: &SymbolGrid<S>,
    p: &GaussGaussParams<S>,
) -> OperatorField<S> {
    let sym = gauss_symbol(zgrid, &p.z0, p.sigma_z);
    let mut out = OperatorField::zeros(rgrid, zgrid);
    for i in 0..rgrid.count() {
        let u = rgrid.u(i);
        let amp = C::new(gauss_profile(u, p.u_center, p.sigma_u), S::zero())
            * cis2pi(p.t_center * u);
        let dst = out.slice_mut(0, i);
        for (d, s) in dst.iter_mut().zip(&sym) {
            *d = s * amp;
        }
    }
    out
}

/// Which axis carries the single-bin concentration of `narrowband_rankone`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NarrowbandDomain {
    /// Profile supported on a single dual bin (default): the lambda-spectrum
    /// lives in one period cell exactly, so the s != 0 Bessel terms vanish.
    DualBin,
    /// Profile supported on a single u bin.
    GroupBin,
}

#[derive(Debug, Clone)]
pub struct NarrowbandParams<S> {
    pub domain: NarrowbandDomain,
    /// Bin index; defaults to M/2 (mid-cell) for DualBin and N/2 for GroupBin.
    pub bin: Option<usize>,
    pub z0: Vec<S>,
    pub sigma_z: S,
}

impl<S: Scalar> NarrowbandParams<S> {
    pub fn standard(n: usize) -> Self {
        Self {
            domain: NarrowbandDomain::DualBin,
            bin: None,
            z0: vec![S::zero(); 2 * n],
            sigma_z: S::one(),
        }
    }
}

pub fn narrowband_rankone<S: Scalar>(
    rgrid: &RStarGrid<S>,
    zgrid: &SymbolGrid<S>,
    p: &NarrowbandParams<S>,
) -> Result<OperatorField<S>> {
    let n = rgrid.count();
    let sym = gauss_symbol(zgrid, &p.z0, p.sigma_z);
    let profile: ScalarField<S> = match p.domain {
        NarrowbandDomain::DualBin => {
            let r0 = p.bin.unwrap_or(rgrid.bins_per_period() / 2);
            if r0 >= n {
                return Err(Error::Domain("dual bin out of range".into()));
            }
            let mut dual = DualScalarField::zeros(rgrid);
            // Equal parities concentrate the profile on the positive sheet.
            dual.set(0, r0, C::new(S::one(), S::zero()));
            dual.set(1, r0, C::new(S::one(), S::zero()));
            ift_rstar(&dual)
        }
        NarrowbandDomain::GroupBin => {
            let i0 = p.bin.unwrap_or(n / 2);
            if i0 >= n {
                return Err(Error::Domain("u bin out of range".into()));
            }
            let mut f = ScalarField::zeros(rgrid);
            f.set(0, i0, C::new(S::one(), S::zero()));
            f
        }
    };
    let mut out = OperatorField::zeros(rgrid, zgrid);
    for s in 0..SHEETS {
        for i in 0..n {
            let amp = profile.get(s, i);
            if amp.norm_sqr() == S::zero() {
                continue;
            }
            let dst = out.slice_mut(s, i);
            for (d, sv) in dst.iter_mut().zip(&sym) {
                *d = sv * amp;
            }
        }
    }
    Ok(out)
}

/// Parameters of the orthogonal cell window. Designed for the index box
/// |k|, |l|, |m| <= 1 with n = 1.
#[derive(Debug, Clone)]
pub struct CellIndicatorParams<S> {
    /// First of the four consecutive occupied u bins; default N/2 - 2.
    pub base_bin: Option<usize>,
    /// Newton initialization for the lattice parameter a; default
    /// 1 / (4 (lambda_1 - lambda_0)) (quarter-turn phases).
    pub a_init: Option<S>,
    /// Support-separation requirement in units of the bump sigma.
    pub sep_sigmas: S,
    /// Grid samples per bump sigma.
    pub samples_per_sigma: S,
}

impl<S: Scalar> Default for CellIndicatorParams<S> {
    fn default() -> Self {
        Self {
            base_bin: None,
            a_init: None,
            sep_sigmas: S::of(4.2),
            samples_per_sigma: S::of(5.5),
        }
    }
}

/// The constructed window together with the tuned lattice parameter and
/// diagnostics.
pub struct CellIndicatorPreset<S> {
    pub field: OperatorField<S>,
    pub zgrid: SymbolGrid<S>,
    /// Tuned lattice parameter; use this as `GaborParams::a`.
    pub a: S,
    pub weights: [S; 4],
    pub cell_bins: [usize; 4],
    /// Final max |phase-sum| of the Newton conditions.
    pub newton_residual: S,
    /// Smallest support separation over all constrained pairs, in sigmas.
    pub min_separation_sigmas: S,
}

/// Solve sum_c w_c e^{2 pi i a lambda_c d} = 0 for d = 1, 2 in the unknowns
/// (a, w_1, w_2, w_3), w_0 = 1, by Newton iteration in f64.
fn newton_tune(lambdas: [f64; 4], a_init: f64) -> Result<(f64, [f64; 4], f64)> {
    use nalgebra::{Matrix4, Vector4};
    let eval = |a: f64, w: &[f64; 4]| -> (Vector4<f64>, Matrix4<f64>) {
        let mut f = Vector4::zeros();
        let mut jac = Matrix4::zeros();
        for (row, d) in [1.0f64, 2.0].iter().enumerate() {
            let mut s_re = 0.0;
            let mut s_im = 0.0;
            let mut da_re = 0.0;
            let mut da_im = 0.0;
            for c in 0..4 {
                let th = 2.0 * std::f64::consts::PI * a * lambdas[c] * d;
                let (sin, cos) = th.sin_cos();
                s_re += w[c] * cos;
                s_im += w[c] * sin;
                let coef = 2.0 * std::f64::consts::PI * lambdas[c] * d * w[c];
                da_re += -coef * sin;
                da_im += coef * cos;
                if c > 0 {
                    jac[(2 * row, c)] = cos;
                    jac[(2 * row + 1, c)] = sin;
                }
            }
            f[2 * row] = s_re;
            f[2 * row + 1] = s_im;
            jac[(2 * row, 0)] = da_re;
            jac[(2 * row + 1, 0)] = da_im;
        }
        (f, jac)
    };
    for scale in [1.0, 0.95, 1.05, 0.9, 1.1, 0.85, 1.15] {
        let mut a = a_init * scale;
        let mut w = [1.0f64; 4];
        let mut ok = false;
        for _ in 0..200 {
            let (f, jac) = eval(a, &w);
            let res = f.norm();
            if res < 1e-13 {
                ok = true;
                break;
            }
            let step = match jac.lu().solve(&f) {
                Some(s) => s,
                None => break,
            };
            // Damp large steps to stay in the basin.
            let damp = if step.norm() > 0.5 { 0.5 / step.norm() } else { 1.0 };
            a -= damp * step[0];
            for c in 1..4 {
                w[c] -= damp * step[c];
            }
        }
        if ok && a > 0.0 && w.iter().all(|&x| x > 0.05) {
            let (f, _) = eval(a, &w);
            return Ok((a, w, f.norm()));
        }
    }
    Err(Error::Domain(
        "cell window tuning did not converge to positive weights; \
         adjust base_bin or a_init"
            .into(),
    ))
}

/// Build the orthogonal cell window on its own z-grid (the geometry depends
/// on the tuned a). The returned field has unit norm, which makes the weight
/// function identically b and the truncated Gram the identity.
pub fn cell_indicator<S: Scalar>(
    rgrid: &RStarGrid<S>,
    params: &CellIndicatorParams<S>,
) -> Result<CellIndicatorPreset<S>> {
    let n = rgrid.count();
    let base = params.base_bin.unwrap_or(n / 2 - 2);
    if base + 3 >= n {
        return Err(Error::Domain("base_bin leaves no room for 4 cells".into()));
    }
    let cell_bins = [base, base + 1, base + 2, base + 3];
    let lambdas_f64: [f64; 4] = std::array::from_fn(|c| rgrid.lambda_abs(cell_bins[c]).as_f64());
    let a_init = params
        .a_init
        .map(|a| a.as_f64())
        .unwrap_or(1.0 / (4.0 * (lambdas_f64[1] - lambdas_f64[0])));
    let (a_f64, w_f64, newton_residual) = newton_tune(lambdas_f64, a_init)?;
    let a = S::of(a_f64);
    let sep = params.sep_sigmas;
    let q = params.samples_per_sigma;

    // Geometry: one shared x slot at 0 (k-pairs separate by 2 a lambda k);
    // four y slots at pitch a/4 (cross-cell pairs always y-disjoint, l-pairs
    // separate by a l). Measured worst-case separations below.
    let lam_min = S::of(lambdas_f64[0]);
    let lam_max = S::of(lambdas_f64[3]);
    let sigma_x = S::two() * a * lam_min / sep;
    let sigma_y = a / (S::of(4.0) * sep);
    let x_max = S::two() * a * lam_max;
    let lx = x_max + S::of(0.6) * sep * sigma_x;
    let y_pitch = a / S::of(4.0);
    let y_max = S::of(1.5) * y_pitch + a; // slot extreme + |l| <= 1 shift
    let ly = y_max + S::of(0.6) * sep * sigma_y;
    let even_ceil = |span: S, step: S| -> usize {
        let k = (span / step).as_f64().ceil() as usize;
        k + k % 2
    };
    let nx = even_ceil(S::two() * lx, sigma_x / q);
    let ny = even_ceil(S::two() * ly, sigma_y / q);
    let zgrid = SymbolGrid::new(1, vec![nx, ny], vec![lx, ly])?;

    // Worst-case support separation, in sigmas, over all constrained pairs:
    // same-cell k-pairs in x, cross-cell and l-pairs in y (with wrap).
    let circ_dist = |d: f64, period: f64| -> f64 {
        let d = d.rem_euclid(period);
        d.min(period - d)
    };
    let mut min_sep = f64::INFINITY;
    // x: same cell, |delta k| >= 1, plus the wrap between k = 1 and k = -1.
    for c in 0..4 {
        let shift = 2.0 * a_f64 * lambdas_f64[c];
        for (xa, xb) in [(0.0, shift), (shift, -shift)] {
            let d = circ_dist(xa - xb, 2.0 * lx.as_f64()) / sigma_x.as_f64();
            min_sep = min_sep.min(d);
        }
    }
    // y: all cell pairs and l shifts with (c, l) != (c', l').
    let slot = |c: usize| (c as f64 - 1.5) * y_pitch.as_f64();
    for c in 0..4 {
        for cp in 0..4 {
            for l in -1i64..=1 {
                for lp in -1i64..=1 {
                    if c == cp && l == lp {
                        continue;
                    }
                    if c == cp {
                        continue; // same cell, same y slot: separated in y by a|dl| below
                    }
                    let ya = slot(c) + a_f64 * l as f64;
                    let yb = slot(cp) + a_f64 * lp as f64;
                    let d = circ_dist(ya - yb, 2.0 * ly.as_f64()) / sigma_y.as_f64();
                    min_sep = min_sep.min(d);
                }
            }
        }
    }
    min_sep = min_sep.min(a_f64 / sigma_y.as_f64()); // same-cell l-pairs

    // Assemble the field: cell c = sqrt(w_c) times a unit-norm bump at
    // (0, slot_c) on u bin cell_bins[c], positive sheet.
    let mut field = OperatorField::zeros(rgrid, &zgrid);
    for c in 0..4 {
        let center = [S::zero(), S::of(slot(c))];
        let nz = zgrid.total_points();
        let mut bump = Vec::with_capacity(nz);
        let mut ids = [0usize; 2];
        for zi in 0..nz {
            zgrid.unflatten(zi, &mut ids);
            let vx = gauss_profile(zgrid.coord(0, ids[0]), center[0], sigma_x);
            let vy = gauss_profile(zgrid.coord(1, ids[1]), center[1], sigma_y);
            bump.push(C::new(vx * vy, S::zero()));
        }
        let norm = sym_norm_sq(&zgrid, &bump).sqrt();
        let amp = S::of(w_f64[c]).sqrt() / norm;
        let dst = field.slice_mut(0, cell_bins[c]);
        for (d, bv) in dst.iter_mut().zip(&bump) {
            *d = bv * amp;
        }
    }
    let scale = field.norm_sq().sqrt().recip();
    for v in field.values_mut() {
        *v *= scale;
    }
    Ok(CellIndicatorPreset {
        field,
        zgrid,
        a,
        weights: std::array::from_fn(|c| S::of(w_f64[c])),
        cell_bins,
        newton_residual: S::of(newton_residual),
        min_separation_sigmas: S::of(min_sep),
    })
}

fn uniform_c<S: Scalar, R: Rng>(rng: &mut R) -> C<S> {
    C::new(
        S::of(rng.gen_range(-1.0..1.0)),
        S::of(rng.gen_range(-1.0..1.0)),
    )
}

/// Random scalar field band-limited to the lowest `keep_frac` of the dual
/// axis on each sheet.
pub fn random_scalar_field<S: Scalar, R: Rng>(
    grid: &RStarGrid<S>,
    rng: &mut R,
    keep_frac: f64,
) -> ScalarField<S> {
    let n = grid.count();
    let keep = ((n as f64 * keep_frac / 2.0).max(1.0) as usize).min(n / 2);
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    let mut out = ScalarField::zeros(grid);
    for sheet in 0..SHEETS {
        let mut buf = vec![C::new(S::zero(), S::zero()); n];
        for (k, v) in buf.iter_mut().enumerate() {
            let f = if k <= n / 2 { k } else { n - k };
            if f <= keep {
                *v = uniform_c(rng);
            }
        }
        ifft.process(&mut buf);
        out.sheet_mut(sheet).copy_from_slice(&buf);
    }
    out
}

/// Random symbol: a few Gaussian bumps with random centers, widths and
/// complex amplitudes, kept inside the central half of each axis.
pub fn random_symbol<S: Scalar, R: Rng>(
    zgrid: &SymbolGrid<S>,
    rng: &mut R,
    n_bumps: usize,
) -> Vec<C<S>> {
    let axes = zgrid.axes();
    let nz = zgrid.total_points();
    let mut out = vec![C::new(S::zero(), S::zero()); nz];
    for _ in 0..n_bumps {
        let centers: Vec<S> = (0..axes)
            .map(|a| zgrid.half_width(a) * S::of(rng.gen_range(-0.35..0.35)))
            .collect();
        let sigmas: Vec<S> = (0..axes)
            .map(|a| zgrid.half_width(a) * S::of(rng.gen_range(0.15..0.3)))
            .collect();
        let amp: C<S> = uniform_c(rng);
        let mut ids = vec![0usize; axes];
        for (zi, v) in out.iter_mut().enumerate() {
            zgrid.unflatten(zi, &mut ids);
            let mut g = S::one();
            for a in 0..axes {
                g *= gauss_profile(zgrid.coord(a, ids[a]), centers[a], sigmas[a]);
            }
            *v += amp * g;
        }
    }
    out
}

/// Random operator field: random bump symbols amplitude-modulated by a
/// Gaussian u-profile on both sheets.
pub fn random_operator_field<S: Scalar, R: Rng>(
    rgrid: &RStarGrid<S>,
    zgrid: &SymbolGrid<S>,
    rng: &mut R,
) -> OperatorField<S> {
    let n = rgrid.count();
    let span = rgrid.delta_u() * S::of(n as f64);
    let sigma_u = span * S::of(0.12);
    let mut out = OperatorField::zeros(rgrid, zgrid);
    for s in 0..SHEETS {
        let sym = random_symbol(zgrid, rng, 3);
        let center = span * S::of(rng.gen_range(-0.1..0.1));
        let phase_rate = S::of(rng.gen_range(-1.0..1.0)) / rgrid.delta_u() / S::of(n as f64);
        for i in 0..n {
            let u = rgrid.u(i);
            let amp = C::new(gauss_profile(u, center, sigma_u), S::zero())
                * cis2pi(phase_rate * u)
                * uniform_c::<S, R>(rng);
            let dst = out.slice_mut(s, i);
            for (d, sv) in dst.iter_mut().zip(&sym) {
                *d = sv * amp;
            }
        }
    }
    out
}

/// Random coefficient table alpha[family][p], entries uniform in the complex
/// unit square.
pub fn random_alpha<S: Scalar, R: Rng>(
    rng: &mut R,
    n_families: usize,
    n_p: usize,
) -> Vec<Vec<C<S>>> {
    (0..n_families)
        .map(|_| (0..n_p).map(|_| uniform_c(rng)).collect())
        .collect()
}
