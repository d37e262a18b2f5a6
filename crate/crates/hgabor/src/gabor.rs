//! The Gabor system U(G) = { T_{e^{bp}} M_{a(2k,l,m)} G } and its derived
//! objects: the transformed dual symbols g_{k,l,m}(z, nu, j), the weight
//! tables w_{k,l,m} on the fundamental cell, and the coefficient map F -> rho.
//!
//! M_{a(2k,l,m)} acts per lambda-sample as the twisted translation by
//! (2 a lambda k, a l) times the scalar phase e^{2 pi i lambda a m};
//! T_{e^{bp}} is the exact cyclic shift of the lambda axis by p*P bins.

use crate::error::{Error, Result};
use crate::rstar::{RStarGrid, SHEETS};
use crate::scalar::{cis, cis2pi, Scalar, C};
use crate::symbol::{
    band_limited_shift, twisted_translate, DualOperatorField, OperatorField, SymbolGrid,
};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

/// One modulation index (k, l, m); k, l in Z^n, m in Z.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GaborIndex {
    pub k: Vec<i64>,
    pub l: Vec<i64>,
    pub m: i64,
}

impl GaborIndex {
    pub fn zero(n: usize) -> Self {
        Self {
            k: vec![0; n],
            l: vec![0; n],
            m: 0,
        }
    }

    pub fn label(&self) -> String {
        format!("k={:?} l={:?} m={}", self.k, self.l, self.m)
    }
}

/// Lattice parameters and the truncated index box.
#[derive(Debug, Clone, Serialize)]
pub struct GaborParams<S> {
    pub a: S,
    /// |k_i| <= k_max, |l_i| <= l_max, |m| <= m_max, |p| <= p_max.
    pub k_max: i64,
    pub l_max: i64,
    pub m_max: i64,
    pub p_max: i64,
    /// Truncation of the s-sum in diagnostics that extend beyond the finite
    /// dual axis; the weight-table s-sum itself is the exact P-fold
    /// periodization and ignores this.
    pub s_max: i64,
}

impl<S: Scalar> GaborParams<S> {
    pub fn validate(&self, grid: &RStarGrid<S>) -> Result<()> {
        if !(self.a > S::zero()) {
            return Err(Error::Domain("lattice parameter a must be positive".into()));
        }
        if self.k_max < 0 || self.l_max < 0 || self.m_max < 0 || self.p_max < 0 {
            return Err(Error::Domain("index box bounds must be nonnegative".into()));
        }
        let p_count = 2 * self.p_max + 1;
        if p_count > grid.steps_per_b() as i64 {
            return Err(Error::Domain(format!(
                "p box has {} values but only {} translations are distinct on the grid \
                 (T_(e^(bp)) has period P = steps_per_b)",
                p_count,
                grid.steps_per_b()
            )));
        }
        Ok(())
    }

    /// All (k, l, m) in the box, in deterministic lexicographic order.
    pub fn family_indices(&self, n: usize) -> Vec<GaborIndex> {
        fn axes(bound: i64, n: usize) -> Vec<Vec<i64>> {
            let mut out: Vec<Vec<i64>> = vec![vec![]];
            for _ in 0..n {
                let mut next = Vec::new();
                for base in &out {
                    for v in -bound..=bound {
                        let mut b = base.clone();
                        b.push(v);
                        next.push(b);
                    }
                }
                out = next;
            }
            out
        }
        let mut v = Vec::new();
        for k in axes(self.k_max, n) {
            for l in axes(self.l_max, n) {
                for m in -self.m_max..=self.m_max {
                    v.push(GaborIndex {
                        k: k.clone(),
                        l: l.clone(),
                        m,
                    });
                }
            }
        }
        v
    }

    pub fn p_range(&self) -> Vec<i64> {
        (-self.p_max..=self.p_max).collect()
    }
}

/// Shift vectors (2 a lambda k, a l) for one lambda.
fn mod_shifts<S: Scalar>(a: S, idx: &GaborIndex, lambda: S) -> (Vec<S>, Vec<S>) {
    let u: Vec<S> = idx
        .k
        .iter()
        .map(|&k| S::two() * a * lambda * S::of(k as f64))
        .collect();
    let v: Vec<S> = idx.l.iter().map(|&l| a * S::of(l as f64)).collect();
    (u, v)
}

/// Largest |shift| / half-width ratio over the box, for aliasing warnings.
pub fn max_shift_ratio<S: Scalar>(
    grid: &RStarGrid<S>,
    zgrid: &SymbolGrid<S>,
    a: S,
    idx: &GaborIndex,
) -> f64 {
    let n = zgrid.n();
    let lam_max = grid.lambda_abs(grid.count() - 1).max(grid.lambda_abs(0));
    let mut worst = 0.0f64;
    for (ax, &k) in idx.k.iter().enumerate() {
        let shift = (S::two() * a * lam_max * S::of(k.abs() as f64)).as_f64();
        worst = worst.max(shift / zgrid.half_width(ax).as_f64());
    }
    for (ax, &l) in idx.l.iter().enumerate() {
        let shift = (a * S::of(l.abs() as f64)).as_f64();
        worst = worst.max(shift / zgrid.half_width(n + ax).as_f64());
    }
    worst
}

/// (M_{a(2k,l,m)} G)(lambda) = pi_lambda(a(2k,l,m)) G(lambda): per sample the
/// symbol becomes e^{2 pi i lambda a m} * twisted_translate(g, 2 a lambda k, a l).
pub fn modulate<S: Scalar>(g: &OperatorField<S>, a: S, idx: &GaborIndex) -> OperatorField<S> {
    let rgrid = g.rgrid().clone();
    let zgrid = g.zgrid().clone();
    let n = rgrid.count();
    let z = zgrid.total_points();
    let mut out = OperatorField::zeros(&rgrid, &zgrid);
    let slices: Vec<(usize, usize)> = (0..SHEETS)
        .flat_map(|s| (0..n).map(move |i| (s, i)))
        .collect();
    let results: Vec<Vec<C<S>>> = slices
        .par_iter()
        .map(|&(s, i)| {
            let lambda = rgrid.lambda(s, i);
            let (u, v) = mod_shifts(a, idx, lambda);
            let mut slice = twisted_translate(&zgrid, g.slice(s, i), &u, &v);
            let phase = cis2pi(lambda * a * S::of(idx.m as f64));
            for w in &mut slice {
                *w *= phase;
            }
            slice
        })
        .collect();
    for (&(s, i), res) in slices.iter().zip(results) {
        out.slice_mut(s, i)[..z].copy_from_slice(&res);
    }
    out
}

/// (T_{e^{bp}} G)(lambda) = G(lambda e^{-bp}): exact cyclic shift by p*P bins.
pub fn translate_gabor<S: Scalar>(g: &OperatorField<S>, p: i64) -> OperatorField<S> {
    let rgrid = g.rgrid().clone();
    let zgrid = g.zgrid().clone();
    let n = rgrid.count();
    let q = p * rgrid.steps_per_b() as i64;
    let mut out = OperatorField::zeros(&rgrid, &zgrid);
    for s in 0..SHEETS {
        for i in 0..n {
            let src = rgrid.wrap(i as isize - q as isize);
            out.slice_mut(s, i).copy_from_slice(g.slice(s, src));
        }
    }
    out
}

/// H_{k,l,m}(z, lambda) = e^{2 pi i a lambda (m - k.y)} g_lambda(x - 2 a lambda k, y - a l),
/// computed in the symbol domain (the trace against pi(2 a lambda k - x, a l - y, 0)
/// reduces to a shifted symbol evaluation).
pub fn compute_h<S: Scalar>(g: &OperatorField<S>, a: S, idx: &GaborIndex) -> OperatorField<S> {
    let rgrid = g.rgrid().clone();
    let zgrid = g.zgrid().clone();
    let n = rgrid.count();
    let nz = zgrid.total_points();
    let dim = zgrid.n();
    let mut out = OperatorField::zeros(&rgrid, &zgrid);
    let slices: Vec<(usize, usize)> = (0..SHEETS)
        .flat_map(|s| (0..n).map(move |i| (s, i)))
        .collect();
    let results: Vec<Vec<C<S>>> = slices
        .par_iter()
        .map(|&(s, i)| {
            let lambda = rgrid.lambda(s, i);
            let (u, v) = mod_shifts(a, idx, lambda);
            let mut shift = Vec::with_capacity(2 * dim);
            shift.extend_from_slice(&u);
            shift.extend_from_slice(&v);
            let mut slice = band_limited_shift(&zgrid, g.slice(s, i), &shift);
            let m_s = S::of(idx.m as f64);
            let mut ids = vec![0usize; 2 * dim];
            for (zi, w) in slice.iter_mut().enumerate() {
                zgrid.unflatten(zi, &mut ids);
                let mut ky = S::zero();
                for ax in 0..dim {
                    ky += S::of(idx.k[ax] as f64) * zgrid.coord(dim + ax, ids[dim + ax]);
                }
                *w *= cis2pi(a * lambda * (m_s - ky));
            }
            slice
        })
        .collect();
    for (&(s, i), res) in slices.iter().zip(results) {
        out.slice_mut(s, i)[..nz].copy_from_slice(&res);
    }
    out
}

/// Group Fourier transform of an operator field along lambda, per z-point.
pub fn ft_lambda<S: Scalar>(g: &OperatorField<S>) -> DualOperatorField<S> {
    let rgrid = g.rgrid().clone();
    let zgrid = g.zgrid().clone();
    let n = rgrid.count();
    let nz = zgrid.total_points();
    let du = rgrid.delta_u();
    let mut out = DualOperatorField::zeros(&rgrid, &zgrid);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);

    // Process z-points in parallel chunks; each task transforms its own
    // gathered lambda-lines.
    let chunk = 256usize.min(nz.max(1));
    let tasks: Vec<usize> = (0..nz).step_by(chunk).collect();
    let results: Vec<(usize, Vec<C<S>>)> = tasks
        .par_iter()
        .map(|&z0| {
            let z1 = (z0 + chunk).min(nz);
            let w = z1 - z0;
            // layout: [parity][lambda][local z]
            let mut buf = vec![C::new(S::zero(), S::zero()); SHEETS * n * w];
            let mut line_sum = vec![C::new(S::zero(), S::zero()); n];
            let mut line_diff = vec![C::new(S::zero(), S::zero()); n];
            for zz in 0..w {
                for i in 0..n {
                    let hp = g.slice(0, i)[z0 + zz];
                    let hm = g.slice(1, i)[z0 + zz];
                    line_sum[i] = hp + hm;
                    line_diff[i] = hp - hm;
                }
                fft.process(&mut line_sum);
                fft.process(&mut line_diff);
                for r in 0..n {
                    let sign = if r % 2 == 0 { du } else { -du };
                    buf[r * w + zz] = line_sum[r] * sign;
                    buf[(n + r) * w + zz] = line_diff[r] * sign;
                }
            }
            (z0, buf)
        })
        .collect();
    for (z0, buf) in results {
        let z1 = (z0 + chunk).min(nz);
        let w = z1 - z0;
        for j in 0..SHEETS {
            for r in 0..n {
                out.slice_mut(j, r)[z0..z1].copy_from_slice(&buf[(j * n + r) * w..(j * n + r + 1) * w]);
            }
        }
    }
    out
}

/// g_{k,l,m}(z, nu, j): the lambda-transform of the modulated field
/// (equivalently e^{pi i a l.x} times the lambda-transform of H_{k,l,m}).
pub fn compute_g_klm<S: Scalar>(
    g: &OperatorField<S>,
    a: S,
    idx: &GaborIndex,
) -> DualOperatorField<S> {
    ft_lambda(&modulate(g, a, idx))
}

/// The alternate route: e^{pi i a l.x} * ft_lambda(H_{k,l,m}). Used to pin
/// route equivalence against [`compute_g_klm`].
pub fn compute_g_klm_via_h<S: Scalar>(
    g: &OperatorField<S>,
    a: S,
    idx: &GaborIndex,
) -> DualOperatorField<S> {
    let mut out = ft_lambda(&compute_h(g, a, idx));
    let zgrid = out.zgrid().clone();
    let rgrid = out.rgrid().clone();
    let dim = zgrid.n();
    let nz = zgrid.total_points();
    let mut phase = vec![C::new(S::one(), S::zero()); nz];
    let mut ids = vec![0usize; 2 * dim];
    for (zi, ph) in phase.iter_mut().enumerate() {
        zgrid.unflatten(zi, &mut ids);
        let mut lx = S::zero();
        for ax in 0..dim {
            lx += S::of(idx.l[ax] as f64) * zgrid.coord(ax, ids[ax]);
        }
        *ph = cis(S::PI() * a * lx);
    }
    for j in 0..SHEETS {
        for r in 0..rgrid.count() {
            for (w, ph) in out.slice_mut(j, r).iter_mut().zip(&phase) {
                *w *= *ph;
            }
        }
    }
    out
}

/// Weight values of one family on the fundamental cell, plus its support mask.
#[derive(Debug, Clone, Serialize)]
pub struct WeightEntry<S> {
    pub index: GaborIndex,
    /// w(r), r = 0..M-1 over the cell nu in [1, e^{1/b}).
    pub w: Vec<S>,
    /// Omega mask: w(r) > eps_support.
    pub omega: Vec<bool>,
}

/// Weight tables for every family in the box.
#[derive(Debug, Clone, Serialize)]
pub struct WeightTable<S> {
    pub m_bins: usize,
    pub b: S,
    pub delta_t: S,
    pub c_j: S,
    pub entries: Vec<WeightEntry<S>>,
}

/// Relative floor defining the support mask Omega.
pub fn default_eps_support_rel() -> f64 {
    1e-10
}

/// w_{k,l,m}(r) = sum_j c_j sum_{s=0}^{P-1} ||g_{k,l,m}(., r + sM, j)||^2_{L^2(z)}.
/// The s-sum is the exact P-fold periodization of the finite dual axis.
pub fn weight_entry<S: Scalar>(
    gd: &DualOperatorField<S>,
    index: &GaborIndex,
    c_j: S,
    eps_rel: S,
) -> WeightEntry<S> {
    let grid = gd.rgrid();
    let m = grid.bins_per_period();
    let p = grid.steps_per_b();
    let mut w = vec![S::zero(); m];
    for j in 0..SHEETS {
        for s in 0..p {
            for (r, wr) in w.iter_mut().enumerate() {
                *wr += c_j * gd.slice_norm_sq(j, r + s * m);
            }
        }
    }
    let wmax = w.iter().fold(S::zero(), |a, &x| if x > a { x } else { a });
    let eps = wmax * eps_rel;
    let omega = w.iter().map(|&x| x > eps).collect();
    WeightEntry {
        index: index.clone(),
        w,
        omega,
    }
}

/// Build the weight table for the whole index box. Families are processed one
/// at a time so only a single dual field is alive at once.
pub fn weight_table<S: Scalar>(
    g: &OperatorField<S>,
    params: &GaborParams<S>,
    c_j: S,
    eps_rel: S,
) -> WeightTable<S> {
    let grid = g.rgrid();
    let entries: Vec<WeightEntry<S>> = params
        .family_indices(g.zgrid().n())
        .iter()
        .map(|idx| {
            let gd = compute_g_klm(g, params.a, idx);
            weight_entry(&gd, idx, c_j, eps_rel)
        })
        .collect();
    WeightTable {
        m_bins: grid.bins_per_period(),
        b: grid.b(),
        delta_t: grid.delta_t(),
        c_j,
        entries,
    }
}

impl<S: Scalar> WeightTable<S> {
    /// Total mass sum_r Delta_t w(r) of one entry; equals ||G||^2 when the
    /// periodization is conservative.
    pub fn total_mass(&self, entry: &WeightEntry<S>) -> S {
        entry.w.iter().fold(S::zero(), |a, &x| a + x) * self.delta_t
    }
}

/// Raw coefficients alpha_{k,l,m,p} and their per-family cell profiles
/// rho_{k,l,m}(nu) = sum_p alpha e^{-2 pi i b p log nu}.
#[derive(Debug, Clone)]
pub struct CoefficientVector<S> {
    pub families: Vec<GaborIndex>,
    pub p_range: Vec<i64>,
    /// alpha[family][p position]
    pub alpha: Vec<Vec<C<S>>>,
    /// rho[family][r], r = 0..M-1
    pub rho: Vec<Vec<C<S>>>,
}

/// b t_r = r P / N = r / M exactly, so the synthesis phase is e^{-2 pi i p r / M}.
pub fn rho_profile<S: Scalar>(alpha: &[C<S>], p_range: &[i64], m_bins: usize) -> Vec<C<S>> {
    (0..m_bins)
        .map(|r| {
            let mut acc = C::new(S::zero(), S::zero());
            for (ai, &p) in alpha.iter().zip(p_range) {
                acc += ai * cis2pi(-S::of((p * r as i64) as f64) / S::of(m_bins as f64));
            }
            acc
        })
        .collect()
}

pub fn rho_map<S: Scalar>(
    families: Vec<GaborIndex>,
    p_range: Vec<i64>,
    alpha: Vec<Vec<C<S>>>,
    m_bins: usize,
) -> CoefficientVector<S> {
    let rho = alpha
        .iter()
        .map(|a| rho_profile(a, &p_range, m_bins))
        .collect();
    CoefficientVector {
        families,
        p_range,
        alpha,
        rho,
    }
}

/// F = sum alpha_{k,l,m,p} T_{e^{bp}} M_{a(2k,l,m)} G.
pub fn synthesize<S: Scalar>(
    coeffs: &CoefficientVector<S>,
    g: &OperatorField<S>,
    a: S,
) -> OperatorField<S> {
    let mut out = OperatorField::zeros(g.rgrid(), g.zgrid());
    for (fi, idx) in coeffs.families.iter().enumerate() {
        let modded = modulate(g, a, idx);
        for (pi, &p) in coeffs.p_range.iter().enumerate() {
            let alpha = coeffs.alpha[fi][pi];
            if alpha.norm_sqr() == S::zero() {
                continue;
            }
            let shifted = translate_gabor(&modded, p);
            for (o, v) in out.values_mut().iter_mut().zip(shifted.values()) {
                *o += v * alpha;
            }
        }
    }
    out
}

/// ||rho||^2_w = sum_families Delta_t sum_r |rho(r)|^2 w(r): the right side of
/// the coefficient-isometry identity.
pub fn rho_weighted_norm_sq<S: Scalar>(coeffs: &CoefficientVector<S>, wt: &WeightTable<S>) -> S {
    let mut acc = S::zero();
    for (fi, idx) in coeffs.families.iter().enumerate() {
        let entry = wt
            .entries
            .iter()
            .find(|e| &e.index == idx)
            .expect("family present in weight table");
        for (r, &wr) in entry.w.iter().enumerate() {
            acc += coeffs.rho[fi][r].norm_sqr() * wr;
        }
    }
    acc * wt.delta_t
}
