//! Classification of the Gabor system from its weight tables, the Bessel
//! sufficient condition, and the independent Gram-matrix oracle.
//!
//! Everything here is stated for the truncated index box only. The "a.e." and
//! "ess sup/inf" of the continuous statements become max/min over grid bins;
//! every classification is gated on the orthogonality-hypothesis residual by
//! the callers.

use crate::error::{Error, Result};
use crate::gabor::{
    compute_g_klm, modulate, translate_gabor, CoefficientVector, GaborIndex, GaborParams,
    WeightTable,
};
use crate::rstar::SHEETS;
use crate::scalar::{cis2pi, Scalar, C};
use crate::symbol::{hs_inner, opfield_inner, DualOperatorField, OperatorField};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Dual symbol fields for every family in the box, in box order.
pub struct FamilyDuals<S> {
    pub indices: Vec<GaborIndex>,
    pub fields: Vec<DualOperatorField<S>>,
}

pub fn compute_family_duals<S: Scalar>(
    g: &OperatorField<S>,
    params: &GaborParams<S>,
) -> FamilyDuals<S> {
    let indices = params.family_indices(g.zgrid().n());
    let fields = indices
        .iter()
        .map(|idx| compute_g_klm(g, params.a, idx))
        .collect();
    FamilyDuals { indices, fields }
}

/// Relative floor added to norm products in the orthogonality residual so
/// zero slices count as orthogonal.
pub fn default_ortho_floor_rel() -> f64 {
    1e-14
}

/// max over dual bins (r, j) and family pairs A != B of
/// |<g_A(., r, j), g_B(., r, j)>| / (||g_A|| ||g_B|| + floor).
/// Zero means the orthogonality hypothesis holds on the grid.
pub fn orthogonality_residual<S: Scalar>(fd: &FamilyDuals<S>) -> S {
    let nf = fd.fields.len();
    if nf < 2 {
        return S::zero();
    }
    let rgrid = fd.fields[0].rgrid().clone();
    let zgrid = fd.fields[0].zgrid().clone();
    let n = rgrid.count();
    // Slice norms and the global scale for the floor.
    let mut norm_sq = vec![vec![S::zero(); SHEETS * n]; nf];
    let mut gmax = S::zero();
    for (f, field) in fd.fields.iter().enumerate() {
        for j in 0..SHEETS {
            for r in 0..n {
                let v = field.slice_norm_sq(j, r);
                norm_sq[f][j * n + r] = v;
                if v > gmax {
                    gmax = v;
                }
            }
        }
    }
    if gmax == S::zero() {
        return S::zero();
    }
    let floor = gmax * S::of(default_ortho_floor_rel());
    let bins: Vec<(usize, usize)> = (0..SHEETS)
        .flat_map(|j| (0..n).map(move |r| (j, r)))
        .collect();
    bins.par_iter()
        .map(|&(j, r)| {
            let mut worst = S::zero();
            for a in 0..nf {
                let na = norm_sq[a][j * n + r];
                let sa = fd.fields[a].slice(j, r);
                for b in (a + 1)..nf {
                    let nb = norm_sq[b][j * n + r];
                    let ip = hs_inner(&zgrid, sa, fd.fields[b].slice(j, r)).norm();
                    let denom = (na * nb).sqrt() + floor;
                    let rel = ip / denom;
                    if rel > worst {
                        worst = rel;
                    }
                }
            }
            worst
        })
        .reduce(S::zero, |a, b| if a > b { a } else { b })
}

/// A classification flag together with the measured residual behind it.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Flag<S> {
    pub flag: bool,
    pub residual: S,
}

/// Orthonormal system iff w = b on every bin of every family.
pub fn classify_orthonormal<S: Scalar>(wt: &WeightTable<S>, tol: S) -> Flag<S> {
    let b = wt.b;
    let mut worst = S::zero();
    for e in &wt.entries {
        for &w in &e.w {
            let d = (w - b).fabs();
            if d > worst {
                worst = d;
            }
        }
    }
    Flag {
        flag: worst <= tol * b,
        residual: worst / b,
    }
}

/// Parseval frame sequence iff w = b on the support mask Omega (bins outside
/// Omega are unconstrained).
pub fn classify_parseval<S: Scalar>(wt: &WeightTable<S>, tol: S) -> Flag<S> {
    let b = wt.b;
    let mut worst = S::zero();
    for e in &wt.entries {
        for (&w, &inside) in e.w.iter().zip(&e.omega) {
            if inside {
                let d = (w - b).fabs();
                if d > worst {
                    worst = d;
                }
            }
        }
    }
    Flag {
        flag: worst <= tol * b,
        residual: worst / b,
    }
}

/// (A, B) with A b <= w <= B b over the Omega-masked bins; `None` when every
/// Omega is empty (zero system).
pub fn frame_bounds_from_w<S: Scalar>(wt: &WeightTable<S>) -> Option<(S, S)> {
    let b = wt.b;
    let mut lo: Option<S> = None;
    let mut hi = S::zero();
    for e in &wt.entries {
        for (&w, &inside) in e.w.iter().zip(&e.omega) {
            if inside {
                lo = Some(match lo {
                    Some(l) if l < w => l,
                    _ => w,
                });
                if w > hi {
                    hi = w;
                }
            }
        }
    }
    lo.map(|l| (l / b, hi / b))
}

/// (A, B) over the full fundamental cell; A = 0 signals "not a Riesz sequence".
pub fn riesz_bounds_from_w<S: Scalar>(wt: &WeightTable<S>) -> Option<(S, S)> {
    let mut lo: Option<S> = None;
    let mut hi = S::zero();
    for e in &wt.entries {
        for (&w, &inside) in e.w.iter().zip(&e.omega) {
            let w_eff = if inside { w } else { S::zero() };
            lo = Some(match lo {
                Some(l) if l < w_eff => l,
                _ => w_eff,
            });
            if w_eff > hi {
                hi = w_eff;
            }
        }
    }
    lo.map(|l| (l / wt.b, hi / wt.b))
}

/// Frame sequence flag: some mass exists and w is bounded away from 0 on Omega
/// (discretely automatic once Omega is nonempty).
pub fn classify_frame<S: Scalar>(wt: &WeightTable<S>) -> bool {
    frame_bounds_from_w(wt).map(|(a, _)| a > S::zero()).unwrap_or(false)
}

/// Riesz sequence flag: w bounded away from 0 on the whole cell.
pub fn classify_riesz<S: Scalar>(wt: &WeightTable<S>) -> bool {
    riesz_bounds_from_w(wt).map(|(a, _)| a > S::zero()).unwrap_or(false)
}

/// Gram matrix of the truncated system in member order
/// (family-major, p fastest), computed by direct quadrature.
pub struct GramMatrix<S: Scalar> {
    pub members: Vec<(GaborIndex, i64)>,
    pub mat: DMatrix<C<S>>,
}

pub fn gram_matrix<S: Scalar>(g: &OperatorField<S>, params: &GaborParams<S>) -> Result<GramMatrix<S>> {
    params.validate(g.rgrid())?;
    let rgrid = g.rgrid().clone();
    let n = rgrid.count();
    let du = rgrid.delta_u();
    let steps = rgrid.steps_per_b() as i64;
    let dim = g.zgrid().n();
    let families = params.family_indices(dim);
    let p_range = params.p_range();

    // Distinct (k, l) base fields; m enters only as a per-lambda scalar phase
    // and p only as an index offset, so hs-inner tables over the 9 base-field
    // pairs and the occurring offsets reproduce every entry exactly.
    let mut kl_list: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
    let mut kl_of_family = Vec::with_capacity(families.len());
    for fam in &families {
        let key = (fam.k.clone(), fam.l.clone());
        let pos = match kl_list.iter().position(|x| *x == key) {
            Some(p) => p,
            None => {
                kl_list.push(key);
                kl_list.len() - 1
            }
        };
        kl_of_family.push(pos);
    }
    let base: Vec<OperatorField<S>> = kl_list
        .iter()
        .map(|(k, l)| {
            modulate(
                g,
                params.a,
                &GaborIndex {
                    k: k.clone(),
                    l: l.clone(),
                    m: 0,
                },
            )
        })
        .collect();

    // Occurring cyclic offsets delta = (p_i - p_j) * P mod N.
    let mut deltas: Vec<usize> = Vec::new();
    for &pi in &p_range {
        for &pj in &p_range {
            let d = ((pi - pj) * steps).rem_euclid(n as i64) as usize;
            if !deltas.contains(&d) {
                deltas.push(d);
            }
        }
    }

    // Sliding tables h[(a_kl, b_kl, delta)][s * N + i]
    // = <base_a(s, i), base_b(s, (i + delta) mod N)>_{B_2}.
    let nkl = kl_list.len();
    let ndel = deltas.len();
    let combos: Vec<(usize, usize, usize)> = (0..nkl)
        .flat_map(|a| (0..nkl).flat_map(move |b| (0..ndel).map(move |d| (a, b, d))))
        .collect();
    let zgrid = g.zgrid().clone();
    let tables: Vec<Vec<C<S>>> = combos
        .par_iter()
        .map(|&(a, b, d)| {
            let delta = deltas[d];
            let mut t = vec![C::new(S::zero(), S::zero()); SHEETS * n];
            for s in 0..SHEETS {
                for i in 0..n {
                    t[s * n + i] =
                        hs_inner(&zgrid, base[a].slice(s, i), base[b].slice(s, (i + delta) % n));
                }
            }
            t
        })
        .collect();
    let table_of = |a: usize, b: usize, d: usize| -> &Vec<C<S>> {
        &tables[(a * nkl + b) * deltas.len() + d]
    };

    // Per-m phase rows e^{2 pi i a m lambda(s, i)}.
    let m_values: Vec<i64> = (-params.m_max..=params.m_max).collect();
    let phases: Vec<Vec<C<S>>> = m_values
        .iter()
        .map(|&m| {
            let mut row = vec![C::new(S::zero(), S::zero()); SHEETS * n];
            for s in 0..SHEETS {
                for i in 0..n {
                    row[s * n + i] = cis2pi(params.a * S::of(m as f64) * rgrid.lambda(s, i));
                }
            }
            row
        })
        .collect();
    let phase_of = |m: i64| -> &Vec<C<S>> { &phases[(m + params.m_max) as usize] };

    let members: Vec<(GaborIndex, i64)> = families
        .iter()
        .flat_map(|f| p_range.iter().map(move |&p| (f.clone(), p)))
        .collect();
    let nm = members.len();
    let np = p_range.len();
    let mut mat = DMatrix::from_element(nm, nm, C::new(S::zero(), S::zero()));
    for i in 0..nm {
        let (fi, pi) = (&members[i].0, members[i].1);
        let kl_i = kl_of_family[i / np];
        let ph_i = phase_of(fi.m);
        for j in i..nm {
            let (fj, pj) = (&members[j].0, members[j].1);
            let kl_j = kl_of_family[j / np];
            let delta = ((pi - pj) * steps).rem_euclid(n as i64) as usize;
            let d = deltas.iter().position(|&x| x == delta).unwrap();
            let tab = table_of(kl_i, kl_j, d);
            let ph_j = phase_of(fj.m);
            let mut acc = C::new(S::zero(), S::zero());
            for s in 0..SHEETS {
                for ia in 0..n {
                    let ib = (ia + delta) % n;
                    acc += ph_i[s * n + ia] * ph_j[s * n + ib].conj() * tab[s * n + ia];
                }
            }
            let entry = acc * du;
            mat[(i, j)] = entry;
            if j != i {
                mat[(j, i)] = entry.conj();
            }
        }
    }
    Ok(GramMatrix { members, mat })
}

impl<S: Scalar> GramMatrix<S> {
    pub fn hermitian_residual(&self) -> S {
        let n = self.mat.nrows();
        let mut worst = S::zero();
        for i in 0..n {
            for j in 0..n {
                let d = (self.mat[(i, j)] - self.mat[(j, i)].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Largest |entry| between members of different (k, l, m) families.
    pub fn cross_family_max(&self) -> S {
        let n = self.mat.nrows();
        let mut worst = S::zero();
        for i in 0..n {
            for j in 0..n {
                if self.members[i].0 != self.members[j].0 {
                    let v = self.mat[(i, j)].norm();
                    if v > worst {
                        worst = v;
                    }
                }
            }
        }
        worst
    }

    /// Frobenius norm of the cross-family part; a Weyl-perturbation bound on
    /// how far the spectrum can move from the block-diagonal (same-family)
    /// prediction.
    pub fn cross_family_frobenius(&self) -> S {
        let n = self.mat.nrows();
        let mut acc = S::zero();
        for i in 0..n {
            for j in 0..n {
                if self.members[i].0 != self.members[j].0 {
                    acc += self.mat[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }
}

/// Predicted same-family Gram entry under the orthogonality hypothesis:
/// Delta_t sum_r e^{2 pi i (p' - p) r / M} w(r) (the discrete form of the
/// cell integral of e^{2 pi i b (p' - p) log nu} w(nu)).
pub fn gram_entry_from_w<S: Scalar>(w: &[S], delta_t: S, dp: i64) -> C<S> {
    let m = w.len();
    let mut acc = C::new(S::zero(), S::zero());
    for (r, &wr) in w.iter().enumerate() {
        acc += cis2pi(S::of((dp * r as i64) as f64) / S::of(m as f64)) * wr;
    }
    acc * delta_t
}

/// Eigenvalues of the Hermitian Gram matrix, ascending.
pub fn gram_eigenvalues<S>(gm: &GramMatrix<S>) -> Vec<S>
where
    S: Scalar + nalgebra::RealField,
{
    let eig = gm.mat.clone().symmetric_eigen();
    let mut v: Vec<S> = eig.eigenvalues.iter().cloned().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Relative threshold below which an eigenvalue counts as numerically zero
/// (the frame-sequence bounds apply on the closed span only).
pub fn default_rank_threshold_rel() -> f64 {
    1e-8
}

pub fn nonzero_eigenvalues<S: Scalar>(eigs: &[S], rel_threshold: S) -> Vec<S> {
    let max = eigs
        .iter()
        .fold(S::zero(), |a, &x| if x.fabs() > a { x.fabs() } else { a });
    let thr = max * rel_threshold;
    eigs.iter().copied().filter(|e| e.fabs() > thr).collect()
}

/// Direct route of the per-family energy: sum_p |<F, T_{e^{bp}} M G>|^2.
pub fn analysis_energy_direct<S: Scalar>(
    f: &OperatorField<S>,
    g: &OperatorField<S>,
    params: &GaborParams<S>,
) -> Result<Vec<(GaborIndex, S)>> {
    let mut out = Vec::new();
    for idx in params.family_indices(g.zgrid().n()) {
        let modded = modulate(g, params.a, &idx);
        let mut acc = S::zero();
        for &p in &params.p_range() {
            let member = translate_gabor(&modded, p);
            acc += opfield_inner(f, &member)?.norm_sqr();
        }
        out.push((idx, acc));
    }
    Ok(out)
}

/// Formula route: (1/b) Delta_t sum_r |rho(r)|^2 w(r)^2 per family. Exact on
/// the grid when the p box covers a full translation period.
pub fn analysis_energy_from_rho<S: Scalar>(
    coeffs: &CoefficientVector<S>,
    wt: &WeightTable<S>,
) -> Vec<(GaborIndex, S)> {
    let scale = wt.delta_t / wt.b;
    coeffs
        .families
        .iter()
        .enumerate()
        .map(|(fi, idx)| {
            let entry = wt
                .entries
                .iter()
                .find(|e| &e.index == idx)
                .expect("family present in weight table");
            let mut acc = S::zero();
            for (r, &wr) in entry.w.iter().enumerate() {
                acc += coeffs.rho[fi][r].norm_sqr() * wr * wr;
            }
            (idx.clone(), acc * scale)
        })
        .collect()
}

/// sum over all members of |<F, member>|^2 divided by ||F||^2, for empirical
/// Bessel-bound trials.
pub fn bessel_empirical_ratio<S: Scalar>(
    f: &OperatorField<S>,
    g: &OperatorField<S>,
    params: &GaborParams<S>,
) -> Result<S> {
    let total: S = analysis_energy_direct(f, g, params)?
        .into_iter()
        .fold(S::zero(), |a, (_, e)| a + e);
    let nf = f.norm_sq();
    if nf == S::zero() {
        return Err(Error::Domain("zero test field in Bessel trial".into()));
    }
    Ok(total / nf)
}

/// B1 = max over dual bins (r, j) of sum_{k,l,m} ||g_{k,l,m}(., r, j)||^2.
pub fn bessel_b1<S: Scalar>(fd: &FamilyDuals<S>) -> S {
    if fd.fields.is_empty() {
        return S::zero();
    }
    let rgrid = fd.fields[0].rgrid();
    let n = rgrid.count();
    let mut worst = S::zero();
    for j in 0..SHEETS {
        for r in 0..n {
            let mut acc = S::zero();
            for field in &fd.fields {
                acc += field.slice_norm_sq(j, r);
            }
            if acc > worst {
                worst = acc;
            }
        }
    }
    worst
}

/// Result of the alpha-kernel evaluation behind B2.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct BesselAlpha<S> {
    pub b2: S,
    /// Per-axis down-sampling stride applied to the second z argument.
    pub stride: usize,
    /// Estimated multiply count the evaluation performed.
    pub ops_estimate: f64,
}

/// B2 = max_z integral over z' of
/// alpha(z, z') = sum_{j,j'} max_r sum_{k,l,m} sum_{s != 0}
///   |g_{k,l,m}(z, r, j)| |g_{k,l,m}(z', r + sM, j')|,
/// with the z' integral down-sampled by `stride` per axis. Refuses work above
/// `max_ops` multiplies unless `force`.
pub fn bessel_b2<S: Scalar>(
    fd: &FamilyDuals<S>,
    stride: usize,
    max_ops: f64,
    force: bool,
) -> Result<BesselAlpha<S>> {
    if fd.fields.is_empty() {
        return Ok(BesselAlpha {
            b2: S::zero(),
            stride,
            ops_estimate: 0.0,
        });
    }
    if stride == 0 {
        return Err(Error::Domain("stride must be >= 1".into()));
    }
    let rgrid = fd.fields[0].rgrid().clone();
    let zgrid = fd.fields[0].zgrid().clone();
    let n = rgrid.count();
    let m_bins = rgrid.bins_per_period();
    let p_steps = rgrid.steps_per_b();
    let nz = zgrid.total_points();
    let nf = fd.fields.len();

    // z' sample set: every stride-th index along each axis.
    let axes = zgrid.axes();
    let mut zp_ids: Vec<usize> = Vec::new();
    let mut ids = vec![0usize; axes];
    for zi in 0..nz {
        zgrid.unflatten(zi, &mut ids);
        if ids.iter().all(|&i| i % stride == 0) {
            zp_ids.push(zi);
        }
    }
    let weight = zgrid.cell_volume() * S::of((stride as f64).powi(axes as i32));

    let ops = (nz as f64) * (zp_ids.len() as f64) * 4.0 * (n as f64) * (nf as f64);
    if ops > max_ops && !force {
        return Err(Error::ResourceGuard(format!(
            "alpha evaluation needs about {ops:.3e} multiplies (budget {max_ops:.3e}); \
             increase the stride, raise the budget, or force"
        )));
    }

    // A[f][j * n + r] indexed per z inside the loops; precompute moduli
    // |g(z, r, j)| and the s != 0 period sums D.
    // Layout: a[f][(j * n + r) * nz + z].
    let mut a_mod: Vec<Vec<S>> = Vec::with_capacity(nf);
    for field in &fd.fields {
        let mut a = vec![S::zero(); SHEETS * n * nz];
        for j in 0..SHEETS {
            for r in 0..n {
                let sl = field.slice(j, r);
                for z in 0..nz {
                    a[(j * n + r) * nz + z] = sl[z].norm();
                }
            }
        }
        a_mod.push(a);
    }
    let mut d_sum: Vec<Vec<S>> = Vec::with_capacity(nf);
    for a in &a_mod {
        let mut d = vec![S::zero(); SHEETS * n * nz];
        for j in 0..SHEETS {
            for r in 0..n {
                for s in 1..p_steps {
                    let rs = (r + s * m_bins) % n;
                    let src = &a[(j * n + rs) * nz..(j * n + rs + 1) * nz];
                    let dst = &mut d[(j * n + r) * nz..(j * n + r + 1) * nz];
                    for (dv, &sv) in dst.iter_mut().zip(src) {
                        *dv += sv;
                    }
                }
            }
        }
        d_sum.push(d);
    }

    let b2 = (0..nz)
        .into_par_iter()
        .map(|z| {
            let mut total = S::zero();
            for &zp in &zp_ids {
                let mut alpha = S::zero();
                for j in 0..SHEETS {
                    for jp in 0..SHEETS {
                        let mut best = S::zero();
                        for r in 0..n {
                            let mut acc = S::zero();
                            for f in 0..nf {
                                acc += a_mod[f][(j * n + r) * nz + z]
                                        * d_sum[f][(jp * n + r) * nz + zp];
                            }
                            if acc > best {
                                best = acc;
                            }
                        }
                        alpha += best;
                    }
                }
                total += alpha;
            }
            total * weight
        })
        .reduce(S::zero, |a, b| if a > b { a } else { b });
    Ok(BesselAlpha {
        b2,
        stride,
        ops_estimate: ops,
    })
}

/// Proof-assembled Bessel bound (2 B1 + B2) / b; an engineering constant
/// validated empirically, not a sharp frame bound.
pub fn bessel_bound<S: Scalar>(b1: S, b2: S, b: S) -> S {
    (S::two() * b1 + b2) / b
}

/// Fraction of |field|^2 mass outside the central half of each grid axis
/// (u axis first, then the 2n z axes). Large values mean the periodic wrap
/// is being touched.
pub fn boundary_mass_fractions<S: Scalar>(g: &OperatorField<S>) -> Vec<S> {
    let rgrid = g.rgrid();
    let zgrid = g.zgrid();
    let n = rgrid.count();
    let axes = zgrid.axes();
    let mut outside = vec![S::zero(); 1 + axes];
    let mut total = S::zero();
    let mut ids = vec![0usize; axes];
    for s in 0..SHEETS {
        for i in 0..n {
            let u_out = i < n / 4 || i >= 3 * n / 4;
            let sl = g.slice(s, i);
            for (zi, v) in sl.iter().enumerate() {
                let e = v.norm_sqr();
                if e == S::zero() {
                    continue;
                }
                total += e;
                if u_out {
                    outside[0] += e;
                }
                zgrid.unflatten(zi, &mut ids);
                for (ax, &ia) in ids.iter().enumerate() {
                    let np = zgrid.points(ax);
                    if ia < np / 4 || ia >= 3 * np / 4 {
                        outside[1 + ax] += e;
                    }
                }
            }
        }
    }
    if total == S::zero() {
        return vec![S::zero(); 1 + axes];
    }
    outside.into_iter().map(|o| o / total).collect()
}
