//! Discretized Fourier analysis on the multiplicative group R* = R+* x {1,-1}.
//!
//! The group is sampled on a log-uniform grid: lambda = s * e^u with sheet
//! s in {+1,-1} and u = u0 + i*du, i = 0..N-1. Haar measure d(lambda)/|lambda|
//! becomes the flat rectangle rule du. The character dual is again R* shaped:
//! points nu = e^t with t = r/(N*du) cyclic, and a parity index j in {1,-1}.
//!
//! Two integers structure the grid: P = steps_per_b (so b = P*du makes the
//! lattice translation by e^{bp} an exact cyclic shift by p*P bins) and
//! M = bins_per_period (so N = M*P and the dual fundamental cell
//! nu in [1, e^{1/b}) is exactly the first M dual bins).
//!
//! The u-window is centered (u0 = -N*du/2). This makes the reflection
//! u -> -u grid-exact (required by the involution) and turns the dual-side
//! offset phase e^{-2 pi i t_r u0} into exactly (-1)^r, which we apply as a
//! sign rather than an evaluated exponential so the transform identities hold
//! to round-off.
//!
//! The dual measure carries a parity factor `c_j` multiplying the counting
//! measure on {1,-1}. The default is 1/2, the unique value for which
//! Plancherel and inversion hold exactly in this discrete model; it is kept
//! configurable in this one place so the normalization can be pinned by tests.

use crate::error::{Error, Result};
use crate::scalar::{cis2pi, Scalar, C};
use rustfft::FftPlanner;

/// Default dual-measure parity factor. See module docs.
pub fn default_cj<S: Scalar>() -> S {
    S::half()
}

/// Number of sheets on the group side == number of parities on the dual side.
pub const SHEETS: usize = 2;

/// Log-uniform two-sheet grid on R*.
#[derive(Debug, Clone, PartialEq)]
pub struct RStarGrid<S> {
    delta_u: S,
    count: usize,
    bins_per_period: usize,
    steps_per_b: usize,
    u0: S,
}

impl<S: Scalar> RStarGrid<S> {
    /// `delta_u > 0`, `bins_per_period >= 2`, `steps_per_b >= 1`;
    /// N = M*P, u0 = -N*delta_u/2.
    pub fn new(delta_u: S, bins_per_period: usize, steps_per_b: usize) -> Result<Self> {
        if !(delta_u > S::zero()) {
            return Err(Error::Domain("delta_u must be positive".into()));
        }
        if bins_per_period < 2 {
            return Err(Error::Domain("bins_per_period must be >= 2".into()));
        }
        if steps_per_b < 1 {
            return Err(Error::Domain("steps_per_b must be >= 1".into()));
        }
        let count = bins_per_period * steps_per_b;
        let u0 = -delta_u * S::of(count as f64) * S::half();
        Ok(Self {
            delta_u,
            count,
            bins_per_period,
            steps_per_b,
            u0,
        })
    }

    pub fn delta_u(&self) -> S {
        self.delta_u
    }

    /// Samples per sheet.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn bins_per_period(&self) -> usize {
        self.bins_per_period
    }

    pub fn steps_per_b(&self) -> usize {
        self.steps_per_b
    }

    pub fn u0(&self) -> S {
        self.u0
    }

    /// b = P * delta_u.
    pub fn b(&self) -> S {
        self.delta_u * S::of(self.steps_per_b as f64)
    }

    pub fn u(&self, i: usize) -> S {
        self.u0 + self.delta_u * S::of(i as f64)
    }

    /// |lambda| at bin i.
    pub fn lambda_abs(&self, i: usize) -> S {
        self.u(i).exp()
    }

    /// Signed lambda at (sheet, i); sheet 0 is +, sheet 1 is -.
    pub fn lambda(&self, sheet: usize, i: usize) -> S {
        let a = self.lambda_abs(i);
        if sheet == 0 {
            a
        } else {
            -a
        }
    }

    /// Dual bin width Delta_t = 1/(N * delta_u); M * Delta_t = 1/b exactly.
    pub fn delta_t(&self) -> S {
        (S::of(self.count as f64) * self.delta_u).recip()
    }

    /// t_r = r * Delta_t (t = log nu, cyclic with period 1/delta_u).
    pub fn t(&self, r: usize) -> S {
        self.delta_t() * S::of(r as f64)
    }

    /// nu at dual bin r.
    pub fn nu(&self, r: usize) -> S {
        self.t(r).exp()
    }

    /// Grid index of -u_i (exact on the centered grid).
    pub fn reflect(&self, i: usize) -> usize {
        (self.count - i) % self.count
    }

    pub fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.count as isize) as usize
    }
}

/// Complex field on an [`RStarGrid`], shape [2 sheets][N], sheet-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<S> {
    grid: RStarGrid<S>,
    values: Vec<C<S>>,
}

/// Complex field on the character dual, shape [2 parities][N], parity-major.
/// Parity index 0 is j = 1, index 1 is j = -1.
#[derive(Debug, Clone, PartialEq)]
pub struct DualScalarField<S> {
    grid: RStarGrid<S>,
    values: Vec<C<S>>,
}

impl<S: Scalar> ScalarField<S> {
    pub fn zeros(grid: &RStarGrid<S>) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![C::new(S::zero(), S::zero()); SHEETS * grid.count()],
        }
    }

    pub fn from_fn(grid: &RStarGrid<S>, mut f: impl FnMut(usize, usize) -> C<S>) -> Self {
        let n = grid.count();
        let mut values = Vec::with_capacity(SHEETS * n);
        for sheet in 0..SHEETS {
            for i in 0..n {
                values.push(f(sheet, i));
            }
        }
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &RStarGrid<S> {
        &self.grid
    }

    pub fn sheet(&self, sheet: usize) -> &[C<S>] {
        let n = self.grid.count();
        &self.values[sheet * n..(sheet + 1) * n]
    }

    pub fn sheet_mut(&mut self, sheet: usize) -> &mut [C<S>] {
        let n = self.grid.count();
        &mut self.values[sheet * n..(sheet + 1) * n]
    }

    pub fn get(&self, sheet: usize, i: usize) -> C<S> {
        self.values[sheet * self.grid.count() + i]
    }

    pub fn set(&mut self, sheet: usize, i: usize, v: C<S>) {
        let n = self.grid.count();
        self.values[sheet * n + i] = v;
    }

    pub fn values(&self) -> &[C<S>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C<S>] {
        &mut self.values
    }
}

impl<S: Scalar> DualScalarField<S> {
    pub fn zeros(grid: &RStarGrid<S>) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![C::new(S::zero(), S::zero()); SHEETS * grid.count()],
        }
    }

    pub fn grid(&self) -> &RStarGrid<S> {
        &self.grid
    }

    pub fn parity(&self, j: usize) -> &[C<S>] {
        let n = self.grid.count();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn parity_mut(&mut self, j: usize) -> &mut [C<S>] {
        let n = self.grid.count();
        &mut self.values[j * n..(j + 1) * n]
    }

    pub fn get(&self, j: usize, r: usize) -> C<S> {
        self.values[j * self.grid.count() + r]
    }

    pub fn set(&mut self, j: usize, r: usize, v: C<S>) {
        let n = self.grid.count();
        self.values[j * n + r] = v;
    }

    pub fn values(&self) -> &[C<S>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C<S>] {
        &mut self.values
    }
}

fn check_same_grid<S: Scalar>(a: &RStarGrid<S>, b: &RStarGrid<S>) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(
            "fields live on different R* grids".into(),
        ));
    }
    Ok(())
}

/// Character value (nu, j)(lambda) = chi_nu(|lambda|) * sign_j(lambda/|lambda|),
/// with chi_nu(t) = e^{2 pi i log(nu) log(t)}.
pub fn char_eval<S: Scalar>(nu: S, j: i32, lambda: S) -> Result<C<S>> {
    if !(nu > S::zero()) {
        return Err(Error::Domain("character index nu must be positive".into()));
    }
    if lambda == S::zero() {
        return Err(Error::Domain("lambda must be nonzero".into()));
    }
    if j != 1 && j != -1 {
        return Err(Error::Domain("parity j must be +1 or -1".into()));
    }
    let chi = cis2pi(nu.ln() * lambda.fabs().ln());
    let sign = if lambda < S::zero() && j == -1 {
        -S::one()
    } else {
        S::one()
    };
    Ok(chi * sign)
}

/// In-place forward/backward DFT helper for the length-N sheet buffers.
fn dft<S: Scalar>(buf: &mut [C<S>], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    fft.process(buf);
}

/// Group Fourier transform on R*.
///
/// With h_+(u) = f(e^u), h_-(u) = f(-e^u), the dual field is
/// F(., j=1) = Delta_u * (-1)^r * DFT(h_+ + h_-) and
/// F(., j=-1) = Delta_u * (-1)^r * DFT(h_+ - h_-);
/// the sign (-1)^r is the exact value of e^{-2 pi i t_r u0} on the
/// centered grid.
pub fn ft_rstar<S: Scalar>(f: &ScalarField<S>) -> DualScalarField<S> {
    let grid = f.grid().clone();
    let n = grid.count();
    let du = grid.delta_u();
    let mut sum: Vec<C<S>> = Vec::with_capacity(n);
    let mut diff: Vec<C<S>> = Vec::with_capacity(n);
    let (hp, hm) = (f.sheet(0), f.sheet(1));
    for i in 0..n {
        sum.push(hp[i] + hm[i]);
        diff.push(hp[i] - hm[i]);
    }
    dft(&mut sum, false);
    dft(&mut diff, false);
    let mut out = DualScalarField::zeros(&grid);
    for (j, src) in [sum, diff].into_iter().enumerate() {
        let dst = out.parity_mut(j);
        for (r, v) in src.into_iter().enumerate() {
            let sign = if r % 2 == 0 { S::one() } else { -S::one() };
            dst[r] = v * (du * sign);
        }
    }
    out
}

/// Inverse transform with the default parity factor c_j = 1/2.
pub fn ift_rstar<S: Scalar>(ff: &DualScalarField<S>) -> ScalarField<S> {
    ift_rstar_with(ff, default_cj())
}

/// Inverse transform with an explicit parity factor; only c_j = 1/2 inverts
/// [`ft_rstar`] (c_j = 1 doubles the output, which the selftest pins).
pub fn ift_rstar_with<S: Scalar>(ff: &DualScalarField<S>, c_j: S) -> ScalarField<S> {
    let grid = ff.grid().clone();
    let n = grid.count();
    let scale = (grid.delta_u() * S::of(n as f64)).recip();
    let mut bufs: [Vec<C<S>>; 2] = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for j in 0..SHEETS {
        let src = ff.parity(j);
        for r in 0..n {
            let sign = if r % 2 == 0 { S::one() } else { -S::one() };
            bufs[j].push(src[r] * (sign * scale));
        }
        dft(&mut bufs[j], true);
    }
    let mut out = ScalarField::zeros(&grid);
    for i in 0..n {
        let s = bufs[0][i];
        let d = bufs[1][i];
        out.set(0, i, (s + d) * c_j);
        out.set(1, i, (s - d) * c_j);
    }
    out
}

/// Group convolution (f * g)(lambda) = sum_omega f(lambda/omega) g(omega) du,
/// over both sheets, cyclic in u. Division in the group is subtraction in u
/// and sign multiplication on sheets, so the sum is grid-exact.
pub fn convolve_rstar<S: Scalar>(f: &ScalarField<S>, g: &ScalarField<S>) -> Result<ScalarField<S>> {
    check_same_grid(f.grid(), g.grid())?;
    let grid = f.grid().clone();
    let n = grid.count();
    let half = n / 2;
    let du = grid.delta_u();
    let mut out = ScalarField::zeros(&grid);
    for s_out in 0..SHEETS {
        let acc = {
            let mut acc = vec![C::new(S::zero(), S::zero()); n];
            for s_w in 0..SHEETS {
                let s_f = s_out ^ s_w;
                let fv = f.sheet(s_f);
                let gv = g.sheet(s_w);
                for (i, a) in acc.iter_mut().enumerate() {
                    let mut t = C::new(S::zero(), S::zero());
                    for (k, gk) in gv.iter().enumerate() {
                        // u_i - u_k = u0 + (i - k + N/2) du on the centered grid.
                        let idx = (i + n + half - k) % n;
                        t += fv[idx] * gk;
                    }
                    *a += t;
                }
            }
            acc
        };
        for (i, v) in acc.into_iter().enumerate() {
            out.set(s_out, i, v * du);
        }
    }
    Ok(out)
}

/// Discrete delta at lambda = 1 with value 1/du, the convolution identity
/// element under the du quadrature.
pub fn delta_grid<S: Scalar>(grid: &RStarGrid<S>) -> ScalarField<S> {
    let mut f = ScalarField::zeros(grid);
    let i1 = grid.count() / 2; // u = 0
    f.set(0, i1, C::new(grid.delta_u().recip(), S::zero()));
    f
}

/// Translation T_omega f(lambda) = f(lambda/omega) for omega = +-e^{q du}:
/// a cyclic shift by q bins per sheet, with a sheet swap when omega < 0.
pub fn translate_rstar<S: Scalar>(f: &ScalarField<S>, q: i64, flip_sign: bool) -> ScalarField<S> {
    let grid = f.grid().clone();
    let n = grid.count();
    let mut out = ScalarField::zeros(&grid);
    for sheet in 0..SHEETS {
        let src_sheet = if flip_sign { sheet ^ 1 } else { sheet };
        let src = f.sheet(src_sheet);
        let dst = out.sheet_mut(sheet);
        for (i, d) in dst.iter_mut().enumerate() {
            let idx = (i as isize - q as isize).rem_euclid(n as isize) as usize;
            *d = src[idx];
        }
    }
    out
}

/// Involution f~(lambda) = conj(f(1/lambda)). 1/lambda keeps the sheet; the
/// reflection u -> -u is grid-exact because the window is centered.
pub fn involution_rstar<S: Scalar>(f: &ScalarField<S>) -> ScalarField<S> {
    let grid = f.grid().clone();
    let mut out = ScalarField::zeros(&grid);
    for sheet in 0..SHEETS {
        let src = f.sheet(sheet);
        let dst = out.sheet_mut(sheet);
        for (i, d) in dst.iter_mut().enumerate() {
            *d = src[grid.reflect(i)].conj();
        }
    }
    out
}

/// du-weighted sesquilinear inner product <f, g> = sum f conj(g) du.
pub fn inner_product_rstar<S: Scalar>(f: &ScalarField<S>, g: &ScalarField<S>) -> Result<C<S>> {
    check_same_grid(f.grid(), g.grid())?;
    let mut acc = C::new(S::zero(), S::zero());
    for (a, b) in f.values().iter().zip(g.values()) {
        acc += a * b.conj();
    }
    Ok(acc * f.grid().delta_u())
}

pub fn norm_sq_rstar<S: Scalar>(f: &ScalarField<S>) -> S {
    let mut acc = S::zero();
    for v in f.values() {
        acc += v.norm_sqr();
    }
    acc * f.grid().delta_u()
}

/// Dual-side inner product under the measure c_j * Delta_t per (parity, bin).
pub fn dual_inner<S: Scalar>(
    f: &DualScalarField<S>,
    g: &DualScalarField<S>,
    c_j: S,
) -> Result<C<S>> {
    check_same_grid(f.grid(), g.grid())?;
    let mut acc = C::new(S::zero(), S::zero());
    for (a, b) in f.values().iter().zip(g.values()) {
        acc += a * b.conj();
    }
    Ok(acc * (c_j * f.grid().delta_t()))
}

pub fn dual_norm_sq<S: Scalar>(f: &DualScalarField<S>, c_j: S) -> S {
    let mut acc = S::zero();
    for v in f.values() {
        acc += v.norm_sqr();
    }
    acc * c_j * f.grid().delta_t()
}

/// Per-sheet energy split: (du * ||h_+||^2, du * ||h_-||^2).
pub fn sheet_energies<S: Scalar>(f: &ScalarField<S>) -> (S, S) {
    let du = f.grid().delta_u();
    let mut e = [S::zero(), S::zero()];
    for sheet in 0..SHEETS {
        for v in f.sheet(sheet) {
            e[sheet] += v.norm_sqr();
        }
    }
    (e[0] * du, e[1] * du)
}
