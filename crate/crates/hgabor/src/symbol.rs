//! Weyl-symbol representation of Hilbert-Schmidt operator fields.
//!
//! Operators on L^2(R^n) are represented by their Weyl symbols, functions of
//! z = (x, y) in R^n x R^n sampled on a periodic grid. The symbol-domain
//! action of pi(u, v) (composition with the Weyl operator) is the twisted
//! translation z -> e^{pi i (x.v - y.u)} g(x - u, y - v), with the shift
//! realized by band-limited periodic interpolation (phase ramp in the
//! z-frequency domain). Traces against pi(w) reduce to band-limited symbol
//! evaluation, and the B_2 inner product is the cell-weighted L^2(z) sum.
//!
//! Grids may be anisotropic: each of the 2n axes carries its own point count
//! and half-width. `square` builds the common isotropic case.

use crate::error::{Error, Result};
use crate::rstar::{RStarGrid, SHEETS};
use crate::scalar::{cis, cis2pi, Scalar, C};
use rustfft::FftPlanner;
use std::sync::Arc;

/// Periodic z-grid on prod_a [-L_a, L_a), axes (x_1..x_n, y_1..y_n).
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolGrid<S> {
    n: usize,
    points: Vec<usize>,
    half_width: Vec<S>,
}

impl<S: Scalar> SymbolGrid<S> {
    pub fn new(n: usize, points: Vec<usize>, half_width: Vec<S>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("dimension n must be >= 1".into()));
        }
        if points.len() != 2 * n || half_width.len() != 2 * n {
            return Err(Error::Domain(format!(
                "need {} per-axis point counts and half-widths",
                2 * n
            )));
        }
        if points.iter().any(|&p| p < 2 || p % 2 != 0) {
            return Err(Error::Domain("axis point counts must be even and >= 2".into()));
        }
        if half_width.iter().any(|&l| !(l > S::zero())) {
            return Err(Error::Domain("axis half-widths must be positive".into()));
        }
        Ok(Self {
            n,
            points,
            half_width,
        })
    }

    /// Isotropic grid: every axis has `nz` points on [-lz, lz).
    pub fn square(n: usize, nz: usize, lz: S) -> Result<Self> {
        Self::new(n, vec![nz; 2 * n], vec![lz; 2 * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn axes(&self) -> usize {
        2 * self.n
    }

    pub fn points(&self, axis: usize) -> usize {
        self.points[axis]
    }

    pub fn half_width(&self, axis: usize) -> S {
        self.half_width[axis]
    }

    pub fn step(&self, axis: usize) -> S {
        self.half_width[axis] * S::two() / S::of(self.points[axis] as f64)
    }

    pub fn coord(&self, axis: usize, idx: usize) -> S {
        -self.half_width[axis] + self.step(axis) * S::of(idx as f64)
    }

    pub fn total_points(&self) -> usize {
        self.points.iter().product()
    }

    pub fn cell_volume(&self) -> S {
        (0..self.axes()).fold(S::one(), |acc, a| acc * self.step(a))
    }

    /// Signed frequency index for FFT bin `ka` along `axis`.
    pub fn freq(&self, axis: usize, ka: usize) -> i64 {
        let np = self.points[axis] as i64;
        let k = ka as i64;
        if k < np / 2 {
            k
        } else {
            k - np
        }
    }

    /// Decompose a flat index into per-axis indices (axis 0 slowest).
    pub fn unflatten(&self, mut idx: usize, out: &mut [usize]) {
        for a in (0..self.axes()).rev() {
            out[a] = idx % self.points[a];
            idx /= self.points[a];
        }
    }

    /// Coordinates of a flat index.
    pub fn point(&self, idx: usize) -> Vec<S> {
        let mut ids = vec![0usize; self.axes()];
        self.unflatten(idx, &mut ids);
        ids.iter()
            .enumerate()
            .map(|(a, &i)| self.coord(a, i))
            .collect()
    }
}

fn check_same_zgrid<S: Scalar>(a: &SymbolGrid<S>, b: &SymbolGrid<S>) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(
            "symbols live on different z-grids".into(),
        ));
    }
    Ok(())
}

/// In-place FFT along one axis of a flattened multi-axis array.
fn fft_axis<S: Scalar>(
    data: &mut [C<S>],
    points: &[usize],
    axis: usize,
    fft: &Arc<dyn rustfft::Fft<S>>,
) {
    let np = points[axis];
    let stride: usize = points[axis + 1..].iter().product();
    let outer: usize = points[..axis].iter().product();
    let mut line = vec![C::new(S::zero(), S::zero()); np];
    for o in 0..outer {
        let base_o = o * np * stride;
        for s in 0..stride {
            for (i, l) in line.iter_mut().enumerate() {
                *l = data[base_o + i * stride + s];
            }
            fft.process(&mut line);
            for (i, l) in line.iter().enumerate() {
                data[base_o + i * stride + s] = *l;
            }
        }
    }
}

/// Full forward (or inverse) FFT over all axes; unscaled, like rustfft.
pub fn fft_all_axes<S: Scalar>(grid: &SymbolGrid<S>, data: &mut [C<S>], inverse: bool) {
    let mut planner = FftPlanner::new();
    for a in 0..grid.axes() {
        let fft = if inverse {
            planner.plan_fft_inverse(grid.points(a))
        } else {
            planner.plan_fft_forward(grid.points(a))
        };
        fft_axis(data, &grid.points, a, &fft);
    }
}

/// Band-limited periodic shift: out(z) = sym(z - shift), realized by a
/// frequency-domain phase ramp. Unitary on the grid for any real shift.
pub fn band_limited_shift<S: Scalar>(
    grid: &SymbolGrid<S>,
    sym: &[C<S>],
    shift: &[S],
) -> Vec<C<S>> {
    debug_assert_eq!(sym.len(), grid.total_points());
    debug_assert_eq!(shift.len(), grid.axes());
    let mut data = sym.to_vec();
    fft_all_axes(grid, &mut data, false);
    // Per-axis phase vectors e^{-2 pi i k shift / (2L)}.
    let phases: Vec<Vec<C<S>>> = (0..grid.axes())
        .map(|a| {
            let period = grid.half_width(a) * S::two();
            (0..grid.points(a))
                .map(|ka| cis2pi(-S::of(grid.freq(a, ka) as f64) * shift[a] / period))
                .collect()
        })
        .collect();
    apply_separable(grid, &mut data, &phases);
    fft_all_axes(grid, &mut data, true);
    let scale = S::of(grid.total_points() as f64).recip();
    for v in &mut data {
        *v *= scale;
    }
    data
}

/// Multiply `data` pointwise by a product of per-axis vectors.
fn apply_separable<S: Scalar>(grid: &SymbolGrid<S>, data: &mut [C<S>], per_axis: &[Vec<C<S>>]) {
    let axes = grid.axes();
    let mut ids = vec![0usize; axes];
    for (idx, v) in data.iter_mut().enumerate() {
        grid.unflatten(idx, &mut ids);
        let mut p = C::new(S::one(), S::zero());
        for a in 0..axes {
            p *= per_axis[a][ids[a]];
        }
        *v *= p;
    }
}

/// Twisted translation: symbol of pi(u, v) composed with W(g), i.e.
/// z = (x, y) -> e^{pi i (x.v - y.u)} g(x - u, y - v).
pub fn twisted_translate<S: Scalar>(
    grid: &SymbolGrid<S>,
    sym: &[C<S>],
    u: &[S],
    v: &[S],
) -> Vec<C<S>> {
    debug_assert_eq!(u.len(), grid.n());
    debug_assert_eq!(v.len(), grid.n());
    let mut shift = Vec::with_capacity(grid.axes());
    shift.extend_from_slice(u);
    shift.extend_from_slice(v);
    let mut data = band_limited_shift(grid, sym, &shift);
    // e^{pi i (x.v - y.u)} is separable across axes.
    let n = grid.n();
    let phases: Vec<Vec<C<S>>> = (0..grid.axes())
        .map(|a| {
            let coef = if a < n { v[a] } else { -u[a - n] };
            (0..grid.points(a))
                .map(|ia| cis(S::PI() * grid.coord(a, ia) * coef))
                .collect()
        })
        .collect();
    apply_separable(grid, &mut data, &phases);
    data
}

/// Band-limited evaluation of a symbol at an arbitrary point (trigonometric
/// interpolation consistent with [`band_limited_shift`]).
pub fn eval_symbol<S: Scalar>(grid: &SymbolGrid<S>, sym: &[C<S>], point: &[S]) -> C<S> {
    debug_assert_eq!(point.len(), grid.axes());
    let mut coeffs = sym.to_vec();
    fft_all_axes(grid, &mut coeffs, false);
    // Contract axes from the last (fastest-varying) inward.
    let weights: Vec<Vec<C<S>>> = (0..grid.axes())
        .map(|a| {
            let period = grid.half_width(a) * S::two();
            let frac = (point[a] + grid.half_width(a)) / period;
            (0..grid.points(a))
                .map(|ka| cis2pi(S::of(grid.freq(a, ka) as f64) * frac))
                .collect()
        })
        .collect();
    let mut data = coeffs;
    for a in (0..grid.axes()).rev() {
        let np = grid.points(a);
        let mut next = Vec::with_capacity(data.len() / np);
        for chunk in data.chunks(np) {
            let mut acc = C::new(S::zero(), S::zero());
            for (i, c) in chunk.iter().enumerate() {
                acc += c * weights[a][i];
            }
            next.push(acc);
        }
        data = next;
    }
    data[0] * S::of(grid.total_points() as f64).recip()
}

/// Trace of pi(w) W(g): by the Weyl inversion formula this is g(-w),
/// evaluated by band-limited interpolation (periodic beyond the grid).
pub fn trace_pi_weyl<S: Scalar>(grid: &SymbolGrid<S>, sym: &[C<S>], w: &[S]) -> C<S> {
    let neg: Vec<S> = w.iter().map(|&c| -c).collect();
    eval_symbol(grid, sym, &neg)
}

/// B_2 inner product of two symbols: cell-volume-weighted <a, b>.
pub fn hs_inner<S: Scalar>(grid: &SymbolGrid<S>, a: &[C<S>], b: &[C<S>]) -> C<S> {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = C::new(S::zero(), S::zero());
    for (x, y) in a.iter().zip(b) {
        acc += x * y.conj();
    }
    acc * grid.cell_volume()
}

pub fn sym_norm_sq<S: Scalar>(grid: &SymbolGrid<S>, a: &[C<S>]) -> S {
    let mut acc = S::zero();
    for x in a {
        acc += x.norm_sqr();
    }
    acc * grid.cell_volume()
}

/// A map lambda -> B_2 operator represented by Weyl symbols per lambda-sample:
/// shape [2 sheets][N][Z], Z = z-grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorField<S> {
    rgrid: RStarGrid<S>,
    zgrid: SymbolGrid<S>,
    values: Vec<C<S>>,
}

/// The group-Fourier transform of an [`OperatorField`] in lambda:
/// shape [2 parities][N][Z].
#[derive(Debug, Clone, PartialEq)]
pub struct DualOperatorField<S> {
    rgrid: RStarGrid<S>,
    zgrid: SymbolGrid<S>,
    values: Vec<C<S>>,
}

macro_rules! opfield_impl {
    ($name:ident) => {
        impl<S: Scalar> $name<S> {
            pub fn zeros(rgrid: &RStarGrid<S>, zgrid: &SymbolGrid<S>) -> Self {
                let len = SHEETS * rgrid.count() * zgrid.total_points();
                Self {
                    rgrid: rgrid.clone(),
                    zgrid: zgrid.clone(),
                    values: vec![C::new(S::zero(), S::zero()); len],
                }
            }

            pub fn rgrid(&self) -> &RStarGrid<S> {
                &self.rgrid
            }

            pub fn zgrid(&self) -> &SymbolGrid<S> {
                &self.zgrid
            }

            pub fn slice(&self, sheet: usize, i: usize) -> &[C<S>] {
                let z = self.zgrid.total_points();
                let base = (sheet * self.rgrid.count() + i) * z;
                &self.values[base..base + z]
            }

            pub fn slice_mut(&mut self, sheet: usize, i: usize) -> &mut [C<S>] {
                let z = self.zgrid.total_points();
                let base = (sheet * self.rgrid.count() + i) * z;
                &mut self.values[base..base + z]
            }

            pub fn values(&self) -> &[C<S>] {
                &self.values
            }

            pub fn values_mut(&mut self) -> &mut [C<S>] {
                &mut self.values
            }

            /// Squared norm in L^2(R*, B_2; d kappa) == du-weighted symbol
            /// L^2 norms (Weyl isometry); for the dual field the caller
            /// applies the dual measure instead.
            pub fn raw_sum_sq(&self) -> S {
                let mut acc = S::zero();
                for v in &self.values {
                    acc += v.norm_sqr();
                }
                acc
            }
        }
    };
}

opfield_impl!(OperatorField);
opfield_impl!(DualOperatorField);

impl<S: Scalar> OperatorField<S> {
    /// ||G||^2 = sum_{sheet,i} du ||g_lambda||^2_{L^2(z)}.
    pub fn norm_sq(&self) -> S {
        self.raw_sum_sq() * self.rgrid.delta_u() * self.zgrid.cell_volume()
    }
}

impl<S: Scalar> DualOperatorField<S> {
    /// ||G^||^2 under the dual measure with parity factor c_j.
    pub fn norm_sq(&self, c_j: S) -> S {
        self.raw_sum_sq() * c_j * self.rgrid.delta_t() * self.zgrid.cell_volume()
    }

    /// ||slice(j, r)||^2_{L^2(z)}.
    pub fn slice_norm_sq(&self, j: usize, r: usize) -> S {
        sym_norm_sq(&self.zgrid, self.slice(j, r))
    }
}

pub(crate) fn check_same_opgrids<S: Scalar>(
    ar: &RStarGrid<S>,
    az: &SymbolGrid<S>,
    br: &RStarGrid<S>,
    bz: &SymbolGrid<S>,
) -> Result<()> {
    if ar != br {
        return Err(Error::GridMismatch(
            "operator fields live on different R* grids".into(),
        ));
    }
    check_same_zgrid(az, bz)
}

/// du-weighted inner product of two operator fields.
pub fn opfield_inner<S: Scalar>(a: &OperatorField<S>, b: &OperatorField<S>) -> Result<C<S>> {
    check_same_opgrids(a.rgrid(), a.zgrid(), b.rgrid(), b.zgrid())?;
    let mut acc = C::new(S::zero(), S::zero());
    for (x, y) in a.values().iter().zip(b.values()) {
        acc += x * y.conj();
    }
    Ok(acc * (a.rgrid().delta_u() * a.zgrid().cell_volume()))
}
