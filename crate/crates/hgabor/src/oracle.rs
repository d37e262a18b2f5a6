//! Low-resolution matrix realization of the Schroedinger representation and
//! the Weyl transform (n = 1 only), used purely as an independent oracle for
//! the symbol-domain pipeline.
//!
//! L^2(R) is truncated to Nxi uniform samples on [-Lxi, Lxi) with periodic
//! wrap; y-shifts act by band-limited interpolation, so every pi matrix is
//! exactly unitary on the sample space. Matrices act on sample vectors; with
//! the integral-kernel identification K = M/dxi, the plain Frobenius inner
//! product and plain matrix trace realize the B_2 inner product and the
//! operator trace.
//!
//! The identification is faithful only when the grids are coupled:
//! - the y-axis step of the symbol grid equals dxi, so every quadrature
//!   y-shift is an exact circulant permutation (an interpolated shift has
//!   transfer frequencies up to Nxi/(4 Lxi), which alias under a coarser
//!   y quadrature and add full-magnitude ghost terms to the kernel);
//! - the x-axis quadrature rate 1/dx is at least 2 Lxi, since the kernel
//!   oscillation e^{2 pi i x (xi + y/2)} reaches frequency (xi_i + xi_j)/2
//!   at the matrix corners.

use crate::error::{Error, Result};
use crate::scalar::{cis, cis2pi, Scalar, C};
use crate::symbol::SymbolGrid;
use nalgebra::DMatrix;
use rustfft::FftPlanner;

#[derive(Debug, Clone)]
pub struct MatrixRealization<S> {
    n_xi: usize,
    l_xi: S,
}

impl<S: Scalar + nalgebra::RealField> MatrixRealization<S> {
    pub fn new(n_xi: usize, l_xi: S) -> Result<Self> {
        if n_xi < 2 || !n_xi.is_multiple_of(2) {
            return Err(Error::Domain("n_xi must be even and >= 2".into()));
        }
        if !(l_xi > S::zero()) {
            return Err(Error::Domain("l_xi must be positive".into()));
        }
        Ok(Self { n_xi, l_xi })
    }

    pub fn n_xi(&self) -> usize {
        self.n_xi
    }

    pub fn l_xi(&self) -> S {
        self.l_xi
    }

    pub fn d_xi(&self) -> S {
        self.l_xi * S::two() / S::of(self.n_xi as f64)
    }

    pub fn xi(&self, i: usize) -> S {
        -self.l_xi + self.d_xi() * S::of(i as f64)
    }

    fn freq(&self, k: usize) -> i64 {
        let np = self.n_xi as i64;
        let k = k as i64;
        if k < np / 2 {
            k
        } else {
            k - np
        }
    }

    /// First column of the circulant matrix S_y with (S_y phi)(xi) = phi(xi + y)
    /// under band-limited periodic interpolation: S_y[i][j] = s[(i - j) mod N].
    fn shift_kernel(&self, y: S) -> Vec<C<S>> {
        let n = self.n_xi;
        let period = self.l_xi * S::two();
        let mut buf: Vec<C<S>> = (0..n)
            .map(|k| cis2pi(S::of(self.freq(k) as f64) * y / period))
            .collect();
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(n).process(&mut buf);
        let scale = num_traits::Float::recip(S::of(n as f64));
        for v in &mut buf {
            *v *= scale;
        }
        buf
    }

    /// Matrix of pi_lambda(x, y, t):
    /// (pi phi)(xi) = e^{2 pi i lambda t} e^{2 pi i lambda (x xi + x y / 2)} phi(xi + y).
    pub fn pi_matrix(&self, lambda: S, x: S, y: S, t: S) -> Result<DMatrix<C<S>>> {
        if lambda == S::zero() {
            return Err(Error::Domain("lambda must be nonzero".into()));
        }
        let n = self.n_xi;
        let s = self.shift_kernel(y);
        let global = cis2pi(lambda * t);
        let mut m = DMatrix::from_element(n, n, C::new(S::zero(), S::zero()));
        for i in 0..n {
            let d = global * cis2pi(lambda * (x * self.xi(i) + x * y * S::half()));
            for j in 0..n {
                m[(i, j)] = d * s[(i + n - j) % n];
            }
        }
        Ok(m)
    }

    /// Quadrature realization of W(g) = int g(x, y) pi_1(x, y, 0) dx dy over
    /// the symbol grid (n = 1 only).
    pub fn weyl_matrix(&self, zgrid: &SymbolGrid<S>, sym: &[C<S>]) -> Result<DMatrix<C<S>>> {
        if zgrid.n() != 1 {
            return Err(Error::Domain("matrix oracle supports n = 1 only".into()));
        }
        let n = self.n_xi;
        let nx = zgrid.points(0);
        let ny = zgrid.points(1);
        let cv = zgrid.cell_volume();
        let mut m = DMatrix::from_element(n, n, C::new(S::zero(), S::zero()));
        for iy in 0..ny {
            let y = zgrid.coord(1, iy);
            let s = self.shift_kernel(y);
            for ix in 0..nx {
                let g = sym[ix * ny + iy];
                if g.norm_sqr() == S::zero() {
                    continue;
                }
                let x = zgrid.coord(0, ix);
                let w = g * cv;
                for i in 0..n {
                    let d = w * cis2pi(x * (self.xi(i) + y * S::half()));
                    for j in 0..n {
                        m[(i, j)] += d * s[(i + n - j) % n];
                    }
                }
            }
        }
        Ok(m)
    }
}

/// Frobenius inner product tr(A B*), the matrix-side realization of the
/// B_2 inner product.
pub fn frobenius_inner<S>(a: &DMatrix<C<S>>, b: &DMatrix<C<S>>) -> C<S>
where
    S: Scalar + nalgebra::RealField,
{
    let mut acc = C::new(S::zero(), S::zero());
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x * y.conj();
    }
    acc
}

pub fn matrix_trace<S>(a: &DMatrix<C<S>>) -> C<S>
where
    S: Scalar + nalgebra::RealField,
{
    let mut acc = C::new(S::zero(), S::zero());
    for i in 0..a.nrows().min(a.ncols()) {
        acc += a[(i, i)];
    }
    acc
}

/// Max-norm deviation of A from unitarity.
pub fn unitarity_defect<S: Scalar + nalgebra::RealField>(a: &DMatrix<C<S>>) -> S {
    let n = a.nrows();
    let prod = a.adjoint() * a;
    let mut worst = S::zero();
    for i in 0..n {
        for j in 0..n {
            let target = if i == j {
                C::new(S::one(), S::zero())
            } else {
                C::new(S::zero(), S::zero())
            };
            let d = (prod[(i, j)] - target).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Composition phase of the group law: pi(x1,y1,0) pi(x2,y2,0)
/// = e^{pi i (x2 y1 - x1 y2)} pi(x1+x2, y1+y2, 0) for lambda = 1.
pub fn composition_phase<S: Scalar>(x1: S, y1: S, x2: S, y2: S) -> C<S> {
    cis(S::PI() * (x2 * y1 - x1 * y2))
}
