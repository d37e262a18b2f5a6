//! Symbol-domain operator calculus: band-limited shifts, twisted translation
//! composition, trace evaluation, and the independent matrix realization.

use hgabor::oracle::{frobenius_inner, matrix_trace, unitarity_defect, MatrixRealization};
use hgabor::symbol::{
    band_limited_shift, eval_symbol, hs_inner, sym_norm_sq, trace_pi_weyl, twisted_translate,
};
use hgabor::{Cplx, Real, SymbolGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gauss_bump(zgrid: &SymbolGrid, cx: f64, cy: f64, sx: f64, sy: f64, amp: Cplx) -> Vec<Cplx> {
    let mut out = vec![Cplx::new(0.0, 0.0); zgrid.total_points()];
    let mut ids = [0usize; 2];
    for (zi, v) in out.iter_mut().enumerate() {
        zgrid.unflatten(zi, &mut ids);
        let dx = (zgrid.coord(0, ids[0]) - cx) / sx;
        let dy = (zgrid.coord(1, ids[1]) - cy) / sy;
        *v = amp * (-std::f64::consts::PI * (dx * dx + dy * dy)).exp();
    }
    out
}

fn random_bumps(zgrid: &SymbolGrid, rng: &mut ChaCha8Rng) -> Vec<Cplx> {
    let mut out = vec![Cplx::new(0.0, 0.0); zgrid.total_points()];
    for _ in 0..2 {
        let b = gauss_bump(
            zgrid,
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(0.6..0.9),
            rng.gen_range(0.6..0.9),
            Cplx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        );
        for (o, v) in out.iter_mut().zip(b) {
            *o += v;
        }
    }
    out
}

#[test]
fn band_limited_shift_is_unitary_and_composes() {
    let zgrid = SymbolGrid::square(1, 32, 4.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let sym = random_bumps(&zgrid, &mut rng);
    let n0 = sym_norm_sq(&zgrid, &sym);
    let s1 = [0.37, -0.81];
    let s2 = [-0.52, 0.19];
    let once = band_limited_shift(&zgrid, &sym, &s1);
    assert!((sym_norm_sq(&zgrid, &once) - n0).abs() < 1e-12 * n0);
    let twice = band_limited_shift(&zgrid, &once, &s2);
    let direct = band_limited_shift(&zgrid, &sym, &[s1[0] + s2[0], s1[1] + s2[1]]);
    let worst = twice
        .iter()
        .zip(&direct)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, Real::max);
    assert!(worst < 1e-12, "worst {worst:.3e}");
}

#[test]
fn grid_step_shift_is_exact_rotation() {
    let zgrid = SymbolGrid::square(1, 16, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sym = random_bumps(&zgrid, &mut rng);
    let step = zgrid.step(1);
    let shifted = band_limited_shift(&zgrid, &sym, &[0.0, 3.0 * step]);
    let ny = zgrid.points(1);
    let mut worst: Real = 0.0;
    for ix in 0..zgrid.points(0) {
        for iy in 0..ny {
            let src = sym[ix * ny + (iy + ny - 3) % ny];
            worst = worst.max((shifted[ix * ny + iy] - src).norm());
        }
    }
    assert!(worst < 1e-12, "worst {worst:.3e}");
}

#[test]
fn eval_symbol_interpolates_grid_samples() {
    let zgrid = SymbolGrid::square(1, 16, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let sym = random_bumps(&zgrid, &mut rng);
    let mut worst: Real = 0.0;
    for &(ix, iy) in &[(0usize, 0usize), (3, 11), (8, 8), (15, 2)] {
        let p = [zgrid.coord(0, ix), zgrid.coord(1, iy)];
        let v = eval_symbol(&zgrid, &sym, &p);
        worst = worst.max((v - sym[ix * zgrid.points(1) + iy]).norm());
    }
    assert!(worst < 1e-12, "worst {worst:.3e}");
}

/// twisted_translate(twisted_translate(g, u, v), u', v')
/// = e^{pi i (u v' - v u')} twisted_translate(g, u + u', v + v').
#[test]
fn twisted_translate_composition_law() {
    let zgrid = SymbolGrid::square(1, 64, 4.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let sym = random_bumps(&zgrid, &mut rng);
        let (u, v) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let (up, vp) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let lhs = twisted_translate(&zgrid, &twisted_translate(&zgrid, &sym, &[u], &[v]), &[up], &[vp]);
        let mut rhs = twisted_translate(&zgrid, &sym, &[u + up], &[v + vp]);
        let phase = Cplx::new(0.0, std::f64::consts::PI * (u * vp - v * up)).exp();
        for w in &mut rhs {
            *w *= phase;
        }
        let scale = sym_norm_sq(&zgrid, &sym).sqrt();
        let err = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<Real>()
            .sqrt()
            * zgrid.cell_volume().sqrt();
        assert!(err < 1e-8 * scale, "err {err:.3e}");
    }
}

#[test]
fn twisted_translate_preserves_hs_norm() {
    let zgrid = SymbolGrid::square(1, 32, 4.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let sym = random_bumps(&zgrid, &mut rng);
    let n0 = sym_norm_sq(&zgrid, &sym);
    let t = twisted_translate(&zgrid, &sym, &[0.63], &[-0.29]);
    assert!((sym_norm_sq(&zgrid, &t) - n0).abs() < 1e-12 * n0);
}

#[test]
fn trace_at_origin_is_symbol_value() {
    let zgrid = SymbolGrid::square(1, 32, 4.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let sym = random_bumps(&zgrid, &mut rng);
    let tr = trace_pi_weyl(&zgrid, &sym, &[0.0, 0.0]);
    // The origin is a grid point (index nz/2 on each axis).
    let n2 = zgrid.points(0) / 2;
    let want = sym[n2 * zgrid.points(1) + n2];
    assert!((tr - want).norm() < 1e-12);
}

#[test]
fn pi_matrix_identity_t_phase_and_adjoint() {
    let oracle = MatrixRealization::<Real>::new(64, 4.0).unwrap();
    let id = oracle.pi_matrix(1.0, 0.0, 0.0, 0.0).unwrap();
    let mut worst: Real = 0.0;
    for i in 0..64 {
        for j in 0..64 {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((id[(i, j)] - Cplx::new(want, 0.0)).norm());
        }
    }
    assert!(worst < 1e-12, "identity defect {worst:.3e}");

    // t-dependence is the global phase e^{2 pi i lambda t}.
    let a = oracle.pi_matrix(0.7, 0.3, 0.25, 0.9).unwrap();
    let b = oracle.pi_matrix(0.7, 0.3, 0.25, 0.0).unwrap();
    let phase = Cplx::new(0.0, 2.0 * std::f64::consts::PI * 0.7 * 0.9).exp();
    let d = (&a - &b.map(|v| v * phase)).norm();
    assert!(d < 1e-12 * b.norm());

    // pi(u, v)* = pi(-u, -v). On the sample space this holds exactly when
    // lambda * u is a multiple of 1/(2 l_xi) (the modulation is then an exact
    // grid Fourier mode) and v is a multiple of d_xi (the shift is an exact
    // rotation), so shift and modulation commute up to the expected phase.
    let p = oracle.pi_matrix(1.0, 0.375, 0.25, 0.0).unwrap();
    let q = oracle.pi_matrix(1.0, -0.375, -0.25, 0.0).unwrap();
    let d = (p.adjoint() - &q).norm();
    assert!(d < 1e-10 * q.norm(), "adjoint defect {d:.3e}");
    assert!(unitarity_defect(&p) < 1e-8);
}

/// Frobenius norm of the Weyl matrix realizes the symbol L^2 norm on
/// coupled grids (y step equal to the xi step, x rate covering the band).
#[test]
fn weyl_matrix_isometry_for_centered_gaussian() {
    let zgrid = SymbolGrid::square(1, 64, 2.0).unwrap();
    let oracle = MatrixRealization::<Real>::new(128, 4.0).unwrap();
    let sym = gauss_bump(&zgrid, 0.0, 0.0, 0.7, 0.7, Cplx::new(1.0, 0.0));
    let m = oracle.weyl_matrix(&zgrid, &sym).unwrap();
    let fr = frobenius_inner(&m, &m).re;
    let l2 = sym_norm_sq(&zgrid, &sym);
    assert!((fr - l2).abs() < 1e-3 * l2, "fr {fr:.6e} vs l2 {l2:.6e}");

    // Inversion round-trip: the trace against pi recovers the symbol.
    let w = [0.25, -0.375];
    let tr_sym = trace_pi_weyl(&zgrid, &sym, &w);
    let pi = oracle.pi_matrix(1.0, w[0], w[1], 0.0).unwrap();
    let tr_mat = matrix_trace(&(pi * m));
    assert!(
        (tr_sym - tr_mat).norm() < 1e-3 * tr_sym.norm().max(1e-3),
        "tr {tr_sym:?} vs {tr_mat:?}"
    );
}

#[test]
fn zero_symbol_gives_zero_matrix_and_linearity() {
    let zgrid = SymbolGrid::square(1, 32, 2.0).unwrap();
    let oracle = MatrixRealization::<Real>::new(64, 4.0).unwrap();
    let zero = vec![Cplx::new(0.0, 0.0); zgrid.total_points()];
    let m = oracle.weyl_matrix(&zgrid, &zero).unwrap();
    assert!(m.norm() == 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let s1 = random_bumps(&zgrid, &mut rng);
    let s2 = random_bumps(&zgrid, &mut rng);
    let c = Cplx::new(0.7, -0.2);
    let sum: Vec<Cplx> = s1.iter().zip(&s2).map(|(a, b)| a + b * c).collect();
    let m_sum = oracle.weyl_matrix(&zgrid, &sum).unwrap();
    let m1 = oracle.weyl_matrix(&zgrid, &s1).unwrap();
    let m2 = oracle.weyl_matrix(&zgrid, &s2).unwrap();
    let d = (&m_sum - &(m1 + m2.map(|v| v * c))).norm();
    assert!(d < 1e-10 * m_sum.norm());
}

#[test]
fn hs_inner_is_sesquilinear_cell_weighted_sum() {
    let zgrid = SymbolGrid::new(1, vec![8, 12], vec![1.0, 3.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let s1 = random_bumps(&zgrid, &mut rng);
    let s2 = random_bumps(&zgrid, &mut rng);
    let mut acc = Cplx::new(0.0, 0.0);
    for (a, b) in s1.iter().zip(&s2) {
        acc += a * b.conj();
    }
    let want = acc * zgrid.step(0) * zgrid.step(1);
    assert!((hs_inner(&zgrid, &s1, &s2) - want).norm() < 1e-14);
}
