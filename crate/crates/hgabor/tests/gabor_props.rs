//! Lattice operations on operator fields: modulation, dilation translates,
//! the two transform routes, weight tables, and coefficient synthesis.

use hgabor::gabor::{
    compute_g_klm, compute_g_klm_via_h, ft_lambda, modulate, rho_map, rho_profile, synthesize,
    translate_gabor, weight_table, rho_weighted_norm_sq, GaborIndex,
};
use hgabor::preset::{gauss_gauss, random_alpha, random_operator_field, GaussGaussParams};
use hgabor::rstar::{ft_rstar, SHEETS};
use hgabor::scalar::cis2pi;
use hgabor::{Cplx, GaborParams, OperatorField, RStarGrid, Real, ScalarField, SymbolGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_grids() -> (RStarGrid, SymbolGrid) {
    (
        RStarGrid::new(0.125, 8, 4).unwrap(),
        SymbolGrid::square(1, 8, 2.0).unwrap(),
    )
}

fn params(a: Real, k: i64, l: i64, m: i64, p: i64) -> GaborParams {
    GaborParams {
        a,
        k_max: k,
        l_max: l,
        m_max: m,
        p_max: p,
        s_max: 8,
    }
}

fn test_field(seed: u64) -> OperatorField {
    let (rgrid, zgrid) = small_grids();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_operator_field(&rgrid, &zgrid, &mut rng)
}

#[test]
fn modulate_preserves_norm() {
    let g = test_field(21);
    let n0 = g.norm_sq();
    for idx in params(0.4, 1, 1, 1, 0).family_indices(1) {
        let m = modulate(&g, 0.4, &idx);
        assert!(
            (m.norm_sq() - n0).abs() < 1e-12 * n0,
            "norm drift for {}",
            idx.label()
        );
    }
}

#[test]
fn translate_gabor_composes_and_inverts() {
    let g = test_field(23);
    let fwd = translate_gabor(&g, 2);
    assert!((fwd.norm_sq() - g.norm_sq()).abs() < 1e-14 * g.norm_sq());
    let back = translate_gabor(&fwd, -2);
    assert_eq!(back, g, "translate by p then -p must be the exact identity");
    let two_step = translate_gabor(&translate_gabor(&g, 1), 1);
    assert_eq!(two_step, fwd);
}

/// The lambda-transform of an operator field agrees slice-wise with the
/// scalar transform applied at each fixed z-point.
#[test]
fn ft_lambda_matches_scalar_transform_per_z_point() {
    let g = test_field(25);
    let gd = ft_lambda(&g);
    let rgrid = g.rgrid().clone();
    let n = rgrid.count();
    let nz = g.zgrid().total_points();
    let mut worst: Real = 0.0;
    let mut scale: Real = 0.0;
    for zi in [0usize, nz / 3, nz - 1] {
        let f = ScalarField::from_fn(&rgrid, |s, i| g.slice(s, i)[zi]);
        let ff = ft_rstar(&f);
        for j in 0..SHEETS {
            for r in 0..n {
                worst = worst.max((ff.get(j, r) - gd.slice(j, r)[zi]).norm());
                scale = scale.max(ff.get(j, r).norm());
            }
        }
    }
    assert!(worst < 1e-12 * scale, "worst {worst:.3e}");
}

/// ft(modulate(G)) equals e^{pi i a l.x} ft(H) pointwise on the dual grid.
#[test]
fn transform_routes_agree() {
    let (rgrid, zgrid) = small_grids();
    let mut gp = GaussGaussParams::standard(1);
    gp.sigma_u = 0.7;
    gp.sigma_z = 0.8;
    let g = gauss_gauss(&rgrid, &zgrid, &gp);
    let a = 0.6;
    for idx in params(a, 1, 1, 1, 0).family_indices(1) {
        let via_mod = compute_g_klm(&g, a, &idx);
        let via_h = compute_g_klm_via_h(&g, a, &idx);
        let scale = via_mod
            .values()
            .iter()
            .map(|v| v.norm())
            .fold(0.0, Real::max);
        let worst = via_mod
            .values()
            .iter()
            .zip(via_h.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, Real::max);
        assert!(
            worst < 1e-10 * scale,
            "routes differ by {worst:.3e} for {}",
            idx.label()
        );
    }
}

/// Total mass Delta_t sum_r w(r) of every family equals ||G||^2: modulation
/// is unitary, the transform is Plancherel-exact, and the cell sum with
/// P-fold periodization recovers the full dual sum.
#[test]
fn weight_total_mass_equals_field_norm() {
    let g = test_field(27);
    let n0 = g.norm_sq();
    let wt = weight_table(&g, &params(0.4, 1, 1, 1, 0), 0.5, 1e-10);
    for e in &wt.entries {
        let tm = wt.total_mass(e);
        assert!(
            (tm - n0).abs() < 1e-12 * n0,
            "mass {tm:.6e} vs norm {n0:.6e} for {}",
            e.index.label()
        );
        for &w in &e.w {
            assert!(w >= 0.0);
        }
    }
}

#[test]
fn rho_profile_matches_definition() {
    let alpha = vec![
        Cplx::new(0.3, -0.1),
        Cplx::new(-0.7, 0.2),
        Cplx::new(0.1, 0.9),
    ];
    let p_range = vec![-1i64, 0, 1];
    let m_bins = 8;
    let rho = rho_profile(&alpha, &p_range, m_bins);
    for (r, got) in rho.iter().enumerate() {
        let mut want = Cplx::new(0.0, 0.0);
        for (ai, &p) in alpha.iter().zip(&p_range) {
            want += ai * cis2pi::<Real>(-(p as Real) * r as Real / m_bins as Real);
        }
        assert!((got - want).norm() < 1e-14);
    }
}

/// For a single family the synthesis norm identity
/// ||sum_p alpha_p T_p M G||^2 = Delta_t sum_r |rho(r)|^2 w(r)
/// holds exactly on the grid, with no orthogonality hypothesis.
#[test]
fn single_family_coefficient_isometry() {
    let g = test_field(29);
    let a = 0.4;
    let gp = params(a, 0, 0, 0, 2);
    let wt = weight_table(&g, &gp, 0.5, 1e-10);
    let families = gp.family_indices(1);
    assert_eq!(families.len(), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..5 {
        let alpha = random_alpha(&mut rng, 1, gp.p_range().len());
        let coeffs = rho_map(families.clone(), gp.p_range(), alpha, wt.m_bins);
        let f = synthesize(&coeffs, &g, a);
        let lhs = f.norm_sq();
        let rhs = rho_weighted_norm_sq(&coeffs, &wt);
        assert!(
            (lhs - rhs).abs() < 1e-10 * lhs,
            "lhs {lhs:.8e} rhs {rhs:.8e}"
        );
    }
}

/// Modulation indices compose additively in m: the m-phase is global per
/// lambda, so M_{a(k,l,m)} G = e^{2 pi i lambda a m} M_{a(k,l,0)} G slice-wise.
#[test]
fn m_index_is_a_pure_phase() {
    let g = test_field(33);
    let a = 0.4;
    let idx_m = GaborIndex {
        k: vec![1],
        l: vec![-1],
        m: 2,
    };
    let mut idx_0 = idx_m.clone();
    idx_0.m = 0;
    let with_m = modulate(&g, a, &idx_m);
    let base = modulate(&g, a, &idx_0);
    let rgrid = g.rgrid().clone();
    let mut worst: Real = 0.0;
    for s in 0..SHEETS {
        for i in 0..rgrid.count() {
            let ph = cis2pi::<Real>(rgrid.lambda(s, i) * a * 2.0);
            for (x, y) in with_m.slice(s, i).iter().zip(base.slice(s, i)) {
                worst = worst.max((x - y * ph).norm());
            }
        }
    }
    assert!(worst < 1e-12, "worst {worst:.3e}");
}
