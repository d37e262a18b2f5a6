//! Classification logic, Gram-matrix oracle, Bessel bounds, and the
//! orthogonality-hypothesis residual.

use hgabor::analysis::{
    analysis_energy_direct, analysis_energy_from_rho, bessel_b1, bessel_b2, bessel_bound,
    boundary_mass_fractions, classify_frame, classify_orthonormal, classify_parseval,
    classify_riesz, compute_family_duals, frame_bounds_from_w, gram_entry_from_w,
    gram_eigenvalues, gram_matrix, nonzero_eigenvalues, orthogonality_residual,
    riesz_bounds_from_w, FamilyDuals,
};
use hgabor::error::Error;
use hgabor::gabor::{
    compute_g_klm, rho_map, synthesize, weight_table, GaborIndex, WeightEntry, WeightTable,
};
use hgabor::preset::{gauss_gauss, random_alpha, random_operator_field, GaussGaussParams};
use hgabor::{GaborParams, OperatorField, RStarGrid, Real, SymbolGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn entry(k: i64, w: Vec<Real>) -> WeightEntry<Real> {
    let wmax = w.iter().cloned().fold(0.0, Real::max);
    let omega = w.iter().map(|&x| x > wmax * 1e-10).collect();
    WeightEntry {
        index: GaborIndex {
            k: vec![k],
            l: vec![0],
            m: 0,
        },
        w,
        omega,
    }
}

fn table(b: Real, entries: Vec<WeightEntry<Real>>) -> WeightTable<Real> {
    let m_bins = entries[0].w.len();
    WeightTable {
        m_bins,
        b,
        delta_t: 0.25,
        c_j: 0.5,
        entries,
    }
}

#[test]
fn constant_weight_b_classifies_orthonormal() {
    let b = 0.5;
    let wt = table(b, vec![entry(0, vec![b; 8]), entry(1, vec![b; 8])]);
    assert!(classify_orthonormal(&wt, 1e-10).flag);
    assert!(classify_parseval(&wt, 1e-10).flag);
    assert_eq!(frame_bounds_from_w(&wt), Some((1.0, 1.0)));
    assert_eq!(riesz_bounds_from_w(&wt), Some((1.0, 1.0)));
    assert!(classify_frame(&wt));
    assert!(classify_riesz(&wt));
}

#[test]
fn varying_positive_weight_is_frame_and_riesz_only() {
    let b = 0.5;
    let wt = table(b, vec![entry(0, vec![0.25, 1.0, 0.5, 0.75])]);
    assert!(!classify_orthonormal(&wt, 1e-6).flag);
    assert!(!classify_parseval(&wt, 1e-6).flag);
    let (lo, hi) = frame_bounds_from_w(&wt).unwrap();
    assert!((lo - 0.5).abs() < 1e-14 && (hi - 2.0).abs() < 1e-14);
    assert!(classify_frame(&wt));
    assert!(classify_riesz(&wt));
}

#[test]
fn vanishing_weight_bins_break_riesz_but_not_frame() {
    let b = 0.5;
    // Parseval on its support: w = b where it does not vanish.
    let wt = table(b, vec![entry(0, vec![b, 0.0, b, 0.0])]);
    assert!(!classify_orthonormal(&wt, 1e-6).flag);
    assert!(classify_parseval(&wt, 1e-10).flag);
    assert_eq!(frame_bounds_from_w(&wt), Some((1.0, 1.0)));
    assert!(classify_frame(&wt));
    let (rlo, _) = riesz_bounds_from_w(&wt).unwrap();
    assert_eq!(rlo, 0.0);
    assert!(!classify_riesz(&wt));
}

fn small_field(seed: u64) -> OperatorField {
    let rgrid = RStarGrid::new(0.125, 8, 4).unwrap();
    let zgrid = SymbolGrid::square(1, 8, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_operator_field(&rgrid, &zgrid, &mut rng)
}

/// Same-family Gram entries are always the circulant sums
/// Delta_t sum_r e^{2 pi i dp r / M} w(r), with no hypothesis on the window.
#[test]
fn gram_same_family_blocks_match_weight_formula() {
    let g = small_field(41);
    let gp = GaborParams {
        a: 0.4,
        k_max: 1,
        l_max: 0,
        m_max: 0,
        p_max: 1,
        s_max: 8,
    };
    let gm = gram_matrix(&g, &gp).unwrap();
    assert!(gm.hermitian_residual() < 1e-12);
    let wt = weight_table(&g, &gp, 0.5, 1e-10);
    let n0 = g.norm_sq();
    let nm = gm.members.len();
    let mut worst: Real = 0.0;
    for i in 0..nm {
        let d = (gm.mat[(i, i)].re - n0).abs();
        assert!(d < 1e-10 * n0, "diagonal {d:.3e}");
        for j in 0..nm {
            if gm.members[i].0 != gm.members[j].0 {
                continue;
            }
            let e = wt
                .entries
                .iter()
                .find(|e| e.index == gm.members[i].0)
                .unwrap();
            let want = gram_entry_from_w(&e.w, wt.delta_t, gm.members[j].1 - gm.members[i].1);
            worst = worst.max((gm.mat[(i, j)] - want).norm());
        }
    }
    assert!(worst < 1e-10 * n0, "worst {worst:.3e}");
}

#[test]
fn gram_eigenvalues_sorted_and_trace_consistent() {
    let g = small_field(43);
    let gp = GaborParams {
        a: 0.4,
        k_max: 0,
        l_max: 1,
        m_max: 0,
        p_max: 1,
        s_max: 8,
    };
    let gm = gram_matrix(&g, &gp).unwrap();
    let eigs = gram_eigenvalues(&gm);
    assert!(eigs.windows(2).all(|w| w[0] <= w[1]));
    let trace: Real = (0..gm.mat.nrows()).map(|i| gm.mat[(i, i)].re).sum();
    let sum: Real = eigs.iter().sum();
    assert!((trace - sum).abs() < 1e-10 * trace.abs().max(1.0));
}

#[test]
fn nonzero_eigenvalue_filter_uses_relative_threshold() {
    let eigs = vec![1e-12, 1e-5, 0.5, 1.0];
    let kept = nonzero_eigenvalues(&eigs, 1e-8);
    assert_eq!(kept, vec![1e-5, 0.5, 1.0]);
    let kept = nonzero_eigenvalues(&eigs, 1e-4);
    assert_eq!(kept, vec![0.5, 1.0]);
}

/// With the translation range covering a full period of the cell phases,
/// the direct analysis energy matches the rho-weighted route exactly.
#[test]
fn analysis_energy_routes_agree_on_full_period() {
    let rgrid = RStarGrid::new(0.1, 5, 5).unwrap();
    let zgrid = SymbolGrid::square(1, 8, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let g = random_operator_field(&rgrid, &zgrid, &mut rng);
    let gp = GaborParams {
        a: 0.4,
        k_max: 0,
        l_max: 0,
        m_max: 0,
        p_max: 2,
        s_max: 8,
    };
    let wt = weight_table(&g, &gp, 0.5, 1e-10);
    let families = gp.family_indices(1);
    let alpha = random_alpha(&mut rng, 1, gp.p_range().len());
    let coeffs = rho_map(families, gp.p_range(), alpha, wt.m_bins);
    let f = synthesize(&coeffs, &g, gp.a);
    let direct = analysis_energy_direct(&f, &g, &gp).unwrap();
    let from_rho = analysis_energy_from_rho(&coeffs, &wt);
    for ((ia, ea), (ib, eb)) in direct.iter().zip(&from_rho) {
        assert_eq!(ia, ib);
        assert!(
            (ea - eb).abs() < 1e-10 * ea.max(1e-12),
            "direct {ea:.8e} vs rho {eb:.8e}"
        );
    }
}

#[test]
fn orthogonality_residual_flags_identical_and_clears_disjoint() {
    let g = small_field(47);
    let gd = compute_g_klm(&g, 0.4, &GaborIndex::zero(1));
    let dup = FamilyDuals {
        indices: vec![GaborIndex::zero(1), GaborIndex::zero(1)],
        fields: vec![gd.clone(), gd.clone()],
    };
    assert!(orthogonality_residual(&dup) > 0.9);

    // Disjoint z-supports give a zero residual: keep complementary halves
    // of every slice in the two copies.
    let mut a = dup.fields[0].clone();
    let mut b = dup.fields[1].clone();
    let nz = a.zgrid().total_points();
    let n = a.rgrid().count();
    for j in 0..2 {
        for r in 0..n {
            for zi in 0..nz {
                if zi < nz / 2 {
                    b.slice_mut(j, r)[zi] *= 0.0;
                } else {
                    a.slice_mut(j, r)[zi] *= 0.0;
                }
            }
        }
    }
    let dis = FamilyDuals {
        indices: vec![GaborIndex::zero(1), GaborIndex::zero(1)],
        fields: vec![a, b],
    };
    assert!(orthogonality_residual(&dis) < 1e-14);
}

#[test]
fn bessel_guard_refuses_then_force_overrides() {
    let rgrid = RStarGrid::new(0.125, 8, 4).unwrap();
    let zgrid = SymbolGrid::square(1, 8, 2.0).unwrap();
    let mut gp = GaussGaussParams::standard(1);
    gp.sigma_u = 0.7;
    let g = gauss_gauss(&rgrid, &zgrid, &gp);
    let params = GaborParams {
        a: 0.4,
        k_max: 0,
        l_max: 0,
        m_max: 0,
        p_max: 1,
        s_max: 8,
    };
    let fd = compute_family_duals(&g, &params);
    match bessel_b2(&fd, 1, 10.0, false) {
        Err(Error::ResourceGuard(_)) => {}
        other => panic!("expected resource guard, got {other:?}"),
    }
    let forced = bessel_b2(&fd, 1, 10.0, true).unwrap();
    assert!(forced.b2 >= 0.0);
    let b1 = bessel_b1(&fd);
    assert!(b1 > 0.0);
    let bound = bessel_bound(b1, forced.b2, rgrid.b());
    assert!((bound - (2.0 * b1 + forced.b2) / rgrid.b()).abs() < 1e-15);

    // The empirical ratio of any synthesized vector respects the bound.
    let mut rng = ChaCha8Rng::seed_from_u64(49);
    let families = params.family_indices(1);
    let alpha = random_alpha(&mut rng, families.len(), params.p_range().len());
    let coeffs = rho_map(
        families,
        params.p_range(),
        alpha,
        rgrid.bins_per_period(),
    );
    let f = synthesize(&coeffs, &g, params.a);
    let ratio = hgabor::analysis::bessel_empirical_ratio(&f, &g, &params).unwrap();
    assert!(
        ratio <= bound * (1.0 + 1e-10),
        "ratio {ratio:.6e} vs bound {bound:.6e}"
    );
}

#[test]
fn boundary_mass_small_for_concentrated_field() {
    let rgrid = RStarGrid::new(0.125, 16, 8).unwrap();
    let zgrid = SymbolGrid::square(1, 16, 4.0).unwrap();
    let mut gp = GaussGaussParams::standard(1);
    gp.sigma_u = 0.5;
    gp.sigma_z = 0.5;
    let g = gauss_gauss(&rgrid, &zgrid, &gp);
    for frac in boundary_mass_fractions(&g) {
        assert!(frac < 1e-6, "boundary fraction {frac:.3e}");
    }
}
