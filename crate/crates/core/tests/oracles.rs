//! Independent-oracle checks: every value asserted here is computed through
//! a route disjoint from the production path it validates (exact rational
//! arithmetic, explicit surface quadrature, radial quadrature, transfer
//! matrices, eigenvalue sums, finite differences).

mod common;

use approx::{assert_abs_diff_eq, assert_relative_eq};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use casimir_core::angular::{
    em_dot_integral, em_translation, scalar_translation, wigner3j, FieldKind, Polarization,
    ScaleSpec, ThreeJArgs,
};
use casimir_core::energy::Configuration;
use casimir_core::kernel::{assemble_block, logdet_one_minus, BlockKind, BlockMatrix, DetSign};
use casimir_core::quad::GaussLegendre;
use casimir_core::specfun::bessel_ik_half_scaled;
use casimir_core::tmatrix::{t_scalar_dielectric, t_scalar_dirichlet, OneDModel, Scatterer};

use common::{dot_conj, sphere_grid, vsh_polarized, wigner3j_exact, ylm};

#[test]
fn wigner3j_matches_exact_rational_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut checked = 0;
    while checked < 400 {
        let j1 = rng.gen_range(0..=20i64);
        let j2 = rng.gen_range(0..=20i64);
        let j3 = rng.gen_range((j1 - j2).abs()..=(j1 + j2).min(20));
        let m1 = rng.gen_range(-j1..=j1);
        let m2 = rng.gen_range(-j2..=j2);
        let m3 = -m1 - m2;
        if m3.abs() > j3 {
            continue;
        }
        let exact = wigner3j_exact(j1, j2, j3, m1, m2, m3);
        let fast = wigner3j(ThreeJArgs {
            j1: j1 as u32,
            j2: j2 as u32,
            j3: j3 as u32,
            m1: m1 as i32,
            m2: m2 as i32,
            m3: m3 as i32,
        });
        assert_abs_diff_eq!(fast, exact, epsilon = 1e-12 * (1.0 + exact.abs()));
        checked += 1;
    }
    // the reference values quoted in the unit tests, rechecked exactly
    assert_relative_eq!(wigner3j_exact(1, 1, 2, 1, -1, 0), 1.0 / 30.0f64.sqrt(), max_relative = 1e-14);
    assert_relative_eq!(wigner3j_exact(1, 1, 0, 0, 0, 0), -1.0 / 3.0f64.sqrt(), max_relative = 1e-14);
}

/// Direct evaluation of the translation sum with the propagator-expansion
/// coefficients computed as surface integrals of spherical-harmonic triple
/// products (no 3j symbols anywhere on this route).
fn scalar_translation_oracle(m: i64, l1: usize, l2: usize, x: f64) -> f64 {
    let grid = sphere_grid(40, 16);
    let row = bessel_ik_half_scaled(l1 + l2, x).unwrap();
    let mut sum = 0.0;
    for lpp in 0..=(l1 + l2) {
        // C(l2, l1, l''; m, m, 0) = 4 pi * integral Y_{l2 m} Y*_{l1 m} Y*_{l'' 0}
        let mut c = Complex64::ZERO;
        for &(theta, phi, w) in &grid {
            c += w * ylm(l2, m, theta, phi) * ylm(l1, m, theta, phi).conj() * ylm(lpp, 0, theta, phi).conj();
        }
        let c = 4.0 * std::f64::consts::PI * c.re;
        let k_factor = (2.0 / (std::f64::consts::PI * x)).sqrt() * row.k_scaled[lpp] * (-x).exp();
        let pole = (((2 * lpp + 1) as f64) / (4.0 * std::f64::consts::PI)).sqrt();
        sum += c * k_factor * pole;
    }
    -sum
}

#[test]
fn scalar_translation_matches_propagator_expansion_oracle() {
    let (m, l0, x) = (1i32, 3usize, 2.0f64);
    let table = scalar_translation(m, l0, x, &ScaleSpec::Unit).unwrap();
    for l1 in 1..=l0 {
        for l2 in 1..=l0 {
            let oracle = scalar_translation_oracle(i64::from(m), l1, l2, x);
            let got = table.entries[(l1 - 1, l2 - 1)];
            assert_abs_diff_eq!(got, oracle, epsilon = 1e-10 * (1.0 + oracle.abs()));
        }
    }
}

/// Numerical surface integration of the vector-harmonic dot products that
/// the closed 3j expressions replace.
fn em_dot_oracle(j1: usize, m1: i64, te1: bool, j2: usize, m2: i64, te2: bool, j3: usize, m3: i64) -> f64 {
    let grid = sphere_grid(40, 16);
    let mut sum = Complex64::ZERO;
    for &(theta, phi, w) in &grid {
        let a = vsh_polarized(te1, j1, m1, theta, phi);
        let b = vsh_polarized(te2, j2, m2, theta, phi);
        sum += w * ylm(j3, m3, theta, phi) * dot_conj(&a, &b);
    }
    assert!(sum.im.abs() < 1e-10, "dot integral should be real, got {sum}");
    sum.re
}

#[test]
fn em_dot_integral_matches_surface_quadrature() {
    use Polarization::*;
    let cases = [
        (1, 0, true, 1, 0, true, 2, 0),
        (1, 0, true, 1, 0, true, 0, 0),
        (1, 1, true, 2, 1, true, 1, 0),
        (1, 0, true, 1, 0, false, 1, 0),
        (2, 1, false, 1, 1, true, 2, 0),
        (2, -1, false, 2, -1, false, 4, 0),
        (1, 1, false, 3, 1, false, 2, 0),
        (2, 0, false, 2, 0, true, 3, 0),
        (1, 1, true, 2, 2, false, 2, -1),
    ];
    for &(j1, m1, te1, j2, m2, te2, j3, m3) in &cases {
        let closed = em_dot_integral(
            j1 as u32,
            m1 as i32,
            if te1 { Te } else { Tm },
            j2 as u32,
            m2 as i32,
            if te2 { Te } else { Tm },
            j3 as u32,
            m3 as i32,
        )
        .unwrap();
        let quadrature = em_dot_oracle(j1, m1, te1, j2, m2, te2, j3, m3);
        assert_abs_diff_eq!(closed, quadrature, epsilon = 1e-8);
    }
    // parity-forbidden combinations vanish on the quadrature side as well
    assert_abs_diff_eq!(em_dot_oracle(1, 0, true, 1, 0, true, 1, 0), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(em_dot_oracle(1, 0, true, 1, 0, false, 2, 0), 0.0, epsilon = 1e-12);
}

#[test]
fn em_translation_matches_brute_force_expansion() {
    // production block against the generic-axis expansion evaluated at the
    // pole with quadrature dot products
    let (m, j0, x) = (1i32, 3usize, 1.5f64);
    let table = em_translation(m, j0, x, &ScaleSpec::Unit).unwrap();
    let row = bessel_ik_half_scaled(2 * j0, x).unwrap();
    let n = 2 * j0;
    for r in 0..n {
        for c in 0..n {
            let (j, te) = (1 + r / 2, r % 2 == 0);
            let (jp, tep) = (1 + c / 2, c % 2 == 0);
            let mut oracle = 0.0;
            for lpp in j.abs_diff(jp)..=(j + jp) {
                let k_factor = row.k_scaled[lpp] * (-x).exp();
                let pref = (32.0 * std::f64::consts::PI / x).sqrt()
                    * ((2 * lpp + 1) as f64 / (4.0 * std::f64::consts::PI)).sqrt();
                oracle += pref * k_factor * em_dot_oracle(j, i64::from(m), te, jp, i64::from(m), tep, lpp, 0);
            }
            let got = table.entries[(r, c)];
            assert_abs_diff_eq!(got, oracle, epsilon = 1e-8 * (1.0 + oracle.abs()));
        }
    }
}

/// First Born approximation of the dielectric T-matrix by direct radial
/// quadrature of the regular wave over the sphere volume.
fn born_t_oracle(l: usize, x: f64, eps: f64) -> f64 {
    let chi = eps - 1.0;
    let rule = GaussLegendre::unit(200);
    let mut integral = 0.0;
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        // radial coordinate s in (0, 1), r = s R, argument x s
        let s = u;
        let arg = x * s;
        let row = bessel_ik_half_scaled(l.max(1), arg).unwrap();
        // modified spherical bessel i_l = sqrt(pi/(2 z)) I_{l+1/2}
        let i_l = (std::f64::consts::PI / (2.0 * arg)).sqrt() * row.i_scaled[l] * arg.exp();
        integral += w * i_l * i_l * s * s;
    }
    chi * x.powi(3) * integral
}

#[test]
fn dielectric_t_matrix_matches_born_series_oracle() {
    let x = 0.7;
    for &(l, eps, tol) in &[(0usize, 1.05, 0.05), (0, 1.005, 0.005), (1, 1.05, 0.05), (2, 1.02, 0.02)] {
        let row = t_scalar_dielectric(l, x, eps).unwrap();
        let exact = row.unscaled(l);
        let born = born_t_oracle(l, x, eps);
        assert_relative_eq!(exact, born, max_relative = tol);
        // the residual is second order in the contrast
        assert!(
            ((exact - born) / born).abs() < 1.2 * (eps - 1.0),
            "Born residual not O(chi^2): exact={exact}, born={born}, eps={eps}"
        );
    }
}

#[test]
fn dielectric_dirichlet_limit_oracle() {
    // the eps -> infinity limit must land on the hard-sphere row
    let (l0, x) = (3, 1.1);
    let dir = t_scalar_dirichlet(l0, x).unwrap();
    let diel = t_scalar_dielectric(l0, x, 1e8).unwrap();
    for l in 0..=l0 {
        assert_relative_eq!(diel.entries[l], dir.entries[l], max_relative = 1e-3);
    }
}

/// Reflection coefficient of a thin square barrier on the imaginary
/// frequency axis, from 2x2 interface matching with complex wave numbers;
/// the delta potential is its zero-width limit at fixed integrated strength.
fn transfer_matrix_reflection(lambda: f64, omega: f64, width: f64) -> f64 {
    let k = Complex64::new(0.0, omega); // Wick-rotated outside wave number
    let v0 = lambda / width;
    let kp = (k * k - v0).sqrt(); // inside wave number
    let r = ((k * k - kp * kp) * (1.0 - (2.0 * Complex64::I * kp * width).exp()))
        / ((k + kp).powi(2) - (k - kp).powi(2) * (2.0 * Complex64::I * kp * width).exp());
    assert!(r.im.abs() < 1e-8, "imaginary-axis reflection should be real, got {r}");
    r.re
}

#[test]
fn delta_reflection_matches_transfer_matrix_oracle() {
    for &(lambda, omega) in &[(1.0, 1.0), (0.5, 2.0), (4.0, 0.3), (100.0, 1.0)] {
        let oracle = transfer_matrix_reflection(lambda, omega, 1e-7);
        let model = OneDModel::DeltaPotential { strength: lambda };
        let closed = casimir_core::tmatrix::reflection_1d(&model, omega);
        assert_relative_eq!(closed, oracle, max_relative = 1e-5);
    }
    // the quoted value -1/3 at lambda = omega = 1
    assert_relative_eq!(transfer_matrix_reflection(1.0, 1.0, 1e-8), -1.0 / 3.0, max_relative = 1e-6);
}

#[test]
fn logdet_matches_eigenvalue_sum_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [3usize, 8, 17] {
        // random symmetric contraction with spectral radius < 1
        let raw = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let sym: DMatrix<f64> = 0.5 * (&raw + raw.transpose());
        let eig = sym.clone().symmetric_eigen();
        let scale = 0.9 / eig.eigenvalues.amax();
        let contraction = sym * scale;
        let block = BlockMatrix {
            m: 0,
            omega: 1.0,
            l0: n - 1,
            min_index: 0,
            field_kind: FieldKind::Scalar,
            kind: BlockKind::FullK,
            entries: contraction.clone(),
        };
        let ld = logdet_one_minus(&block, DetSign::Plus).unwrap();
        let oracle: f64 = contraction
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|&l| (1.0 - l).ln())
            .sum();
        assert_abs_diff_eq!(ld, oracle, epsilon = 1e-10);
    }
}

#[test]
fn dilute_block_matches_term_by_term_born_construction() {
    // replace every T element by its first Born value and rebuild the block
    let eps = 1.01;
    let cfg = Configuration::two_body(
        FieldKind::Scalar,
        Scatterer::ScalarDielectricSphere { radius: 1.0, epsilon: eps },
        Scatterer::ScalarDielectricSphere { radius: 1.0, epsilon: eps },
        3.0,
    )
    .unwrap();
    let (m, omega, l0) = (0, 0.8, 3);
    let block = assemble_block(&cfg, m, omega, l0).unwrap();

    let x = omega; // radius 1, r_ref 1
    let g = scalar_translation(m, l0, cfg.a * omega, &ScaleSpec::Unit).unwrap();
    let n = l0 + 1;
    let mut born = DMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let mut sum = 0.0;
            for s in 0..n {
                sum += g.entries[(r, s)] * born_t_oracle(s, x, eps) * g.entries[(s, c)];
            }
            born[(r, c)] = sum * born_t_oracle(c, x, eps);
        }
    }
    // the production block is stored in renormalized form K~ = D K D^{-1};
    // apply the same similarity to the Born build before comparing
    let lz = casimir_core::angular::dirichlet_log_scale(l0, x).unwrap();
    for r in 0..n {
        for c in 0..n {
            let expect = born[(r, c)] * (lz[r] - lz[c]).exp();
            assert_abs_diff_eq!(block.entries[(r, c)], expect, epsilon = 0.03 * expect.abs() + 1e-18);
        }
    }
}

#[test]
fn renormalization_leaves_the_determinant_invariant() {
    // unit-scaled assembly from public parts vs the production block
    let cfg = Configuration::two_body(
        FieldKind::Scalar,
        Scatterer::ScalarDirichletSphere { radius: 1.0 },
        Scatterer::ScalarDirichletSphere { radius: 0.6 },
        2.4,
    )
    .unwrap();
    for &(m, omega, l0) in &[(0i32, 0.7f64, 3usize), (1, 1.2, 4), (2, 0.4, 3)] {
        let production = assemble_block(&cfg, m, omega, l0).unwrap();
        let ld = logdet_one_minus(&production, DetSign::Plus).unwrap();

        let lmin = m.unsigned_abs() as usize;
        let g = scalar_translation(m, l0, cfg.a * omega, &ScaleSpec::Unit).unwrap();
        let t_a = t_scalar_dirichlet(l0, omega * 1.0).unwrap();
        let t_b = t_scalar_dirichlet(l0, omega * 0.6).unwrap();
        let n = l0 - lmin + 1;
        let mut k = DMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let mut sum = 0.0;
                for s in 0..n {
                    sum += g.entries[(r, s)] * t_a.unscaled(s + lmin) * g.entries[(s, c)];
                }
                k[(r, c)] = sum * t_b.unscaled(c + lmin);
            }
        }
        let unit_block = BlockMatrix {
            m,
            omega,
            l0,
            min_index: lmin,
            field_kind: FieldKind::Scalar,
            kind: BlockKind::FullK,
            entries: k,
        };
        let ld_unit = logdet_one_minus(&unit_block, DetSign::Plus).unwrap();
        assert_abs_diff_eq!(ld, ld_unit, epsilon = 1e-10);
    }
}

#[test]
fn vector_harmonics_are_orthonormal_on_the_grid() {
    // sanity of the oracle machinery itself
    let grid = sphere_grid(30, 12);
    for &(j, m, te) in &[(1usize, 0i64, true), (1, 0, false), (2, 1, true), (2, -2, false), (3, 2, false)] {
        let mut norm = Complex64::ZERO;
        for &(theta, phi, w) in &grid {
            let v = vsh_polarized(te, j, m, theta, phi);
            norm += w * dot_conj(&v, &v);
        }
        assert_abs_diff_eq!(norm.re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(norm.im, 0.0, epsilon = 1e-12);
    }
}
