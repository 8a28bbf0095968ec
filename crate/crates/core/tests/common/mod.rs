//! Shared oracle machinery for the integration tests: exact rational Wigner
//! 3j evaluation, explicit (vector) spherical harmonics, and angular
//! quadrature grids. Everything here is independent of the library's
//! production evaluation paths.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use casimir_core::quad::GaussLegendre;

fn factorial_big(n: i64) -> BigInt {
    assert!(n >= 0);
    let mut out = BigInt::one();
    for k in 2..=n {
        out *= k;
    }
    out
}

/// Convert a (possibly huge) exact rational to f64 by truncating both sides
/// to their leading bits; relative error is far below f64 resolution.
fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let nbits = r.numer().bits();
    let dbits = r.denom().bits();
    let shift = nbits.max(dbits).saturating_sub(400);
    let n = (r.numer() >> shift).to_f64().unwrap();
    let d = (r.denom() >> shift).to_f64().unwrap();
    n / d
}

/// Wigner 3j symbol through the Racah sum carried out in exact big-integer
/// rational arithmetic; only the final square root is floating point.
pub fn wigner3j_exact(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    if m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    if m1 + m2 + m3 != 0 {
        return 0.0;
    }
    if j3 > j1 + j2 || j3 < (j1 - j2).abs() {
        return 0.0;
    }
    let delta = BigRational::new(
        factorial_big(j1 + j2 - j3) * factorial_big(j1 - j2 + j3) * factorial_big(-j1 + j2 + j3),
        factorial_big(j1 + j2 + j3 + 1),
    );
    let product = BigRational::from_integer(
        factorial_big(j1 + m1)
            * factorial_big(j1 - m1)
            * factorial_big(j2 + m2)
            * factorial_big(j2 - m2)
            * factorial_big(j3 + m3)
            * factorial_big(j3 - m3),
    );
    let t_min = 0.max(j2 - j3 - m1).max(j1 + m2 - j3);
    let t_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut series = BigRational::zero();
    for t in t_min..=t_max {
        let den = factorial_big(t)
            * factorial_big(j1 + j2 - j3 - t)
            * factorial_big(j1 - m1 - t)
            * factorial_big(j2 + m2 - t)
            * factorial_big(j3 - j2 + m1 + t)
            * factorial_big(j3 - j1 - m2 + t);
        let term = BigRational::new(BigInt::one(), den);
        if t % 2 == 0 {
            series += term;
        } else {
            series -= term;
        }
    }
    if series.is_zero() {
        return 0.0;
    }
    let squared = delta * product * &series * &series;
    let magnitude = ratio_to_f64(&squared).sqrt();
    let mut sign = if series.is_negative() { -1.0 } else { 1.0 };
    if (j1 - j2 - m3).rem_euclid(2) == 1 {
        sign = -sign;
    }
    sign * magnitude
}

/// Clebsch-Gordan coefficient `<l ml; 1 q | j m>` from the exact 3j.
fn clebsch_gordan_l1(l: i64, ml: i64, q: i64, j: i64, m: i64) -> f64 {
    let phase = if (l - 1 + m).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * ((2 * j + 1) as f64).sqrt() * wigner3j_exact(l, 1, j, ml, q, -m)
}

fn assoc_legendre(l: usize, m: usize, u: f64) -> f64 {
    // P_l^m without the Condon-Shortley phase (applied in ylm)
    debug_assert!(m <= l);
    let somx2 = ((1.0 - u) * (1.0 + u)).max(0.0).sqrt();
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= (2 * k - 1) as f64 * somx2;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = pmm;
    let mut p = u * (2 * m + 1) as f64 * pmm;
    for ll in (m + 2)..=l {
        let pn = ((2 * ll - 1) as f64 * u * p - (ll + m - 1) as f64 * pm1) / (ll - m) as f64;
        pm1 = p;
        p = pn;
    }
    p
}

/// Complex spherical harmonic with the Condon-Shortley phase.
pub fn ylm(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs() as usize;
    assert!(am <= l);
    let mut ln_norm = 0.5 * (((2 * l + 1) as f64) / (4.0 * std::f64::consts::PI)).ln();
    for k in (l - am + 1)..=(l + am) {
        ln_norm -= 0.5 * (k as f64).ln();
    }
    let norm = ln_norm.exp();
    let p = assoc_legendre(l, am, theta.cos());
    let phase = Complex64::from_polar(1.0, m as f64 * phi);
    // Y_{l,m>=0} carries (-1)^m; Y_{l,-m} = (-1)^m conj(Y_{l,m})
    let cs = if am % 2 == 1 && m >= 0 { -1.0 } else { 1.0 };
    cs * norm * p * phase
}

/// Vector spherical harmonic `Yvec_{j l m}` in the spherical basis
/// `(e_-1, e_0, e_+1)`; components returned in that order.
pub fn vsh(j: usize, l: usize, m: i64, theta: f64, phi: f64) -> [Complex64; 3] {
    let mut out = [Complex64::ZERO; 3];
    for (idx, q) in [-1i64, 0, 1].into_iter().enumerate() {
        let ml = m - q;
        if ml.unsigned_abs() as usize > l {
            continue;
        }
        let cg = clebsch_gordan_l1(l as i64, ml, q, j as i64, m);
        if cg != 0.0 {
            out[idx] = cg * ylm(l, ml, theta, phi);
        }
    }
    out
}

/// TE (magnetic) or TM (electric) multipole angular function.
pub fn vsh_polarized(te: bool, j: usize, m: i64, theta: f64, phi: f64) -> [Complex64; 3] {
    if te {
        vsh(j, j, m, theta, phi)
    } else {
        let jf = j as f64;
        let ca = ((jf + 1.0) / (2.0 * jf + 1.0)).sqrt();
        let cb = (jf / (2.0 * jf + 1.0)).sqrt();
        let a = vsh(j, j - 1, m, theta, phi);
        let b = vsh(j, j + 1, m, theta, phi);
        [ca * a[0] + cb * b[0], ca * a[1] + cb * b[1], ca * a[2] + cb * b[2]]
    }
}

/// Hermitian dot product `A* . B` of two fields in the spherical basis.
pub fn dot_conj(a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

/// Product quadrature grid over the sphere, exact for integrands band-limited
/// below the node counts: Gauss-Legendre in cos(theta), uniform in phi.
pub fn sphere_grid(n_theta: usize, n_phi: usize) -> Vec<(f64, f64, f64)> {
    let rule = GaussLegendre::unit(n_theta);
    let mut grid = Vec::with_capacity(n_theta * n_phi);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let u = 2.0 * x - 1.0;
        let theta = u.acos();
        let wu = 2.0 * w;
        for k in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
            grid.push((theta, phi, wu * 2.0 * std::f64::consts::PI / n_phi as f64));
        }
    }
    grid
}
