//! Wigner 3j symbols and the multipole translation matrices that expand the
//! free propagator between the two body-centered spherical-wave bases.
//!
//! The separation axis is always mapped onto +z before any matrix is built
//! (energies are rotation invariant), so only the azimuthal-diagonal blocks
//! `g^(m)` appear and all elements are real.

use nalgebra::DMatrix;

use crate::specfun::{bessel_ik_half_log, ln_fact};
use crate::{Error, Result};

/// Which field the translation matrix belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    Em,
}

/// Electromagnetic polarization channel. TE is the magnetic multipole, TM the
/// electric one; for a conducting sphere TE coincides with the scalar
/// Dirichlet channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Te,
    Tm,
}

/// Arguments of a Wigner 3j symbol with integer angular momenta.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThreeJArgs {
    pub j1: u32,
    pub j2: u32,
    pub j3: u32,
    pub m1: i32,
    pub m2: i32,
    pub m3: i32,
}

/// Wigner 3j symbol. Selection-rule failures return exactly 0.0.
pub fn wigner3j(args: ThreeJArgs) -> f64 {
    w3j(
        i64::from(args.j1),
        i64::from(args.j2),
        i64::from(args.j3),
        i64::from(args.m1),
        i64::from(args.m2),
        i64::from(args.m3),
    )
}

pub(crate) fn w3j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    if m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return 0.0;
    }
    if m1 + m2 + m3 != 0 {
        return 0.0;
    }
    if j3 > j1 + j2 || j3 < (j1 - j2).abs() {
        return 0.0;
    }
    if m1 == 0 && m2 == 0 && m3 == 0 {
        return w3j_zero_m(j1, j2, j3);
    }
    // Canonical order: j1 >= j2 >= j3 and m1 > 0 (or m1 == 0, m2 >= 0), so that
    // symmetry-related argument sets evaluate through identical arithmetic.
    let (j1, j2, j3, m1, m2, m3, sign) = reorder(j1, j2, j3, m1, m2, m3, 1.0);
    sign * racah_sum(j1, j2, j3, m1, m2, m3)
}

/// Closed single-term form for all-zero projections; zero for odd total j.
fn w3j_zero_m(j1: i64, j2: i64, j3: i64) -> f64 {
    let total = j1 + j2 + j3;
    if total % 2 != 0 {
        return 0.0;
    }
    let g = total / 2;
    let ln_delta = ln_fact((j1 + j2 - j3) as usize) + ln_fact((j1 - j2 + j3) as usize)
        + ln_fact((-j1 + j2 + j3) as usize)
        - ln_fact((total + 1) as usize);
    let ln_val = 0.5 * ln_delta + ln_fact(g as usize)
        - ln_fact((g - j1) as usize)
        - ln_fact((g - j2) as usize)
        - ln_fact((g - j3) as usize);
    let sign = if g % 2 == 0 { 1.0 } else { -1.0 };
    sign * ln_val.exp()
}

fn reorder(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64, sign: f64) -> (i64, i64, i64, i64, i64, i64, f64) {
    let odd_flip = if (j1 + j2 + j3) % 2 == 0 { 1.0 } else { -1.0 };
    if j1 < j2 {
        reorder(j2, j1, j3, m2, m1, m3, sign * odd_flip)
    } else if j2 < j3 {
        reorder(j1, j3, j2, m1, m3, m2, sign * odd_flip)
    } else if m1 < 0 || (m1 == 0 && m2 < 0) {
        reorder(j1, j2, j3, -m1, -m2, -m3, sign * odd_flip)
    } else {
        (j1, j2, j3, m1, m2, m3, sign)
    }
}

/// Racah single-sum evaluation with log-factorials. The alternating sum is
/// accumulated after factoring out its largest term, with compensated
/// summation for the remainder.
fn racah_sum(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    let ln_delta = ln_fact((j1 + j2 - j3) as usize) + ln_fact((j1 - j2 + j3) as usize)
        + ln_fact((-j1 + j2 + j3) as usize)
        - ln_fact((j1 + j2 + j3 + 1) as usize);
    let ln_pref = 0.5
        * (ln_delta
            + ln_fact((j1 + m1) as usize)
            + ln_fact((j1 - m1) as usize)
            + ln_fact((j2 + m2) as usize)
            + ln_fact((j2 - m2) as usize)
            + ln_fact((j3 + m3) as usize)
            + ln_fact((j3 - m3) as usize));

    let t_min = 0.max(j2 - j3 - m1).max(j1 + m2 - j3);
    let t_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    debug_assert!(t_min <= t_max);

    let mut ln_terms = Vec::with_capacity((t_max - t_min + 1) as usize);
    let mut ln_max = f64::NEG_INFINITY;
    for t in t_min..=t_max {
        let ln_den = ln_fact(t as usize)
            + ln_fact((j1 + j2 - j3 - t) as usize)
            + ln_fact((j1 - m1 - t) as usize)
            + ln_fact((j2 + m2 - t) as usize)
            + ln_fact((j3 - j2 + m1 + t) as usize)
            + ln_fact((j3 - j1 - m2 + t) as usize);
        let e = ln_pref - ln_den;
        ln_max = ln_max.max(e);
        ln_terms.push(e);
    }
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for (k, e) in ln_terms.iter().enumerate() {
        let t = t_min + k as i64;
        let term = if t % 2 == 0 { (e - ln_max).exp() } else { -(e - ln_max).exp() };
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    let phase = if (j1 - j2 - m3).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * sum * ln_max.exp()
}

/// Renormalization applied to a translation matrix: each entry `g_{mu nu}` is
/// multiplied by `exp(row[mu] + col[nu])`, where the vectors hold `ln z` per
/// absolute index (`l` for scalar, `j` for EM). The determinant of the
/// assembled operator is invariant under this similarity rescaling.
#[derive(Debug, Clone)]
pub enum ScaleSpec {
    /// Raw (unrenormalized) elements; safe only for small arguments and orders.
    Unit,
    LogZ { row: Vec<f64>, col: Vec<f64> },
}

impl ScaleSpec {
    fn log_row(&self, idx: usize) -> f64 {
        match self {
            ScaleSpec::Unit => 0.0,
            ScaleSpec::LogZ { row, .. } => row[idx],
        }
    }
    fn log_col(&self, idx: usize) -> f64 {
        match self {
            ScaleSpec::Unit => 0.0,
            ScaleSpec::LogZ { col, .. } => col[idx],
        }
    }
}

/// Per-body scale factors `ln z_l` with `z_l = sqrt(I_{l+1/2}(x) / K_{l+1/2}(x))`
/// at `x = omega R`. This choice makes the renormalized Dirichlet T-matrix
/// exactly `pi/2` in magnitude at every order, the best-conditioned
/// normalization of the kernel.
pub fn dirichlet_log_scale(l_max: usize, x: f64) -> Result<Vec<f64>> {
    let row = bessel_ik_half_log(l_max, x)?;
    Ok((0..=l_max).map(|l| x + 0.5 * (row.log_i[l] - row.log_k[l])).collect())
}

/// A renormalized translation block `g~^(m)` at fixed azimuthal number and
/// dimensionless separation frequency `x = a omega`.
#[derive(Debug, Clone)]
pub struct TranslationTable {
    pub field_kind: FieldKind,
    pub m: i32,
    pub x: f64,
    pub l0: usize,
    /// Lowest retained multipole index: `|m|` (scalar) or `max(1, |m|)` (EM).
    pub min_index: usize,
    /// Square block over the retained indices; EM rows interleave TE/TM.
    pub entries: DMatrix<f64>,
    /// `ln z` factors applied to rows and columns (empty for unit scaling).
    pub log_z_row: Vec<f64>,
    pub log_z_col: Vec<f64>,
}

impl TranslationTable {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

/// Cached m-dependent coupling coefficients of the scalar translation sum;
/// they carry all 3j factors and are frequency independent, so one table
/// serves every quadrature node.
#[derive(Debug, Clone)]
pub(crate) struct ScalarCoupling {
    pub m: i32,
    pub l_min: usize,
    pub l0: usize,
    /// For each pair (l1, l2) with l_min <= l1 <= l2 <= l0, the inner-sum
    /// coefficients `(l, (2l+1) 3j(l2,l1,l;0,0,0) 3j(l2,l1,l;m,-m,0))`.
    pairs: Vec<Vec<(usize, f64)>>,
}

impl ScalarCoupling {
    pub fn new(m: i32, l0: usize) -> Result<Self> {
        let l_min = m.unsigned_abs() as usize;
        if l0 < l_min {
            return Err(Error::Domain(format!("truncation l0={l0} below |m|={l_min}")));
        }
        let n = l0 - l_min + 1;
        let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
        for l1 in l_min..=l0 {
            for l2 in l1..=l0 {
                let mut coeffs = Vec::with_capacity((l1 - l_min).min(l2 - l_min) + 1);
                let mut l = l2 - l1; // same parity as l1 + l2
                while l <= l1 + l2 {
                    let c = w3j(l2 as i64, l1 as i64, l as i64, 0, 0, 0)
                        * w3j(l2 as i64, l1 as i64, l as i64, i64::from(m), -i64::from(m), 0);
                    if c != 0.0 {
                        coeffs.push((l, (2 * l + 1) as f64 * c));
                    }
                    l += 2;
                }
                pairs.push(coeffs);
            }
        }
        Ok(ScalarCoupling { m, l_min, l0, pairs })
    }

    fn pair(&self, l1: usize, l2: usize) -> &[(usize, f64)] {
        // triangular storage over l1 <= l2
        let n = self.l0 - self.l_min + 1;
        let (a, b) = (l1 - self.l_min, l2 - self.l_min);
        let idx = a * n - a * (a + 1) / 2 + b;
        &self.pairs[idx]
    }

    /// Build the renormalized table at `x = a omega`.
    pub fn table(&self, x: f64, scaling: &ScaleSpec) -> Result<TranslationTable> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("translation argument must be positive, got {x}")));
        }
        let n = self.l0 - self.l_min + 1;
        let bessel = bessel_ik_half_log(2 * self.l0, x)?;
        // base[l] = ln( sqrt(2/(pi x)) K_{l+1/2}(x) ), increasing in l
        let ln_front = 0.5 * (2.0 / (std::f64::consts::PI * x)).ln() - x;
        let base: Vec<f64> = bessel.log_k.iter().map(|lk| lk + ln_front).collect();

        let sign = if self.m.rem_euclid(2) == 0 { -1.0 } else { 1.0 }; // (-1)^(m+1)
        let mut entries = DMatrix::zeros(n, n);
        for l1 in self.l_min..=self.l0 {
            for l2 in l1..=self.l0 {
                let top = base[l1 + l2];
                let mut inner = 0.0_f64;
                let mut comp = 0.0_f64;
                for &(l, c) in self.pair(l1, l2) {
                    let y = c * (base[l] - top).exp() - comp;
                    let s = inner + y;
                    comp = (s - inner) - y;
                    inner = s;
                }
                let pref = sign * ((2 * l1 + 1) as f64 * (2 * l2 + 1) as f64).sqrt();
                let raw = pref * inner;
                let e12 = raw * (top + scaling.log_row(l1) + scaling.log_col(l2)).exp();
                let e21 = raw * (top + scaling.log_row(l2) + scaling.log_col(l1)).exp();
                if !e12.is_finite() || !e21.is_finite() {
                    return Err(Error::Domain(format!(
                        "translation element not finite at (l1={l1}, l2={l2}, x={x}); use renormalized scaling"
                    )));
                }
                entries[(l1 - self.l_min, l2 - self.l_min)] = e12;
                entries[(l2 - self.l_min, l1 - self.l_min)] = e21;
            }
        }
        let (log_z_row, log_z_col) = match scaling {
            ScaleSpec::Unit => (Vec::new(), Vec::new()),
            ScaleSpec::LogZ { row, col } => (row.clone(), col.clone()),
        };
        Ok(TranslationTable {
            field_kind: FieldKind::Scalar,
            m: self.m,
            x,
            l0: self.l0,
            min_index: self.l_min,
            entries,
            log_z_row,
            log_z_col,
        })
    }
}

/// Scalar translation block `g~^(m)` at `x = a omega`:
///
/// ```text
/// g^(m)_{l1 l2} = (-1)^(m+1) sqrt((2l1+1)(2l2+1))
///                 sum_l (2l+1) sqrt(2/(pi x)) K_{l+1/2}(x)
///                       3j(l2,l1,l;0,0,0) 3j(l2,l1,l;m,-m,0)
/// ```
///
/// with the inner sum over `|l1-l2| <= l <= l1+l2`, `l1+l2+l` even.
pub fn scalar_translation(m: i32, l0: usize, x: f64, scaling: &ScaleSpec) -> Result<TranslationTable> {
    ScalarCoupling::new(m, l0)?.table(x, scaling)
}

/// Angular factor of the EM translation sum for projections `(m, m, 0)`:
/// the closed 3j expression for
/// `integral dOmega Y_{l,0} (Yvec^(a)*_{j m} . Yvec^(a')_{j' m})`.
fn em_angular_coeff(j: usize, jp: usize, m: i64, l: usize, same_pol: bool) -> f64 {
    let (j1, j2, j3) = (j as i64, jp as i64, l as i64);
    let norm = ((2 * j1 + 1) as f64 * (2 * j2 + 1) as f64 * (2 * j3 + 1) as f64
        / (4.0 * std::f64::consts::PI))
        .sqrt();
    let projection = w3j(j1, j2, j3, -m, m, 0);
    // The conjugated harmonic contributes (-1)^m in both polarization cases
    // (verified against direct surface quadrature of the dot products).
    let phase = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    if same_pol {
        // nonzero only for even j + j' + l
        let jj1 = (j1 * (j1 + 1)) as f64;
        let jj2 = (j2 * (j2 + 1)) as f64;
        let jj3 = (j3 * (j3 + 1)) as f64;
        let scalar_part = (jj1 + jj2 - jj3) / (2.0 * (jj1 * jj2).sqrt());
        phase * scalar_part * norm * w3j(j1, j2, j3, 0, 0, 0) * projection
    } else {
        // nonzero only for odd j + j' + l
        phase * norm * w3j(j1, j2, j3, 1, -1, 0) * projection
    }
}

/// Surface integral `dOmega Y_{j3 m3} (Yvec^(a1)*_{j1 m1} . Yvec^(a2)_{j2 m2})`
/// through its closed 3j expressions. Parity-forbidden combinations return
/// exactly 0.0; the EM basis has no monopole, so `j1, j2 >= 1`.
pub fn em_dot_integral(
    j1: u32,
    m1: i32,
    alpha1: Polarization,
    j2: u32,
    m2: i32,
    alpha2: Polarization,
    j3: u32,
    m3: i32,
) -> Result<f64> {
    if j1 == 0 || j2 == 0 {
        return Err(Error::Domain("EM multipole indices start at j = 1".into()));
    }
    let total = i64::from(j1) + i64::from(j2) + i64::from(j3);
    let same = alpha1 == alpha2;
    if same && total % 2 != 0 {
        return Ok(0.0);
    }
    if !same && total % 2 == 0 {
        return Ok(0.0);
    }
    let (a, b, c) = (i64::from(j1), i64::from(j2), i64::from(j3));
    let norm = ((2 * a + 1) as f64 * (2 * b + 1) as f64 * (2 * c + 1) as f64
        / (4.0 * std::f64::consts::PI))
        .sqrt();
    let projection = w3j(a, b, c, -i64::from(m1), i64::from(m2), i64::from(m3));
    let phase = if m1.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let value = if same {
        let jj1 = (a * (a + 1)) as f64;
        let jj2 = (b * (b + 1)) as f64;
        let jj3 = (c * (c + 1)) as f64;
        phase * (jj1 + jj2 - jj3) / (2.0 * (jj1 * jj2).sqrt()) * norm * w3j(a, b, c, 0, 0, 0) * projection
    } else {
        phase * norm * w3j(a, b, c, 1, -1, 0) * projection
    };
    Ok(value)
}

/// Cached coupling coefficients for the EM translation block.
#[derive(Debug, Clone)]
pub(crate) struct EmCoupling {
    pub m: i32,
    pub j_min: usize,
    pub j0: usize,
    /// Indexed by channel pair; each holds `(l, sqrt(2l+1) * A_l)`.
    pairs: Vec<Vec<(usize, f64)>>,
}

pub(crate) fn em_channel_count(j_min: usize, j0: usize) -> usize {
    2 * (j0 - j_min + 1)
}

/// Channel layout: ascending `j`, TE before TM at each `j`.
pub(crate) fn em_channel_index(j: usize, pol: Polarization, j_min: usize) -> usize {
    2 * (j - j_min) + match pol {
        Polarization::Te => 0,
        Polarization::Tm => 1,
    }
}

pub(crate) fn em_channel_of(idx: usize, j_min: usize) -> (usize, Polarization) {
    let j = j_min + idx / 2;
    let pol = if idx % 2 == 0 { Polarization::Te } else { Polarization::Tm };
    (j, pol)
}

impl EmCoupling {
    pub fn new(m: i32, j0: usize) -> Result<Self> {
        let j_min = (m.unsigned_abs() as usize).max(1);
        if j0 < j_min {
            return Err(Error::Domain(format!("truncation j0={j0} below max(1,|m|)={j_min}")));
        }
        // The cross-polarization entries of the raw sum change sign under
        // m -> -m (a polarization-conjugation similarity that leaves every
        // determinant invariant). Canonicalizing on |m| fixes the convention
        // so that blocks are exactly even in m.
        let m = m.abs();
        let n = em_channel_count(j_min, j0);
        let mut pairs = Vec::with_capacity(n * n);
        for row in 0..n {
            let (j, pol) = em_channel_of(row, j_min);
            for col in 0..n {
                let (jp, polp) = em_channel_of(col, j_min);
                let same = pol == polp;
                let mut coeffs = Vec::new();
                for l in j.abs_diff(jp)..=(j + jp) {
                    let parity_even = (j + jp + l) % 2 == 0;
                    if parity_even != same {
                        continue;
                    }
                    let a = em_angular_coeff(j, jp, i64::from(m), l, same);
                    if a != 0.0 {
                        coeffs.push((l, ((2 * l + 1) as f64).sqrt() * a));
                    }
                }
                pairs.push(coeffs);
            }
        }
        Ok(EmCoupling { m, j_min, j0, pairs })
    }

    pub fn table(&self, x: f64, scaling: &ScaleSpec) -> Result<TranslationTable> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("translation argument must be positive, got {x}")));
        }
        let n = em_channel_count(self.j_min, self.j0);
        let bessel = bessel_ik_half_log(2 * self.j0, x)?;
        // base[l] = ln( sqrt(8/x) K_{l+1/2}(x) )
        let ln_front = 0.5 * (8.0 / x).ln() - x;
        let base: Vec<f64> = bessel.log_k.iter().map(|lk| lk + ln_front).collect();

        let mut entries = DMatrix::zeros(n, n);
        for row in 0..n {
            let (j, _) = em_channel_of(row, self.j_min);
            for col in 0..n {
                let (jp, _) = em_channel_of(col, self.j_min);
                let coeffs = &self.pairs[row * n + col];
                if coeffs.is_empty() {
                    continue;
                }
                let top = base[j + jp];
                let mut inner = 0.0_f64;
                let mut comp = 0.0_f64;
                for &(l, c) in coeffs {
                    let y = c * (base[l] - top).exp() - comp;
                    let s = inner + y;
                    comp = (s - inner) - y;
                    inner = s;
                }
                let e = inner * (top + scaling.log_row(j) + scaling.log_col(jp)).exp();
                if !e.is_finite() {
                    return Err(Error::Domain(format!(
                        "translation element not finite at (j={j}, j'={jp}, x={x}); use renormalized scaling"
                    )));
                }
                entries[(row, col)] = e;
            }
        }
        let (log_z_row, log_z_col) = match scaling {
            ScaleSpec::Unit => (Vec::new(), Vec::new()),
            ScaleSpec::LogZ { row, col } => (row.clone(), col.clone()),
        };
        Ok(TranslationTable {
            field_kind: FieldKind::Em,
            m: self.m,
            x,
            l0: self.j0,
            min_index: self.j_min,
            entries,
            log_z_row,
            log_z_col,
        })
    }
}

/// EM translation block over `(j, polarization)` channels:
///
/// ```text
/// g^(m)_{j a; j' a'} = sum_l sqrt((8/x)(2l+1)) K_{l+1/2}(x)
///                      integral dOmega Y_{l,0} (Yvec^(a)*_{j m} . Yvec^(a')_{j' m})
/// ```
pub fn em_translation(m: i32, l0: usize, x: f64, scaling: &ScaleSpec) -> Result<TranslationTable> {
    EmCoupling::new(m, l0)?.table(x, scaling)
}
