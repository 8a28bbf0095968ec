//! Imaginary-frequency T-matrix (phase shift) elements for the supported
//! scatterer models, delivered in renormalized form.
//!
//! With the per-body scale factors `z_l = sqrt(I_{l+1/2}(x)/K_{l+1/2}(x))`
//! the renormalized elements `t~ = t / z^2` stay of order one for every order
//! and frequency; the hard-sphere entries are exactly `pi/2`. Everything is
//! computed from ratios of adjacent scaled Bessel values, so no intermediate
//! ever approaches the floating range even for dielectric contrasts of 1e8.

use crate::angular::FieldKind;
use crate::specfun::{bessel_ik_half_log, LogBesselRow};
use crate::{Error, Result};

/// One body participating in a configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Scatterer {
    /// Hard (Dirichlet) sphere for the scalar field.
    ScalarDirichletSphere { radius: f64 },
    /// Dielectric sphere with a constant permittivity on the imaginary axis.
    ScalarDielectricSphere { radius: f64, epsilon: f64 },
    /// Perfectly conducting sphere for the EM field.
    EmConductingSphere { radius: f64 },
    /// Ideal plane mirror; participates through the reflected-kernel split.
    Mirror { flavor: MirrorFlavor },
    /// One-dimensional scatterer, used by the 1d closed form only.
    OneD { model: OneDModel },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MirrorFlavor {
    ScalarDirichlet,
    ScalarNeumann,
    EmConducting,
    EmPermeable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OneDModel {
    /// Perfect mirror with reflection coefficient -1 (Dirichlet) or +1 (Neumann).
    PerfectMirror { sign: f64 },
    /// Repulsive delta potential of the given inverse-length strength.
    DeltaPotential { strength: f64 },
}

impl Scatterer {
    pub fn radius(&self) -> Option<f64> {
        match self {
            Scatterer::ScalarDirichletSphere { radius }
            | Scatterer::ScalarDielectricSphere { radius, .. }
            | Scatterer::EmConductingSphere { radius } => Some(*radius),
            _ => None,
        }
    }

    pub fn is_sphere(&self) -> bool {
        self.radius().is_some()
    }

    /// Field the scatterer model belongs to (`None` for 1d models).
    pub fn field_kind(&self) -> Option<FieldKind> {
        match self {
            Scatterer::ScalarDirichletSphere { .. } | Scatterer::ScalarDielectricSphere { .. } => {
                Some(FieldKind::Scalar)
            }
            Scatterer::EmConductingSphere { .. } => Some(FieldKind::Em),
            Scatterer::Mirror { flavor } => Some(match flavor {
                MirrorFlavor::ScalarDirichlet | MirrorFlavor::ScalarNeumann => FieldKind::Scalar,
                MirrorFlavor::EmConducting | MirrorFlavor::EmPermeable => FieldKind::Em,
            }),
            Scatterer::OneD { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Scatterer::ScalarDirichletSphere { radius } | Scatterer::EmConductingSphere { radius } => {
                if *radius > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("sphere radius must be positive, got {radius}")))
                }
            }
            Scatterer::ScalarDielectricSphere { radius, epsilon } => {
                if *radius <= 0.0 {
                    Err(Error::Domain(format!("sphere radius must be positive, got {radius}")))
                } else if *epsilon <= 1.0 {
                    Err(Error::Domain(format!("dielectric constant must exceed 1, got {epsilon}")))
                } else {
                    Ok(())
                }
            }
            Scatterer::Mirror { .. } => Ok(()),
            Scatterer::OneD { model } => match model {
                OneDModel::PerfectMirror { sign } => {
                    if *sign == 1.0 || *sign == -1.0 {
                        Ok(())
                    } else {
                        Err(Error::Domain(format!("perfect mirror sign must be +-1, got {sign}")))
                    }
                }
                OneDModel::DeltaPotential { strength } => {
                    if *strength > 0.0 {
                        Ok(())
                    } else {
                        Err(Error::Domain(format!("delta strength must be positive, got {strength}")))
                    }
                }
            },
        }
    }
}

/// A row of renormalized T-matrix entries at fixed `x = omega R`.
///
/// Scalar rows are indexed by `l = 0..=l0`; EM rows by channel, ascending `j`
/// from 1 with TE before TM. The unscaled values can be rebuilt through the
/// stored `ln z^2` but are never materialized internally (for large `l x`
/// they exceed the floating range).
#[derive(Debug, Clone)]
pub struct TRow {
    pub field_kind: FieldKind,
    pub x: f64,
    pub entries: Vec<f64>,
    pub log_z2: Vec<f64>,
}

impl TRow {
    /// Unscaled element `t = t~ z^2`; may overflow for large `l x` by design.
    pub fn unscaled(&self, idx: usize) -> f64 {
        self.entries[idx] * self.log_z2[idx].exp()
    }
}

fn log_z2_from_row(row: &LogBesselRow, l: usize) -> f64 {
    2.0 * row.x + row.log_i[l] - row.log_k[l]
}

/// Hard-sphere (Dirichlet) scalar T-matrix `t_l = (pi/2) I_{l+1/2}/K_{l+1/2}`;
/// renormalized, every entry is exactly `pi/2`.
pub fn t_scalar_dirichlet(l0: usize, x: f64) -> Result<TRow> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("t-matrix argument must be positive, got {x}")));
    }
    let row = bessel_ik_half_log(l0, x)?;
    let entries = vec![std::f64::consts::FRAC_PI_2; l0 + 1];
    let log_z2 = (0..=l0).map(|l| log_z2_from_row(&row, l)).collect();
    Ok(TRow { field_kind: FieldKind::Scalar, x, entries, log_z2 })
}

/// `I_{l+3/2}/I_{l+1/2}` from a log row.
fn ratio_i_up(row: &LogBesselRow, l: usize) -> f64 {
    (row.log_i[l + 1] - row.log_i[l]).exp()
}

/// `K_{l-1/2}/K_{l+1/2}` from a log row (equals 1 at l = 0).
fn ratio_k_down(row: &LogBesselRow, l: usize) -> f64 {
    if l == 0 {
        1.0
    } else {
        (row.log_k[l - 1] - row.log_k[l]).exp()
    }
}

/// Dielectric-sphere scalar T-matrix from interior/exterior matching of the
/// field and its radial derivative at the surface, with the interior solution
/// regular at the origin and interior argument `sqrt(eps) x`:
///
/// ```text
/// t_l = [n i_l'(nx) i_l(x) - i_l(nx) i_l'(x)] / [n i_l'(nx) k_l(x) - i_l(nx) k_l'(x)]
/// ```
///
/// (`n = sqrt(eps)`, modified spherical Bessel functions). Evaluated in the
/// cancellation-free ratio form
/// `t~_l = (pi/2) [n r_l(nx) - r_l(x)] / [n r_l(nx) + s_l(x) + (2l+1)/x]`
/// with `r_l = I_{l+3/2}/I_{l+1/2}` and `s_l = K_{l-1/2}/K_{l+1/2}`, which
/// reproduces the hard sphere entrywise as eps -> infinity and vanishes
/// linearly in eps - 1.
pub fn t_scalar_dielectric(l0: usize, x: f64, eps: f64) -> Result<TRow> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("t-matrix argument must be positive, got {x}")));
    }
    if !(eps > 1.0) {
        return Err(Error::Domain(format!("dielectric constant must exceed 1, got {eps}")));
    }
    let n = eps.sqrt();
    let outer = bessel_ik_half_log(l0 + 1, x)?;
    let inner = bessel_ik_half_log(l0 + 1, n * x)?;
    let mut entries = Vec::with_capacity(l0 + 1);
    let mut log_z2 = Vec::with_capacity(l0 + 1);
    for l in 0..=l0 {
        let ri_in = ratio_i_up(&inner, l);
        let ri_out = ratio_i_up(&outer, l);
        let rk_out = ratio_k_down(&outer, l);
        let num = n * ri_in - ri_out;
        let den = n * ri_in + rk_out + (2 * l + 1) as f64 / x;
        entries.push(std::f64::consts::FRAC_PI_2 * num / den);
        log_z2.push(log_z2_from_row(&outer, l));
    }
    Ok(TRow { field_kind: FieldKind::Scalar, x, entries, log_z2 })
}

/// Perfectly conducting sphere for the EM field. TE entries coincide with the
/// scalar Dirichlet values; TM entries are
///
/// ```text
/// t_TM = -(pi/2) [d/dx(sqrt(x) I_{j+1/2})] / [d/dx(sqrt(x) K_{j+1/2})]
/// ```
///
/// evaluated through the all-positive recurrence form
/// `t~_TM = (pi/2) [x r_j + (j+1)] / [x s_j + j]`.
pub fn t_em_conducting(j0: usize, x: f64) -> Result<TRow> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("t-matrix argument must be positive, got {x}")));
    }
    if j0 < 1 {
        return Err(Error::Domain("EM truncation needs j0 >= 1".into()));
    }
    let row = bessel_ik_half_log(j0 + 1, x)?;
    let mut entries = Vec::with_capacity(2 * j0);
    let mut log_z2 = Vec::with_capacity(2 * j0);
    for j in 1..=j0 {
        let z2 = log_z2_from_row(&row, j);
        // TE
        entries.push(std::f64::consts::FRAC_PI_2);
        log_z2.push(z2);
        // TM
        let ri = ratio_i_up(&row, j);
        let rk = ratio_k_down(&row, j);
        let t_tm = std::f64::consts::FRAC_PI_2 * (x * ri + (j + 1) as f64) / (x * rk + j as f64);
        entries.push(t_tm);
        log_z2.push(z2);
    }
    Ok(TRow { field_kind: FieldKind::Em, x, entries, log_z2 })
}

/// Imaginary-axis reflection coefficient of a 1d scatterer. A perfect mirror
/// reflects with its sign; a delta potential of strength `lambda` gives
/// `r(i omega) = -lambda / (lambda + 2 omega)`, which tends to the hard-wall
/// value -1 as `lambda -> infinity`.
pub fn reflection_1d(model: &OneDModel, omega: f64) -> f64 {
    debug_assert!(omega > 0.0);
    match model {
        OneDModel::PerfectMirror { sign } => *sign,
        OneDModel::DeltaPotential { strength } => -strength / (strength + 2.0 * omega),
    }
}
