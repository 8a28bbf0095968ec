//! Frequency quadrature, azimuthal summation, and the closed-form and series
//! companions of the determinant energies.
//!
//! The semi-infinite frequency integral is mapped onto the unit interval with
//! `w = u / (d (1 - u))`, where `d` is the surface-to-surface gap that sets
//! the exponential decay scale of the integrand, and then evaluated with
//! Gauss-Legendre nodes. No node sits at `w = 0`, which keeps the
//! small-frequency subtleties of the transverse-magnetic channel out of the
//! evaluation entirely.
//!
//! All energies are reported in units of `hbar c / R_ref`.

use rayon::prelude::*;

use crate::angular::FieldKind;
use crate::kernel::{
    assemble_full_from_parts, assemble_ktilde_from_parts, logdet_lu, sphere_t_row, Coupling,
    DetSign,
};
use crate::quad::{integrate_tanh_sinh, GaussLegendre};
use crate::tmatrix::{reflection_1d, MirrorFlavor, OneDModel, Scatterer};
use crate::{Error, Result};

/// Geometry mode of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    TwoBody,
    SphereMirror,
}

/// Two scatterers plus their center separation. For sphere-mirror geometry
/// `a` is twice the sphere-center-to-mirror distance, so the tabulated
/// symmetric-pair separation applies unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub field: FieldKind,
    pub body_a: Scatterer,
    pub body_b: Scatterer,
    pub a: f64,
    pub mode: Mode,
    /// Reference length; energies are reported in `hbar c / r_ref`.
    pub r_ref: f64,
}

impl Configuration {
    pub fn two_body(field: FieldKind, body_a: Scatterer, body_b: Scatterer, a: f64) -> Result<Self> {
        let r1 = body_a
            .radius()
            .ok_or_else(|| Error::Config("two-body configurations need two spheres".into()))?;
        let r2 = body_b
            .radius()
            .ok_or_else(|| Error::Config("two-body configurations need two spheres".into()))?;
        let cfg = Configuration { field, body_a, body_b, a, mode: Mode::TwoBody, r_ref: r1.max(r2) };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn sphere_mirror(field: FieldKind, sphere: Scatterer, flavor: MirrorFlavor, a: f64) -> Result<Self> {
        let r = sphere
            .radius()
            .ok_or_else(|| Error::Config("sphere-mirror configurations need a sphere".into()))?;
        let cfg = Configuration {
            field,
            body_a: sphere,
            body_b: Scatterer::Mirror { flavor },
            a,
            mode: Mode::SphereMirror,
            r_ref: r,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Override the reporting length unit.
    pub fn with_r_ref(mut self, r_ref: f64) -> Self {
        assert!(r_ref > 0.0);
        self.r_ref = r_ref;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.body_a.validate()?;
        self.body_b.validate()?;
        if !(self.r_ref > 0.0) {
            return Err(Error::Config("reference length must be positive".into()));
        }
        match self.mode {
            Mode::TwoBody => {
                let (r1, r2) = (self.body_a.radius(), self.body_b.radius());
                let (r1, r2) = match (r1, r2) {
                    (Some(r1), Some(r2)) => (r1, r2),
                    _ => return Err(Error::Config("two-body configurations need two spheres".into())),
                };
                for body in [&self.body_a, &self.body_b] {
                    if body.field_kind() != Some(self.field) {
                        return Err(Error::Config(format!(
                            "body {body:?} does not scatter the configured field"
                        )));
                    }
                }
                if self.a <= r1 + r2 {
                    return Err(Error::Config(format!(
                        "bodies overlap: separation {} <= {} + {}",
                        self.a, r1, r2
                    )));
                }
            }
            Mode::SphereMirror => {
                let r = self
                    .body_a
                    .radius()
                    .ok_or_else(|| Error::Config("sphere-mirror needs the sphere first".into()))?;
                if self.body_a.field_kind() != Some(self.field) {
                    return Err(Error::Config("sphere does not scatter the configured field".into()));
                }
                match &self.body_b {
                    Scatterer::Mirror { flavor } => {
                        let mirror_field = match flavor {
                            MirrorFlavor::ScalarDirichlet | MirrorFlavor::ScalarNeumann => FieldKind::Scalar,
                            MirrorFlavor::EmConducting | MirrorFlavor::EmPermeable => FieldKind::Em,
                        };
                        if mirror_field != self.field {
                            return Err(Error::Config("mirror flavor does not match the field".into()));
                        }
                    }
                    other => {
                        return Err(Error::Config(format!("expected a mirror body, found {other:?}")));
                    }
                }
                if self.a / 2.0 <= r {
                    return Err(Error::Config(format!(
                        "sphere (radius {r}) intersects the mirror at distance {}",
                        self.a / 2.0
                    )));
                }
            }
        }
        Ok(())
    }

    /// Center separation in units of the reference length.
    pub fn reduced_separation(&self) -> f64 {
        self.a / self.r_ref
    }

    /// Surface gap in reference units; the exponential decay scale of the
    /// frequency integrand.
    fn decay_gap(&self) -> f64 {
        match self.mode {
            Mode::TwoBody => {
                let r1 = self.body_a.radius().unwrap();
                let r2 = self.body_b.radius().unwrap();
                (self.a - r1 - r2) / self.r_ref
            }
            Mode::SphereMirror => {
                let r = self.body_a.radius().unwrap();
                (self.a - 2.0 * r) / self.r_ref
            }
        }
    }

    fn mirror_flavor(&self) -> Option<MirrorFlavor> {
        match &self.body_b {
            Scatterer::Mirror { flavor } => Some(*flavor),
            _ => None,
        }
    }
}

/// Frequency-quadrature parameters.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub nodes: usize,
    /// When set, the integral is re-evaluated with doubled nodes and the run
    /// fails if the relative change exceeds this tolerance.
    pub doubling_check: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { nodes: 64, doubling_check: None }
    }
}

impl QuadratureSpec {
    pub fn new(nodes: usize) -> Self {
        QuadratureSpec { nodes, doubling_check: None }
    }

    pub fn with_doubling_check(mut self, tol: f64) -> Self {
        self.doubling_check = Some(tol);
        self
    }
}

pub const TRANSFORM_ID: &str = "gl-u-over-1-minus-u-gap";

/// Energy of one configuration at fixed truncation order.
#[derive(Debug, Clone)]
pub struct EnergyResult {
    /// Total energy in `hbar c / R_ref`.
    pub energy: f64,
    /// m-resolved contributions for m = 0..=l0; the total is
    /// `per_m[0] + 2 sum_{m>=1} per_m[m]`.
    pub per_m: Vec<f64>,
    pub l0: usize,
    pub quad_nodes: usize,
    pub transform: &'static str,
    /// Heuristic bound from the azimuthal tail (and the node-doubling
    /// difference when the check ran).
    pub truncation_error_estimate: f64,
    pub convergence_rate_c: Option<f64>,
}

const MAX_TRUNCATION: usize = 100;

fn frequency_grid(gap: f64, nodes: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::unit(nodes);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&u, &w)| {
            let omega = u / (gap * (1.0 - u));
            let jac = 1.0 / (gap * (1.0 - u) * (1.0 - u));
            (omega, w * jac / (2.0 * std::f64::consts::PI))
        })
        .collect()
}

enum BlockOp {
    Full,
    KTilde(DetSign),
}

/// Integrand accumulation for all m at the given node count. Returns per-m
/// integrals in ascending m; the work grid is a pure map over (m, node) and
/// the reduction runs in a fixed order, so results do not depend on the
/// worker count.
fn per_m_integrals(cfg: &Configuration, l0: usize, nodes: usize, op: &BlockOp) -> Result<Vec<f64>> {
    let grid = frequency_grid(cfg.decay_gap(), nodes);
    let a_hat = cfg.reduced_separation();
    (0..=l0 as i32)
        .into_par_iter()
        .map(|m| -> Result<f64> {
            let coupling = Coupling::new(cfg.field, m, l0)?;
            let mut sum = 0.0_f64;
            let mut comp = 0.0_f64;
            for &(omega, weight) in &grid {
                let x_sep = a_hat * omega;
                let ld = match op {
                    BlockOp::Full => {
                        let t_a = sphere_t_row(&cfg.body_a, l0, omega, cfg.r_ref)?;
                        let t_b = sphere_t_row(&cfg.body_b, l0, omega, cfg.r_ref)?;
                        let lz_a = body_log_scale(&cfg.body_a, l0, omega, cfg.r_ref)?;
                        let lz_b = body_log_scale(&cfg.body_b, l0, omega, cfg.r_ref)?;
                        let k = assemble_full_from_parts(
                            &coupling, cfg.field, l0, x_sep, &t_a, &t_b, &lz_a, &lz_b,
                        )?;
                        logdet_one_minus_dense(k, DetSign::Plus)?
                    }
                    BlockOp::KTilde(sign) => {
                        let sphere = &cfg.body_a;
                        let t = sphere_t_row(sphere, l0, omega, cfg.r_ref)?;
                        let lz = body_log_scale(sphere, l0, omega, cfg.r_ref)?;
                        let k = assemble_ktilde_from_parts(&coupling, cfg.field, l0, x_sep, &t, &lz)?;
                        logdet_one_minus_dense(k, *sign)?
                    }
                };
                let y = weight * ld - comp;
                let s = sum + y;
                comp = (s - sum) - y;
                sum = s;
            }
            Ok(sum)
        })
        .collect()
}

fn body_log_scale(body: &Scatterer, l0: usize, omega: f64, r_ref: f64) -> Result<Vec<f64>> {
    let radius = body.radius().expect("scale factors need a sphere");
    crate::angular::dirichlet_log_scale(l0, omega * radius / r_ref)
}

fn logdet_one_minus_dense(k: nalgebra::DMatrix<f64>, sign: DetSign) -> Result<f64> {
    let n = k.nrows();
    let mut a = match sign {
        DetSign::Plus => -k,
        DetSign::Minus => k,
    };
    for i in 0..n {
        a[(i, i)] += 1.0;
    }
    logdet_lu(a)
}

fn total_from_per_m(per_m: &[f64]) -> f64 {
    per_m[0] + 2.0 * per_m[1..].iter().sum::<f64>()
}

fn run_energy(cfg: &Configuration, l0: usize, quad: &QuadratureSpec, op: BlockOp) -> Result<EnergyResult> {
    cfg.validate()?;
    if l0 > MAX_TRUNCATION {
        return Err(Error::Domain(format!("truncation l0={l0} above supported {MAX_TRUNCATION}")));
    }
    let per_m = per_m_integrals(cfg, l0, quad.nodes, &op)?;
    let energy = total_from_per_m(&per_m);
    let mut error_estimate = 2.0 * per_m.last().map(|v| v.abs()).unwrap_or(0.0);
    if let Some(tol) = quad.doubling_check {
        let per_m2 = per_m_integrals(cfg, l0, 2 * quad.nodes, &op)?;
        let e2 = total_from_per_m(&per_m2);
        let change = if e2 != 0.0 { ((energy - e2) / e2).abs() } else { (energy - e2).abs() };
        if change > tol {
            return Err(Error::NonConvergence { change, tol });
        }
        error_estimate = error_estimate.max(change * energy.abs());
    }
    Ok(EnergyResult {
        energy,
        per_m,
        l0,
        quad_nodes: quad.nodes,
        transform: TRANSFORM_ID,
        truncation_error_estimate: error_estimate,
        convergence_rate_c: None,
    })
}

/// Interaction energy of a two-body configuration,
/// `E = sum_m integral dw/2pi ln det(1 - K^(m)(iw))`, in `hbar c / R_ref`.
/// Negative for positive-contrast bodies.
pub fn casimir_energy(cfg: &Configuration, l0: usize, quad: &QuadratureSpec) -> Result<EnergyResult> {
    if cfg.mode != Mode::TwoBody {
        return Err(Error::Config("casimir_energy expects a two-body configuration".into()));
    }
    run_energy(cfg, l0, quad, BlockOp::Full)
}

/// Sphere-mirror energy through the square-root split: the sign of the
/// determinant is selected by the mirror flavor. Dirichlet (and EM
/// conducting) mirrors use `det(1 + K~)`, Neumann (and EM permeable) mirrors
/// `det(1 - K~)`; the mapping is pinned by the attraction of the Dirichlet
/// case and by the additivity identity `E_S = E_D + E_N`.
pub fn mirror_energy(cfg: &Configuration, l0: usize, quad: &QuadratureSpec) -> Result<EnergyResult> {
    if cfg.mode != Mode::SphereMirror {
        return Err(Error::Config("mirror_energy expects a sphere-mirror configuration".into()));
    }
    let flavor = cfg
        .mirror_flavor()
        .ok_or_else(|| Error::Config("sphere-mirror configuration lacks a mirror body".into()))?;
    let sign = match flavor {
        MirrorFlavor::ScalarDirichlet | MirrorFlavor::EmConducting => DetSign::Minus,
        MirrorFlavor::ScalarNeumann | MirrorFlavor::EmPermeable => DetSign::Plus,
    };
    run_energy(cfg, l0, quad, BlockOp::KTilde(sign))
}

/// Both mirror-split energies of an equal-body two-body configuration from a
/// single pass: `(det(1+K~) part, det(1-K~) part)`. Their sum equals the
/// two-body energy.
pub fn split_energies(cfg: &Configuration, l0: usize, quad: &QuadratureSpec) -> Result<(EnergyResult, EnergyResult)> {
    let attract = run_energy(cfg, l0, quad, BlockOp::KTilde(DetSign::Minus))?;
    let repel = run_energy(cfg, l0, quad, BlockOp::KTilde(DetSign::Plus))?;
    Ok((attract, repel))
}

/// Exponential truncation-convergence fit over the last three points of
/// `E(l0) = E_inf - A exp(-c l0)`.
#[derive(Debug, Clone)]
pub struct ConvergenceFit {
    pub e_inf: f64,
    pub amplitude: f64,
    pub c: f64,
    /// All computed `(l0, E(l0))` pairs, ascending.
    pub energies: Vec<(usize, f64)>,
}

/// Truncation-convergence study: computes the energy on the given ascending
/// truncation orders and fits the exponential error model on the last three.
/// Degenerate (non-monotone) residuals are rejected.
pub fn convergence_study(
    cfg: &Configuration,
    l0_list: &[usize],
    quad: &QuadratureSpec,
) -> Result<ConvergenceFit> {
    if l0_list.len() < 3 {
        return Err(Error::Domain("convergence study needs at least three truncation orders".into()));
    }
    if l0_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("truncation orders must be strictly ascending".into()));
    }
    let mut energies = Vec::with_capacity(l0_list.len());
    for &l0 in l0_list {
        let res = match cfg.mode {
            Mode::TwoBody => casimir_energy(cfg, l0, quad)?,
            Mode::SphereMirror => mirror_energy(cfg, l0, quad)?,
        };
        energies.push((l0, res.energy));
    }
    let k = energies.len();
    let (l1, f1) = energies[k - 3];
    let (l2, f2) = energies[k - 2];
    let (l3, f3) = energies[k - 1];
    let d1 = f2 - f1;
    let d2 = f3 - f2;
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() || d2.abs() >= d1.abs() {
        return Err(Error::FitDegenerate(format!(
            "residuals not monotone: dE = {d1:e}, {d2:e} at l0 = {l1}, {l2}, {l3}"
        )));
    }
    let (l1f, l2f, l3f) = (l1 as f64, l2 as f64, l3 as f64);
    let target = d2 / d1;
    let c = if (l2 - l1) == (l3 - l2) {
        -(target.ln()) / (l2f - l1f)
    } else {
        // ratio (e^{-c l3} - e^{-c l2})/(e^{-c l2} - e^{-c l1}) decreases
        // monotonically in c; bisect.
        let ratio = |c: f64| {
            ((-c * l3f).exp() - (-c * l2f).exp()) / ((-c * l2f).exp() - (-c * l1f).exp())
        };
        let (mut lo, mut hi) = (1e-6, 60.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ratio(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let amplitude = -d2 / ((-c * l3f).exp() - (-c * l2f).exp());
    let e_inf = f3 + amplitude * (-c * l3f).exp();
    Ok(ConvergenceFit { e_inf, amplitude, c, energies })
}

/// Dilute-limit trace series result.
#[derive(Debug, Clone, Copy)]
pub struct BornEnergy {
    pub energy: f64,
    /// Largest spectral-radius estimate met on the work grid; the series is
    /// useless when this exceeds about one half.
    pub max_spectral_radius: f64,
    pub series_reliable: bool,
}

/// Weak-contrast expansion of the determinant energy,
/// `E = -sum_m integral dw/2pi sum_{n<=n_max} (1/n) Tr[(K^(m))^n]`.
/// Restricted to dielectric bodies with `eps - 1 <= 0.1`, where the series
/// converges rapidly; agrees with the determinant route to
/// `O(rho^(n_max+1))` in the spectral radius `rho`.
pub fn born_energy(
    cfg: &Configuration,
    n_max: usize,
    l0: usize,
    quad: &QuadratureSpec,
) -> Result<BornEnergy> {
    cfg.validate()?;
    if cfg.mode != Mode::TwoBody {
        return Err(Error::Config("born_energy expects a two-body configuration".into()));
    }
    if n_max == 0 {
        return Err(Error::Domain("trace series needs n_max >= 1".into()));
    }
    for body in [&cfg.body_a, &cfg.body_b] {
        match body {
            Scatterer::ScalarDielectricSphere { epsilon, .. } if *epsilon - 1.0 <= 0.1 => {}
            other => {
                return Err(Error::Domain(format!(
                    "dilute expansion is specified for dielectric bodies with eps - 1 <= 0.1, got {other:?}"
                )));
            }
        }
    }
    let grid = frequency_grid(cfg.decay_gap(), quad.nodes);
    let a_hat = cfg.reduced_separation();
    let results: Vec<(f64, f64)> = (0..=l0 as i32)
        .into_par_iter()
        .map(|m| -> Result<(f64, f64)> {
            let coupling = Coupling::new(cfg.field, m, l0)?;
            let mut sum = 0.0_f64;
            let mut rho_max = 0.0_f64;
            for &(omega, weight) in &grid {
                let t_a = sphere_t_row(&cfg.body_a, l0, omega, cfg.r_ref)?;
                let t_b = sphere_t_row(&cfg.body_b, l0, omega, cfg.r_ref)?;
                let lz_a = body_log_scale(&cfg.body_a, l0, omega, cfg.r_ref)?;
                let lz_b = body_log_scale(&cfg.body_b, l0, omega, cfg.r_ref)?;
                let k = assemble_full_from_parts(
                    &coupling, cfg.field, l0, a_hat * omega, &t_a, &t_b, &lz_a, &lz_b,
                )?;
                let mut power = k.clone();
                let mut series = power.trace();
                let mut prev_tr = series;
                for n in 2..=n_max {
                    power *= &k;
                    let tr = power.trace();
                    series += tr / n as f64;
                    if prev_tr.abs() > 1e-290 {
                        rho_max = rho_max.max((tr / prev_tr).abs());
                    }
                    prev_tr = tr;
                }
                sum += weight * (-series);
            }
            Ok((sum, rho_max))
        })
        .collect::<Result<Vec<_>>>()?;
    let per_m: Vec<f64> = results.iter().map(|r| r.0).collect();
    let rho = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(BornEnergy {
        energy: total_from_per_m(&per_m),
        max_spectral_radius: rho,
        series_reliable: rho <= 0.5,
    })
}

/// Large-separation series for two hard spheres (centers `a` apart):
///
/// ```text
/// E = - R1 R2 / (4 pi a^3)
///     - R1 R2 (R1 + R2) / (8 pi a^4)
///     - R1 R2 (34 R1^2 + 9 R1 R2 + 34 R2^2) / (48 pi a^5)
///     - R1 R2 (R1 + R2)(2 R1^2 + 21 R1 R2 + 2 R2^2) / (36 pi a^6)
/// ```
///
/// `order` keeps the first 1..=4 terms.
pub fn asymptotic_series(r1: f64, r2: f64, a: f64, order: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let terms = [
        -r1 * r2 / (4.0 * pi * a.powi(3)),
        -r1 * r2 * (r1 + r2) / (8.0 * pi * a.powi(4)),
        -r1 * r2 * (34.0 * r1 * r1 + 9.0 * r1 * r2 + 34.0 * r2 * r2) / (48.0 * pi * a.powi(5)),
        -r1 * r2 * (r1 + r2) * (2.0 * r1 * r1 + 21.0 * r1 * r2 + 2.0 * r2 * r2)
            / (36.0 * pi * a.powi(6)),
    ];
    terms.iter().take(order.clamp(1, 4)).sum()
}

/// Leading large-separation interaction `-R1 R2 / (4 pi a^3)`; the s-wave
/// scattering length of a hard sphere equals its radius.
pub fn casimir_polder(r1: f64, r2: f64, a: f64) -> f64 {
    asymptotic_series(r1, r2, a, 1)
}

/// One-dimensional Casimir energy between two scatterers a distance `a`
/// apart, `E = integral dw/2pi ln(1 - e^{-2 a w} r_A(iw) r_B(iw))`.
///
/// Substituting `u = e^{-2 a w}` turns this into a unit-interval integral
/// with (at most) a logarithmic endpoint singularity, which the tanh-sinh
/// rule resolves to near machine precision.
pub fn energy_1d(model_a: &OneDModel, model_b: &OneDModel, a: f64, quad: &QuadratureSpec) -> f64 {
    assert!(a > 0.0, "separation must be positive");
    let level = ((quad.nodes.max(16) as f64).log2().round() as u32).clamp(4, 10);
    let integral = integrate_tanh_sinh(level, |u| {
        let omega = -u.ln() / (2.0 * a);
        let rho = reflection_1d(model_a, omega) * reflection_1d(model_b, omega);
        (-rho * u).ln_1p() / u
    });
    integral / (4.0 * std::f64::consts::PI * a)
}
