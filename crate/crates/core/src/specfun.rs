//! Scaled half-integer modified Bessel functions and combinatorial helpers.
//!
//! Everything on the imaginary frequency axis reduces to `I_{l+1/2}(x)` and
//! `K_{l+1/2}(x)`. Unscaled they span hundreds of orders of magnitude, so this
//! module only ever materializes `e^{-x} I_{l+1/2}(x)` and `e^{x} K_{l+1/2}(x)`
//! (the exponentials cancel analytically in every downstream product), plus a
//! log-domain variant for index/argument combinations where even the scaled
//! values leave the floating range.
//!
//! The elementary closed forms of half-integer Bessel functions (sinh/cosh
//! combinations) are numerically unstable beyond the lowest orders and are
//! never used here except as low-order anchors; `K` rows come from the stable
//! upward recurrence and `I` rows from downward ratio recursion (Miller) or
//! the ascending series, depending on the regime.

use std::sync::OnceLock;

use crate::{Error, Result};

/// One row of scaled modified Bessel values at fixed argument.
///
/// `i_scaled[l] = e^{-x} I_{l+1/2}(x)` and `k_scaled[l] = e^{x} K_{l+1/2}(x)`
/// for `l = 0..=max_order`. For fixed `x` the `k` entries increase strictly
/// with `l` and the `i` entries decrease strictly; adjacent pairs satisfy the
/// Wronskian-like identity
/// `i_scaled[l] * k_scaled[l+1] + i_scaled[l+1] * k_scaled[l] = 1/x`.
#[derive(Debug, Clone)]
pub struct ScaledBesselRow {
    pub x: f64,
    pub i_scaled: Vec<f64>,
    pub k_scaled: Vec<f64>,
}

impl ScaledBesselRow {
    pub fn max_order(&self) -> usize {
        self.i_scaled.len() - 1
    }
}

/// Natural logarithms of the scaled row, for regimes where the scaled values
/// themselves overflow or underflow (tiny `x` with large `l`). All assembly
/// code in `angular`/`kernel` works from this representation so that extreme
/// truncation orders remain usable.
#[derive(Debug, Clone)]
pub struct LogBesselRow {
    pub x: f64,
    /// `log_i[l] = ln(e^{-x} I_{l+1/2}(x))`
    pub log_i: Vec<f64>,
    /// `log_k[l] = ln(e^{x} K_{l+1/2}(x))`
    pub log_k: Vec<f64>,
}

impl LogBesselRow {
    pub fn max_order(&self) -> usize {
        self.log_i.len() - 1
    }
}

/// `ln(e^x K_{1/2}(x)) = 0.5 ln(pi / 2x)`
fn log_k0_scaled(x: f64) -> f64 {
    0.5 * (std::f64::consts::PI / (2.0 * x)).ln()
}

/// `ln(e^-x I_{1/2}(x))`, stable for both tiny and large `x`.
fn log_i0_scaled(x: f64) -> f64 {
    // e^{-x} I_{1/2}(x) = sqrt(2/(pi x)) * (1 - e^{-2x}) / 2
    0.5 * (2.0 / (std::f64::consts::PI * x)).ln() + (-(-2.0 * x).exp_m1() / 2.0).ln()
}

/// Downward ratio recursion for `r_l = I_{l+1/2}(x) / I_{l-1/2}(x)`.
///
/// Starts well above `l_max` (standard Miller margin) where the ratio is
/// effectively the continued-fraction tail, and recurses down through
/// `1/r_l = r_{l+1} + (2l+1)/x`. Returns `r[1..=l_max]` (index 0 unused).
///
/// While the tail error contracts strongly per step for orders above the
/// argument, below it the contraction is only `exp(-S^2/x)` overall, so the
/// start order carries an extra `O(sqrt(x))` margin.
fn i_ratios(l_max: usize, x: f64) -> Vec<f64> {
    let start = l_max
        + 15
        + ((40.0 * l_max as f64).sqrt().ceil() as usize)
        + ((6.5 * x.sqrt()).ceil() as usize);
    let mut r = 0.0_f64;
    let mut out = vec![0.0; l_max + 1];
    for l in (1..=start).rev() {
        r = 1.0 / (r + (2 * l + 1) as f64 / x);
        if l <= l_max {
            out[l] = r;
        }
    }
    out
}

/// Ascending-series evaluation of `ln(e^{-x} I_{l+1/2}(x))`.
///
/// All series terms are positive, so there is no cancellation; used when
/// `x < 0.5 (l+1)` where the terms decay quickly.
fn log_i_series(l: usize, x: f64) -> f64 {
    let nu = l as f64 + 0.5;
    // ln[(x/2)^{l+1/2} / Gamma(l + 3/2)] - x
    let ln_prefactor = (nu) * (0.5 * x).ln() - ln_gamma_half(l) - x;
    let q = 0.25 * x * x;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 1..500 {
        term *= q / (k as f64 * (nu + k as f64));
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    ln_prefactor + sum.ln()
}

/// `ln Gamma(l + 3/2)` via factorials: `Gamma(l+3/2) = (2l+2)! sqrt(pi) / (4^{l+1} (l+1)!)`.
fn ln_gamma_half(l: usize) -> f64 {
    log_factorial_unchecked(2 * l + 2) - log_factorial_unchecked(l + 1)
        - (l as f64 + 1.0) * 4.0_f64.ln()
        + 0.5 * std::f64::consts::PI.ln()
}

/// Scaled modified Bessel row `(e^{-x} I_{l+1/2}, e^{x} K_{l+1/2})` for
/// `l = 0..=l_max`.
///
/// `K` is built by upward recurrence from the two lowest orders; `I` by
/// downward ratio recursion with normalization at `l = 0`, switching to the
/// ascending series for `x < 0.5 (l+1)`. Fails when the scaled values
/// themselves leave the floating range.
pub fn bessel_ik_half_scaled(l_max: usize, x: f64) -> Result<ScaledBesselRow> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel argument must be positive, got {x}")));
    }
    let mut k = vec![0.0; l_max + 1];
    k[0] = (std::f64::consts::PI / (2.0 * x)).sqrt();
    if l_max >= 1 {
        k[1] = k[0] * (1.0 + 1.0 / x);
    }
    for l in 1..l_max {
        k[l + 1] = k[l - 1] + (2 * l + 1) as f64 / x * k[l];
        if !k[l + 1].is_finite() {
            return Err(Error::BesselRange { l: l + 1, x });
        }
    }

    let mut i = vec![0.0; l_max + 1];
    i[0] = log_i0_scaled(x).exp();
    let split = (2.0 * x - 1.0).floor().max(-1.0) as i64; // largest l handled by recursion
    let ratios = if split >= 1 {
        i_ratios(split.min(l_max as i64) as usize, x)
    } else {
        Vec::new()
    };
    for l in 1..=l_max {
        if (l as i64) <= split {
            i[l] = i[l - 1] * ratios[l];
        } else {
            i[l] = log_i_series(l, x).exp();
        }
        if i[l] < f64::MIN_POSITIVE {
            return Err(Error::BesselRange { l, x });
        }
    }
    Ok(ScaledBesselRow { x, i_scaled: i, k_scaled: k })
}

/// Log-domain row; never leaves the floating range for any positive argument
/// and order met in practice.
pub fn bessel_ik_half_log(l_max: usize, x: f64) -> Result<LogBesselRow> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel argument must be positive, got {x}")));
    }
    let mut log_k = vec![0.0; l_max + 1];
    log_k[0] = log_k0_scaled(x);
    if l_max >= 1 {
        log_k[1] = log_k[0] + (1.0 / x).ln_1p();
    }
    for l in 1..l_max {
        // k[l+1] = k[l-1] + (2l+1)/x * k[l], carried out on logarithms
        let c = (2 * l + 1) as f64 / x;
        log_k[l + 1] = log_k[l] + (c + (log_k[l - 1] - log_k[l]).exp()).ln();
    }

    let mut log_i = vec![0.0; l_max + 1];
    log_i[0] = log_i0_scaled(x);
    if l_max >= 1 {
        let ratios = i_ratios(l_max, x);
        for l in 1..=l_max {
            log_i[l] = log_i[l - 1] + ratios[l].ln();
        }
    }
    Ok(LogBesselRow { x, log_i, log_k })
}

/// Scaled derivative combinations needed by the transverse-magnetic channel:
/// returns `(e^{-x} d/dx[sqrt(x) I_{l+1/2}(x)], e^{x} d/dx[sqrt(x) K_{l+1/2}(x)])`.
///
/// Built from the scaled row through the derivative recurrences; no numerical
/// differentiation is involved.
pub fn bessel_sqrtx_deriv_scaled(l: usize, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel argument must be positive, got {x}")));
    }
    let row = bessel_ik_half_scaled(l.max(1), x)?;
    let sqrt_x = x.sqrt();
    // d/dx(sqrt(x) I_nu) = sqrt(x) I_{nu-1} - (nu - 1/2) I_nu / sqrt(x), nu = l + 1/2
    // d/dx(sqrt(x) K_nu) = -sqrt(x) K_{nu-1} - (nu - 1/2) K_nu / sqrt(x)
    let (i_m1, k_m1) = if l == 0 {
        // I_{-1/2}, K_{-1/2} anchors: e^{-x} I_{-1/2} = sqrt(2/pi x) (1+e^{-2x})/2,
        // K_{-1/2} = K_{1/2}.
        let i = (2.0 / (std::f64::consts::PI * x)).sqrt() * 0.5 * (1.0 + (-2.0 * x).exp());
        (i, row.k_scaled[0])
    } else {
        (row.i_scaled[l - 1], row.k_scaled[l - 1])
    };
    let di = sqrt_x * i_m1 - (l as f64) / sqrt_x * row.i_scaled[l];
    let dk = -sqrt_x * k_m1 - (l as f64) / sqrt_x * row.k_scaled[l];
    Ok((di, dk))
}

const FACTORIAL_TABLE_LEN: usize = 257;
const LOG_FACTORIAL_MAX_N: usize = 1_000_000;

fn log_factorial_table() -> &'static [f64; FACTORIAL_TABLE_LEN] {
    static TABLE: OnceLock<[f64; FACTORIAL_TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; FACTORIAL_TABLE_LEN];
        let mut sum = 0.0_f64;
        let mut comp = 0.0_f64;
        for n in 1..FACTORIAL_TABLE_LEN {
            // Kahan-compensated accumulation of ln(n)
            let y = (n as f64).ln() - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
            t[n] = sum;
        }
        t
    })
}

fn log_factorial_unchecked(n: usize) -> f64 {
    if n < FACTORIAL_TABLE_LEN {
        log_factorial_table()[n]
    } else {
        // Stirling series for ln Gamma(x) at x = n + 1; the first omitted
        // term is below 1e-24 for n > 256.
        let x = n as f64 + 1.0;
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln()
            + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
    }
}

/// `ln(n!)`, exact-table driven for `n <= 256` and Stirling beyond.
pub fn log_factorial(n: usize) -> Result<f64> {
    if n > LOG_FACTORIAL_MAX_N {
        return Err(Error::Domain(format!("log_factorial supports n <= 10^6, got {n}")));
    }
    Ok(log_factorial_unchecked(n))
}

/// Internal fast path for angular-momentum code: no bound check.
pub(crate) fn ln_fact(n: usize) -> f64 {
    debug_assert!(n <= LOG_FACTORIAL_MAX_N);
    log_factorial_unchecked(n)
}
