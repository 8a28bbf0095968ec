//! Quadrature rules used by the energy integrals.
//!
//! Two rules are enough for the whole crate: Gauss-Legendre for the smooth
//! frequency integrand (after the rational map onto the unit interval) and a
//! tanh-sinh rule for the one-dimensional closed form, whose integrand has a
//! logarithmic endpoint singularity that Gauss-Legendre handles poorly.

/// A Gauss-Legendre rule on (0, 1).
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    /// Nodes in ascending order, strictly inside (0, 1).
    pub nodes: Vec<f64>,
    /// Weights matching `nodes`; they sum to 1.
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Build the n-point rule. Nodes are the roots of the Legendre polynomial
    /// P_n found by Newton iteration from the Chebyshev-based initial guess.
    pub fn unit(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Roots come in +/- pairs on (-1, 1); compute the upper half.
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi-style initial guess for the i-th root from above.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (p2, d2) = legendre_and_deriv(n, x);
                    dp = d2;
                    x -= p2 / d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
            nodes[i] = -x;
            weights[i] = w;
        }
        if n % 2 == 1 {
            let (_, d) = legendre_and_deriv(n, 0.0);
            nodes[n / 2] = 0.0;
            weights[n / 2] = 2.0 / (d * d);
        }
        // Map (-1, 1) -> (0, 1).
        for i in 0..n {
            nodes[i] = 0.5 * (nodes[i] + 1.0);
            weights[i] *= 0.5;
        }
        GaussLegendre { nodes, weights }
    }
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tanh-sinh (double-exponential) rule for integrals over (0, 1) whose
/// integrand may be singular at either endpoint, as long as the singularity
/// is integrable. `level` doubles the node density per increment.
pub fn tanh_sinh_unit(level: u32) -> (Vec<f64>, Vec<f64>) {
    let h = 1.0 / f64::from(1u32 << level);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let half_pi = 0.5 * std::f64::consts::PI;
    let mut j = 0i64;
    loop {
        let t = h * j as f64;
        let s = half_pi * t.sinh();
        let w = h * half_pi * t.cosh() / s.cosh().powi(2);
        // x = tanh(s) in [0, 1); 1 - x evaluated without cancellation.
        let x = s.tanh();
        let dist = 1.0 / (s.exp() * s.cosh());
        if dist < 1e-15 || w < 1e-300 {
            break;
        }
        nodes.push(0.5 * (1.0 + x));
        weights.push(0.5 * w);
        if j > 0 {
            nodes.push(0.5 * dist);
            weights.push(0.5 * w);
        }
        j += 1;
    }
    (nodes, weights)
}

/// Integrate `f` over (0, 1) with the tanh-sinh rule at the given level.
pub fn integrate_tanh_sinh(level: u32, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (nodes, weights) = tanh_sinh_unit(level);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (&x, &w) in nodes.iter().zip(weights.iter()) {
        let y = w * f(x);
        let t = sum + y;
        comp += if sum.abs() >= y.abs() { (sum - t) + y } else { (y - t) + sum };
        sum = t;
    }
    sum + comp
}
