use casimir_core::angular::{dirichlet_log_scale, em_translation, FieldKind, ScaleSpec};
use casimir_core::quad::GaussLegendre;
use casimir_core::tmatrix::t_em_conducting;
use nalgebra::DMatrix;

fn logdet(mut a: DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for k in 0..n {
        let mut p = k;
        for r in k + 1..n {
            if a[(r, k)].abs() > a[(p, k)].abs() {
                p = r;
            }
        }
        if p != k {
            a.swap_rows(p, k);
        }
        let piv = a[(k, k)];
        s += piv.abs().ln();
        for r in k + 1..n {
            let f = a[(r, k)] / piv;
            for c in k..n {
                a[(r, c)] -= f * a[(k, c)];
            }
        }
    }
    s
}

fn run(a: f64, j0: usize, mphase: bool, sigma: bool) -> (f64, f64, f64) {
    let gap = a - 2.0;
    let rule = GaussLegendre::unit(64);
    let (mut ep, mut em, mut ef) = (0.0, 0.0, 0.0);
    for m in 0..=(j0 as i32) {
        let jmin = (m.unsigned_abs() as usize).max(1);
        let (mut ip, mut im, mut ifull) = (0.0, 0.0, 0.0);
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            let omega = u / (gap * (1.0 - u));
            let wt = w / (gap * (1.0 - u) * (1.0 - u)) / (2.0 * std::f64::consts::PI);
            let lz = dirichlet_log_scale(j0, omega).unwrap();
            let g = em_translation(m, j0, a * omega, &ScaleSpec::LogZ { row: lz.clone(), col: lz.clone() })
                .unwrap()
                .entries;
            let t = t_em_conducting(j0, omega).unwrap();
            let n = g.nrows();
            let mut kt = g.clone();
            let mut m1 = g.clone();
            for c in 0..n {
                let j = jmin + c / 2;
                let tm = c % 2 == 1;
                let tval = t.entries[2 * (j - 1) + c % 2];
                let mut sign = 1.0;
                if mphase && m % 2 == 1 {
                    sign = -sign;
                }
                if sigma && tm {
                    sign = -sign;
                }
                kt.column_mut(c).scale_mut(sign * tval);
                m1.column_mut(c).scale_mut(tval);
            }
            let mut k = &m1 * g.transpose();
            for c in 0..n {
                let j = jmin + c / 2;
                k.column_mut(c).scale_mut(t.entries[2 * (j - 1) + c % 2]);
            }
            let eye = DMatrix::identity(n, n);
            ip += wt * logdet(&eye + &kt);
            im += wt * logdet(&eye - &kt);
            ifull += wt * logdet(&eye - &k);
        }
        let f = if m == 0 { 1.0 } else { 2.0 };
        ep += f * ip;
        em += f * im;
        ef += f * ifull;
    }
    (ep, em, ef)
}

fn main() {
    for (a, j0, te, tm, ts) in [
        (4.0, 10, -1.89e-2, 1.86e-2, -2.864e-4),
        (16.0, 10, -4.47e-5, 4.47e-5, -1.085e-8),
    ] {
        for (mphase, sigma, label) in
            [(true, false, "m-phase"), (false, false, "no-m-phase"), (false, true, "no-m+sigma")]
        {
            let (ep, em, ef) = run(a, j0, mphase, sigma);
            println!(
                "a={a:4} {label:>11}: det(1+Kt)={ep:+.4e} det(1-Kt)={em:+.4e} sum={:+.4e} full={ef:+.4e}",
                ep + em
            );
        }
        println!("a={a:4}   reference: E_e = {te:+.4e}, E_m = {tm:+.4e}, E_s = {ts:+.4e}\n");
    }
}
