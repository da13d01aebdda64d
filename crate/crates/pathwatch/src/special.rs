//! Special functions backing the Beta/Binomial machinery.
//!
//! Everything here is iterated to convergence in f64 rather than relying on
//! fixed-order polynomial fits, except `ln_gamma` which uses the Lanczos
//! approximation (g = 7, 9 coefficients, ~1e-14 relative).

/// Lanczos coefficients for g = 7.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma domain: x > 0, got {x}");
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a+b).
pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

const MAX_ITER: usize = 400;
const CF_EPS: f64 = 3.0e-16;
const CF_TINY: f64 = 1.0e-300;

/// Regularized incomplete beta I_x(a, b) by continued fraction, with the
/// symmetry switch at x = (a+1)/(a+b+2) so the fraction always converges
/// from the fast side. Stable for the b >> a regime this crate lives in.
pub(crate) fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    debug_assert!((0.0..=1.0).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let ln_prefix = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        (ln_prefix.exp() / a * beta_cf(a, b, x)).clamp(0.0, 1.0)
    } else {
        // I_x(a,b) = 1 − I_{1−x}(b,a)
        (1.0 - ln_prefix.exp() / b * beta_cf(b, a, 1.0 - x)).clamp(0.0, 1.0)
    }
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Regularized lower incomplete gamma P(a, x), series for x < a+1 and
/// continued fraction otherwise.
pub(crate) fn reg_gamma_lower(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 − P(a, x).
pub(crate) fn reg_gamma_upper(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cf(a, x)
    }
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * CF_EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / CF_TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = b + an / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Stirling-series error: ln Γ(z+1) − [(z+1/2) ln z − z + ln√(2π)].
/// Small and cancellation-free, the key to accurate binomial pmfs at
/// large n where direct log-gamma differences lose digits.
pub(crate) fn stirlerr(z: f64) -> f64 {
    if z < 16.0 {
        ln_gamma(z + 1.0) - ((z + 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln())
    } else {
        let inv = 1.0 / z;
        let inv2 = inv * inv;
        inv * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0 + inv2 * (1.0 / 1260.0 + inv2 * (-1.0 / 1680.0 + inv2 / 1188.0))))
    }
}

/// Binomial deviance term x·ln(x/m) + m − x, evaluated by series when
/// x ≈ m to avoid cancellation (Loader's bd0).
pub(crate) fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

/// Standard normal CDF Φ(z), routed through the incomplete gamma so the
/// tails keep full double precision: the lower tail goes through Q
/// directly rather than 1 − P, which would cancel.
pub(crate) fn std_normal_cdf(z: f64) -> f64 {
    if z == 0.0 {
        return 0.5;
    }
    let x = 0.5 * z * z;
    if z > 0.0 {
        0.5 + 0.5 * reg_gamma_lower(0.5, x)
    } else {
        0.5 * reg_gamma_upper(0.5, x)
    }
}

/// Upper tail Φ̄(z) = 1 − Φ(z), computed without cancellation.
pub(crate) fn std_normal_sf(z: f64) -> f64 {
    std_normal_cdf(-z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ln_gamma_known_values() {
        // Γ(0.5) = √π
        assert_abs_diff_eq!(ln_gamma(0.5), 0.5723649429247001, epsilon = 1e-13);
        assert_abs_diff_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(2.0), 0.0, epsilon = 1e-14);
        // Γ(5) = 24
        assert_abs_diff_eq!(ln_gamma(5.0), 24.0f64.ln(), epsilon = 1e-13);
        // large argument, reference from an independent implementation
        assert_abs_diff_eq!(ln_gamma(10000.5), 82104.32265412837, epsilon = 1e-7);
    }

    #[test]
    fn ln_gamma_factorials() {
        let mut ln_fact = 0.0;
        for n in 2..60u32 {
            ln_fact += f64::from(n - 1).ln();
            assert_abs_diff_eq!(
                ln_gamma(f64::from(n)),
                ln_fact,
                epsilon = 1e-11 * ln_fact.max(1.0)
            );
        }
    }

    #[test]
    fn ln_gamma_half_integers() {
        // Γ(n + 1/2) = (2n)! √π / (4^n n!)
        for n in 1..30u32 {
            let mut expect = 0.5 * std::f64::consts::PI.ln();
            for k in 1..=n {
                // multiply by (k − 1/2)
                expect += (f64::from(k) - 0.5).ln();
            }
            assert_abs_diff_eq!(ln_gamma(f64::from(n) + 0.5), expect, epsilon = 1e-11);
        }
    }

    #[test]
    fn ln_beta_reference() {
        assert_abs_diff_eq!(ln_beta(6.5, 9994.5), -54.20286250038771, epsilon = 1e-9);
        assert_abs_diff_eq!(ln_beta(1.0, 1.0), 0.0, epsilon = 1e-14);
        // B(0.5, 0.5) = π
        assert_abs_diff_eq!(
            ln_beta(0.5, 0.5),
            std::f64::consts::PI.ln(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn inc_beta_uniform_is_identity() {
        for &x in &[0.0, 0.1, 0.25, 0.5, 0.77, 1.0] {
            assert_abs_diff_eq!(reg_inc_beta(1.0, 1.0, x), x, epsilon = 1e-14);
        }
    }

    #[test]
    fn inc_beta_arcsine_closed_form() {
        // I_x(1/2, 1/2) = (2/π) asin(√x)
        for &x in &[1e-6f64, 0.005, 0.03, 0.2, 0.5, 0.9, 0.999] {
            let expect = 2.0 / std::f64::consts::PI * x.sqrt().asin();
            assert_abs_diff_eq!(reg_inc_beta(0.5, 0.5, x), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn inc_beta_symmetry() {
        for &(a, b, x) in &[(2.0, 3.0, 0.3), (0.5, 9994.5, 1e-4), (6.5, 9994.5, 0.001)] {
            let lhs = reg_inc_beta(a, b, x);
            let rhs = 1.0 - reg_inc_beta(b, a, 1.0 - x);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn inc_gamma_complement() {
        for &(a, x) in &[
            (0.5, 0.2),
            (0.5, 3.0),
            (6.5, 2.0),
            (6.5, 20.0),
            (40.0, 35.0),
        ] {
            assert_abs_diff_eq!(
                reg_gamma_lower(a, x) + reg_gamma_upper(a, x),
                1.0,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn normal_cdf_reference_values() {
        assert_abs_diff_eq!(std_normal_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(std_normal_cdf(1.0), 0.8413447460685429, epsilon = 1e-14);
        assert_abs_diff_eq!(std_normal_cdf(-2.0), 0.022750131948179212, epsilon = 1e-14);
        assert_abs_diff_eq!(std_normal_cdf(1.6448536269514722), 0.95, epsilon = 1e-12);
        // deep tail stays finite and positive
        let far = std_normal_sf(8.0);
        assert!(far > 0.0 && far < 1e-14);
        assert_abs_diff_eq!(far, 6.22096057427178e-16, epsilon = 1e-21);
    }

    #[test]
    fn normal_cdf_symmetry() {
        for &z in &[0.1, 0.5, 1.3, 2.7, 5.0] {
            assert_abs_diff_eq!(std_normal_cdf(z) + std_normal_cdf(-z), 1.0, epsilon = 1e-14);
        }
    }
}
