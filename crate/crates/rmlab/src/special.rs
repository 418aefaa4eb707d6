//! Gamma function for complex arguments and the real dilogarithm.

use std::f64::consts::PI;

use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Gamma(z)` by the Lanczos approximation with reflection.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (PI * z).sin();
        return Complex64::new(PI, 0.0) / (s * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// `1 / Gamma(z)`, zero at the poles.
pub fn rgamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        // 1/Gamma(z) = Gamma(1-z) sin(pi z) / pi
        return gamma(1.0 - z) * (PI * z).sin() / PI;
    }
    1.0 / gamma(z)
}

fn dilog_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = 0.0f64;
    let mut n = 1.0;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) || n < 3.0 {
        sum += term / (n * n);
        n += 1.0;
        term *= x;
        if n > 200.0 {
            break;
        }
    }
    sum
}

/// `L2(x) = sum x^n / n^2` for real `x <= 1`.
pub fn dilog(x: f64) -> f64 {
    assert!(x <= 1.0, "dilog is real only for x <= 1");
    if x == 1.0 {
        return PI * PI / 6.0;
    }
    if x < -1.0 {
        let l = (-x).ln();
        return -PI * PI / 6.0 - 0.5 * l * l - dilog(1.0 / x);
    }
    if x < -0.5 {
        let l = (1.0 - x).ln();
        return -dilog(x / (x - 1.0)) - 0.5 * l * l;
    }
    if x <= 0.5 {
        return dilog_series(x);
    }
    PI * PI / 6.0 - x.ln() * (1.0 - x).ln() - dilog(1.0 - x)
}

/// Rogers dilogarithm `L(x) = L2(x) + log(1-x) log(x) / 2` on `(0, 1)`.
pub fn rogers(x: f64) -> f64 {
    dilog(x) + 0.5 * (1.0 - x).ln() * x.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn gamma_at_integers_and_half() {
        assert!((gamma(c(5.0)).re - 24.0).abs() < 1e-12);
        assert!((gamma(c(0.5)).re - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(c(-0.5)).re + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn reciprocal_gamma_near_zero_has_unit_slope() {
        let h = 1e-6;
        let slope = (rgamma(c(h)) - rgamma(c(-h))).re / (2.0 * h);
        assert!((slope - 1.0).abs() < 1e-9);
        assert_eq!(rgamma(c(0.0)).re, 0.0);
    }

    #[test]
    fn gamma_recurrence_off_axis() {
        let z = Complex64::new(1.3, 2.1);
        let r = gamma(z + 1.0) / (z * gamma(z));
        assert!((r - 1.0).norm() < 1e-13);
    }

    #[test]
    fn dilog_at_one_against_partial_sums() {
        // Euler-Maclaurin corrected partial sum of 1/n^2
        let n = 1000.0;
        let partial: f64 = (1..1000).map(|k| 1.0 / (k as f64 * k as f64)).sum();
        let tail = 1.0 / n + 0.5 / (n * n) + 1.0 / (6.0 * n * n * n);
        assert!((dilog(1.0) - (partial + tail)).abs() < 1e-12);
    }

    #[test]
    fn dilog_branches_agree_with_series() {
        for &x in &[-0.9f64, -0.6, -0.3, 0.2, 0.45] {
            let direct: f64 = (1..4000).map(|k| x.powi(k) / (k as f64 * k as f64)).sum();
            assert!((dilog(x) - direct).abs() < 1e-13, "x = {}", x);
        }
        // inversion branch
        let x: f64 = -3.0;
        let l = (-x).ln();
        assert!((dilog(x) + dilog(1.0 / x) + PI * PI / 6.0 + 0.5 * l * l).abs() < 1e-14);
    }
}
