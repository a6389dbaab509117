//! Central F distribution: tail probabilities and quantiles.
//!
//! Everything here is evaluated in `f64` regardless of the working scalar.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
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

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front = (a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b)).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Density of Beta(a, b) at `x`.
fn beta_pdf(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta(a, b)).exp()
}

fn check_dof(d1: f64, d2: f64) -> Result<()> {
    if !(d1 >= 1.0 && d2 >= 1.0 && d1.is_finite() && d2.is_finite()) {
        return Err(Error::Domain(format!(
            "F degrees of freedom must be >= 1, got ({d1}, {d2})"
        )));
    }
    Ok(())
}

/// `P(F(d1, d2) <= x)`.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_dof(d1, d2)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok(beta_inc(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2)))
}

/// `P(F(d1, d2) > x)`, evaluated on the upper-tail side for accuracy.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_dof(d1, d2)?;
    if x <= 0.0 {
        return Ok(1.0);
    }
    Ok(beta_inc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x)))
}

/// Solves `I_y(a, b) = target` for `y` by safeguarded Newton iteration.
fn invert_beta_inc(a: f64, b: f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut y = 0.5;
    for _ in 0..500 {
        let g = beta_inc(a, b, y) - target;
        if g == 0.0 {
            return y;
        }
        if g < 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let pdf = beta_pdf(a, b, y);
        let mut next = if pdf > 0.0 && pdf.is_finite() { y - g / pdf } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - y).abs();
        y = next;
        if step <= 1e-16 * y.max(1e-300) || hi - lo <= 1e-16 * y.max(1e-300) {
            break;
        }
    }
    y
}

/// Upper-α point of the central F distribution: `x` with `P(F(d1, d2) > x) = α`.
pub fn f_quantile(alpha: f64, d1: usize, d2: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let (d1, d2) = (d1 as f64, d2 as f64);
    check_dof(d1, d2)?;
    if alpha < 0.5 {
        // upper tail: y = d2 / (d2 + d1 x), small y <=> large x
        let y = invert_beta_inc(d2 / 2.0, d1 / 2.0, alpha);
        Ok(d2 * (1.0 - y) / (d1 * y))
    } else {
        // lower tail: z = d1 x / (d2 + d1 x)
        let z = invert_beta_inc(d1 / 2.0, d2 / 2.0, 1.0 - alpha);
        Ok(d2 * z / (d1 * (1.0 - z)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut fact = 1.0_f64;
        for n in 1..30 {
            assert!((ln_gamma(n as f64) - fact.ln()).abs() < 1e-12 * fact.ln().max(1.0));
            fact *= n as f64;
        }
        let half = ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln();
        assert!(half.abs() < 1e-14);
    }

    #[test]
    fn beta_inc_closed_forms() {
        // I_x(1, b) = 1 - (1-x)^b ; I_x(a, 1) = x^a
        for &x in &[0.01, 0.3, 0.77, 0.999] {
            assert!(rel(beta_inc(1.0, 3.5, x), 1.0 - (1.0 - x).powf(3.5)) < 1e-13);
            assert!(rel(beta_inc(2.5, 1.0, x), x.powf(2.5)) < 1e-13);
        }
    }

    #[test]
    fn median_of_f11_is_one() {
        assert!((f_quantile(0.5, 1, 1).unwrap() - 1.0).abs() < 1e-10);
    }

    // Reference values from an independent implementation (scipy.stats.f.isf).
    #[test]
    fn quantiles_match_reference_implementation() {
        let cases = [
            (0.01, 2, 4998, 4.609_416_009_441_565),
            (0.05, 2, 10, 4.102_821_015_130_400_5),
            (0.01, 4, 4996, 3.322_924_456_354_009_2),
            (0.01, 2, 48, 5.076_663_807_086_12),
            (0.01, 4, 46, 3.756_957_114_721_799),
            (0.01, 2, 498, 4.648_019_466_296_088_5),
            (0.1, 3, 7, 3.074_071_993_909_001),
            (0.001, 5, 20, 6.460_561_849_707_36),
            (0.99, 2, 30, 0.010_053_703_580_635_92),
            (0.3, 1, 2, 1.921_568_627_450_979),
        ];
        for (alpha, d1, d2, want) in cases {
            let got = f_quantile(alpha, d1, d2).unwrap();
            assert!(rel(got, want) < 1e-10, "F_{alpha}({d1},{d2}) = {got}, want {want}");
        }
    }

    #[test]
    fn quantile_inverts_survival_function() {
        for &(alpha, d1, d2) in &[(0.01, 3usize, 40usize), (0.2, 7, 9), (0.7, 1, 100)] {
            let x = f_quantile(alpha, d1, d2).unwrap();
            let p = f_sf(x, d1 as f64, d2 as f64).unwrap();
            assert!(rel(p, alpha) < 1e-9);
            let c = f_cdf(x, d1 as f64, d2 as f64).unwrap();
            assert!((c + p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(f_quantile(0.0, 2, 5), Err(Error::Domain(_))));
        assert!(matches!(f_quantile(1.0, 2, 5), Err(Error::Domain(_))));
        assert!(matches!(f_quantile(0.1, 0, 5), Err(Error::Domain(_))));
        assert!(matches!(f_quantile(0.1, 3, 0), Err(Error::Domain(_))));
    }
}
