//! Sine integral, gamma function, and the first spherical Bessel function.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Sine integral Si(x) = integral of sin(t)/t from 0 to x.
///
/// Odd in `x`; |error| <= 1e-12 absolute for |x| <= 1e3 and approaches pi/2
/// monotonically in envelope for large arguments.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x > 1e15 {
        // sin(x)/x terms are below f64 resolution of the limit value.
        return FRAC_PI_2;
    }
    if x <= 12.0 {
        si_maclaurin(x)
    } else {
        // Si(x) = pi/2 + Im E1(i x) for x > 0.
        FRAC_PI_2 + exponential_integral_e1(Complex64::new(0.0, x)).im
    }
}

fn si_maclaurin(x: f64) -> f64 {
    // Si(x) = sum_k (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
    let x2 = x * x;
    let mut power = x; // (-1)^k x^(2k+1) / (2k+1)!
    let mut sum = power;
    for k in 1..80 {
        let kf = k as f64;
        power *= -x2 / ((2.0 * kf) * (2.0 * kf + 1.0));
        let term = power / (2.0 * kf + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Exponential integral E1(z) for Re z >= 0, z != 0, by modified Lentz
/// evaluation of the even-contracted continued fraction
/// E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(z + 7 - ...)))).
/// Accurate to ~1e-16 for |z| >~ 4; used here only for |z| >= 12.
fn exponential_integral_e1(z: Complex64) -> Complex64 {
    let tiny = Complex64::new(1e-290, 0.0);
    let mut b = z + 1.0;
    let mut f = if b.norm() == 0.0 { tiny } else { b };
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for i in 1..200u32 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = b + a * d;
        if d.norm() == 0.0 {
            d = tiny;
        }
        c = b + a / c;
        if c.norm() == 0.0 {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (-z).exp() / f
}

/// Gamma function for real arguments, by the Lanczos approximation (g = 7,
/// 9 terms) with the reflection formula for x < 1/2.
///
/// Relative error <~ 1e-13 on (0, 171); poles at non-positive integers return
/// infinity/NaN as appropriate.
pub fn gamma_function(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
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
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return PI / ((PI * x).sin() * gamma_function(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Spherical Bessel function j1(x) = sin(x)/x^2 - cos(x)/x.
///
/// Odd in `x`; a Taylor expansion avoids cancellation near the origin.
pub fn spherical_j1(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        return x * (1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0);
    }
    (x.sin() / x - x.cos()) / x
}
