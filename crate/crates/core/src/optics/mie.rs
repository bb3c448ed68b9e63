//! Mie scattering coefficients and angular functions for a homogeneous
//! sphere (size parameter x = kR, complex refractive index m).
//!
//! Numerically delicate pieces follow the standard stable approaches: the
//! logarithmic derivative D_l(mx) and the Riccati-Bessel ratios
//! psi_l/psi_{l-1} are computed by downward recurrence, chi_l upward.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Series truncation order for size parameter `x`.
pub(crate) fn l_max_for(x: f64) -> usize {
    (x + 4.0 * x.cbrt() + 2.0).ceil() as usize
}

/// Mie coefficients (a_l, b_l) for l = 1..=l_max (index 0 unused).
pub(crate) fn coefficients(
    x: f64,
    m: Complex64,
    l_max: usize,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    debug_assert!(x > 0.0 && l_max >= 1);
    let mx = m * x;
    let start = l_max.max(mx.norm().ceil() as usize) + 16;

    // Logarithmic derivative D_l(mx), downward from D_start = 0.
    let mut d = vec![Complex64::new(0.0, 0.0); start + 1];
    for l in (1..=start).rev() {
        let lf = Complex64::new(l as f64, 0.0) / mx;
        d[l - 1] = lf - (d[l] + lf).inv();
    }

    // Riccati-Bessel psi_l(x): ratios r_l = psi_l / psi_{l-1} downward from
    // the small-ratio asymptote, then rebuilt from psi_0 = sin x.
    let mut ratio = vec![0.0_f64; start + 1];
    ratio[start] = x / (2.0 * start as f64 + 1.0);
    for l in (1..start).rev() {
        ratio[l] = 1.0 / ((2.0 * l as f64 + 1.0) / x - ratio[l + 1]);
    }
    let mut psi = vec![0.0_f64; l_max + 1];
    psi[0] = x.sin();
    for l in 1..=l_max {
        psi[l] = psi[l - 1] * ratio[l];
    }

    // chi_l(x) upward (dominant solution, stable in this direction).
    let mut chi = vec![0.0_f64; l_max + 1];
    chi[0] = x.cos();
    if l_max >= 1 {
        chi[1] = x.cos() / x + x.sin();
    }
    for l in 1..l_max {
        chi[l + 1] = (2.0 * l as f64 + 1.0) / x * chi[l] - chi[l - 1];
    }

    let xi = |l: usize| Complex64::new(psi[l], -chi[l]);

    let mut a = vec![Complex64::new(0.0, 0.0); l_max + 1];
    let mut b = vec![Complex64::new(0.0, 0.0); l_max + 1];
    for l in 1..=l_max {
        let lf = l as f64;
        let fa = d[l] / m + lf / x;
        let fb = d[l] * m + lf / x;
        a[l] = (fa * psi[l] - psi[l - 1]) / (fa * xi(l) - xi(l - 1));
        b[l] = (fb * psi[l] - psi[l - 1]) / (fb * xi(l) - xi(l - 1));
        if !(a[l].re.is_finite()
            && a[l].im.is_finite()
            && b[l].re.is_finite()
            && b[l].im.is_finite())
        {
            return Err(Error::NumericIntegrity(format!(
                "non-finite Mie coefficient at order {l} (x = {x:e}, m = {m})"
            )));
        }
    }
    Ok((a, b))
}

/// Scattering amplitude functions S1(mu), S2(mu) from the coefficient lists
/// (index 0 unused), via the angular functions pi_l, tau_l.
pub(crate) fn s_functions(
    a: &[Complex64],
    b: &[Complex64],
    mu: f64,
) -> (Complex64, Complex64) {
    let l_max = a.len() - 1;
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut s2 = Complex64::new(0.0, 0.0);
    let mut pi_prev = 0.0_f64; // pi_0
    let mut pi_curr = 1.0_f64; // pi_1
    for l in 1..=l_max {
        let lf = l as f64;
        let tau = lf * mu * pi_curr - (lf + 1.0) * pi_prev;
        let weight = (2.0 * lf + 1.0) / (lf * (lf + 1.0));
        s1 += weight * (a[l] * pi_curr + b[l] * tau);
        s2 += weight * (a[l] * tau + b[l] * pi_curr);
        let pi_next = ((2.0 * lf + 1.0) * mu * pi_curr - (lf + 1.0) * pi_prev) / lf;
        pi_prev = pi_curr;
        pi_curr = pi_next;
    }
    (s1, s2)
}
