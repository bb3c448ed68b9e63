//! Deterministic adaptive Gauss–Legendre quadrature.
//!
//! Panels are refined globally: the panel with the largest local error
//! estimate (Gauss 15 vs. Gauss 7 difference) is bisected until the summed
//! error bound meets the tolerance. All tie-breaking is by panel position, so
//! results are bit-reproducible regardless of call context.

use crate::error::{Error, Result};
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Tolerances and budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Target relative error on the integral value.
    pub relative_tolerance: f64,
    /// Absolute error floor (dominates when the integral is near zero).
    pub absolute_tolerance: f64,
    /// Maximum number of panel bisections before giving up.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-8,
            absolute_tolerance: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance.is_finite()) {
            return Err(Error::InvalidParameter(
                "quadrature relative_tolerance must be positive and finite".into(),
            ));
        }
        if !(self.absolute_tolerance > 0.0 && self.absolute_tolerance.is_finite()) {
            return Err(Error::InvalidParameter(
                "quadrature absolute_tolerance must be positive and finite".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter(
                "quadrature max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// An integral value with its estimated error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_bound: f64,
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule order must be at least 1");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess for the i-th positive root.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0_f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let pk = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = pk;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1e-3) {
                // One clean evaluation of the derivative at the final root.
                let (mut q0, mut q1) = (1.0_f64, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let qk = ((2.0 * kf - 1.0) * x * q1 - (kf - 1.0) * q0) / kf;
                    q0 = q1;
                    q1 = qk;
                }
                dp = nf * (x * q1 - q0) / (x * x - 1.0);
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn embedded_rules() -> &'static ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
    static RULES: OnceLock<((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>))> = OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre_rule(7), gauss_legendre_rule(15)))
}

/// Integrate `f` over `[a, b]` with the fixed `n`-point Gauss–Legendre rule.
pub fn fixed_gauss_legendre(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre_rule(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        acc += w * f(c + h * x);
    }
    h * acc
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.a == other.a && self.b == other.b
    }
}
impl Eq for Panel {}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap on error; deterministic tie-break on position (leftmost,
        // then shortest, pops first).
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
            .then_with(|| other.b.total_cmp(&self.b))
    }
}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn evaluate_panel(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Panel {
    let ((n7, w7), (n15, w15)) = embedded_rules();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut g7 = 0.0;
    for (x, w) in n7.iter().zip(w7) {
        g7 += w * f(c + h * x);
    }
    let mut g15 = 0.0;
    for (x, w) in n15.iter().zip(w15) {
        g15 += w * f(c + h * x);
    }
    Panel {
        a,
        b,
        value: h * g15,
        error: (h * (g15 - g7)).abs(),
    }
}

/// Adaptively integrate `f` over the finite interval `[a, b]`.
///
/// Returns the integral and an error bound, or
/// [`Error::QuadratureNonConvergence`] carrying the best estimate if the
/// subdivision budget is exhausted before the tolerance is met.
pub fn integrate_adaptive(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(
            "integration bounds must be finite".into(),
        ));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error_bound: 0.0,
        });
    }
    if a > b {
        return Err(Error::InvalidParameter(format!(
            "integration bounds out of order: [{a:e}, {b:e}]"
        )));
    }

    // Seed with a uniform partition so features much narrower than the
    // interval cannot hide between the nodes of a single coarse panel.
    const INITIAL_PANELS: usize = 16;
    let mut heap = BinaryHeap::new();
    for i in 0..INITIAL_PANELS {
        let left = a + (b - a) * i as f64 / INITIAL_PANELS as f64;
        let right = if i + 1 == INITIAL_PANELS {
            b
        } else {
            a + (b - a) * (i + 1) as f64 / INITIAL_PANELS as f64
        };
        heap.push(evaluate_panel(&mut f, left, right));
    }
    let mut subdivisions = 0usize;

    loop {
        // Canonical left-to-right summation so the result never depends on
        // heap layout.
        let mut panels: Vec<Panel> = heap.iter().copied().collect();
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let tolerance = spec
            .absolute_tolerance
            .max(spec.relative_tolerance * total.abs());

        if error <= tolerance {
            return Ok(Quadrature {
                value: total,
                error_bound: error,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                best_estimate: total,
                error_bound: error,
                subdivisions,
            });
        }

        let worst = heap.pop().expect("heap cannot be empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution: cannot refine further.
            return Err(Error::QuadratureNonConvergence {
                best_estimate: total,
                error_bound: error,
                subdivisions,
            });
        }
        heap.push(evaluate_panel(&mut f, worst.a, mid));
        heap.push(evaluate_panel(&mut f, mid, worst.b));
        subdivisions += 1;
    }
}

/// Integrate a function that decays on the scale `sigma` over `[0, inf)`.
///
/// The integrand is assumed negligible beyond `30 * sigma` (true for the
/// Gaussian- and Boltzmann-damped integrands in this crate); the integral is
/// evaluated adaptively on `[0, 30 * sigma]`.
pub fn integrate_damped_semiinf(
    f: impl FnMut(f64) -> f64,
    sigma: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "damping scale must be positive and finite, got {sigma:e}"
        )));
    }
    integrate_adaptive(f, 0.0, 30.0 * sigma, spec)
}
