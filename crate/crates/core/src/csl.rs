//! Continuous spontaneous localization (CSL): an intrinsic collapse process
//! parameterized by a rate `lambda` and a localization length `r_c`.
//!
//! For a rigid sphere the collapse noise couples through the mass form
//! factor mu(q); the resulting fringe-amplitude kernel at path separation x
//! is R(x) = exp[Gamma_CSL (g(x) - 1) (t1 + t2)] with g(0) = 1 and
//! g(infinity) = 0, so fully separated paths decay at the total rate
//! Gamma_CSL.

use crate::constants::{AMU, HBAR};
use crate::environment::KernelGeometry;
use crate::error::{Error, Result};
use crate::numerics::{integrate_damped_semiinf, sine_integral, spherical_j1, QuadratureSpec};
use std::f64::consts::{FRAC_PI_2, PI};

/// Reference mass of the collapse-rate definition [kg].
const REFERENCE_MASS_KG: f64 = AMU;

/// Collapse-model parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CslParams {
    /// Collapse rate per nucleon [1/s].
    pub lambda_per_s: f64,
    /// Localization length [m].
    pub r_c_m: f64,
}

impl CslParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_per_s >= 0.0 && self.lambda_per_s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "collapse rate lambda must be non-negative and finite, got {:e}",
                self.lambda_per_s
            )));
        }
        if !(self.r_c_m > 0.0 && self.r_c_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "localization length r_c must be positive and finite, got {:e}",
                self.r_c_m
            )));
        }
        Ok(())
    }
}

/// Mass form factor of a homogeneous sphere at momentum transfer `q`:
/// mu(q) = rho (4 pi hbar R^2 / q) j1(q R / hbar), with mu(0) = m.
pub fn form_factor(radius_m: f64, density_kg_m3: f64, momentum_kg_m_s: f64) -> f64 {
    let mass = density_kg_m3 * 4.0 / 3.0 * PI * radius_m.powi(3);
    if momentum_kg_m_s == 0.0 {
        return mass;
    }
    let arg = momentum_kg_m_s * radius_m / HBAR;
    density_kg_m3 * 4.0 * PI * HBAR * radius_m * radius_m / momentum_kg_m_s * spherical_j1(arg)
}

/// Sphere-geometry part of the CSL action at one localization length,
/// prepared once and reused across collapse rates and separations.
#[derive(Debug, Clone)]
pub struct CslShape {
    r_c_m: f64,
    radius_m: f64,
    /// Gamma_CSL / lambda [dimensionless].
    gamma_per_lambda: f64,
    /// Normalization of the momentum-transfer weight.
    weight_norm: f64,
    /// First inverse moment of the weight, Int w(u)/u du; drives the
    /// large-separation tail of `g`.
    inv_u_moment: f64,
    quad: QuadratureSpec,
}

impl CslShape {
    pub fn new(
        r_c_m: f64,
        radius_m: f64,
        density_kg_m3: f64,
        quad: QuadratureSpec,
    ) -> Result<Self> {
        for (value, name) in [
            (r_c_m, "localization length"),
            (radius_m, "sphere radius"),
            (density_kg_m3, "density"),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {value:e}"
                )));
            }
        }
        quad.validate()?;
        let weight = weight_fn(r_c_m, radius_m);
        let weight_norm = integrate_damped_semiinf(&weight, 1.0, &quad)?.value;
        let inv_u_moment =
            integrate_damped_semiinf(|u| if u == 0.0 { 0.0 } else { weight(u) / u }, 1.0, &quad)?
                .value;
        if !(weight_norm > 0.0 && weight_norm.is_finite())
            || !(inv_u_moment > 0.0 && inv_u_moment.is_finite())
        {
            return Err(Error::NumericIntegrity(format!(
                "CSL weight moments are {weight_norm:e} and {inv_u_moment:e}"
            )));
        }
        let mass = density_kg_m3 * 4.0 / 3.0 * PI * radius_m.powi(3);
        let gamma_per_lambda = 4.0 * (2.0 / PI).sqrt() * weight_norm * (mass / REFERENCE_MASS_KG)
            * (mass / REFERENCE_MASS_KG);
        Ok(Self {
            r_c_m,
            radius_m,
            gamma_per_lambda,
            weight_norm,
            inv_u_moment,
            quad,
        })
    }

    pub fn r_c_m(&self) -> f64 {
        self.r_c_m
    }

    /// Total collapse rate per unit lambda, Gamma_CSL / lambda.
    pub fn gamma_per_lambda(&self) -> f64 {
        self.gamma_per_lambda
    }

    /// Weighted angular average g(x) = < Si(qx/hbar) / (qx/hbar) > over the
    /// momentum-transfer distribution; 1 at x = 0, 0 at large separation.
    pub fn g(&self, x_m: f64) -> Result<f64> {
        if x_m == 0.0 {
            return Ok(1.0);
        }
        if !(x_m > 0.0 && x_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "separation must be non-negative and finite, got {x_m:e}"
            )));
        }
        let scale = x_m / self.r_c_m;
        if scale >= self.asymptotic_threshold() {
            // Si(v)/v -> pi/(2v): the oscillatory remainder is the Fourier
            // overlap of two entire functions and is beyond all orders in
            // 1/scale (it falls off like exp(-(scale - 2 R/r_c)^2 / 4)).
            return Ok(FRAC_PI_2 * self.inv_u_moment / (scale * self.weight_norm));
        }
        let weight = weight_fn(self.r_c_m, self.radius_m);
        let value = integrate_damped_semiinf(
            |u| {
                let v = u * scale;
                weight(u) * sine_integral(v) / v
            },
            1.0,
            &self.quad,
        )?
        .value;
        Ok(value / self.weight_norm)
    }

    /// Saturation profile f(x) = (2/pi) < Si(qx/hbar) >; 0 at x = 0 and
    /// approaching 1 once the separation dwarfs the localization length.
    /// Because Si overshoots pi/2, f transiently exceeds 1 by up to ~1e-3
    /// around x ~ 10 r_c before settling onto 1 from above like 1/x^3.
    pub fn f(&self, x_m: f64) -> Result<f64> {
        if x_m == 0.0 {
            return Ok(0.0);
        }
        if !(x_m > 0.0 && x_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "separation must be non-negative and finite, got {x_m:e}"
            )));
        }
        let scale = x_m / self.r_c_m;
        if scale >= self.asymptotic_threshold() {
            // Watson's lemma on the weight's cumulative integral: the u^2
            // leading term of the weight fixes the 1/scale^3 coefficient,
            // the next order picks up the sphere form factor's curvature.
            let ratio = self.radius_m / self.r_c_m;
            let tail = (2.0 / PI) / self.weight_norm
                * ((2.0 / 3.0) / scale.powi(3)
                    + (24.0 / 5.0) * (1.0 + ratio * ratio / 5.0) / scale.powi(5));
            return Ok(1.0 + tail);
        }
        let weight = weight_fn(self.r_c_m, self.radius_m);
        let value = integrate_damped_semiinf(
            |u| weight(u) * sine_integral(u * scale),
            1.0,
            &self.quad,
        )?
        .value;
        Ok(value / (FRAC_PI_2 * self.weight_norm))
    }

    /// Fringe-amplitude kernel R(x) = exp[lambda * (Gamma/lambda) *
    /// (g(x) - 1) * t_total].
    pub fn kernel(&self, lambda_per_s: f64, x_m: f64, t_total_s: f64) -> Result<f64> {
        Ok((lambda_per_s * self.gamma_per_lambda * (self.g(x_m)? - 1.0) * t_total_s).exp())
    }

    /// Separation/localization ratio beyond which the weighted sine-integral
    /// averages switch to their large-argument expansions. The margin keeps
    /// the neglected Fourier-overlap remainder, which carries frequency
    /// content up to twice the sphere/localization size ratio, below 1e-15.
    fn asymptotic_threshold(&self) -> f64 {
        2.0 * self.radius_m / self.r_c_m + 100.0
    }
}

/// Momentum-transfer weight u^2 e^{-u^2} [mu(u hbar / r_c) / m]^2 as a
/// closure. The form factor is carried relative to the sphere mass so the
/// integrand stays O(1); mu/m = 3 j1(u R / r_c) / (u R / r_c), continued to
/// 1 at u = 0.
fn weight_fn(r_c_m: f64, radius_m: f64) -> impl Fn(f64) -> f64 + Copy {
    let size_ratio = radius_m / r_c_m;
    move |u: f64| {
        let v = u * size_ratio;
        let mu_rel = if v == 0.0 {
            1.0
        } else {
            3.0 * spherical_j1(v) / v
        };
        u * u * (-u * u).exp() * mu_rel * mu_rel
    }
}

/// Total CSL decoherence rate Gamma_CSL for a homogeneous sphere [1/s]:
/// 4 sqrt(2/pi) (lambda / m0^2) Int_0^inf du u^2 e^{-u^2} mu(u hbar/r_c)^2.
pub fn csl_rate(
    params: &CslParams,
    radius_m: f64,
    density_kg_m3: f64,
    quad: QuadratureSpec,
) -> Result<f64> {
    params.validate()?;
    Ok(params.lambda_per_s * CslShape::new(params.r_c_m, radius_m, density_kg_m3, quad)?.gamma_per_lambda())
}

/// Saturation profile f(x) (see [`CslShape::f`]) built from scratch.
pub fn csl_f(
    x_m: f64,
    r_c_m: f64,
    radius_m: f64,
    density_kg_m3: f64,
    quad: QuadratureSpec,
) -> Result<f64> {
    CslShape::new(r_c_m, radius_m, density_kg_m3, quad)?.f(x_m)
}

/// CSL fringe-amplitude kernel R_n at the n-th harmonic separation of the
/// given interferometer geometry.
pub fn csl_kernel(
    n: u32,
    geometry: &KernelGeometry,
    params: &CslParams,
    radius_m: f64,
    density_kg_m3: f64,
    quad: QuadratureSpec,
) -> Result<f64> {
    geometry.validate()?;
    params.validate()?;
    let shape = CslShape::new(params.r_c_m, radius_m, density_kg_m3, quad)?;
    shape.kernel(
        params.lambda_per_s,
        geometry.separation_m(n),
        geometry.total_time_s(),
    )
}
