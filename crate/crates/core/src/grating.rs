//! The optical phase grating: a retro-reflected laser pulse whose standing
//! wave imprints a position-dependent phase on the matter wave and, through
//! photon absorption and scattering, also acts as a weak amplitude grating
//! and decoherence source.
//!
//! The fringe pattern is built from harmonic coefficients B_n evaluated at
//! the path separation s_n the interferometer geometry assigns to the n-th
//! harmonic. All grating physics enters through five real functions of the
//! separation s (the "eikonal quantities"):
//!
//! * `zeta_coh`  — coherent phase-modulation amplitude,
//! * `c_abs`     — absorption modulation depth (>= 0),
//! * `a`, `b`    — in-phase and quadrature incoherent-scattering modulation,
//! * `f`         — scattering damping exponent (<= 0).

use crate::constants::{C, HBAR};
use crate::error::{Error, Result};
use crate::numerics::{bessel_j, bessel_j_real, integrate_adaptive, QuadratureSpec};
use crate::optics::{PreparedScattering, SphereOptics};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest harmonic order the coefficient series accepts. Patterns that are
/// still truncation-limited at this order record a warning.
pub const MAX_HARMONIC: u32 = 200;

/// Laser-pulse grating parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingParams {
    /// Laser wavelength [m]; the grating period is half of it.
    pub wavelength_m: f64,
    /// Pulse fluence (energy per area) of each travelling beam [J/m^2].
    pub pulse_fluence_j_m2: f64,
}

impl GratingParams {
    pub fn period_m(&self) -> f64 {
        self.wavelength_m / 2.0
    }

    pub fn wavenumber_per_m(&self) -> f64 {
        2.0 * PI / self.wavelength_m
    }

    pub fn omega_rad_s(&self) -> f64 {
        2.0 * PI * C / self.wavelength_m
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength_m > 0.0 && self.wavelength_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grating wavelength must be positive and finite, got {:e}",
                self.wavelength_m
            )));
        }
        if !(self.pulse_fluence_j_m2 >= 0.0 && self.pulse_fluence_j_m2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grating pulse fluence must be non-negative and finite, got {:e}",
                self.pulse_fluence_j_m2
            )));
        }
        Ok(())
    }
}

/// Which grating physics to include.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GratingModel {
    /// Coherent phase plus photon absorption and scattering.
    #[default]
    Full,
    /// Coherent phase only (absorption/scattering channels zeroed). Useful
    /// for comparisons against closed-form interference results.
    PurePhase,
}

/// The five real functions of path separation that the grating contributes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EikonalQuantities {
    /// Coherent phase-modulation amplitude.
    pub zeta_coh: f64,
    /// In-phase incoherent-scattering modulation.
    pub a: f64,
    /// Quadrature incoherent-scattering modulation.
    pub b: f64,
    /// Scattering damping exponent (<= 0).
    pub f: f64,
    /// Absorption modulation depth (>= 0).
    pub c_abs: f64,
}

impl EikonalQuantities {
    /// A pure phase grating with modulation amplitude `zeta`.
    pub fn pure_phase(zeta: f64) -> Self {
        Self {
            zeta_coh: zeta,
            a: 0.0,
            b: 0.0,
            f: 0.0,
            c_abs: 0.0,
        }
    }
}

/// Grating response of one sphere, prepared once per configuration.
#[derive(Debug, Clone)]
pub struct GratingCoupling {
    params: GratingParams,
    model: GratingModel,
    prepared: PreparedScattering,
    sigma_abs_m2: f64,
    sigma_sca_m2: f64,
    phi0: f64,
    /// Pulse photon number per area, Phi / (hbar omega) [1/m^2].
    photon_flux_m2: f64,
    quad: QuadratureSpec,
}

impl GratingCoupling {
    pub fn new(
        optics: &SphereOptics,
        params: GratingParams,
        model: GratingModel,
        quad: QuadratureSpec,
    ) -> Result<Self> {
        params.validate()?;
        let omega = params.omega_rad_s();
        let prepared = optics.prepare(omega)?;
        let xs = prepared.cross_sections();
        let k = params.wavenumber_per_m();
        // Peak phase: the dipole potential depth over hbar. Expressed through
        // the standing-wave force at the steepest-slope point z = -lambda/8,
        // phi0 = 4 F(-lambda/8) Phi / (hbar k I); in the point-dipole limit
        // this is exactly 2 Re(alpha) Phi / (hbar c eps0).
        let force_per_intensity = prepared.force_per_intensity(-params.wavelength_m / 8.0);
        let phi0 = 4.0 * force_per_intensity * params.pulse_fluence_j_m2 / (HBAR * k);
        if !phi0.is_finite() {
            return Err(Error::NumericIntegrity(format!(
                "non-finite grating phase {phi0:e}"
            )));
        }
        let photon_flux_m2 = params.pulse_fluence_j_m2 / (HBAR * omega);
        Ok(Self {
            params,
            model,
            prepared,
            sigma_abs_m2: xs.absorption_m2,
            sigma_sca_m2: xs.scattering_m2,
            phi0,
            photon_flux_m2,
            quad,
        })
    }

    /// Peak coherent phase-modulation amplitude phi0.
    pub fn eikonal_phase(&self) -> f64 {
        self.phi0
    }

    pub fn params(&self) -> &GratingParams {
        &self.params
    }

    pub fn model(&self) -> GratingModel {
        self.model
    }

    /// Mean number of grating photons scattered by the sphere (sets the
    /// scale of the incoherent eikonal terms).
    pub fn mean_scattered_photons(&self) -> f64 {
        2.0 * self.sigma_sca_m2 * self.photon_flux_m2
    }

    /// Eikonal quantities at path separation `s` for matter-wave
    /// interference: zeta = phi0 sin(pi s / d).
    pub fn eikonal_quantities(&self, s_m: f64) -> Result<EikonalQuantities> {
        let ks = self.params.wavenumber_per_m() * s_m;
        self.eikonal_at(s_m, self.phi0 * ks.sin())
    }

    /// Eikonal quantities in the ballistic (classical moire) limit:
    /// zeta = phi0 * pi s / d, the small-separation tangent of the coherent
    /// modulation; the incoherent quantities are unchanged.
    pub fn eikonal_quantities_classical(&self, s_m: f64) -> Result<EikonalQuantities> {
        let ks = self.params.wavenumber_per_m() * s_m;
        self.eikonal_at(s_m, self.phi0 * ks)
    }

    /// Harmonic coefficient for matter-wave interference at separation `s`.
    pub fn coefficient(&self, n: u32, s_m: f64) -> Result<f64> {
        talbot_coefficient(&self.eikonal_quantities(s_m)?, n)
    }

    /// Harmonic coefficient in the ballistic limit at separation `s`.
    pub fn coefficient_classical(&self, n: u32, s_m: f64) -> Result<f64> {
        talbot_coefficient(&self.eikonal_quantities_classical(s_m)?, n)
    }

    fn eikonal_at(&self, s_m: f64, zeta: f64) -> Result<EikonalQuantities> {
        if !s_m.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "path separation must be finite, got {s_m:e}"
            )));
        }
        if self.model == GratingModel::PurePhase {
            return Ok(EikonalQuantities::pure_phase(zeta));
        }
        let k = self.params.wavenumber_per_m();
        let ks = k * s_m;
        // Absorbed-photon modulation: the local fluence of the standing wave
        // is 2 Phi (1 + cos 2kz); the difference of absorption along the two
        // paths modulates as 4 n_abs (1 - cos ks) with n_abs = sigma_abs
        // Phi / (hbar omega) per travelling beam.
        let c_abs = 4.0 * self.sigma_abs_m2 * self.photon_flux_m2 * (1.0 - ks.cos());
        // Scattered-photon terms: angular integrals of the amplitude
        // products over the scattering direction cosine n_z, normalized so
        // that f saturates at minus the mean scattered photon number.
        let prefactor = 4.0 * PI * self.photon_flux_m2;
        let products = |u: f64| self.prepared.amplitude_products(u);
        let cos_ks = ks.cos();
        let a = prefactor
            * integrate_adaptive(
                |u| products(u).coherence.re * ((ks * u).cos() - cos_ks),
                -1.0,
                1.0,
                &self.quad,
            )?
            .value;
        let b = prefactor
            * integrate_adaptive(
                |u| products(u).coherence.im * (ks * u).sin(),
                -1.0,
                1.0,
                &self.quad,
            )?
            .value;
        let f = prefactor
            * integrate_adaptive(
                |u| products(u).intensity * (((1.0 - u) * ks).cos() - 1.0),
                -1.0,
                1.0,
                &self.quad,
            )?
            .value;
        Ok(EikonalQuantities {
            zeta_coh: zeta,
            a,
            b,
            // The f integrand is non-positive pointwise; clip quadrature
            // roundoff so downstream exponentials never amplify.
            f: f.min(0.0),
            c_abs,
        })
    }
}

/// Peak coherent phase phi0 for a sphere and grating, without building the
/// full coupling.
pub fn eikonal_phase(
    optics: &SphereOptics,
    params: &GratingParams,
    quad: QuadratureSpec,
) -> Result<f64> {
    Ok(GratingCoupling::new(optics, *params, GratingModel::PurePhase, quad)?.eikonal_phase())
}

/// Eikonal quantities at separation `s` (convenience constructor-and-query).
pub fn eikonal_quantities(
    optics: &SphereOptics,
    params: &GratingParams,
    model: GratingModel,
    s_m: f64,
    quad: QuadratureSpec,
) -> Result<EikonalQuantities> {
    GratingCoupling::new(optics, *params, model, quad)?.eikonal_quantities(s_m)
}

/// Harmonic coefficient B_n of the grating transmission for matter-wave
/// interference, from the eikonal quantities at the n-th path separation.
///
/// B_n = e^{f - c_abs/2} * sum_k J_k(b) * sigma^{n+k} J_{n+k}(w), with
/// A = a + c_abs/2, w^2 = zeta^2 - A^2 and sigma^2 = (zeta+A)/(zeta-A). The
/// sigma^m J_m(w) factors are evaluated through a rescaled ascending series
/// (base (zeta +/- A)/2) in which the zeta -> A limit is manifestly regular,
/// or through the downward-recurrence Bessel path with sigma = (zeta+A)/w
/// when |w| is large. The result is real for physical inputs; a spurious
/// imaginary part beyond 1e-9 relative raises a numeric-integrity error.
pub fn talbot_coefficient(eik: &EikonalQuantities, n: u32) -> Result<f64> {
    coefficient_series(eik, n, 0)
}

/// Identical series to [`talbot_coefficient`]; provided so call sites can
/// name the ballistic-limit coefficient explicitly (the distinction lives in
/// which eikonal quantities are supplied).
pub fn classical_coefficient(eik: &EikonalQuantities, n: u32) -> Result<f64> {
    coefficient_series(eik, n, 0)
}

pub(crate) fn coefficient_series(
    eik: &EikonalQuantities,
    n: u32,
    extra_shells: usize,
) -> Result<f64> {
    if n > MAX_HARMONIC {
        return Err(Error::InvalidParameter(format!(
            "harmonic order {n} exceeds the supported maximum {MAX_HARMONIC}"
        )));
    }
    for (value, name) in [
        (eik.zeta_coh, "zeta_coh"),
        (eik.a, "a"),
        (eik.b, "b"),
        (eik.f, "f"),
        (eik.c_abs, "c_abs"),
    ] {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eikonal quantity {name} must be finite, got {value:e}"
            )));
        }
    }

    let zeta = eik.zeta_coh;
    let a_tot = eik.a + 0.5 * eik.c_abs;
    let w_sq = zeta * zeta - a_tot * a_tot;
    let b = eik.b;

    let mut total = scaled_bessel_term(n as i64, zeta, a_tot, w_sq);
    if b != 0.0 {
        let shell_cap =
            b.abs().ceil() as usize + w_sq.abs().sqrt().ceil() as usize + 30 + extra_shells;
        let mut consecutive_small = 0usize;
        for k in 1..=shell_cap {
            let jk = bessel_j_real(k as u32, b);
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            let shell = jk
                * (scaled_bessel_term(n as i64 + k as i64, zeta, a_tot, w_sq)
                    + sign * scaled_bessel_term(n as i64 - k as i64, zeta, a_tot, w_sq));
            total += shell;
            if shell.norm() <= 1e-16 * total.norm().max(1e-30) {
                consecutive_small += 1;
                if consecutive_small >= 3 {
                    break;
                }
            } else {
                consecutive_small = 0;
            }
        }
    }

    let result = (eik.f - 0.5 * eik.c_abs).exp() * total;
    if !result.re.is_finite() {
        return Err(Error::NumericIntegrity(format!(
            "harmonic coefficient n = {n} is not finite ({result})"
        )));
    }
    if result.im.abs() > 1e-9 * result.re.abs().max(1.0) {
        return Err(Error::NumericIntegrity(format!(
            "harmonic coefficient n = {n} has spurious imaginary part {result}"
        )));
    }
    Ok(result.re)
}

/// sigma^m J_m(w) with sigma^2 = (zeta+A)/(zeta-A), w^2 = zeta^2 - A^2,
/// evaluated without ever dividing by zeta - A.
fn scaled_bessel_term(m: i64, zeta: f64, a_tot: f64, w_sq: f64) -> Complex64 {
    let am = m.unsigned_abs() as usize;
    let parity = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
    if w_sq.abs() <= 64.0 {
        // Ascending series: sigma^m J_m(w) =
        // sum_j (-1)^j ((zeta+A)/2)^m (w^2/4)^j / (j! (m+j)!)   [m >= 0]
        // and base (zeta-A)/2 with prefactor (-1)^m for m < 0.
        let base = if m >= 0 {
            0.5 * (zeta + a_tot)
        } else {
            0.5 * (zeta - a_tot)
        };
        let mut prefactor = 1.0_f64;
        for k in 1..=am {
            prefactor *= base / k as f64;
            if prefactor == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
        }
        let q = -0.25 * w_sq;
        let mut term = prefactor;
        let mut sum = term;
        for j in 1..500usize {
            term *= q / (j as f64 * (am + j) as f64);
            sum += term;
            if term.abs() <= 1e-17 * sum.abs().max(prefactor.abs()) {
                break;
            }
        }
        Complex64::new(parity * sum, 0.0)
    } else {
        // |w| > 8: downward-recurrence Bessel evaluation is both accurate
        // and cheap; sigma = (zeta+A)/w realizes the correct branch in every
        // sign regime (it cannot degenerate here since |w| is large).
        let w = Complex64::new(w_sq, 0.0).sqrt();
        let sigma = Complex64::new(zeta + a_tot, 0.0) / w;
        parity * sigma.powi(m as i32) * bessel_j(am as u32, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{load_optical_table, radius_from_mass};
    use crate::numerics::bessel_i_real;
    use crate::optics::ScatteringRegime;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::path::Path;

    const AMU: f64 = crate::constants::AMU;

    fn grating_params(fluence: f64) -> GratingParams {
        GratingParams {
            wavelength_m: 355e-9,
            pulse_fluence_j_m2: fluence,
        }
    }

    fn si_table() -> crate::materials::OpticalTable {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
        load_optical_table(&root.join("data/si_optical.csv")).unwrap()
    }

    fn sio2_table() -> crate::materials::OpticalTable {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
        load_optical_table(&root.join("data/sio2_optical.csv")).unwrap()
    }

    #[test]
    fn peak_phase_anchors_for_reference_spheres() {
        // Independently computed peak phases (30-digit arithmetic, full
        // partial-wave force).
        let table = si_table();
        let radius = radius_from_mass(1e7 * AMU, 2329.0);
        let optics = SphereOptics::new(radius, &table, ScatteringRegime::Auto).unwrap();
        let phi = eikonal_phase(&optics, &grating_params(0.003), QuadratureSpec::default())
            .unwrap();
        assert_relative_eq!(phi / PI, 1.230_707_059_693, max_relative = 1e-8);

        let table2 = sio2_table();
        let radius2 = radius_from_mass(1e7 * AMU, 1850.0);
        let optics2 = SphereOptics::new(radius2, &table2, ScatteringRegime::Auto).unwrap();
        let phi2 = eikonal_phase(&optics2, &grating_params(0.009), QuadratureSpec::default())
            .unwrap();
        assert_relative_eq!(phi2 / PI, 1.361_339_891_376, max_relative = 1e-8);

        // Both reference scenarios sit near the optimal modulation depth.
        for p in [phi, phi2] {
            assert!((p / PI - 1.4).abs() < 0.35, "phi0 = {p:e} rad");
        }
    }

    #[test]
    fn peak_phase_reduces_to_point_dipole_form() {
        let table = si_table();
        let radius = 2e-9;
        let optics = SphereOptics::new(radius, &table, ScatteringRegime::Rayleigh).unwrap();
        let params = grating_params(0.01);
        let phi = eikonal_phase(&optics, &params, QuadratureSpec::default()).unwrap();
        let eps = optics.permittivity(params.omega_rad_s()).unwrap();
        let alpha_volume = radius.powi(3) * ((eps - 1.0) / (eps + 2.0)).re;
        let expected = 8.0 * PI * alpha_volume * params.pulse_fluence_j_m2 / (HBAR * C);
        assert_relative_eq!(phi, expected, max_relative = 1e-12);
    }

    #[test]
    fn eikonal_quantities_vanish_at_zero_separation() {
        let table = si_table();
        let radius = radius_from_mass(1e7 * AMU, 2329.0);
        let optics = SphereOptics::new(radius, &table, ScatteringRegime::Auto).unwrap();
        let coupling = GratingCoupling::new(
            &optics,
            grating_params(0.003),
            GratingModel::Full,
            QuadratureSpec::default(),
        )
        .unwrap();
        let eik = coupling.eikonal_quantities(0.0).unwrap();
        assert_eq!(eik.zeta_coh, 0.0);
        assert_abs_diff_eq!(eik.a, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(eik.b, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(eik.f, 0.0, epsilon = 1e-16);
        assert_eq!(eik.c_abs, 0.0);
    }

    #[test]
    fn eikonal_signs_and_endpoint_values() {
        let table = si_table();
        let radius = radius_from_mass(1e7 * AMU, 2329.0);
        let optics = SphereOptics::new(radius, &table, ScatteringRegime::Auto).unwrap();
        let params = grating_params(0.003);
        let coupling = GratingCoupling::new(
            &optics,
            params,
            GratingModel::Full,
            QuadratureSpec::default(),
        )
        .unwrap();
        let d = params.period_m();
        let omega = params.omega_rad_s();
        let sigma_abs = optics.cross_sections(omega).unwrap().absorption_m2;
        for frac in [0.15, 0.5, 0.85, 1.0, 1.7] {
            let eik = coupling.eikonal_quantities(frac * d).unwrap();
            assert!(eik.c_abs >= 0.0);
            assert!(eik.f <= 0.0);
            assert!(eik.zeta_coh.abs() <= coupling.eikonal_phase() * (1.0 + 1e-12));
        }
        // Full-period separation doubles the mean absorbed photon number.
        let eik_d = coupling.eikonal_quantities(d).unwrap();
        let expected =
            8.0 * sigma_abs * params.pulse_fluence_j_m2 / (HBAR * omega);
        assert_relative_eq!(eik_d.c_abs, expected, max_relative = 1e-12);
    }

    #[test]
    fn scattering_exponent_saturates_at_mean_photon_number() {
        let table = si_table();
        let radius = radius_from_mass(1e7 * AMU, 2329.0);
        let optics = SphereOptics::new(radius, &table, ScatteringRegime::Auto).unwrap();
        let params = grating_params(0.003);
        let coupling = GratingCoupling::new(
            &optics,
            params,
            GratingModel::Full,
            QuadratureSpec::default(),
        )
        .unwrap();
        let n_sca = coupling.mean_scattered_photons();
        assert!(n_sca > 0.0);
        // At separations of many periods the oscillatory average leaves
        // f = -n_sca up to a O(1/ks) remainder (~0.2% at 1000 periods).
        let eik = coupling.eikonal_quantities(1000.37 * params.period_m()).unwrap();
        assert_relative_eq!(eik.f, -n_sca, max_relative = 0.01);
    }

    #[test]
    fn pure_phase_model_zeroes_incoherent_terms() {
        let table = si_table();
        let radius = radius_from_mass(1e7 * AMU, 2329.0);
        let optics = SphereOptics::new(radius, &table, ScatteringRegime::Auto).unwrap();
        let params = grating_params(0.003);
        let coupling = GratingCoupling::new(
            &optics,
            params,
            GratingModel::PurePhase,
            QuadratureSpec::default(),
        )
        .unwrap();
        let s = 0.3 * params.period_m();
        let eik = coupling.eikonal_quantities(s).unwrap();
        assert_eq!((eik.a, eik.b, eik.f, eik.c_abs), (0.0, 0.0, 0.0, 0.0));
        let ks = params.wavenumber_per_m() * s;
        assert_relative_eq!(
            eik.zeta_coh,
            coupling.eikonal_phase() * ks.sin(),
            max_relative = 1e-14
        );
        // Ballistic-limit modulation is the tangent of the sine.
        let cl = coupling.eikonal_quantities_classical(s).unwrap();
        assert_relative_eq!(
            cl.zeta_coh,
            coupling.eikonal_phase() * ks,
            max_relative = 1e-14
        );
    }

    #[test]
    fn pure_phase_coefficient_is_bessel_j() {
        // Includes both series (|zeta| <= 8) and recurrence (|zeta| > 8)
        // paths and negative modulation amplitudes.
        for &zeta in &[0.0, 0.4, -0.4, 2.2, 4.397, 7.9, -7.9, 8.3, 15.0, -21.7] {
            let eik = EikonalQuantities::pure_phase(zeta);
            for n in 0..12u32 {
                let b = talbot_coefficient(&eik, n).unwrap();
                let j = bessel_j_real(n, zeta);
                assert_abs_diff_eq!(b, j, epsilon = 1e-10 * j.abs().max(1e-4));
            }
        }
    }

    #[test]
    fn pure_absorption_coefficient_is_modified_bessel() {
        // zeta = a = b = f = 0, c_abs = 3: B_n = e^{-3/2} I_n(3/2).
        let eik = EikonalQuantities {
            zeta_coh: 0.0,
            a: 0.0,
            b: 0.0,
            f: 0.0,
            c_abs: 3.0,
        };
        let damp = (-1.5_f64).exp();
        for n in 0..3u32 {
            let expected = damp * bessel_i_real(n, 1.5);
            assert_relative_eq!(
                talbot_coefficient(&eik, n).unwrap(),
                expected,
                max_relative = 1e-12
            );
        }
        // Frozen external anchor for the n = 0 value.
        assert_relative_eq!(
            talbot_coefficient(&eik, 0).unwrap(),
            0.367_433_609_054_158_34,
            max_relative = 1e-12
        );
    }

    #[test]
    fn coefficient_is_regular_at_the_degenerate_point() {
        // zeta = A is a removable singularity of the printed form; the
        // series must pass through it smoothly.
        let mk = |zeta: f64, a: f64| EikonalQuantities {
            zeta_coh: zeta,
            a,
            b: 0.1,
            f: -0.2,
            c_abs: 0.6,
        };
        for n in 0..6u32 {
            let at = talbot_coefficient(&mk(1.1, 0.8), n).unwrap(); // A = 1.1 exactly
            let below = talbot_coefficient(&mk(1.1 * (1.0 - 1e-9), 0.8), n).unwrap();
            let above = talbot_coefficient(&mk(1.1 * (1.0 + 1e-9), 0.8), n).unwrap();
            // The coefficient varies smoothly with zeta (slope ~ its own
            // size), so compare against the two-sided midpoint, which
            // cancels the linear trend and exposes any branch jump.
            assert_abs_diff_eq!(
                at,
                0.5 * (below + above),
                epsilon = 1e-10 * at.abs().max(1e-13)
            );
            assert!(
                (above - below).abs() <= 1e-7 * at.abs().max(1e-13),
                "no jump across the degenerate point for n = {n}"
            );
        }
    }

    #[test]
    fn coefficient_parity_for_pure_phase() {
        let table = si_table();
        let radius = radius_from_mass(1e7 * AMU, 2329.0);
        let optics = SphereOptics::new(radius, &table, ScatteringRegime::Auto).unwrap();
        let params = grating_params(0.003);
        let coupling = GratingCoupling::new(
            &optics,
            params,
            GratingModel::PurePhase,
            QuadratureSpec::default(),
        )
        .unwrap();
        let s = 0.27 * params.period_m();
        for n in 0..8u32 {
            let plus = coupling.coefficient(n, s).unwrap();
            let minus = coupling.coefficient(n, -s).unwrap();
            let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            assert_abs_diff_eq!(minus, sign * plus, epsilon = 1e-13);
        }
    }

    #[test]
    fn coefficient_magnitude_bounded_by_scattering_loss() {
        // For a phase grating with loss (a = b = 0), |B_n| <= e^f <= 1.
        for &zeta in &[0.3, 2.0, 4.4, 9.5] {
            for &c in &[0.0, 0.5, 2.0] {
                for &f in &[0.0, -0.4, -1.5] {
                    let eik = EikonalQuantities {
                        zeta_coh: zeta,
                        a: 0.0,
                        b: 0.0,
                        f,
                        c_abs: c,
                    };
                    for n in 0..10u32 {
                        let bn = talbot_coefficient(&eik, n).unwrap();
                        assert!(
                            bn.abs() <= f.exp() + 1e-12,
                            "B_{n} = {bn} exceeds e^f = {} at zeta={zeta}, c={c}",
                            f.exp()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn coefficient_series_tail_is_converged() {
        // Adding shells beyond the adaptive stopping point must not move
        // the result.
        let eik = EikonalQuantities {
            zeta_coh: 2.9,
            a: 0.21,
            b: 0.35,
            f: -0.4,
            c_abs: 0.9,
        };
        for n in [0u32, 1, 3, 7, 15] {
            let base = coefficient_series(&eik, n, 0).unwrap();
            let extended = coefficient_series(&eik, n, 10).unwrap();
            assert_abs_diff_eq!(base, extended, epsilon = 1e-9 * base.abs().max(1e-12));
        }
    }

    #[test]
    fn zero_order_coefficient_is_unity_without_grating_action() {
        let eik = EikonalQuantities::pure_phase(0.0);
        assert_relative_eq!(talbot_coefficient(&eik, 0).unwrap(), 1.0, max_relative = 1e-12);
        for n in 1..5u32 {
            assert_abs_diff_eq!(talbot_coefficient(&eik, n).unwrap(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn excessive_order_is_rejected() {
        let eik = EikonalQuantities::pure_phase(1.0);
        assert!(talbot_coefficient(&eik, MAX_HARMONIC + 1).is_err());
        assert!(talbot_coefficient(&eik, MAX_HARMONIC).is_ok());
    }

    #[test]
    fn classical_and_quantum_coefficients_agree_for_slow_modulation() {
        // When the separation is a tiny fraction of the period the sine and
        // its tangent coincide, so the two coefficient flavors must too.
        let table = si_table();
        let radius = radius_from_mass(1e7 * AMU, 2329.0);
        let optics = SphereOptics::new(radius, &table, ScatteringRegime::Auto).unwrap();
        let params = grating_params(0.003);
        let coupling = GratingCoupling::new(
            &optics,
            params,
            GratingModel::Full,
            QuadratureSpec::default(),
        )
        .unwrap();
        let s = 1e-3 * params.period_m();
        for n in 1..=5u32 {
            let q = coupling.coefficient(n, n as f64 * s).unwrap();
            let c = coupling.coefficient_classical(n, n as f64 * s).unwrap();
            assert_relative_eq!(q, c, max_relative = 1e-3, epsilon = 1e-18);
        }
    }
}
