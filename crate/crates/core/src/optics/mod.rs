//! Electromagnetic response of the sphere: cross sections, angular
//! scattering amplitudes, and the standing-wave dipole force, in either the
//! Rayleigh (point-dipole) or full Mie description.

mod mie;

use crate::constants::{C, EPSILON_0};
use crate::error::{Error, Result};
use crate::materials::OpticalTable;
use crate::numerics::fixed_gauss_legendre;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Which scattering description to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScatteringRegime {
    /// Rayleigh for size parameter kR <= 0.1, Mie otherwise.
    #[default]
    Auto,
    Rayleigh,
    Mie,
}

/// Scattering and absorption cross sections [m^2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSections {
    pub scattering_m2: f64,
    pub absorption_m2: f64,
}

/// Angular products of scattering amplitudes entering the grating's
/// decoherence integrals, as functions of n_z = cos(theta):
///
/// * `coherence` ("P"): conj(S1(mu)) S1(-mu) - conj(S2(mu)) S2(-mu), over
///   2 k^2 — the interference of forward- and backward-going photon paths;
/// * `intensity` ("I"): (|S1(mu)|^2 + |S2(mu)|^2) / (2 k^2) — the
///   azimuth-averaged differential cross section, normalized so that
///   2 pi * integral of I over n_z = sigma_sca.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeProducts {
    pub coherence: Complex64,
    pub intensity: f64,
}

/// Dipole polarizability alpha [SI: C m^2 / V] of a small sphere,
/// alpha = 4 pi eps0 R^3 (eps - 1)/(eps + 2).
pub fn rayleigh_polarizability(radius_m: f64, permittivity: Complex64) -> Result<Complex64> {
    if !(radius_m > 0.0 && radius_m.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive and finite, got {radius_m:e}"
        )));
    }
    let denom = permittivity + 2.0;
    if denom.norm() < 1e-12 * (1.0 + permittivity.norm()) {
        return Err(Error::NumericIntegrity(format!(
            "polarizability resonance: permittivity {permittivity} too close to -2"
        )));
    }
    let volume_factor = radius_m.powi(3) * (permittivity - 1.0) / denom;
    Ok(4.0 * PI * EPSILON_0 * volume_factor)
}

/// A sphere with tabulated optical properties.
#[derive(Debug, Clone, Copy)]
pub struct SphereOptics<'a> {
    radius_m: f64,
    table: &'a OpticalTable,
    regime: ScatteringRegime,
}

impl<'a> SphereOptics<'a> {
    pub fn new(radius_m: f64, table: &'a OpticalTable, regime: ScatteringRegime) -> Result<Self> {
        if !(radius_m > 0.0 && radius_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sphere radius must be positive and finite, got {radius_m:e}"
            )));
        }
        Ok(Self {
            radius_m,
            table,
            regime,
        })
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_m
    }

    pub fn table(&self) -> &'a OpticalTable {
        self.table
    }

    /// Relative permittivity at angular frequency `omega` [rad/s].
    pub fn permittivity(&self, omega_rad_s: f64) -> Result<Complex64> {
        self.table.permittivity(omega_rad_s)
    }

    /// Quasi-static polarizability volume alpha/(4 pi eps0) [m^3], from the
    /// longest tabulated wavelength.
    pub fn static_polarizability_volume(&self) -> f64 {
        let eps = self.table.permittivity_static();
        self.radius_m.powi(3) * ((eps - 1.0) / (eps + 2.0)).re
    }

    /// Evaluate the scattering response at a fixed frequency. The returned
    /// value owns its coefficient tables and can be queried repeatedly.
    pub fn prepare(&self, omega_rad_s: f64) -> Result<PreparedScattering> {
        let n = self.table.refractive_index(omega_rad_s)?;
        let k = omega_rad_s / C;
        let x = k * self.radius_m;
        let rayleigh = match self.regime {
            ScatteringRegime::Rayleigh => true,
            ScatteringRegime::Mie => false,
            ScatteringRegime::Auto => x <= 0.1,
        };
        let kind = if rayleigh {
            let eps = n * n;
            // Polarizability volume alpha/(4 pi eps0) = R^3 (eps-1)/(eps+2).
            let alpha = rayleigh_polarizability(self.radius_m, eps)?;
            PreparedKind::Rayleigh {
                alpha_volume: alpha / (4.0 * PI * EPSILON_0),
            }
        } else {
            let l_max = mie::l_max_for(x);
            let (a, b) = mie::coefficients(x, n, l_max)?;
            PreparedKind::Mie { a, b }
        };
        Ok(PreparedScattering { k, kind })
    }

    /// Cross sections at `omega` (convenience; prefers `prepare` for
    /// repeated queries at one frequency).
    pub fn cross_sections(&self, omega_rad_s: f64) -> Result<CrossSections> {
        Ok(self.prepare(omega_rad_s)?.cross_sections())
    }

    /// Scattering amplitude at `omega` and scattering angle cosine `n_z`.
    pub fn scattering_amplitude(&self, omega_rad_s: f64, n_z: f64) -> Result<Complex64> {
        Ok(self.prepare(omega_rad_s)?.scattering_amplitude(n_z))
    }

    /// Axial force [N] on the sphere at position `z` in a standing wave of
    /// single-beam intensity `intensity_w_m2` and frequency `omega`
    /// (intensity maxima at z = 0 mod lambda/2).
    pub fn standing_wave_force(
        &self,
        omega_rad_s: f64,
        z_m: f64,
        intensity_w_m2: f64,
    ) -> Result<f64> {
        Ok(self.prepare(omega_rad_s)?.force_per_intensity(z_m) * intensity_w_m2)
    }
}

#[derive(Debug, Clone)]
enum PreparedKind {
    Rayleigh {
        /// alpha / (4 pi eps0) [m^3].
        alpha_volume: Complex64,
    },
    Mie {
        a: Vec<Complex64>,
        b: Vec<Complex64>,
    },
}

/// Scattering response of a sphere at one fixed frequency.
#[derive(Debug, Clone)]
pub struct PreparedScattering {
    k: f64,
    kind: PreparedKind,
}

impl PreparedScattering {
    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    pub fn is_rayleigh(&self) -> bool {
        matches!(self.kind, PreparedKind::Rayleigh { .. })
    }

    /// Number of partial waves retained (0 in the Rayleigh description).
    pub fn partial_waves(&self) -> usize {
        match &self.kind {
            PreparedKind::Rayleigh { .. } => 0,
            PreparedKind::Mie { a, .. } => a.len() - 1,
        }
    }

    pub fn cross_sections(&self) -> CrossSections {
        let k = self.k;
        match &self.kind {
            PreparedKind::Rayleigh { alpha_volume } => {
                let sca = 8.0 * PI / 3.0 * k.powi(4) * alpha_volume.norm_sqr();
                let abs = (4.0 * PI * k * alpha_volume.im).max(0.0);
                CrossSections {
                    scattering_m2: sca,
                    absorption_m2: abs,
                }
            }
            PreparedKind::Mie { a, b } => {
                let mut sca = 0.0;
                let mut ext = 0.0;
                for l in 1..a.len() {
                    let w = 2.0 * l as f64 + 1.0;
                    sca += w * (a[l].norm_sqr() + b[l].norm_sqr());
                    ext += w * (a[l].re + b[l].re);
                }
                let pref = 2.0 * PI / (k * k);
                CrossSections {
                    scattering_m2: pref * sca,
                    absorption_m2: (pref * (ext - sca)).max(0.0),
                }
            }
        }
    }

    /// Amplitude products P (coherence) and I (intensity) at n_z = cos(theta).
    pub fn amplitude_products(&self, n_z: f64) -> AmplitudeProducts {
        match &self.kind {
            PreparedKind::Rayleigh { alpha_volume } => {
                // S1/S2 reduce to the dipole pattern; both products are the
                // same positive real function |k^2 alpha_vol|^2 (1+n_z^2)/2.
                let v = (self.k * self.k * alpha_volume).norm_sqr() * (1.0 + n_z * n_z) / 2.0;
                AmplitudeProducts {
                    coherence: Complex64::new(v, 0.0),
                    intensity: v,
                }
            }
            PreparedKind::Mie { a, b } => {
                let (s1f, s2f) = mie::s_functions(a, b, n_z);
                let (s1b, s2b) = mie::s_functions(a, b, -n_z);
                let two_k2 = 2.0 * self.k * self.k;
                AmplitudeProducts {
                    coherence: (s1f.conj() * s1b - s2f.conj() * s2b) / two_k2,
                    intensity: (s1f.norm_sqr() + s2f.norm_sqr()) / two_k2,
                }
            }
        }
    }

    /// Azimuth-averaged scattering amplitude [m] at n_z = cos(theta),
    /// normalized so that the solid-angle integral of |f|^2 equals the
    /// scattering cross section; the phase is carried by S1, in the
    /// convention where extinction sits in the real part of the forward
    /// amplitude (times k).
    pub fn scattering_amplitude(&self, n_z: f64) -> Complex64 {
        match &self.kind {
            PreparedKind::Rayleigh { alpha_volume } => {
                Complex64::new(0.0, -1.0)
                    * self.k
                    * self.k
                    * alpha_volume
                    * ((1.0 + n_z * n_z) / 2.0).sqrt()
            }
            PreparedKind::Mie { a, b } => {
                let (s1, s2) = mie::s_functions(a, b, n_z);
                let magnitude = ((s1.norm_sqr() + s2.norm_sqr()) / 2.0).sqrt() / self.k;
                magnitude * Complex64::from_polar(1.0, s1.arg())
            }
        }
    }

    /// Axial force per unit single-beam intensity [N/(W/m^2)] at position
    /// `z` in the standing wave (intensity maxima at z = 0 mod lambda/2).
    pub fn force_per_intensity(&self, z_m: f64) -> f64 {
        let k = self.k;
        let modulation = (2.0 * k * z_m).sin();
        match &self.kind {
            PreparedKind::Rayleigh { alpha_volume } => {
                // Gradient force on a point dipole:
                // F_z = -(Re alpha / (2 eps0 c)) I k sin(2 k z)
                //     = -(2 pi k Re(alpha_vol) / c) I sin(2 k z).
                -(2.0 * PI * k * alpha_volume.re / C) * modulation
            }
            PreparedKind::Mie { a, b } => {
                // Interference of the two counter-propagating beams:
                // F_z = -(I/(4 k c)) sin(2 k z) [8 pi Re f_pi + 2 k Im G],
                // with Re f_pi = (1/2k) sum (2l+1)(-1)^l Im(a_l - b_l) and
                // G = 2 pi * integral of n_z P(n_z) dn_z (purely imaginary).
                let mut alt = 0.0;
                for l in 1..a.len() {
                    let sign = if l % 2 == 1 { -1.0 } else { 1.0 };
                    alt += (2.0 * l as f64 + 1.0) * sign * (a[l].im - b[l].im);
                }
                let re_f_pi = alt / (2.0 * k);
                let g = self.coherence_moment();
                -(1.0 / (4.0 * k * C)) * modulation * (8.0 * PI * re_f_pi + 2.0 * k * g.im)
            }
        }
    }

    /// First angular moment of the coherence product,
    /// G = 2 pi * integral of n_z P(n_z) dn_z. Purely imaginary for any
    /// passive sphere; used by the standing-wave force.
    pub fn coherence_moment(&self) -> Complex64 {
        // The integrand is a polynomial of degree <= 2 l_max + 1 in n_z, so a
        // fixed 32-point rule is exact for every size parameter this crate
        // reaches (l_max <= 31).
        let re = fixed_gauss_legendre(|u| u * self.amplitude_products(u).coherence.re, -1.0, 1.0, 32);
        let im = fixed_gauss_legendre(|u| u * self.amplitude_products(u).coherence.im, -1.0, 1.0, 32);
        2.0 * PI * Complex64::new(re, im)
    }
}
