//! Particle materials and tabulated optical data.

use crate::constants::C;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::path::Path;

/// One row of an optical table: complex refractive index at a wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalRow {
    /// Vacuum wavelength [m].
    pub wavelength_m: f64,
    /// Real part of the refractive index.
    pub n_real: f64,
    /// Imaginary part (extinction coefficient), >= 0.
    pub n_imag: f64,
}

/// Tabulated complex refractive index over a wavelength range, with linear
/// interpolation in wavelength. Queries outside the table are rejected so
/// silent extrapolation can never contaminate blackbody integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalTable {
    rows: Vec<OpticalRow>,
}

impl OpticalTable {
    /// Build a table from rows sorted by strictly increasing wavelength.
    pub fn from_rows(rows: Vec<OpticalRow>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::OpticalTable(format!(
                "need at least 2 rows, got {}",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if !(row.wavelength_m > 0.0 && row.wavelength_m.is_finite()) {
                return Err(Error::OpticalTable(format!(
                    "row {i}: wavelength must be positive and finite, got {:e}",
                    row.wavelength_m
                )));
            }
            if !(row.n_real > 0.0 && row.n_real.is_finite()) {
                return Err(Error::OpticalTable(format!(
                    "row {i}: n_real must be positive and finite, got {}",
                    row.n_real
                )));
            }
            if !(row.n_imag >= 0.0 && row.n_imag.is_finite()) {
                return Err(Error::OpticalTable(format!(
                    "row {i}: n_imag must be non-negative and finite, got {}",
                    row.n_imag
                )));
            }
            if i > 0 && row.wavelength_m <= rows[i - 1].wavelength_m {
                return Err(Error::OpticalTable(format!(
                    "row {i}: wavelengths must be strictly increasing \
                     ({:e} after {:e})",
                    row.wavelength_m,
                    rows[i - 1].wavelength_m
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Read a table from a CSV file with columns
    /// `wavelength_m,n_real,n_imag`; lines starting with `#` are comments.
    pub fn load(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::OpticalTable(format!("{}: {e}", path.display())))?;
        {
            let headers = reader
                .headers()
                .map_err(|e| Error::OpticalTable(format!("{}: {e}", path.display())))?;
            let expected = ["wavelength_m", "n_real", "n_imag"];
            let got: Vec<&str> = headers.iter().collect();
            if got != expected {
                return Err(Error::OpticalTable(format!(
                    "{}: expected header {expected:?}, got {got:?}",
                    path.display()
                )));
            }
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record =
                record.map_err(|e| Error::OpticalTable(format!("{}: {e}", path.display())))?;
            let parse = |j: usize, name: &str| -> Result<f64> {
                record
                    .get(j)
                    .ok_or_else(|| {
                        Error::OpticalTable(format!(
                            "{}: data row {i}: missing column {name}",
                            path.display()
                        ))
                    })?
                    .parse::<f64>()
                    .map_err(|e| {
                        Error::OpticalTable(format!(
                            "{}: data row {i}: bad {name}: {e}",
                            path.display()
                        ))
                    })
            };
            rows.push(OpticalRow {
                wavelength_m: parse(0, "wavelength_m")?,
                n_real: parse(1, "n_real")?,
                n_imag: parse(2, "n_imag")?,
            });
        }
        Self::from_rows(rows)
    }

    /// The validated rows, in order of strictly increasing wavelength.
    pub fn rows(&self) -> &[OpticalRow] {
        &self.rows
    }

    /// Tabulated wavelength range (min, max) [m].
    pub fn wavelength_bounds(&self) -> (f64, f64) {
        (
            self.rows.first().expect("validated non-empty").wavelength_m,
            self.rows.last().expect("validated non-empty").wavelength_m,
        )
    }

    /// Angular-frequency range (min, max) [rad/s] covered by the table.
    pub fn omega_bounds(&self) -> (f64, f64) {
        let (lo, hi) = self.wavelength_bounds();
        (2.0 * PI * C / hi, 2.0 * PI * C / lo)
    }

    /// Complex refractive index at angular frequency `omega` [rad/s].
    pub fn refractive_index(&self, omega_rad_s: f64) -> Result<Complex64> {
        if !(omega_rad_s > 0.0 && omega_rad_s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "angular frequency must be positive and finite, got {omega_rad_s:e}"
            )));
        }
        let wavelength = 2.0 * PI * C / omega_rad_s;
        let (min_w, max_w) = self.wavelength_bounds();
        if wavelength < min_w || wavelength > max_w {
            return Err(Error::OpticalRange {
                wavelength_m: wavelength,
                min_wavelength_m: min_w,
                max_wavelength_m: max_w,
            });
        }
        // Index of the first row with wavelength >= query.
        let hi = self
            .rows
            .partition_point(|r| r.wavelength_m < wavelength)
            .min(self.rows.len() - 1)
            .max(1);
        let lo = hi - 1;
        let (a, b) = (&self.rows[lo], &self.rows[hi]);
        let t = (wavelength - a.wavelength_m) / (b.wavelength_m - a.wavelength_m);
        Ok(Complex64::new(
            a.n_real + t * (b.n_real - a.n_real),
            a.n_imag + t * (b.n_imag - a.n_imag),
        ))
    }

    /// Relative permittivity eps = n^2 at angular frequency `omega`.
    pub fn permittivity(&self, omega_rad_s: f64) -> Result<Complex64> {
        let n = self.refractive_index(omega_rad_s)?;
        Ok(n * n)
    }

    /// Quasi-static permittivity: n^2 at the longest tabulated wavelength.
    pub fn permittivity_static(&self) -> Complex64 {
        let r = self.rows.last().expect("validated non-empty");
        let n = Complex64::new(r.n_real, r.n_imag);
        n * n
    }
}

/// Convenience wrapper matching the module-level operation name.
pub fn load_optical_table(path: &Path) -> Result<OpticalTable> {
    OpticalTable::load(path)
}

/// Bulk properties of the sphere material.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    /// Identifier used in output manifests.
    pub name: String,
    /// Mass density [kg/m^3].
    pub density_kg_m3: f64,
    /// Specific heat capacity [J/(kg K)].
    pub specific_heat_j_kg_k: f64,
    /// First ionization energy of the bulk constituents [J], used in the
    /// London dispersion coefficient.
    pub ionization_energy_j: f64,
    /// Tabulated optical response.
    pub optical: OpticalTable,
}

impl Material {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::InvalidParameter("material name must be set".into()));
        }
        for (value, what) in [
            (self.density_kg_m3, "density_kg_m3"),
            (self.specific_heat_j_kg_k, "specific_heat_j_kg_k"),
            (self.ionization_energy_j, "ionization_energy_j"),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "material {}: {what} must be positive and finite, got {value:e}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Properties of the residual background gas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasSpecies {
    /// Static polarizability volume alpha/(4 pi eps0) [m^3].
    pub polarizability_volume_m3: f64,
    /// Ionization energy [J].
    pub ionization_energy_j: f64,
    /// Molecular mass [kg].
    pub mass_kg: f64,
}

impl GasSpecies {
    /// Molecular nitrogen at room-temperature values.
    pub fn nitrogen() -> Self {
        Self {
            polarizability_volume_m3: 1.74e-30,
            ionization_energy_j: 15.6e-19,
            mass_kg: 28.0 * crate::constants::AMU,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (value, what) in [
            (self.polarizability_volume_m3, "polarizability_volume_m3"),
            (self.ionization_energy_j, "ionization_energy_j"),
            (self.mass_kg, "mass_kg"),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "gas species: {what} must be positive and finite, got {value:e}"
                )));
            }
        }
        Ok(())
    }
}

/// Radius [m] of a homogeneous sphere of the given mass and density.
pub fn radius_from_mass(mass_kg: f64, density_kg_m3: f64) -> f64 {
    (3.0 * mass_kg / (4.0 * PI * density_kg_m3)).cbrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::AMU;
    use approx::assert_relative_eq;

    fn toy_table() -> OpticalTable {
        OpticalTable::from_rows(vec![
            OpticalRow {
                wavelength_m: 1e-6,
                n_real: 2.0,
                n_imag: 0.1,
            },
            OpticalRow {
                wavelength_m: 2e-6,
                n_real: 3.0,
                n_imag: 0.3,
            },
            OpticalRow {
                wavelength_m: 4e-6,
                n_real: 3.0,
                n_imag: 0.0,
            },
        ])
        .unwrap()
    }

    #[test]
    fn radius_anchors() {
        // Independently computed radii for silicon density 2329 kg/m^3.
        assert_relative_eq!(
            radius_from_mass(1e6 * AMU, 2329.0),
            5.541_963_568_9e-9,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            radius_from_mass(1e7 * AMU, 2329.0),
            1.193_979_856_37e-8,
            max_relative = 1e-10
        );
        // Silica density 1850 kg/m^3.
        assert_relative_eq!(
            radius_from_mass(1e7 * AMU, 1850.0),
            1.289_227_576_84e-8,
            max_relative = 1e-10
        );
    }

    #[test]
    fn radius_scales_as_cube_root_of_mass() {
        let r1 = radius_from_mass(1e6 * AMU, 2329.0);
        let r1000 = radius_from_mass(1e9 * AMU, 2329.0);
        assert_relative_eq!(r1000 / r1, 10.0, max_relative = 1e-12);
    }

    #[test]
    fn interpolation_hits_nodes_and_midpoints() {
        let t = toy_table();
        let omega_at = |w: f64| 2.0 * PI * C / w;
        let n = t.refractive_index(omega_at(1e-6)).unwrap();
        assert_relative_eq!(n.re, 2.0, max_relative = 1e-12);
        assert_relative_eq!(n.im, 0.1, max_relative = 1e-12);
        let n = t.refractive_index(omega_at(1.5e-6)).unwrap();
        assert_relative_eq!(n.re, 2.5, max_relative = 1e-12);
        assert_relative_eq!(n.im, 0.2, max_relative = 1e-12);
        let n = t.refractive_index(omega_at(4e-6)).unwrap();
        assert_relative_eq!(n.re, 3.0, max_relative = 1e-12);
        assert_eq!(n.im, 0.0);
    }

    #[test]
    fn permittivity_is_index_squared() {
        let t = toy_table();
        let omega = 2.0 * PI * C / 1.5e-6;
        let n = t.refractive_index(omega).unwrap();
        let eps = t.permittivity(omega).unwrap();
        assert_relative_eq!(eps.re, (n * n).re, max_relative = 1e-14);
        assert_relative_eq!(eps.im, (n * n).im, max_relative = 1e-14);
        let s = t.permittivity_static();
        assert_relative_eq!(s.re, 9.0, max_relative = 1e-14);
    }

    #[test]
    fn out_of_range_queries_name_the_bounds() {
        let t = toy_table();
        let err = t
            .refractive_index(2.0 * PI * C / 0.5e-6)
            .expect_err("below range");
        match err {
            Error::OpticalRange {
                wavelength_m,
                min_wavelength_m,
                max_wavelength_m,
            } => {
                assert_relative_eq!(wavelength_m, 0.5e-6, max_relative = 1e-12);
                assert_eq!(min_wavelength_m, 1e-6);
                assert_eq!(max_wavelength_m, 4e-6);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(t.refractive_index(2.0 * PI * C / 5e-6).is_err());
        assert!(t.refractive_index(-1.0).is_err());
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let row = |w: f64, n: f64, k: f64| OpticalRow {
            wavelength_m: w,
            n_real: n,
            n_imag: k,
        };
        assert!(OpticalTable::from_rows(vec![row(1e-6, 1.5, 0.0)]).is_err());
        assert!(
            OpticalTable::from_rows(vec![row(1e-6, 1.5, 0.0), row(1e-6, 1.6, 0.0)]).is_err(),
            "duplicate wavelengths must be rejected"
        );
        assert!(
            OpticalTable::from_rows(vec![row(2e-6, 1.5, 0.0), row(1e-6, 1.6, 0.0)]).is_err(),
            "descending wavelengths must be rejected"
        );
        assert!(
            OpticalTable::from_rows(vec![row(1e-6, 1.5, -0.1), row(2e-6, 1.6, 0.0)]).is_err(),
            "negative extinction must be rejected"
        );
    }

    #[test]
    fn shipped_tables_load_and_cover_the_working_range() {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
        for name in ["si_optical.csv", "sio2_optical.csv"] {
            let table = load_optical_table(&root.join("data").join(name)).unwrap();
            let (lo, hi) = table.wavelength_bounds();
            assert!(lo <= 2.01e-7, "{name}: UV coverage missing");
            assert!(hi >= 4.9e-4, "{name}: far-IR coverage missing");
            // Grating (355 nm) and trap (1550 nm) wavelengths must resolve.
            for w in [355e-9, 1550e-9, 10e-6] {
                let n = table.refractive_index(2.0 * PI * C / w).unwrap();
                assert!(n.re > 0.0 && n.im >= 0.0);
            }
        }
    }

    #[test]
    fn omega_bounds_invert_wavelength_bounds() {
        let t = toy_table();
        let (w_lo, w_hi) = t.wavelength_bounds();
        let (o_lo, o_hi) = t.omega_bounds();
        assert_relative_eq!(o_lo, 2.0 * PI * C / w_hi, max_relative = 1e-14);
        assert_relative_eq!(o_hi, 2.0 * PI * C / w_lo, max_relative = 1e-14);
    }
}
