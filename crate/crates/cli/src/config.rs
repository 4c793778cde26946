//! Experiment configuration: a TOML file with every section optional and
//! unknown keys rejected.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use wwl::calderon::CalderonWindow;
use wwl::selftest::{random_lump_field, SuiteConfig, Tolerances};
use wwl::wavelet::{probes, ScaleGrid};
use wwl::{Error, Family, Field, Grid, Result, WeinsteinParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsSection {
    pub d: usize,
    pub alpha: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        ParamsSection { d: 1, alpha: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n_lat: usize,
    pub lateral_extent: f64,
    pub n_rad: usize,
    pub radial_extent: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { n_lat: 256, lateral_extent: 12.0, n_rad: 256, radial_extent: 12.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalesSection {
    pub a_min: f64,
    pub a_max: f64,
    pub n_scales: usize,
}

impl Default for ScalesSection {
    fn default() -> Self {
        ScalesSection { a_min: 1.0 / 64.0, a_max: 64.0, n_scales: 129 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbesSection {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Default for ProbesSection {
    fn default() -> Self {
        ProbesSection { lo: 0.125, hi: 0.5, count: 8 }
    }
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

/// A field: a built-in family (scale, lateral modulation), a seeded random
/// lump field, or a dump written earlier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Gaussian {
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        wave: Vec<f64>,
    },
    #[serde(alias = "hermite")]
    SpectralHermite {
        m: u32,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        wave: Vec<f64>,
    },
    BandLimited {
        lo: f64,
        hi: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        wave: Vec<f64>,
    },
    Bump {
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        wave: Vec<f64>,
    },
    SpectralBump {
        lo: f64,
        hi: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        wave: Vec<f64>,
    },
    RandomLumps {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Dump {
        path: PathBuf,
    },
}

impl FieldSpec {
    pub fn gaussian() -> Self {
        FieldSpec::Gaussian { scale: 1.0, wave: Vec::new() }
    }

    pub fn hermite(m: u32) -> Self {
        FieldSpec::SpectralHermite { m, scale: 1.0, wave: Vec::new() }
    }

    /// `base` resolves relative dump paths; `seed` is the experiment seed.
    pub fn build(&self, params: WeinsteinParams, grid: &Grid, seed: u64, base: &Path) -> Result<Field> {
        let analytic = |family: Family, scale: f64, wave: &[f64]| -> Result<Field> {
            let f = Field::analytic(params, family, scale)?;
            if wave.is_empty() { Ok(f) } else { f.modulated(wave) }
        };
        match self {
            FieldSpec::Gaussian { scale, wave } => analytic(Family::Gaussian, *scale, wave),
            FieldSpec::SpectralHermite { m, scale, wave } => analytic(Family::SpectralHermite { m: *m }, *scale, wave),
            FieldSpec::BandLimited { lo, hi, scale, wave } => analytic(Family::BandLimited { lo: *lo, hi: *hi }, *scale, wave),
            FieldSpec::Bump { scale, wave } => analytic(Family::Bump, *scale, wave),
            FieldSpec::SpectralBump { lo, hi, scale, wave } => analytic(Family::SpectralBump { lo: *lo, hi: *hi }, *scale, wave),
            FieldSpec::RandomLumps { seed: own } => random_lump_field(grid, own.unwrap_or(seed)),
            FieldSpec::Dump { path } => {
                let (f, g) = wwl::io::read_field(&base.join(path))?;
                if !g.same_layout(grid) {
                    return Err(Error::Config(format!("dump {} was written on a different grid", path.display())));
                }
                Ok(f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveletsSection {
    pub phi: FieldSpec,
    pub psi: FieldSpec,
}

impl Default for WaveletsSection {
    fn default() -> Self {
        WaveletsSection { phi: FieldSpec::hermite(1), psi: FieldSpec::hermite(2) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output: PathBuf,
    pub params: ParamsSection,
    pub grid: GridSection,
    pub scales: ScalesSection,
    pub probes: ProbesSection,
    pub wavelets: WaveletsSection,
    /// f, the analysed or transformed field
    pub input: FieldSpec,
    /// g, the second field of `convolve` and `parseval`
    pub second: FieldSpec,
    /// Calderón windows (γ, δ); nested when used as a sweep
    pub windows: Vec<[f64; 2]>,
    pub suite: SuiteConfig,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            output: PathBuf::from("wwl-out"),
            params: ParamsSection::default(),
            grid: GridSection::default(),
            scales: ScalesSection::default(),
            probes: ProbesSection::default(),
            wavelets: WaveletsSection::default(),
            input: FieldSpec::gaussian(),
            second: FieldSpec::gaussian(),
            windows: vec![[0.25, 4.0]],
            suite: SuiteConfig::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn weinstein(&self) -> Result<WeinsteinParams> {
        WeinsteinParams::new(self.params.d, self.params.alpha)
    }

    pub fn build_grid(&self) -> Result<Grid> {
        let g = &self.grid;
        Grid::new(self.weinstein()?, g.n_lat, g.lateral_extent, g.n_rad, g.radial_extent)
    }

    pub fn scale_grid(&self) -> Result<ScaleGrid> {
        ScaleGrid::new(self.scales.a_min, self.scales.a_max, self.scales.n_scales)
    }

    pub fn probe_set(&self) -> Result<Vec<Vec<f64>>> {
        let p = &self.probes;
        if !(p.lo > 0.0 && p.hi >= p.lo && p.count > 0) {
            return Err(Error::Config(format!("probes need 0 < lo <= hi and count > 0, got {p:?}")));
        }
        Ok(probes(self.params.d, p.lo, p.hi, p.count))
    }

    pub fn calderon_windows(&self) -> Result<Vec<CalderonWindow>> {
        self.windows.iter().map(|w| CalderonWindow::new(w[0], w[1])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(ExperimentConfig::parse("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::parse("sead = 3").is_err());
        assert!(ExperimentConfig::parse("[grid]\nn = 3").is_err());
        assert!(ExperimentConfig::parse("[input]\nfamily = \"gaussian\"\nwidth = 2.0").is_err());
        assert!(ExperimentConfig::parse("[tolerances]\nplancherell = 1e-3").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let text = r#"
            seed = 9
            windows = [[0.125, 8.0], [0.0625, 16.0]]
            [params]
            alpha = 0.5
            [wavelets.phi]
            family = "hermite"
            m = 1
            [wavelets.psi]
            family = "spectral_bump"
            lo = 1.0
            hi = 2.5
            scale = 0.5
            [input]
            family = "gaussian"
            wave = [0.3]
            [second]
            family = "random_lumps"
            seed = 4
            [tolerances]
            parseval = 0.02
        "#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.wavelets.phi, FieldSpec::hermite(1));
        let again = ExperimentConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
        let d = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::parse(&d.to_toml()).unwrap(), d);
    }
}
