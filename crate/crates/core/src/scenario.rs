//! Scenario files: medium, charge and numerics in TOML.
//!
//! ```toml
//! omega_bar = 3.0e15          # optional for eit_lambda (defaults to omega_plus)
//!
//! [medium]
//! variant = "isotropic_constant"
//! n = 1.5
//!
//! [charge]
//! beta = 0.9
//!
//! [numerics]                  # every key optional
//! window_widths = 6.0
//! ```
//!
//! Unknown keys are errors. Preset names resolve against
//! `$CHERENKOV_PRESET_DIR`, then the presets bundled with the crate.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{FieldSolver, IntegralOptions, ProfileParams, CACHE_NODES};
use crate::kinematics::{absorption_curvature, pole_on_branch, ChargeState};
use crate::medium::{CircularDecomposition, EitParams, MediumModel, TabulatedMedium};
use crate::quadrature::QuadratureOptions;
use crate::units::FOUR_PI;

pub const PRESET_DIR_ENV: &str = "CHERENKOV_PRESET_DIR";

const BUNDLED: [(&str, &str); 2] = [
    ("sodium_eit", include_str!("../presets/sodium_eit.toml")),
    ("glass_n1p5", include_str!("../presets/glass_n1p5.toml")),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    /// Half width of the frequency window in units of the local feature
    /// width of ε(ω) (the transparency width for EIT media).
    pub window_widths: f64,
    /// Absolute half width in rad/s; overrides `window_widths`.
    pub window_half_width: Option<f64>,
    pub cache_nodes: usize,
    pub quad_pieces: usize,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            window_widths: 6.0,
            window_half_width: None,
            cache_nodes: CACHE_NODES,
            quad_pieces: 32,
            rel_tol: 1e-6,
            max_intervals: 50_000,
        }
    }
}

impl Numerics {
    fn validate(&self) -> Result<()> {
        if !(self.window_widths > 0.0) {
            return Err(Error::scenario("numerics.window_widths", "must be positive"));
        }
        if let Some(h) = self.window_half_width {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::scenario("numerics.window_half_width", "must be positive"));
            }
        }
        if self.cache_nodes < 8 {
            return Err(Error::scenario("numerics.cache_nodes", "must be at least 8"));
        }
        if self.quad_pieces == 0 {
            return Err(Error::scenario("numerics.quad_pieces", "must be at least 1"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::scenario("numerics.rel_tol", "must lie in (0, 1)"));
        }
        if self.max_intervals < 2 {
            return Err(Error::scenario("numerics.max_intervals", "must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub medium: MediumModel,
    #[serde(serialize_with = "beta_only")]
    pub charge: ChargeState,
    pub omega_bar: f64,
    pub numerics: Numerics,
    #[serde(skip)]
    pub source: Option<PathBuf>,
    /// The TOML text this scenario was parsed from, if any.
    #[serde(skip)]
    pub text: Option<String>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

fn beta_only<S: serde::Serializer>(c: &ChargeState, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Charge {
        beta: f64,
    }
    Charge { beta: c.beta }.serialize(s)
}

// ---- raw file layout ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    omega_bar: Option<f64>,
    medium: RawMedium,
    charge: RawCharge,
    #[serde(default)]
    numerics: Numerics,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCharge {
    beta: f64,
}

#[derive(Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
enum RawMedium {
    IsotropicConstant(RawIsotropic),
    IsotropicDispersive(RawDispersive),
    EitLambda(RawEit),
    Tabulated(RawTabulated),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIsotropic {
    n: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDispersive {
    f: f64,
    omega0: f64,
    gamma: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEit {
    f_plus: f64,
    omega_plus: f64,
    gamma_e: f64,
    #[serde(default)]
    gamma_m: f64,
    rabi: f64,
    delta_z: f64,
    delta_minus: f64,
    f_z: Option<f64>,
    f_minus: Option<f64>,
    /// Background `4πχ` on ẑ at the detuning `delta_z`; sets `f_z`.
    four_pi_chi_z: Option<f64>,
    four_pi_chi_minus: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTabulated {
    omega: Vec<f64>,
    eps_z_re: Vec<f64>,
    eps_plus_re: Vec<f64>,
    eps_minus_re: Vec<f64>,
    eps_z_im: Option<Vec<f64>>,
    eps_plus_im: Option<Vec<f64>>,
    eps_minus_im: Option<Vec<f64>>,
}

fn strength(f: Option<f64>, chi: Option<f64>, detuning: f64, f_key: &str, chi_key: &str) -> Result<f64> {
    match (f, chi) {
        (Some(f), None) => Ok(f),
        (None, Some(chi)) => Ok(chi * detuning / FOUR_PI),
        (Some(_), Some(_)) => Err(Error::scenario(format!("medium.{chi_key}"), format!("give either {f_key} or {chi_key}, not both"))),
        (None, None) => Err(Error::scenario(format!("medium.{f_key}"), format!("missing: give {f_key} or {chi_key}"))),
    }
}

impl RawMedium {
    fn build(self) -> Result<MediumModel> {
        Ok(match self {
            RawMedium::IsotropicConstant(r) => MediumModel::IsotropicConstant { n: r.n },
            RawMedium::IsotropicDispersive(r) => MediumModel::IsotropicDispersive { f: r.f, omega0: r.omega0, gamma: r.gamma },
            RawMedium::EitLambda(r) => MediumModel::EitLambda(EitParams {
                f_plus: r.f_plus,
                f_z: strength(r.f_z, r.four_pi_chi_z, r.delta_z, "f_z", "four_pi_chi_z")?,
                f_minus: strength(r.f_minus, r.four_pi_chi_minus, r.delta_minus, "f_minus", "four_pi_chi_minus")?,
                omega_plus: r.omega_plus,
                gamma_e: r.gamma_e,
                gamma_m: r.gamma_m,
                rabi: r.rabi,
                delta_z: r.delta_z,
                delta_minus: r.delta_minus,
            }),
            RawMedium::Tabulated(r) => {
                let n = r.omega.len();
                let zeros = vec![0.0; n];
                let cols = [
                    ("eps_z_re", &r.eps_z_re),
                    ("eps_plus_re", &r.eps_plus_re),
                    ("eps_minus_re", &r.eps_minus_re),
                    ("eps_z_im", r.eps_z_im.as_ref().unwrap_or(&zeros)),
                    ("eps_plus_im", r.eps_plus_im.as_ref().unwrap_or(&zeros)),
                    ("eps_minus_im", r.eps_minus_im.as_ref().unwrap_or(&zeros)),
                ];
                for (key, col) in cols {
                    if col.len() != n {
                        return Err(Error::scenario(format!("medium.{key}"), format!("expected {n} values, got {}", col.len())));
                    }
                }
                let samples = (0..n)
                    .map(|i| {
                        CircularDecomposition::new(
                            Complex64::new(cols[0].1[i], cols[3].1[i]),
                            Complex64::new(cols[1].1[i], cols[4].1[i]),
                            Complex64::new(cols[2].1[i], cols[5].1[i]),
                        )
                    })
                    .collect();
                let t = TabulatedMedium::new(r.omega, samples).map_err(|e| Error::scenario("medium.omega", e.to_string()))?;
                MediumModel::Tabulated(t)
            }
        })
    }
}

impl Scenario {
    pub fn new(medium: MediumModel, beta: f64, omega_bar: f64, numerics: Numerics) -> Result<Self> {
        let charge = ChargeState::new(beta)?;
        let warnings = medium.validate()?;
        numerics.validate()?;
        let (lo, hi) = medium.window();
        if !(omega_bar > 0.0 && omega_bar.is_finite()) {
            return Err(Error::scenario("omega_bar", format!("must be positive, got {omega_bar}")));
        }
        if omega_bar < lo || omega_bar > hi {
            return Err(Error::scenario("omega_bar", format!("{omega_bar} lies outside the medium window [{lo}, {hi}]")));
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(Self { medium, charge, omega_bar, numerics, source: None, text: None, warnings })
    }

    pub fn parse_str(text: &str, origin: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| Error::scenario(origin, e.to_string()))?;
        let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::scenario(if path == "." { origin.to_string() } else { path }, e.into_inner().to_string())
        })?;
        let medium = raw.medium.build()?;
        let omega_bar = match (raw.omega_bar, &medium) {
            (Some(w), _) => w,
            (None, MediumModel::EitLambda(p)) => p.omega_plus,
            (None, _) => return Err(Error::scenario("omega_bar", "required for this medium variant")),
        };
        let mut s = Self::new(medium, raw.charge.beta, omega_bar, raw.numerics)?;
        s.text = Some(text.to_string());
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        let mut s = Self::parse_str(&text, &path.display().to_string())?;
        s.source = Some(path.to_path_buf());
        Ok(s)
    }

    /// A file path, or the name of a preset (with or without `.toml`).
    pub fn load(spec: &str) -> Result<Self> {
        let path = Path::new(spec);
        if path.is_file() {
            return Self::from_file(path);
        }
        let name = spec.strip_suffix(".toml").unwrap_or(spec);
        if let Ok(dir) = std::env::var(PRESET_DIR_ENV) {
            let candidate = Path::new(&dir).join(format!("{name}.toml"));
            if candidate.is_file() {
                return Self::from_file(&candidate);
            }
        }
        match BUNDLED.iter().find(|(n, _)| *n == name) {
            Some((n, text)) => Self::parse_str(text, &format!("preset {n}")),
            None => Err(Error::scenario(
                "scenario",
                format!("'{spec}' is neither a file nor a known preset ({})", preset_names().join(", ")),
            )),
        }
    }

    /// Stable digest of the canonical contents.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("scenario serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }

    /// Frequency window `[ω̄ − W, ω̄ + W]` for the field integral.
    pub fn window(&self) -> (f64, f64) {
        let w = self
            .numerics
            .window_half_width
            .unwrap_or(self.numerics.window_widths * self.medium.feature_width(self.omega_bar))
            .min(0.1 * self.omega_bar);
        (self.omega_bar - w, self.omega_bar + w)
    }

    pub fn integral_options(&self, both_branches: bool) -> IntegralOptions {
        IntegralOptions {
            both_branches,
            nodes: self.numerics.cache_nodes,
            pieces: self.numerics.quad_pieces,
            quadrature: QuadratureOptions { rel_tol: self.numerics.rel_tol, abs_tol: 0.0, max_intervals: self.numerics.max_intervals },
        }
    }

    pub fn field_solver(&self, both_branches: bool) -> Result<FieldSolver> {
        FieldSolver::new(self.omega_bar, self.window(), &self.charge, &self.medium, self.integral_options(both_branches))
    }

    /// Gaussian-profile parameters of branch 1 at `ω̄`.
    pub fn profile_params(&self) -> Result<ProfileParams> {
        let pole = pole_on_branch(self.omega_bar, 1, &self.charge, &self.medium)?;
        let eta = absorption_curvature(self.omega_bar, &self.charge, &self.medium)?;
        ProfileParams::from_pole(&pole, &self.charge, eta)
    }

    /// Current value of a numeric parameter by its dotted key.
    pub fn parameter(&self, key: &str) -> Result<f64> {
        match (key, &self.medium) {
            ("charge.beta", _) => Ok(self.charge.beta),
            ("omega_bar", _) => Ok(self.omega_bar),
            ("medium.four_pi_chi_z", MediumModel::EitLambda(p)) => Ok(FOUR_PI * p.f_z / p.delta_z),
            ("medium.four_pi_chi_minus", MediumModel::EitLambda(p)) => Ok(FOUR_PI * p.f_minus / p.delta_minus),
            _ => medium_slot(&mut self.medium.clone(), key).map(|v| *v),
        }
    }

    /// Replaces one numeric parameter by its dotted key, re-validating.
    pub fn with_parameter(&self, key: &str, value: f64) -> Result<Self> {
        let mut medium = self.medium.clone();
        let mut beta = self.charge.beta;
        let mut omega_bar = self.omega_bar;
        match (key, &mut medium) {
            ("charge.beta", _) => beta = value,
            ("omega_bar", _) => omega_bar = value,
            ("medium.four_pi_chi_z", MediumModel::EitLambda(p)) => p.f_z = value * p.delta_z / FOUR_PI,
            ("medium.four_pi_chi_minus", MediumModel::EitLambda(p)) => p.f_minus = value * p.delta_minus / FOUR_PI,
            (_, m) => *medium_slot(m, key)? = value,
        }
        let mut s = Self::new(medium, beta, omega_bar, self.numerics)?;
        s.source = self.source.clone();
        Ok(s)
    }
}

fn medium_slot<'a>(medium: &'a mut MediumModel, key: &str) -> Result<&'a mut f64> {
    let bad = || Error::scenario(key, "not a numeric parameter of this scenario");
    let field = key.strip_prefix("medium.").ok_or_else(bad)?;
    match medium {
        MediumModel::IsotropicConstant { n } if field == "n" => Ok(n),
        MediumModel::IsotropicDispersive { f, omega0, gamma } => match field {
            "f" => Ok(f),
            "omega0" => Ok(omega0),
            "gamma" => Ok(gamma),
            _ => Err(bad()),
        },
        MediumModel::EitLambda(p) => match field {
            "f_plus" => Ok(&mut p.f_plus),
            "f_z" => Ok(&mut p.f_z),
            "f_minus" => Ok(&mut p.f_minus),
            "omega_plus" => Ok(&mut p.omega_plus),
            "gamma_e" => Ok(&mut p.gamma_e),
            "gamma_m" => Ok(&mut p.gamma_m),
            "rabi" => Ok(&mut p.rabi),
            "delta_z" => Ok(&mut p.delta_z),
            "delta_minus" => Ok(&mut p.delta_minus),
            _ => Err(bad()),
        },
        _ => Err(bad()),
    }
}

pub fn preset_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

/// Text of a bundled preset.
pub fn bundled_preset(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
