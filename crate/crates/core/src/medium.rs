//! Frequency-dependent dielectric tensors of rotationally symmetric media.
//!
//! Every medium is described at a given frequency by its components on the
//! `{ẑ, σ̂+, σ̂−}` basis,
//!
//! ```text
//! ε(ω) = ε_z |ẑ⟩⟨ẑ| + ε_+ |σ̂+⟩⟨σ̂+| + ε_− |σ̂−⟩⟨σ̂−|
//! ```
//!
//! which is the most general tensor invariant under rotations about ẑ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::linalg::{outer, sigma_minus, sigma_plus, z_hat, CMat3};
use crate::units::{ulp, FOUR_PI};

/// Dielectric components on the circular basis at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularDecomposition {
    pub eps_z: Complex64,
    pub eps_plus: Complex64,
    pub eps_minus: Complex64,
}

impl CircularDecomposition {
    pub fn new(eps_z: Complex64, eps_plus: Complex64, eps_minus: Complex64) -> Self {
        Self { eps_z, eps_plus, eps_minus }
    }

    pub fn isotropic(eps: Complex64) -> Self {
        Self::new(eps, eps, eps)
    }

    pub fn tensor(&self) -> CMat3 {
        let (z, p, m) = (z_hat(), sigma_plus(), sigma_minus());
        outer(&z, &z) * self.eps_z + outer(&p, &p) * self.eps_plus + outer(&m, &m) * self.eps_minus
    }

    /// Drops the imaginary parts: the hermitian part of the tensor.
    pub fn lossless(&self) -> Self {
        Self::new(self.eps_z.re.into(), self.eps_plus.re.into(), self.eps_minus.re.into())
    }

    /// Imaginary parts only: the absorptive part `(ε − ε†)/2i`.
    pub fn absorptive(&self) -> Self {
        Self::new(self.eps_z.im.into(), self.eps_plus.im.into(), self.eps_minus.im.into())
    }

    pub fn is_passive(&self) -> bool {
        self.components().iter().all(|e| e.im >= 0.0)
    }

    /// In-plane eigenvalues `(ε_+, ε_−)` of the hermitian part.
    pub fn in_plane(&self) -> [f64; 2] {
        [self.eps_plus.re, self.eps_minus.re]
    }

    pub fn max_real(&self) -> f64 {
        self.components().iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn determinant(&self) -> Complex64 {
        self.eps_z * self.eps_plus * self.eps_minus
    }

    fn components(&self) -> [Complex64; 3] {
        [self.eps_z, self.eps_plus, self.eps_minus]
    }
}

/// Parameters of the coherently driven three-level Λ medium.
///
/// The oscillator strengths carry the atomic density and the squared dipole
/// moments (Clebsch–Gordan factors included) and have units of angular
/// frequency, so that `4π f/Δω` is dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EitParams {
    pub f_plus: f64,
    pub f_z: f64,
    pub f_minus: f64,
    pub omega_plus: f64,
    pub gamma_e: f64,
    pub gamma_m: f64,
    pub rabi: f64,
    pub delta_z: f64,
    pub delta_minus: f64,
}

impl EitParams {
    /// Width `Γ = Ω²/γ_e` of the transparency window.
    pub fn transparency_width(&self) -> f64 {
        self.rabi * self.rabi / self.gamma_e
    }

    /// Checks the regime the Λ model is meant for. Hard violations are
    /// errors; a metastable linewidth that is merely not negligible is
    /// returned as a warning string.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        let positive = [
            ("omega_plus", self.omega_plus),
            ("gamma_e", self.gamma_e),
            ("rabi", self.rabi),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::scenario(format!("medium.{key}"), format!("must be positive, got {v}")));
            }
        }
        for (key, v) in [("f_plus", self.f_plus), ("f_z", self.f_z), ("f_minus", self.f_minus)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::scenario(format!("medium.{key}"), format!("must be non-negative, got {v}")));
            }
        }
        if !(self.gamma_m >= 0.0 && self.gamma_m < self.gamma_e) {
            return Err(Error::scenario(
                "medium.gamma_m",
                format!("must satisfy 0 <= gamma_m < gamma_e = {}, got {}", self.gamma_e, self.gamma_m),
            ));
        }
        if self.gamma_m > 1e-2 * self.gamma_e {
            warnings.push(format!(
                "gamma_m/gamma_e = {:.3e} is not small; the transparency window will be shallow",
                self.gamma_m / self.gamma_e
            ));
        }
        if self.rabi >= self.gamma_e {
            return Err(Error::scenario(
                "medium.rabi",
                format!("weak driving requires rabi < gamma_e = {}, got {}", self.gamma_e, self.rabi),
            ));
        }
        for (key, v) in [("delta_z", self.delta_z), ("delta_minus", self.delta_minus)] {
            if !(v.abs() > self.gamma_e) {
                return Err(Error::scenario(
                    format!("medium.{key}"),
                    format!("background transition must be off resonance (|{key}| > gamma_e), got {v}"),
                ));
            }
        }
        Ok(warnings)
    }
}

/// `ε_+(ω) = 1 + 4π f_+ / (ω_+ − iγ_e − ω − |Ω|²/(ω_+ − iγ_m − ω))`.
pub fn eit_epsilon_plus(omega: f64, p: &EitParams) -> Result<Complex64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidInput(format!("omega must be positive, got {omega}")));
    }
    let detuning = p.omega_plus - omega;
    let inner = Complex64::new(detuning, -p.gamma_m);
    let omega2 = p.rabi * p.rabi;
    if inner == Complex64::new(0.0, 0.0) {
        if omega2 > 0.0 {
            // the dressing term diverges and the response vanishes
            return Ok(Complex64::new(1.0, 0.0));
        }
        return Err(Error::Singular(format!(
            "bare resonance at omega = omega_plus = {omega} with gamma_m = 0 and rabi = 0"
        )));
    }
    let denom = Complex64::new(detuning, -p.gamma_e) - omega2 / inner;
    if denom.norm() == 0.0 {
        return Err(Error::Singular(format!("dressed resonance at omega = {omega}")));
    }
    Ok(1.0 + FOUR_PI * p.f_plus / denom)
}

/// `ε_{z,−} = 1 + 4π f_{z,−}/Δω_{z,−}`, lossless and frequency independent.
pub fn background_epsilon(_omega: f64, p: &EitParams) -> Result<(Complex64, Complex64)> {
    if p.delta_z == 0.0 || p.delta_minus == 0.0 {
        return Err(Error::Singular("background detunings must be non-zero".into()));
    }
    let eps_z = 1.0 + FOUR_PI * p.f_z / p.delta_z;
    let eps_minus = 1.0 + FOUR_PI * p.f_minus / p.delta_minus;
    Ok((eps_z.into(), eps_minus.into()))
}

/// Circular-basis samples on a frequency grid, interpolated with a
/// monotone cubic in the real and imaginary parts of each component.
#[derive(Debug, Clone, Serialize)]
pub struct TabulatedMedium {
    pub omega: Vec<f64>,
    pub samples: Vec<CircularDecomposition>,
    #[serde(skip)]
    interp: Vec<Pchip>,
}

impl PartialEq for TabulatedMedium {
    fn eq(&self, other: &Self) -> bool {
        self.omega == other.omega && self.samples == other.samples
    }
}

impl TabulatedMedium {
    pub fn new(omega: Vec<f64>, samples: Vec<CircularDecomposition>) -> Result<Self> {
        if omega.len() != samples.len() {
            return Err(Error::InvalidInput("tabulated medium: omega and samples differ in length".into()));
        }
        if omega.first().is_some_and(|&w| w <= 0.0) {
            return Err(Error::InvalidInput("tabulated medium: frequencies must be positive".into()));
        }
        let pick: [fn(&CircularDecomposition) -> f64; 6] = [
            |s| s.eps_z.re,
            |s| s.eps_z.im,
            |s| s.eps_plus.re,
            |s| s.eps_plus.im,
            |s| s.eps_minus.re,
            |s| s.eps_minus.im,
        ];
        let interp = pick
            .iter()
            .map(|f| Pchip::new(omega.clone(), samples.iter().map(f).collect()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { omega, samples, interp })
    }

    pub fn range(&self) -> (f64, f64) {
        self.interp[0].range()
    }

    pub fn eval(&self, omega: f64) -> Result<CircularDecomposition> {
        let v = self.interp.iter().map(|p| p.eval(omega)).collect::<Result<Vec<_>>>()?;
        Ok(CircularDecomposition::new(
            Complex64::new(v[0], v[1]),
            Complex64::new(v[2], v[3]),
            Complex64::new(v[4], v[5]),
        ))
    }

    fn min_spacing(&self) -> f64 {
        self.omega.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

/// A frequency-dependent, rotationally symmetric dielectric response.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MediumModel {
    /// `ε = n²`, no dispersion.
    IsotropicConstant { n: f64 },
    /// Single Lorentzian pole, `ε = 1 + 4π f/(ω₀ − ω − iγ)`.
    IsotropicDispersive { f: f64, omega0: f64, gamma: f64 },
    /// Coherently driven Λ system with off-resonant backgrounds on ẑ and σ̂−.
    EitLambda(EitParams),
    Tabulated(TabulatedMedium),
}

impl MediumModel {
    /// Declared frequency window of validity.
    pub fn window(&self) -> (f64, f64) {
        match self {
            MediumModel::Tabulated(t) => t.range(),
            _ => (0.0, f64::INFINITY),
        }
    }

    pub fn decomposition(&self, omega: f64) -> Result<CircularDecomposition> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidInput(format!("omega must be positive and finite, got {omega}")));
        }
        match self {
            MediumModel::IsotropicConstant { n } => Ok(CircularDecomposition::isotropic((n * n).into())),
            MediumModel::IsotropicDispersive { f, omega0, gamma } => {
                let denom = Complex64::new(omega0 - omega, -gamma);
                if denom.norm() == 0.0 {
                    return Err(Error::Singular(format!("lossless resonance at omega = {omega}")));
                }
                Ok(CircularDecomposition::isotropic(1.0 + FOUR_PI * f / denom))
            }
            MediumModel::EitLambda(p) => {
                let eps_plus = eit_epsilon_plus(omega, p)?;
                let (eps_z, eps_minus) = background_epsilon(omega, p)?;
                Ok(CircularDecomposition::new(eps_z, eps_plus, eps_minus))
            }
            MediumModel::Tabulated(t) => t.eval(omega),
        }
    }

    /// Lossless (hermitian-part) decomposition used for all pole finding.
    pub fn lossless(&self, omega: f64) -> Result<CircularDecomposition> {
        Ok(self.decomposition(omega)?.lossless())
    }

    /// Local frequency scale over which `ε(ω)` changes appreciably.
    ///
    /// Inside an EIT window this is `Γ`; near a lossless pole it is the
    /// distance to the pole; for a non-dispersive medium it is `ω` itself.
    pub fn feature_width(&self, omega: f64) -> f64 {
        let w = match self {
            MediumModel::IsotropicConstant { .. } => omega,
            MediumModel::IsotropicDispersive { omega0, gamma, .. } => (omega - omega0).abs().max(*gamma),
            MediumModel::EitLambda(p) => {
                let d = (omega - p.omega_plus).abs();
                if p.gamma_e > 0.0 && d < 3.0 * p.rabi.max(p.gamma_e) {
                    p.transparency_width().min(p.gamma_e)
                } else if p.gamma_e > 0.0 {
                    d
                } else {
                    // lossless Λ: dressed poles at |ω − ω_+| = Ω
                    (d - p.rabi).abs()
                }
            }
            MediumModel::Tabulated(t) => t.min_spacing(),
        };
        w.min(omega)
    }

    /// Step used for centred frequency derivatives of the medium response.
    pub fn derivative_step(&self, omega: f64) -> f64 {
        (1e-3 * self.feature_width(omega)).min(1e-6 * omega).max(64.0 * ulp(omega))
    }

    /// Ensures `det ε(ω) ≠ 0`, which excludes longitudinal modes.
    pub fn check_nonsingular(&self, omega: f64) -> Result<()> {
        let d = self.decomposition(omega)?;
        if d.determinant().norm() < 1e-12 * d.max_abs().powi(3) {
            return Err(Error::Singular(format!("det eps vanishes at omega = {omega}")));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<Vec<String>> {
        match self {
            MediumModel::IsotropicConstant { n } => {
                if !(*n > 0.0 && n.is_finite()) {
                    return Err(Error::scenario("medium.n", format!("refractive index must be positive, got {n}")));
                }
                Ok(vec![])
            }
            MediumModel::IsotropicDispersive { f, omega0, gamma } => {
                if !(*gamma >= 0.0 && *omega0 > 0.0 && f.is_finite()) {
                    return Err(Error::scenario(
                        "medium",
                        format!("dispersive pole needs omega0 > 0 and gamma >= 0 (got omega0 = {omega0}, gamma = {gamma})"),
                    ));
                }
                Ok(vec![])
            }
            MediumModel::EitLambda(p) => p.validate(),
            MediumModel::Tabulated(t) => {
                if let Some(i) = t.samples.iter().position(|s| !s.is_passive()) {
                    return Err(Error::scenario(
                        format!("medium.samples[{i}]"),
                        "imaginary parts must be non-negative (passive medium)",
                    ));
                }
                Ok(vec![])
            }
        }
    }
}

/// Full 3×3 tensor `ε(ω)` in the Cartesian basis.
pub fn epsilon_tensor(omega: f64, m: &MediumModel) -> Result<CMat3> {
    let (lo, hi) = m.window();
    if omega < lo || omega > hi {
        return Err(Error::OutOfWindow { omega, lo, hi });
    }
    Ok(m.decomposition(omega)?.tensor())
}
