//! Radiated field: the pole-residue frequency integral, the Gaussian
//! group-cone profile, and gridded intensity maps.
//!
//! Intensities are normalised to `q = 1`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::lagrange4_weights;
use crate::kinematics::{find_poles, ChargeState, CherenkovPole};
use crate::linalg::{braket, to_complex, C3, R3};
use crate::medium::MediumModel;
use crate::quadrature::{integrate, QuadratureOptions};
use crate::units::{ulp, C, TWO_PI};

/// Below this `k⊥x⊥` the large-argument asymptotics of the radial
/// propagator is not trusted and map samples are masked.
pub const MIN_K_X: f64 = 10.0;

pub const CACHE_NODES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub omega_bar: f64,
    pub k_perp: f64,
    pub mu: f64,
    pub eta: f64,
    pub v_r: f64,
    pub w: f64,
    pub coupling: f64,
}

impl ProfileParams {
    pub fn from_pole(pole: &CherenkovPole, charge: &ChargeState, eta: f64) -> Result<Self> {
        let p = Self {
            omega_bar: pole.omega,
            k_perp: pole.k_perp,
            mu: pole.mu,
            eta,
            v_r: pole.v_r,
            w: charge.w,
            coupling: pole.coupling,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        let fields = [self.omega_bar, self.k_perp, self.mu, self.eta, self.v_r, self.w, self.coupling];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("profile parameters must be finite: {self:?}")));
        }
        if self.eta < 0.0 || self.coupling < 0.0 || self.k_perp <= 0.0 || self.w <= 0.0 {
            return Err(Error::InvalidInput(format!("profile parameters out of range: {self:?}")));
        }
        Ok(())
    }

    /// `A = 4 k⊥ ω̄² / (c⁴ μ² η)`.
    pub fn amplitude(&self) -> Result<f64> {
        if !(self.eta > 0.0) {
            return Err(Error::InvalidInput(
                "eta = 0: the Gaussian profile degenerates to the undamped cone; use the frequency integral".into(),
            ));
        }
        Ok(4.0 * self.k_perp * self.omega_bar.powi(2) / (C.powi(4) * self.mu.powi(2) * self.eta))
    }

    /// Ridge position `z = w (t − x⊥/v_r)`.
    pub fn ridge_z(&self, x_perp: f64, t: f64) -> f64 {
        self.w * (t - x_perp / self.v_r)
    }

    /// Gaussian width in z, `σ_z = w √(η x⊥ / 2)`.
    pub fn sigma_z(&self, x_perp: f64) -> f64 {
        self.w * (0.5 * self.eta * x_perp).sqrt()
    }
}

/// `|E|² = (A/x⊥²) exp[−(z/w + x⊥/v_r − t)²/(η x⊥)] |⟨e|ŵ⟩|²`.
pub fn gaussian_profile(x_perp: f64, z: f64, t: f64, p: &ProfileParams) -> Result<f64> {
    if !(x_perp > 0.0) {
        return Err(Error::InvalidInput(format!("x_perp must be positive, got {x_perp}")));
    }
    let a = p.amplitude()?;
    let s = z / p.w + x_perp / p.v_r - t;
    Ok(a / (x_perp * x_perp) * (-s * s / (p.eta * x_perp)).exp() * p.coupling)
}

/// Pole data of one branch on a uniform detuning grid.
#[derive(Debug, Clone)]
struct BranchTable {
    branch: u8,
    k0: f64,
    d0: f64,
    step: f64,
    dk: Vec<f64>,
    im_k: Vec<f64>,
    /// `(k⊥ ω ⟨e|ŵ⟩ / μ) e`, invariant under the phase of `e`.
    amp: Vec<C3>,
}

impl BranchTable {
    fn at(&self, delta: f64) -> (f64, f64, C3) {
        let (i, w) = lagrange4_weights(self.d0, self.step, self.dk.len(), delta);
        let mut dk = 0.0;
        let mut im = 0.0;
        let mut amp = C3::zeros();
        for j in 0..4 {
            dk += w[j] * self.dk[i + j];
            im += w[j] * self.im_k[i + j];
            amp += self.amp[i + j].scale(w[j]);
        }
        (dk, im.max(0.0), amp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralOptions {
    pub both_branches: bool,
    pub nodes: usize,
    /// Initial number of equal pieces on each side of `ω̄`.
    pub pieces: usize,
    pub quadrature: QuadratureOptions,
}

impl Default for IntegralOptions {
    fn default() -> Self {
        Self { both_branches: false, nodes: CACHE_NODES, pieces: 32, quadrature: QuadratureOptions::default() }
    }
}

impl PartialEq for QuadratureOptions {
    fn eq(&self, other: &Self) -> bool {
        self.rel_tol == other.rel_tol && self.abs_tol == other.abs_tol && self.max_intervals == other.max_intervals
    }
}

/// Evaluates the pole-residue frequency integral over a fixed window
/// `[ω̄ + d_lo, ω̄ + d_hi]`, with pole data cached once.
#[derive(Debug, Clone)]
pub struct FieldSolver {
    omega_bar: f64,
    w: f64,
    d_lo: f64,
    d_hi: f64,
    tables: Vec<BranchTable>,
    opts: IntegralOptions,
}

impl FieldSolver {
    pub fn new(
        omega_bar: f64,
        window: (f64, f64),
        charge: &ChargeState,
        m: &MediumModel,
        opts: IntegralOptions,
    ) -> Result<Self> {
        let (lo, hi) = window;
        if !(lo < omega_bar && omega_bar < hi) {
            return Err(Error::InvalidInput(format!("window [{lo}, {hi}] must contain omega_bar = {omega_bar}")));
        }
        if opts.nodes < 8 {
            return Err(Error::InvalidInput("pole cache needs at least 8 nodes".into()));
        }
        // nodes on exact multiples of ulp(ω̄), so ω̄ + δ is representable
        let u = ulp(omega_bar);
        let d_lo = ((lo - omega_bar) / u).ceil() * u;
        let d_hi = ((hi - omega_bar) / u).floor() * u;
        let step = ((d_hi - d_lo) / (opts.nodes - 1) as f64 / u).ceil().max(1.0) * u;
        let n = opts.nodes;

        let center = find_poles(omega_bar, charge, m)?;
        let wanted: Vec<u8> = if opts.both_branches {
            center.iter().map(|p| p.branch).collect()
        } else {
            center.iter().filter(|p| p.branch == 1).map(|p| p.branch).collect()
        };
        if wanted.is_empty() {
            return Err(Error::NoPole(format!("no emitting branch at omega_bar = {omega_bar}, beta = {}", charge.beta)));
        }
        let count = center.len();

        let rows: Vec<Vec<CherenkovPole>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let omega = omega_bar + (d_lo + i as f64 * step);
                let poles = find_poles(omega, charge, m)?;
                if poles.len() != count {
                    return Err(Error::ThresholdCrossing(format!(
                        "pole count changes from {count} to {} at omega = {omega}; split the window at the threshold",
                        poles.len()
                    )));
                }
                Ok(poles)
            })
            .collect::<Result<_>>()?;

        let w_hat = to_complex(&R3::z());
        let mut tables = Vec::new();
        for &b in &wanted {
            let k0 = center.iter().find(|p| p.branch == b).map(|p| p.k_perp).unwrap_or(f64::NAN);
            let mut t = BranchTable {
                branch: b,
                k0,
                d0: d_lo,
                step,
                dk: Vec::with_capacity(n),
                im_k: Vec::with_capacity(n),
                amp: Vec::with_capacity(n),
            };
            for row in &rows {
                let p = row.iter().find(|p| p.branch == b).ok_or_else(|| {
                    Error::ThresholdCrossing(format!("branch {b} disappears inside the frequency window"))
                })?;
                if !p.im_k_perp.is_finite() {
                    return Err(Error::PerturbationInvalid(format!("Im k_perp unavailable at omega = {}", p.omega)));
                }
                t.dk.push(p.k_perp - k0);
                t.im_k.push(p.im_k_perp);
                let factor = p.k_perp * p.omega / p.mu;
                t.amp.push((p.polarization * braket(&p.polarization, &w_hat)).scale(factor));
            }
            tables.push(t);
        }
        Ok(Self { omega_bar, w: charge.w, d_lo, d_hi: d_lo + (n - 1) as f64 * step, tables, opts })
    }

    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }

    pub fn window(&self) -> (f64, f64) {
        (self.omega_bar + self.d_lo, self.omega_bar + self.d_hi)
    }

    pub fn branches(&self) -> Vec<u8> {
        self.tables.iter().map(|t| t.branch).collect()
    }

    /// Smallest `k⊥(ω̄)` among the integrated branches.
    pub fn k_perp(&self) -> f64 {
        self.tables.iter().map(|t| t.k0).fold(f64::INFINITY, f64::min)
    }

    pub fn is_valid(&self, x_perp: f64) -> bool {
        x_perp > 0.0 && self.k_perp() * x_perp > MIN_K_X
    }

    /// Complex field components at `(x⊥ x̂, z)` and time `t`.
    pub fn field(&self, x_perp: f64, z: f64, t: f64) -> Result<C3> {
        if !self.is_valid(x_perp) {
            return Err(Error::InvalidInput(format!(
                "k_perp·x_perp = {:e} is below {MIN_K_X}: outside the asymptotic region",
                self.k_perp() * x_perp
            )));
        }
        let tau = z / self.w - t;
        let i = Complex64::i();
        let carriers: Vec<Complex64> =
            self.tables.iter().map(|tb| Complex64::from_polar(1.0, (tb.k0 * x_perp).rem_euclid(TWO_PI))).collect();
        let integrand = |delta: f64| -> C3 {
            let mut sum = C3::zeros();
            for (tb, carrier) in self.tables.iter().zip(&carriers) {
                let (dk, im, amp) = tb.at(delta);
                let k = Complex64::new(tb.k0 + dk, im);
                let radial = (i / (k * (TWO_PI * x_perp))).sqrt();
                let phase = Complex64::from_polar((-im * x_perp).exp(), dk * x_perp + delta * tau);
                sum += amp * (radial * phase * carrier);
            }
            sum
        };
        let n = self.opts.pieces.max(1);
        let mut breaks: Vec<f64> = (0..=n).map(|j| self.d_lo * (1.0 - j as f64 / n as f64)).collect();
        breaks.extend((1..=n).map(|j| self.d_hi * j as f64 / n as f64));
        let est = integrate(integrand, &breaks, &self.opts.quadrature)?;
        let carrier = Complex64::from_polar(1.0, (self.omega_bar * tau).rem_euclid(TWO_PI));
        Ok(est.value * (i * (2.0 / (C * C)) * carrier))
    }

    pub fn intensity(&self, x_perp: f64, z: f64, t: f64) -> Result<f64> {
        Ok(self.field(x_perp, z, t)?.iter().map(|c| c.norm_sqr()).sum())
    }
}

/// Single-point evaluation of the frequency integral. Builds the pole
/// cache for the given window; use [`FieldSolver`] for repeated calls.
pub fn field_integral(
    x_perp: f64,
    z: f64,
    t: f64,
    charge: &ChargeState,
    m: &MediumModel,
    omega_bar: f64,
    window: (f64, f64),
    opts: IntegralOptions,
) -> Result<C3> {
    FieldSolver::new(omega_bar, window, charge, m, opts)?.field(x_perp, z, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_perp: (f64, f64),
    pub nx: usize,
    pub z: (f64, f64),
    pub nz: usize,
}

fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range.0];
    }
    (0..n).map(|i| range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64).collect()
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.nz == 0 {
            return Err(Error::InvalidInput("empty grid".into()));
        }
        for (name, (lo, hi), n) in [("x_perp", self.x_perp, self.nx), ("z", self.z, self.nz)] {
            if !(lo.is_finite() && hi.is_finite()) || (n > 1 && !(hi > lo)) {
                return Err(Error::InvalidInput(format!("{name} range [{lo}, {hi}] must be finite and increasing")));
            }
        }
        if !(self.x_perp.0 > 0.0) {
            return Err(Error::InvalidInput("x_perp range must be positive".into()));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        axis(self.x_perp, self.nx)
    }

    pub fn zs(&self) -> Vec<f64> {
        axis(self.z, self.nz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapMethod {
    Gaussian,
    Integral,
}

impl MapMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            MapMethod::Gaussian => "gaussian",
            MapMethod::Integral => "integral",
        }
    }
}

pub enum MapSource<'a> {
    Gaussian(&'a ProfileParams),
    Integral(&'a FieldSolver),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldMap {
    pub grid: GridSpec,
    pub time: f64,
    pub method: MapMethod,
    /// Row-major: `values[ix * nz + iz]`. Masked samples hold NaN.
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    pub scenario_hash: String,
}

impl FieldMap {
    pub fn get(&self, ix: usize, iz: usize) -> f64 {
        self.values[ix * self.grid.nz + iz]
    }
}

/// `|E|²` on a grid of `(x⊥, z)` at time `t`, computed row by row in parallel.
pub fn intensity_map(grid: &GridSpec, t: f64, source: &MapSource, scenario_hash: &str) -> Result<FieldMap> {
    grid.validate()?;
    let (xs, zs) = (grid.xs(), grid.zs());
    let (method, k_perp) = match source {
        MapSource::Gaussian(p) => {
            p.check()?;
            p.amplitude()?;
            (MapMethod::Gaussian, p.k_perp)
        }
        MapSource::Integral(s) => (MapMethod::Integral, s.k_perp()),
    };
    let rows: Vec<Vec<(f64, bool)>> = xs
        .par_iter()
        .map(|&x| {
            if !(k_perp * x > MIN_K_X) {
                return Ok(vec![(f64::NAN, true); zs.len()]);
            }
            zs.iter()
                .map(|&z| {
                    let v = match source {
                        MapSource::Gaussian(p) => gaussian_profile(x, z, t, p)?,
                        MapSource::Integral(s) => s.intensity(x, z, t)?,
                    };
                    Ok((v, false))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let (values, mask) = rows.into_iter().flatten().unzip();
    Ok(FieldMap { grid: *grid, time: t, method, values, mask, scenario_hash: scenario_hash.to_string() })
}
