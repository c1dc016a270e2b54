//! Cherenkov poles and cone geometry for a charge moving along ẑ.
//!
//! At frequency ω the charge only excites wavevectors on the plane
//! `k_z = ω/w`. Poles are the points where that plane cuts a dispersion
//! surface; by rotational symmetry the azimuth is fixed to `û⊥ = x̂`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{braket, hermitian_eigen, to_complex, CMat3, C3, R3};
use crate::medium::MediumModel;
use crate::modes::{self, fix_gauge, fresnel_matrix_with, scan_roots, Mode};
use crate::units::{ulp, C};

/// Poles with `k⊥` below this fraction of `ω/c` are dropped: the
/// large-`k⊥x⊥` asymptotics behind the field formulas fails there.
pub const GUARD_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeState {
    pub beta: f64,
    pub w: f64,
}

impl ChargeState {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::scenario("charge.beta", format!("must lie in (0, 1), got {beta}")));
        }
        Ok(Self { beta, w: beta * C })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CherenkovPole {
    pub omega: f64,
    pub branch: u8,
    pub k_perp: f64,
    pub k_z: f64,
    pub im_k_perp: f64,
    pub polarization: C3,
    /// `|⟨e|ŵ⟩|²`.
    pub coupling: f64,
    pub mu: f64,
    pub v_r: f64,
    pub group_velocity: R3,
    pub degenerate: bool,
}

impl CherenkovPole {
    pub fn k(&self) -> R3 {
        R3::new(self.k_perp, 0.0, self.k_z)
    }

    pub fn vg_perp(&self) -> f64 {
        self.group_velocity.x
    }

    pub fn vg_parallel(&self) -> f64 {
        self.group_velocity.z
    }

    fn as_mode(&self) -> Mode {
        Mode {
            omega: self.omega,
            k: self.k(),
            polarization: self.polarization,
            group_velocity: self.group_velocity,
            mu: Some(self.mu),
            branch: self.branch,
            degenerate: self.degenerate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeGeometry {
    /// Group-cone half-aperture measured from −ẑ, `tan θ = v_r/w`. Exceeds
    /// π/2 when the energy outruns the charge along z (`v∥ > w`).
    pub theta: f64,
    /// Wave-cone half-aperture, `tan φ = ω/(w k⊥)`.
    pub phi: f64,
    pub v_r: f64,
    /// Crossover length `ξ = η v_r²`.
    pub xi: f64,
    pub vg_perp: f64,
    pub vg_parallel: f64,
}

/// `β_min = 1/√ε⊥^(α)`: the charge must outrun the on-axis phase velocity
/// of the branch. Branch 1 uses the larger in-plane eigenvalue.
pub fn threshold_beta(omega: f64, branch: u8, m: &MediumModel) -> Result<f64> {
    let mut in_plane = m.lossless(omega)?.in_plane();
    in_plane.sort_by(|a, b| b.total_cmp(a));
    let eps_perp = match branch {
        1 | 2 => in_plane[branch as usize - 1],
        _ => return Err(Error::InvalidInput(format!("branch must be 1 or 2, got {branch}"))),
    };
    if !(eps_perp > 1.0) {
        return Err(Error::NoPole(format!(
            "no subluminal emission on branch {branch} at omega = {omega} (eps_perp = {eps_perp})"
        )));
    }
    Ok(1.0 / eps_perp.sqrt())
}

/// Real poles `k⊥^(α)(ω)` of the lossless problem on the `k_z = ω/w` plane.
pub fn find_poles(omega: f64, charge: &ChargeState, m: &MediumModel) -> Result<Vec<CherenkovPole>> {
    let (lo, hi) = m.window();
    if omega < lo || omega > hi {
        return Err(Error::OutOfWindow { omega, lo, hi });
    }
    let lossless = m.lossless(omega)?;
    let max_eps = lossless.max_real();
    if !(max_eps > 0.0) {
        return Ok(Vec::new());
    }
    let eps = lossless.tensor();
    let q = omega / C;
    let k_z = omega / charge.w;
    let family = |s: f64| plane_family(s, k_z, omega, &eps);
    let roots = scan_roots(family, 1.5 * q * max_eps.sqrt(), &to_complex(&R3::z()));

    let mut poles = Vec::with_capacity(roots.len());
    for r in roots {
        if r.s < GUARD_BAND * q {
            log::debug!("dropping near-axis pole k_perp = {:e} at omega = {omega}", r.s);
            continue;
        }
        let e = fix_gauge(&r.vector);
        let mut mode = Mode {
            omega,
            k: R3::new(r.s, 0.0, k_z),
            polarization: e,
            group_velocity: R3::zeros(),
            mu: None,
            branch: r.index as u8,
            degenerate: r.degenerate,
        };
        mode.group_velocity = modes::group_velocity(&mode, m)?;
        let mu = modes::weight_mu(&mode)?;
        let mut pole = CherenkovPole {
            omega,
            branch: mode.branch,
            k_perp: r.s,
            k_z,
            im_k_perp: 0.0,
            polarization: e,
            coupling: e.z.norm_sqr(),
            mu,
            v_r: f64::NAN,
            group_velocity: mode.group_velocity,
            degenerate: r.degenerate,
        };
        pole.v_r = radial_velocity(&pole, charge).unwrap_or(f64::NAN);
        pole.im_k_perp = match im_k_perp(&pole, m) {
            Ok(v) => v,
            Err(err) => {
                log::warn!("{err}");
                f64::NAN
            }
        };
        poles.push(pole);
    }
    Ok(poles)
}

/// Fresnel matrix on the emission plane at `k = (s, 0, k_z)` and its
/// derivative with respect to `s = k⊥`.
fn plane_family(s: f64, k_z: f64, omega: f64, eps: &CMat3) -> (CMat3, CMat3) {
    let k = R3::new(s, 0.0, k_z);
    let m = fresnel_matrix_with(&k, omega, eps);
    let x = R3::x();
    let dm = nalgebra::Matrix3::identity() * (2.0 * s) - (x * k.transpose() + k * x.transpose());
    (m, dm.map(Complex64::from))
}

/// Pole of a given branch, if present.
pub fn pole_on_branch(omega: f64, branch: u8, charge: &ChargeState, m: &MediumModel) -> Result<CherenkovPole> {
    find_poles(omega, charge, m)?
        .into_iter()
        .find(|p| p.branch == branch)
        .ok_or_else(|| Error::NoPole(format!("branch {branch} not excited at omega = {omega}, beta = {}", charge.beta)))
}

/// First-order absorption shift `Im k⊥ = (ω/c)² ⟨e|Im ε|e⟩ / μ`.
pub fn im_k_perp(pole: &CherenkovPole, m: &MediumModel) -> Result<f64> {
    let d = m.decomposition(pole.omega)?;
    let abs_part = d.absorptive();
    let herm = d.lossless();
    if abs_part.max_abs() >= 0.1 * herm.max_abs() {
        return Err(Error::PerturbationInvalid(format!(
            "absorption |Im eps| = {:e} is not small against |Re eps| = {:e} at omega = {}; use complex root finding",
            abs_part.max_abs(),
            herm.max_abs(),
            pole.omega
        )));
    }
    let q2 = (pole.omega / C).powi(2);
    let overlap = braket(&pole.polarization, &(abs_part.tensor() * pole.polarization)).re;
    if overlap == 0.0 {
        return Ok(0.0);
    }
    if !(pole.mu > 0.0) {
        return Err(Error::Degenerate(format!("pole weight mu = {} is not positive", pole.mu)));
    }
    Ok((q2 * overlap / pole.mu).max(0.0))
}

/// Representable frequencies `ω ± h` and their actual offsets.
fn stencil(omega: f64, h: f64) -> (f64, f64, f64, f64) {
    let hi = omega + h;
    let lo = omega - h;
    (lo, hi, omega - lo, hi - omega)
}

/// Curvature `∂²Im k⊥/∂ω²` of a branch at `omega`, no shape checks.
pub fn im_k_curvature(omega: f64, branch: u8, charge: &ChargeState, m: &MediumModel) -> Result<f64> {
    let h = (m.feature_width(omega) / 20.0).max(64.0 * ulp(omega));
    let (lo, hi, h_lo, h_hi) = stencil(omega, h);
    let f0 = pole_on_branch(omega, branch, charge, m)?.im_k_perp;
    let f_lo = pole_on_branch(lo, branch, charge, m)?.im_k_perp;
    let f_hi = pole_on_branch(hi, branch, charge, m)?.im_k_perp;
    if !(f0.is_finite() && f_lo.is_finite() && f_hi.is_finite()) {
        return Err(Error::PerturbationInvalid(format!("Im k_perp unavailable near omega = {omega}")));
    }
    Ok(2.0 * (h_lo * f_hi + h_hi * f_lo - (h_lo + h_hi) * f0) / (h_lo * h_hi * (h_lo + h_hi)))
}

/// Absorption curvature `η` of branch 1 at the transparency center
/// `omega_bar`, by a centred second difference with step `Γ/20`.
pub fn absorption_curvature(omega_bar: f64, charge: &ChargeState, m: &MediumModel) -> Result<f64> {
    let h = (m.feature_width(omega_bar) / 20.0).max(64.0 * ulp(omega_bar));
    let (lo, hi, _, _) = stencil(omega_bar, h);
    let im = |w: f64| pole_on_branch(w, 1, charge, m).map(|p| p.im_k_perp);
    let (f_lo, f0, f_hi) = (im(lo)?, im(omega_bar)?, im(hi)?);
    let slack = 1e-9 * f0.abs().max(f_lo.abs()).max(f_hi.abs());
    if f0 > f_lo + slack || f0 > f_hi + slack {
        return Err(Error::NotTransparencyCenter(format!(
            "Im k_perp at omega_bar = {omega_bar} ({f0:e}) exceeds its neighbours ({f_lo:e}, {f_hi:e})"
        )));
    }
    let eta = im_k_curvature(omega_bar, 1, charge, m)?;
    if eta < 0.0 {
        return Err(Error::NotTransparencyCenter(format!("negative absorption curvature {eta:e}")));
    }
    Ok(eta)
}

/// Radial velocity `v_r = w v_g⊥/(w − v_g∥)`.
pub fn radial_velocity(pole: &CherenkovPole, charge: &ChargeState) -> Result<f64> {
    let gap = charge.w - pole.vg_parallel();
    if gap.abs() < 1e-9 * charge.w {
        return Err(Error::Degenerate(format!("grazing threshold: w - v_g_parallel = {gap:e}")));
    }
    Ok(charge.w * pole.vg_perp() / gap)
}

/// `v_r = 1/(dk⊥/dω)` at `k_z = ω/w`, from pole positions at nearby
/// frequencies. Central differences are extrapolated with Ridders' scheme
/// from a few starting steps; the estimate with the smallest error wins.
pub fn radial_velocity_from_dispersion(pole: &CherenkovPole, charge: &ChargeState, m: &MediumModel) -> Result<f64> {
    let omega = pole.omega;
    let k_at = |w: f64| -> Result<f64> {
        find_poles(w, charge, m)?
            .iter()
            .filter(|p| p.branch == pole.branch)
            .min_by(|a, b| (a.k_perp - pole.k_perp).abs().total_cmp(&(b.k_perp - pole.k_perp).abs()))
            .map(|p| p.k_perp)
            .ok_or_else(|| Error::NoPole(format!("branch {} lost at omega = {w}", pole.branch)))
    };
    let central = |h: f64| -> Result<f64> {
        let (lo, hi) = (omega - h, omega + h);
        Ok((k_at(hi)? - k_at(lo)?) / (hi - lo))
    };
    let width = m.feature_width(omega);
    let mut best: Option<(f64, f64)> = None;
    for scale in [0.5, 4.0, 32.0] {
        let h0 = (scale * width).min(1e-3 * omega).max(1024.0 * ulp(omega));
        match ridders(&central, h0) {
            Ok((d, err)) if best.is_none_or(|(_, e)| err < e) => best = Some((d, err)),
            Ok(_) => {}
            Err(e) if best.is_none() && scale == 32.0 => return Err(e),
            Err(_) => {}
        }
    }
    let (dk, _) = best.ok_or_else(|| Error::Degenerate("no usable finite-difference step".into()))?;
    if dk == 0.0 {
        return Err(Error::Degenerate("dk_perp/domega vanishes".into()));
    }
    Ok(1.0 / dk)
}

fn ridders(f: &dyn Fn(f64) -> Result<f64>, h0: f64) -> Result<(f64, f64)> {
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const NTAB: usize = 10;
    let mut a = [[0.0f64; NTAB]; NTAB];
    let mut h = h0;
    a[0][0] = f(h)?;
    let mut best = (a[0][0], f64::INFINITY);
    for i in 1..NTAB {
        h /= CON;
        a[0][i] = f(h)?;
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let err = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if err <= best.1 {
                best = (a[j][i], err);
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * best.1 {
            break;
        }
    }
    Ok(best)
}

pub fn cone_geometry(pole: &CherenkovPole, charge: &ChargeState, eta: f64) -> Result<ConeGeometry> {
    if !(eta >= 0.0) {
        return Err(Error::InvalidInput(format!("eta must be non-negative, got {eta}")));
    }
    if !(pole.k_perp > 0.0) || !pole.v_r.is_finite() {
        return Err(Error::Degenerate("cone geometry needs a pole with k_perp > 0 and finite v_r".into()));
    }
    Ok(ConeGeometry {
        theta: pole.vg_perp().atan2(charge.w - pole.vg_parallel()),
        phi: (pole.omega / (charge.w * pole.k_perp)).atan(),
        v_r: pole.v_r,
        xi: eta * pole.v_r * pole.v_r,
        vg_perp: pole.vg_perp(),
        vg_parallel: pole.vg_parallel(),
    })
}

/// Group-cone half-aperture from the construction: in time `dt` the charge
/// goes from A to `B = A + w dt ẑ` and the light emitted at A reaches
/// `C = A + v_g dt`; the line BC is a generatrix of the cone. The angle is
/// negative when C lies on the side opposite to k⊥.
pub fn geometric_construction(pole: &CherenkovPole, charge: &ChargeState, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let b = R3::z() * (charge.w * dt);
    let c = pole.group_velocity * dt;
    let bc = c - b;
    if bc.norm() <= 1e-15 * b.norm() {
        return Err(Error::Degenerate("B and C coincide".into()));
    }
    let axis = -R3::z();
    let side = if bc.dot(&pole.k()) - bc.z * pole.k_z < 0.0 { -1.0 } else { 1.0 };
    Ok((side * bc.cross(&axis).norm()).atan2(bc.dot(&axis)))
}

/// Fresnel residual of a pole's polarization on the lossless problem.
pub fn pole_residual(pole: &CherenkovPole, m: &MediumModel) -> Result<f64> {
    modes::fresnel_residual(&pole.as_mode(), m)
}

/// Lowest sorted eigenvalue magnitudes at the pole, exposed for diagnostics.
pub fn pole_spectrum(pole: &CherenkovPole, m: &MediumModel) -> Result<[f64; 3]> {
    let eps = m.lossless(pole.omega)?.tensor();
    Ok(hermitian_eigen(&fresnel_matrix_with(&pole.k(), pole.omega, &eps)).0)
}
