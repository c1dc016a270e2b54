//! Transverse propagating modes of the Fresnel equation
//! `(k² P^k − (ω²/c²) ε(ω)) e = 0`, with `P^k = I − k̂k̂ᵀ`.
//!
//! Root finding is done on the lossless (hermitian) problem. Because the
//! Fresnel matrix is then hermitian, its eigenvalues are real and every
//! propagating mode is a simple zero crossing of one sorted eigenvalue.
//! Working with eigenvalues instead of `det M` keeps degenerate pairs
//! (isotropic media) as two ordinary sign changes instead of a double root.
//!
//! Branches are labelled by the sorted eigenvalue that vanishes: branch 1 is
//! the middle eigenvalue (the outer dispersion surface, larger `k` along any
//! ray, lower Cherenkov threshold) and branch 2 the largest one.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{braket, cnorm, hermitian_eigen, norm, to_complex, CMat3, C3, R3};
use crate::medium::{epsilon_tensor, CircularDecomposition, MediumModel};
use crate::units::C;

/// Samples of the bracket scan.
pub const SCAN_SAMPLES: usize = 1024;

/// Two roots closer than this (relative) are reported as a degenerate pair.
pub const DEGENERATE_K_REL: f64 = 1e-8;

/// Null-space dimension test: singular values within this fraction of the
/// largest one count as zero together.
pub const DEGENERATE_SV_REL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub k: R3,
    pub polarization: C3,
    pub group_velocity: R3,
    /// Stationary-phase weight; `None` when `k` is along ẑ.
    pub mu: Option<f64>,
    pub branch: u8,
    pub degenerate: bool,
}

impl Mode {
    pub fn k_perp(&self) -> f64 {
        self.k.x.hypot(self.k.y)
    }

    pub fn k_norm(&self) -> f64 {
        self.k.norm()
    }
}

/// `P^k_{ij} = δ_ij − k_i k_j / k²`.
pub fn projector(k: &R3) -> Matrix3<f64> {
    let k2 = k.norm_squared();
    Matrix3::identity() - k * k.transpose() / k2
}

/// `k² P^k − (ω/c)² ε`, with an explicit tensor.
pub fn fresnel_matrix_with(k: &R3, omega: f64, eps: &CMat3) -> CMat3 {
    let k2 = k.norm_squared();
    let kinetic = Matrix3::identity() * k2 - k * k.transpose();
    let q2 = (omega / C).powi(2);
    kinetic.map(Complex64::from) - eps * Complex64::from(q2)
}

pub fn fresnel_matrix(k: &R3, omega: f64, m: &MediumModel) -> Result<CMat3> {
    if k.norm_squared() == 0.0 {
        return Err(Error::InvalidInput("wavevector must be non-zero".into()));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidInput(format!("omega must be positive, got {omega}")));
    }
    Ok(fresnel_matrix_with(k, omega, &epsilon_tensor(omega, m)?))
}

/// A root of one sorted eigenvalue of a one-parameter hermitian family.
#[derive(Debug, Clone)]
pub(crate) struct Root {
    pub s: f64,
    /// Sorted eigenvalue index that vanishes (1 or 2).
    pub index: usize,
    pub vector: C3,
    pub degenerate: bool,
}

/// Finds the zero crossings of eigenvalues 1 and 2 of `family(s)` for
/// `s ∈ (0, s_max]`.
///
/// `family` returns the matrix and its derivative with respect to `s`. The
/// scan brackets sign changes on `SCAN_SAMPLES` points, bisection narrows the
/// bracket and a safeguarded Newton step (Hellmann–Feynman derivative
/// `⟨v|∂M/∂s|v⟩`) polishes the root to relative `1e-12` or better.
/// `reference` fixes the basis inside a degenerate null space: the first
/// vector of the pair is the normalised projection of `reference`.
pub(crate) fn scan_roots<F>(family: F, s_max: f64, reference: &C3) -> Vec<Root>
where
    F: Fn(f64) -> (CMat3, CMat3),
{
    let n = SCAN_SAMPLES;
    let grid: Vec<f64> = (1..=n).map(|i| s_max * i as f64 / n as f64).collect();
    let vals: Vec<[f64; 3]> = grid.iter().map(|&s| hermitian_eigen(&family(s).0).0).collect();

    let mut roots = Vec::new();
    for index in 1..=2 {
        for i in 0..n - 1 {
            let (a, b) = (vals[i][index], vals[i + 1][index]);
            if a == 0.0 || a.signum() != b.signum() {
                if b == 0.0 && i + 1 < n - 1 {
                    // picked up by the next interval
                    continue;
                }
                let s = refine(&family, index, grid[i], grid[i + 1], a);
                let (m, _) = family(s);
                let (ev, vecs) = hermitian_eigen(&m);
                roots.push(Root { s, index, vector: vecs[index], degenerate: is_degenerate(&ev, index) });
            }
        }
    }
    roots.sort_by(|a, b| a.s.total_cmp(&b.s));
    resolve_degenerate_pairs(&family, &mut roots, reference);
    roots
}

fn refine<F>(family: &F, index: usize, mut lo: f64, mut hi: f64, f_lo: f64) -> f64
where
    F: Fn(f64) -> (CMat3, CMat3),
{
    let eval = |s: f64| hermitian_eigen(&family(s).0).0[index];
    let sign_lo = f_lo.signum();
    if f_lo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-8 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f = eval(mid);
        if f == 0.0 {
            return mid;
        }
        if f.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..50 {
        let (m, dm) = family(s);
        let (ev, vecs) = hermitian_eigen(&m);
        let f = ev[index];
        if f == 0.0 {
            return s;
        }
        if f.signum() == sign_lo {
            lo = s;
        } else {
            hi = s;
        }
        let slope = braket(&vecs[index], &(dm * vecs[index])).re;
        let mut next = s - f / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - s).abs();
        s = next;
        if step <= 1e-14 * s || hi - lo <= 4.0 * f64::EPSILON * s {
            break;
        }
    }
    s
}

fn is_degenerate(ev: &[f64; 3], index: usize) -> bool {
    let scale = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ev.iter()
        .enumerate()
        .filter(|&(j, _)| j != index)
        .any(|(_, v)| v.abs() <= DEGENERATE_SV_REL * scale)
}

fn resolve_degenerate_pairs<F>(family: &F, roots: &mut [Root], reference: &C3)
where
    F: Fn(f64) -> (CMat3, CMat3),
{
    let mut i = 0;
    while i + 1 < roots.len() {
        let (s1, s2) = (roots[i].s, roots[i + 1].s);
        if (s2 - s1).abs() < DEGENERATE_K_REL * s1 && roots[i].index != roots[i + 1].index {
            let (m, _) = family(0.5 * (s1 + s2));
            let (ev, vecs) = hermitian_eigen(&m);
            // two smallest |λ| span the null space
            let mut order = [0usize, 1, 2];
            order.sort_by(|&a, &b| ev[a].abs().total_cmp(&ev[b].abs()));
            let (v1, v2) = (vecs[order[0]], vecs[order[1]]);
            let proj = v1 * braket(&v1, reference) + v2 * braket(&v2, reference);
            let first = if cnorm(&proj) > 1e-8 {
                proj / Complex64::from(cnorm(&proj))
            } else {
                v1
            };
            let cand = if braket(&first, &v1).norm() < braket(&first, &v2).norm() { v1 } else { v2 };
            let second = cand - first * braket(&first, &cand);
            let second = second / Complex64::from(cnorm(&second));
            let (a, b) = if roots[i].index < roots[i + 1].index { (i, i + 1) } else { (i + 1, i) };
            roots[a].vector = first;
            roots[b].vector = second;
            roots[a].degenerate = true;
            roots[b].degenerate = true;
            i += 2;
        } else {
            i += 1;
        }
    }
}

/// Fixes the global phase: the largest component is real and positive.
pub(crate) fn fix_gauge(e: &C3) -> C3 {
    let big = e.iter().copied().fold(Complex64::new(0.0, 0.0), |m, z| if z.norm() > m.norm() { z } else { m });
    let phase = big.conj() / big.norm();
    e * phase / Complex64::from(cnorm(e))
}

/// Propagating transverse modes along `k_hat` at frequency `omega`,
/// sorted by ascending `|k|`.
pub fn modes_at(omega: f64, k_hat: &R3, m: &MediumModel) -> Result<Vec<Mode>> {
    let (lo, hi) = m.window();
    if omega < lo || omega > hi {
        return Err(Error::OutOfWindow { omega, lo, hi });
    }
    let norm_k = k_hat.norm();
    if !(norm_k > 0.0) {
        return Err(Error::InvalidInput("k_hat must be non-zero".into()));
    }
    let u = k_hat / norm_k;
    let eps_h = m.lossless(omega)?;
    let max_eps = eps_h.max_real();
    if !(max_eps > 0.0) {
        return Ok(Vec::new());
    }
    let eps = eps_h.tensor();
    let q = omega / C;
    let transverse = projector(&u).map(Complex64::from);
    let family = |s: f64| {
        let m = transverse * Complex64::from(s * s) - eps * Complex64::from(q * q);
        (m, transverse * Complex64::from(2.0 * s))
    };
    let reference = reference_direction(&u);
    let roots = scan_roots(family, 1.5 * q * max_eps.sqrt(), &reference);
    let mut modes = Vec::with_capacity(roots.len());
    for r in roots {
        let k = u * r.s;
        let mut mode = Mode {
            omega,
            k,
            polarization: fix_gauge(&r.vector),
            group_velocity: R3::zeros(),
            mu: None,
            branch: r.index as u8,
            degenerate: r.degenerate,
        };
        mode.group_velocity = group_velocity(&mode, m)?;
        mode.mu = weight_mu(&mode).ok();
        modes.push(mode);
    }
    Ok(modes)
}

// ẑ when it has a component transverse to k, x̂ otherwise.
fn reference_direction(u: &R3) -> C3 {
    if u.z.abs() < 1.0 - 1e-12 {
        to_complex(&R3::z())
    } else {
        to_complex(&R3::x())
    }
}

/// `∂_ω(ω² ε_h(ω))` by a centred three-point difference on representable
/// frequencies.
pub fn d_omega_w2_eps(omega: f64, m: &MediumModel) -> Result<CMat3> {
    let h = m.derivative_step(omega);
    let (lo, hi) = m.window();
    let w_hi = (omega + h).min(hi);
    let w_lo = (omega - h).max(lo);
    let (h_hi, h_lo) = (w_hi - omega, omega - w_lo);
    // Differentiate the circular components, not ω²ε in Cartesian form:
    // the 2ωε term would swamp the difference, and for nearly circular
    // modes ⟨e|∂ε|e⟩ cancels between xx and xy entries.
    let comps = |w: f64| -> Result<[f64; 3]> {
        let d = m.lossless(w)?;
        Ok([d.eps_z.re, d.eps_plus.re, d.eps_minus.re])
    };
    let (f_hi, f_0, f_lo) = (comps(w_hi)?, comps(omega)?, comps(w_lo)?);
    let deriv = |j: usize| -> f64 {
        if h_lo == 0.0 {
            (f_hi[j] - f_0[j]) / h_hi
        } else if h_hi == 0.0 {
            (f_0[j] - f_lo[j]) / h_lo
        } else {
            (f_hi[j] * h_lo * h_lo - f_lo[j] * h_hi * h_hi + f_0[j] * (h_hi * h_hi - h_lo * h_lo))
                / (h_lo * h_hi * (h_lo + h_hi))
        }
    };
    let w2 = omega * omega;
    let part = |j: usize| Complex64::from(2.0 * omega * f_0[j] + w2 * deriv(j));
    Ok(CircularDecomposition::new(part(0), part(1), part(2)).tensor())
}

/// Group velocity
/// `c² (2k − e⟨e|k⟩ − e*⟨k|e⟩) / ⟨e|∂_ω(ω²ε)|e⟩`.
pub fn group_velocity(mode: &Mode, m: &MediumModel) -> Result<R3> {
    let e = &mode.polarization;
    let kc = to_complex(&mode.k);
    let overlap = braket(e, &kc);
    let numerator = mode.k * 2.0 - (e * overlap).map(|z| 2.0 * z.re);
    let denom = braket(e, &(d_omega_w2_eps(mode.omega, m)? * e)).re;
    if denom.abs() < 1e-30 {
        return Err(Error::Degenerate(format!(
            "group velocity denominator {denom:e} vanishes (stationary point of the dispersion surface)"
        )));
    }
    Ok(numerator * (C * C / denom))
}

/// `μ = ⟨e|∂_{k⊥}(k² P^k)|e⟩` at fixed `k_z` and azimuth,
/// `= 2k⊥ − 2 Re[⟨e|û⊥⟩ (k·e)]`.
pub fn weight_mu(mode: &Mode) -> Result<f64> {
    let k_perp = mode.k_perp();
    if !(k_perp > 1e-12 * mode.k_norm()) {
        return Err(Error::Degenerate("k_perp = 0: on-axis wavevector has no stationary-phase weight".into()));
    }
    let u = to_complex(&R3::new(mode.k.x / k_perp, mode.k.y / k_perp, 0.0));
    let e = &mode.polarization;
    let k_dot_e: Complex64 = mode.k.iter().zip(e.iter()).map(|(k, z)| z * *k).sum();
    Ok(2.0 * k_perp - 2.0 * (braket(e, &u) * k_dot_e).re)
}

/// `‖M e‖ / ‖M‖` for the lossless Fresnel matrix of a mode.
pub fn fresnel_residual(mode: &Mode, m: &MediumModel) -> Result<f64> {
    let eps = m.lossless(mode.omega)?.tensor();
    let mat = fresnel_matrix_with(&mode.k, mode.omega, &eps);
    Ok(cnorm(&(mat * mode.polarization)) / norm(&mat))
}
