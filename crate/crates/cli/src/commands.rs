//! Subcommand bodies. Each returns its tables; the caller writes them.

use cherenkov_core::field::{intensity_map, GridSpec, MapSource};
use cherenkov_core::kinematics::{cone_geometry, find_poles, im_k_curvature, threshold_beta, ChargeState, CherenkovPole};
use cherenkov_core::linalg::R3;
use cherenkov_core::modes::modes_at;
use cherenkov_core::{Error, Result, Scenario};
use rayon::prelude::*;

use crate::output::{num, Table};
use crate::{ConeArgs, EpsilonArgs, FieldArgs, MapArgs, Method, ModesArgs, PolesArgs, SweepArgs};

pub struct Run {
    pub tables: Vec<Table>,
    /// Set when the tables were written but the run found nothing usable,
    /// e.g. no pole at all. Maps onto the numerical-failure exit code.
    pub failure: Option<Error>,
}

impl Run {
    fn ok(table: Table) -> Self {
        Self { tables: vec![table], failure: None }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!("need at least one finite sample (got {n} over [{lo}, {hi}])")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect())
}

fn centred(center: f64, span: f64, n: usize) -> Result<Vec<f64>> {
    if !(span >= 0.0) {
        return Err(Error::InvalidInput(format!("span must be non-negative, got {span}")));
    }
    if n == 1 {
        return Ok(vec![center]);
    }
    linspace(center - 0.5 * span, center + 0.5 * span, n)
}

pub fn epsilon(s: &Scenario, a: &EpsilonArgs) -> Result<Run> {
    let (lo, hi) = match (a.omega_min, a.omega_max) {
        (Some(lo), Some(hi)) => (lo, hi),
        (None, None) => s.window(),
        _ => return Err(Error::InvalidInput("give both --omega-min and --omega-max or neither".into())),
    };
    let omegas = linspace(lo, hi, a.samples)?;
    let rows = omegas
        .par_iter()
        .map(|&w| {
            let d = s.medium.decomposition(w)?;
            Ok(vec![
                num(w),
                num(d.eps_z.re),
                num(d.eps_z.im),
                num(d.eps_plus.re),
                num(d.eps_plus.im),
                num(d.eps_minus.re),
                num(d.eps_minus.im),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(
        "epsilon",
        &["omega", "eps_z_re", "eps_z_im", "eps_plus_re", "eps_plus_im", "eps_minus_re", "eps_minus_im"],
    );
    rows.into_iter().for_each(|r| t.push(r));
    Ok(Run::ok(t))
}

pub fn modes(s: &Scenario, a: &ModesArgs) -> Result<Run> {
    let omegas = centred(a.omega_center.unwrap_or(s.omega_bar), a.omega_span, a.samples)?;
    let theta_max = a.theta_max.unwrap_or(a.theta_min);
    let thetas = linspace(a.theta_min, theta_max, a.theta_samples)?;
    let points: Vec<(f64, f64)> = omegas.iter().flat_map(|&w| thetas.iter().map(move |&th| (w, th))).collect();
    let blocks = points
        .par_iter()
        .map(|&(w, th)| {
            let k_hat = R3::new(th.sin(), 0.0, th.cos());
            let rows: Vec<Vec<String>> = modes_at(w, &k_hat, &s.medium)?
                .iter()
                .map(|m| {
                    let mut row = vec![num(w), num(th), m.branch.to_string(), num(m.k_norm())];
                    for c in m.polarization.iter() {
                        row.push(num(c.re));
                        row.push(num(c.im));
                    }
                    row.extend(m.group_velocity.iter().map(|&v| num(v)));
                    row.push(num(m.mu.unwrap_or(f64::NAN)));
                    row
                })
                .collect();
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(
        "modes",
        &[
            "omega", "khat_theta", "branch", "k", "ex_re", "ex_im", "ey_re", "ey_im", "ez_re", "ez_im", "vgx", "vgy",
            "vgz", "mu",
        ],
    );
    blocks.into_iter().flatten().for_each(|r| t.push(r));
    Ok(Run::ok(t))
}

fn pole_row(p: &CherenkovPole, charge: &ChargeState, s: &Scenario) -> Vec<String> {
    // local curvature of Im k⊥; only at a transparency centre is it the η of the profile
    let eta = im_k_curvature(p.omega, p.branch, charge, &s.medium).unwrap_or(f64::NAN);
    let (theta, phi) = cone_geometry(p, charge, 0.0).map_or((f64::NAN, f64::NAN), |c| (c.theta, c.phi));
    vec![
        num(p.omega),
        p.branch.to_string(),
        num(p.k_perp),
        num(p.im_k_perp),
        num(p.coupling),
        num(p.v_r),
        num(theta),
        num(phi),
        num(eta),
        num(eta * p.v_r * p.v_r),
    ]
}

pub fn poles(s: &Scenario, a: &PolesArgs) -> Result<Run> {
    let charge = match a.beta {
        Some(b) => ChargeState::new(b)?,
        None => s.charge,
    };
    let omegas = centred(a.omega_center.unwrap_or(s.omega_bar), a.omega_span, a.samples)?;
    let blocks = omegas
        .par_iter()
        .map(|&w| Ok(find_poles(w, &charge, &s.medium)?.iter().map(|p| pole_row(p, &charge, s)).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(
        "poles",
        &["omega", "branch", "k_perp", "im_k_perp", "coupling", "vr", "theta_rad", "phi_rad", "eta", "xi"],
    );
    blocks.into_iter().flatten().for_each(|r| t.push(r));
    let failure = t.rows.is_empty().then(|| Error::NoPole(format!("no pole at beta = {} on the sampled frequencies", charge.beta)));
    Ok(Run { tables: vec![t], failure })
}

const CONE_COLUMNS: [&str; 11] =
    ["status", "branch", "beta_min", "k_perp", "vr", "vg_perp", "vg_parallel", "theta_rad", "phi_rad", "eta", "xi"];

fn cone_table(name: &'static str, param: &str) -> Table {
    let mut header = vec!["point", param];
    header.extend(CONE_COLUMNS);
    Table::new(name, &header)
}

/// Cone rows of one scenario: one per pole, or a single status row.
fn cone_rows(s: &Scenario, point: usize, value: f64) -> Vec<Vec<String>> {
    let lead = |status: &str, branch: String, beta_min: f64| {
        vec![point.to_string(), num(value), status.to_string(), branch, num(beta_min)]
    };
    let blank = |mut row: Vec<String>| {
        row.resize(2 + CONE_COLUMNS.len(), num(f64::NAN));
        row
    };
    let beta_min_1 = threshold_beta(s.omega_bar, 1, &s.medium).unwrap_or(f64::NAN);
    let poles = match find_poles(s.omega_bar, &s.charge, &s.medium) {
        Ok(p) if p.is_empty() => return vec![blank(lead("no-pole", String::new(), beta_min_1))],
        Ok(p) => p,
        Err(e) => return vec![blank(lead(e.kind(), String::new(), beta_min_1))],
    };
    poles
        .iter()
        .map(|p| {
            let beta_min = threshold_beta(s.omega_bar, p.branch, &s.medium).unwrap_or(f64::NAN);
            let geometry = im_k_curvature(s.omega_bar, p.branch, &s.charge, &s.medium)
                .and_then(|eta| cone_geometry(p, &s.charge, 0.0).map(|c| (eta, c)));
            match geometry {
                Ok((eta, c)) => {
                    let xi = eta * c.v_r * c.v_r;
                    let mut row = lead("ok", p.branch.to_string(), beta_min);
                    row.extend(
                        [p.k_perp, c.v_r, c.vg_perp, c.vg_parallel, c.theta, c.phi, eta, xi].iter().map(|&x| num(x)),
                    );
                    row
                }
                Err(e) => blank(lead(e.kind(), p.branch.to_string(), beta_min)),
            }
        })
        .collect()
}

pub fn cone(s: &Scenario, a: &ConeArgs) -> Result<Run> {
    let value = s.parameter(&a.param)?;
    let mut t = cone_table("cone", &a.param);
    cone_rows(s, 0, value).into_iter().for_each(|r| t.push(r));
    let failure = if t.rows.iter().any(|r| r[2] == "ok") {
        None
    } else {
        Some(Error::NoPole(format!("no usable pole at omega_bar = {} and beta = {}", s.omega_bar, s.charge.beta)))
    };
    Ok(Run { tables: vec![t], failure })
}

pub fn sweep(s: &Scenario, a: &SweepArgs) -> Result<Run> {
    s.parameter(&a.param)?;
    let values = linspace(a.from, a.to.unwrap_or(a.from), a.points)?;
    let blocks: Vec<Vec<Vec<String>>> = values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| match s.with_parameter(&a.param, v) {
            Ok(point) => cone_rows(&point, i, v),
            Err(e) => {
                let mut row = vec![i.to_string(), num(v), e.kind().to_string(), String::new()];
                row.resize(2 + CONE_COLUMNS.len(), num(f64::NAN));
                vec![row]
            }
        })
        .collect();
    let mut t = cone_table("sweep", &a.param);
    blocks.into_iter().flatten().for_each(|r| t.push(r));
    Ok(Run::ok(t))
}

pub fn map(s: &Scenario, a: &MapArgs) -> Result<Run> {
    let grid = GridSpec { x_perp: (a.xperp_range[0], a.xperp_range[1]), nx: a.nx, z: (a.z_range[0], a.z_range[1]), nz: a.nz };
    grid.validate()?;
    let hash = s.hash();
    let result = match a.method {
        Method::Gaussian => {
            if a.both_branches {
                return Err(Error::InvalidInput("--both-branches needs --method integral".into()));
            }
            intensity_map(&grid, a.t, &MapSource::Gaussian(&s.profile_params()?), &hash)?
        }
        Method::Integral => intensity_map(&grid, a.t, &MapSource::Integral(&s.field_solver(a.both_branches)?), &hash)?,
    };
    let mut t = Table::new("map", &["x_perp", "z", "intensity", "masked"]);
    let (xs, zs) = (grid.xs(), grid.zs());
    for (ix, &x) in xs.iter().enumerate() {
        for (iz, &z) in zs.iter().enumerate() {
            let masked = result.mask[ix * grid.nz + iz];
            t.push(vec![num(x), num(z), num(result.get(ix, iz)), u8::from(masked).to_string()]);
        }
    }
    Ok(Run::ok(t))
}

pub fn field(s: &Scenario, a: &FieldArgs) -> Result<Run> {
    let solver = s.field_solver(a.both_branches)?;
    let mut row = vec![num(a.x_perp), num(a.z), num(a.t)];
    if solver.is_valid(a.x_perp) {
        let e = solver.field(a.x_perp, a.z, a.t)?;
        for c in e.iter() {
            row.push(num(c.re));
            row.push(num(c.im));
        }
        row.push(num(e.iter().map(|c| c.norm_sqr()).sum()));
        row.push("0".into());
    } else {
        row.extend(std::iter::repeat_n(num(f64::NAN), 7));
        row.push("1".into());
    }
    let mut t = Table::new(
        "field",
        &["x_perp", "z", "t", "ex_re", "ex_im", "ey_re", "ey_im", "ez_re", "ez_im", "intensity", "masked"],
    );
    t.push(row);
    Ok(Run::ok(t))
}
