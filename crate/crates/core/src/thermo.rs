//! Windowed averages of lattice states in hyperbolic scaling.
//!
//! A snapshot at time `t` on sites `j` maps to the macroscopic point
//! `(τ, ξ) = (εt, εj)`. Each output cell averages the atomic observables
//! over a flat window of `2w + 1` sites.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainState, Forcing, Potential};
use crate::error::{Error, Result};
use crate::integrator::Trajectory;

/// Column order of the CSV representation.
pub const CSV_HEADER: &str = "tau,xi,R,V,P,E,F,U,Q,E_osc,E_non,Xi";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub epsilon: f64,
    /// Window halfwidth `w` in particles.
    pub halfwidth: usize,
    /// Distance between cell centres in particles, so `h_ξ = stride·ε`.
    pub stride: usize,
}

impl ScalingConfig {
    /// `ε = 1/N`, `w = max(10, round(√N))`, cells every `w/4` sites.
    pub fn for_particles(n: usize) -> Self {
        let w = ((n as f64).sqrt().round() as usize).max(10);
        ScalingConfig {
            epsilon: 1.0 / n as f64,
            halfwidth: w,
            stride: (w / 4).max(1),
        }
    }

    pub fn h_xi(&self) -> f64 {
        self.stride as f64 * self.epsilon
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.halfwidth < 10 {
            return Err(Error::Config(format!(
                "window halfwidth must be at least 10, got {}",
                self.halfwidth
            )));
        }
        if self.stride == 0 {
            return Err(Error::Config("cell stride must be positive".into()));
        }
        if self.halfwidth as f64 * self.epsilon > 0.25 {
            return Err(Error::Config(format!(
                "window of {} sites is not small on the macroscopic scale ε = {}",
                self.halfwidth, self.epsilon
            )));
        }
        Ok(())
    }
}

/// Field values of one cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellFields {
    pub xi: f64,
    pub r: f64,
    pub v: f64,
    pub p: f64,
    pub e: f64,
    pub f: f64,
    pub u: f64,
    pub q: f64,
    pub e_osc: f64,
    pub e_non: f64,
    /// Ξ, the transfer rate from non-oscillatory to oscillatory energy.
    pub production: f64,
    /// The averaging window was clipped by the end of the lattice.
    #[serde(default)]
    pub truncated: bool,
}

impl CellFields {
    /// Builds a cell from the five primary means and derives the rest.
    pub fn from_means(xi: f64, r: f64, v: f64, p: f64, e: f64, f: f64, pot: &Potential) -> Self {
        let e_non = 0.5 * v * v + pot.value(r);
        CellFields {
            xi,
            r,
            v,
            p,
            e,
            f,
            u: e - 0.5 * v * v,
            q: f - v * p,
            e_osc: e - e_non,
            e_non,
            production: 0.0,
            truncated: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSlice {
    pub tau: f64,
    pub cells: Vec<CellFields>,
}

impl FieldSlice {
    /// Mean of `f` over cells with `lo ≤ ξ ≤ hi`.
    pub fn mean_in(&self, lo: f64, hi: f64, f: impl Fn(&CellFields) -> f64) -> Option<f64> {
        let (sum, n) = self
            .cells
            .iter()
            .filter(|c| c.xi >= lo && c.xi <= hi)
            .fold((0.0, 0usize), |(s, n), c| (s + f(c), n + 1));
        (n > 0).then(|| sum / n as f64)
    }

    pub fn xi_range(&self) -> (f64, f64) {
        (self.cells[0].xi, self.cells[self.cells.len() - 1].xi)
    }
}

/// Fields on a grid of cells `ξ_m` for a sequence of times `τ_n`.
///
/// All slices share the same cell positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoFields {
    pub epsilon: f64,
    pub slices: Vec<FieldSlice>,
}

impl ThermoFields {
    pub fn last(&self) -> &FieldSlice {
        &self.slices[self.slices.len() - 1]
    }

    pub fn h_xi(&self) -> f64 {
        let c = &self.slices[0].cells;
        if c.len() < 2 {
            0.0
        } else {
            c[1].xi - c[0].xi
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for s in &self.slices {
            for c in &s.cells {
                let row = [
                    s.tau,
                    c.xi,
                    c.r,
                    c.v,
                    c.p,
                    c.e,
                    c.f,
                    c.u,
                    c.q,
                    c.e_osc,
                    c.e_non,
                    c.production,
                ];
                let text: Vec<String> = row.iter().map(|&x| round_sig(x).to_string()).collect();
                writeln!(out, "{}", text.join(","))?;
            }
        }
        Ok(())
    }

    /// Reads the CSV written by [`ThermoFields::write_csv`]. Truncation
    /// flags are not stored and come back as `false`.
    pub fn read_csv<R: BufRead>(input: R, epsilon: f64) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != CSV_HEADER {
            return Err(Error::Config(format!("unexpected CSV header `{header}`")));
        }
        let mut slices: Vec<FieldSlice> = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("CSV line {}: {e}", k + 2)))?;
            if vals.len() != 12 {
                return Err(Error::Config(format!(
                    "CSV line {} has {} columns, expected 12",
                    k + 2,
                    vals.len()
                )));
            }
            let cell = CellFields {
                xi: vals[1],
                r: vals[2],
                v: vals[3],
                p: vals[4],
                e: vals[5],
                f: vals[6],
                u: vals[7],
                q: vals[8],
                e_osc: vals[9],
                e_non: vals[10],
                production: vals[11],
                truncated: false,
            };
            match slices.last_mut() {
                Some(s) if s.tau == vals[0] => s.cells.push(cell),
                _ => slices.push(FieldSlice {
                    tau: vals[0],
                    cells: vec![cell],
                }),
            }
        }
        if slices.is_empty() {
            return Err(Error::Config("CSV contains no cells".into()));
        }
        Ok(ThermoFields { epsilon, slices })
    }
}

/// Rounds to 9 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// Averages one snapshot. Cells sit at multiples of `cfg.stride`.
pub fn window_average(
    snapshot: &ChainState,
    p: &Potential,
    cfg: &ScalingConfig,
) -> Result<ThermoFields> {
    Ok(ThermoFields {
        epsilon: cfg.epsilon,
        slices: vec![average_slice(snapshot, p, cfg)?],
    })
}

/// Averages every snapshot of a trajectory.
pub fn average_trajectory(traj: &Trajectory, cfg: &ScalingConfig) -> Result<ThermoFields> {
    let p = traj.info.potential;
    let slices = traj
        .snapshots
        .par_iter()
        .map(|s| average_slice(s, &p, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThermoFields {
        epsilon: cfg.epsilon,
        slices,
    })
}

pub(crate) fn average_slice(
    s: &ChainState,
    p: &Potential,
    cfg: &ScalingConfig,
) -> Result<FieldSlice> {
    cfg.validate()?;
    let (j_min, j_max) = (s.j_min(), s.j_max());
    let stride = cfg.stride as i64;
    let w = cfg.halfwidth as i64;
    if j_max - j_min < 2 * w + 1 {
        return Err(Error::InvalidState(format!(
            "lattice of {} sites is shorter than one window of {} sites",
            s.num_sites(),
            2 * w + 1
        )));
    }
    let first = j_min.div_euclid(stride) + i64::from(j_min.rem_euclid(stride) != 0);
    let last = j_max.div_euclid(stride);
    let (r, v) = (s.strains(), s.velocities());
    let cells = (first..=last)
        .into_par_iter()
        .map(|m| {
            let jc = m * stride;
            // velocities live on [j_min, j_max], strains and the mixed
            // observable on [j_min, j_max − 1]
            let v_lo = (jc - w).max(j_min);
            let v_hi = (jc + w).min(j_max);
            let r_lo = (jc - w).max(j_min);
            let r_hi = (jc + w).min(j_max - 1);
            let truncated = jc - w < j_min || jc + w > j_max - 1;
            let (mut sv, mut skin) = (0.0, 0.0);
            for j in v_lo..=v_hi {
                let x = v[(j - j_min) as usize];
                sv += x;
                skin += 0.5 * x * x;
            }
            let (mut sr, mut sforce, mut spot, mut sflux) = (0.0, 0.0, 0.0, 0.0);
            for j in r_lo..=r_hi {
                let k = (j - j_min) as usize;
                let f = p.force(r[k]);
                sr += r[k];
                sforce += f;
                spot += p.value(r[k]);
                // bond j exchanges energy with site j + 1, pairing it with
                // v_j instead leaves a d/dt Φ(r_j) term in the balance
                sflux += v[k + 1] * f;
            }
            let nv = (v_hi - v_lo + 1) as f64;
            let nr = (r_hi - r_lo + 1) as f64;
            let mut cell = CellFields::from_means(
                cfg.epsilon * jc as f64,
                sr / nr,
                sv / nv,
                -sforce / nr,
                skin / nv + spot / nr,
                -sflux / nr,
                p,
            );
            cell.truncated = truncated;
            cell
        })
        .collect();
    Ok(FieldSlice {
        tau: cfg.epsilon * s.t,
        cells,
    })
}

/// Fills `Ξ = −(P + Φ'(R))·∂_ξV` in every slice.
pub fn production_xi(fields: &mut ThermoFields, p: &Potential) {
    for s in &mut fields.slices {
        let n = s.cells.len();
        if n < 2 {
            s.cells.iter_mut().for_each(|c| c.production = 0.0);
            continue;
        }
        let dv: Vec<f64> = (0..n)
            .map(|m| {
                let (a, b) = (m.saturating_sub(1), (m + 1).min(n - 1));
                (s.cells[b].v - s.cells[a].v) / (s.cells[b].xi - s.cells[a].xi)
            })
            .collect();
        for (c, d) in s.cells.iter_mut().zip(dv) {
            c.production = -(c.p + p.force(c.r)) * d;
        }
    }
}

/// Energy production of the forcing, `θ(τ) = (ε/2δ)∫ v₀ζ dt` over
/// `t ∈ [(τ−δ)/ε, (τ+δ)/ε]`.
///
/// Uses the per-step velocity record of the forced atom when available and
/// the snapshots otherwise. The integral is normalised by the length of the
/// sampled sub-interval.
pub fn production_theta(
    traj: &Trajectory,
    f: &Forcing,
    cfg: &ScalingConfig,
    tau: f64,
    delta: f64,
) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let (t_a, t_b) = ((tau - delta) / cfg.epsilon, (tau + delta) / cfg.epsilon);
    let t0 = traj.start_time();
    let (dt, samples): (f64, Vec<f64>) = if traj.forced_velocity.is_empty() {
        let site = f.site();
        let vs = traj
            .snapshots
            .iter()
            .map(|s| {
                s.v_at(site)
                    .ok_or_else(|| Error::InvalidState("forced site outside lattice".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        (traj.snapshot_spacing(), vs)
    } else {
        (traj.info.dt, traj.forced_velocity.clone())
    };
    let t_last = t0 + (samples.len() - 1) as f64 * dt;
    let slack = 1e-6 * dt;
    if t_a < t0 - slack || t_b > t_last + slack {
        return Err(Error::Range {
            start: t_a,
            end: t_b,
            lo: t0,
            hi: t_last,
        });
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    let n_a = ((t_a - t0) / dt - 1e-6).ceil().max(0.0) as usize;
    let n_b = (((t_b - t0) / dt + 1e-6).floor() as usize).min(samples.len() - 1);
    if n_b <= n_a {
        return Err(Error::InvalidParameter(
            "averaging interval shorter than one sample".into(),
        ));
    }
    let g = |n: usize| samples[n] * f.value(t0 + n as f64 * dt);
    let mut integral = 0.5 * (g(n_a) + g(n_b));
    for n in n_a + 1..n_b {
        integral += g(n);
    }
    Ok(integral / (n_b - n_a) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Mass,
    Momentum,
    Energy,
}

impl Law {
    /// `(density, flux)` with `∂_τ density + ∂_ξ flux = 0`.
    pub fn density_flux(self, c: &CellFields) -> (f64, f64) {
        match self {
            Law::Mass => (c.r, -c.v),
            Law::Momentum => (c.v, c.p),
            Law::Energy => (c.e, c.f),
        }
    }
}

/// `b(s) = (1 − s²)³` on `|s| < 1`, twice continuously differentiable.
fn bump(s: f64) -> (f64, f64) {
    if s.abs() >= 1.0 {
        (0.0, 0.0)
    } else {
        let q = 1.0 - s * s;
        (q * q * q, -6.0 * s * q * q)
    }
}

/// Product bump `φ(τ, ξ) = b((τ−τ_c)/a)·b((ξ−ξ_c)/b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub tau_center: f64,
    pub tau_halfwidth: f64,
    pub xi_center: f64,
    pub xi_halfwidth: f64,
}

impl TestFunction {
    /// `(φ, ∂_τφ, ∂_ξφ)`.
    pub fn eval(&self, tau: f64, xi: f64) -> (f64, f64, f64) {
        let (bt, dbt) = bump((tau - self.tau_center) / self.tau_halfwidth);
        let (bx, dbx) = bump((xi - self.xi_center) / self.xi_halfwidth);
        (
            bt * bx,
            dbt * bx / self.tau_halfwidth,
            bt * dbx / self.xi_halfwidth,
        )
    }
}

/// Weak-form residual `∫∫ (ρ∂_τφ + J∂_ξφ) dτ dξ` with its scale
/// `∫∫ (|ρ∂_τφ| + |J∂_ξφ|) dτ dξ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakResidual {
    pub value: f64,
    pub scale: f64,
}

impl WeakResidual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.abs() / self.scale
        } else {
            self.value.abs()
        }
    }
}

/// Trapezoid quadrature of the weak form on the field grid.
///
/// With `forced` set, the energy law is only tested away from `ξ = 0`, where
/// the forcing injects energy.
pub fn conservation_residual(
    fields: &ThermoFields,
    law: Law,
    test: &TestFunction,
    forced: bool,
) -> Result<WeakResidual> {
    if fields.slices.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two time slices".into(),
        ));
    }
    let (xi_lo, xi_hi) = fields.slices[0].xi_range();
    let (tau_lo, tau_hi) = (fields.slices[0].tau, fields.last().tau);
    let (t0, t1) = (
        test.tau_center - test.tau_halfwidth,
        test.tau_center + test.tau_halfwidth,
    );
    let (x0, x1) = (
        test.xi_center - test.xi_halfwidth,
        test.xi_center + test.xi_halfwidth,
    );
    if t0 < tau_lo || t1 > tau_hi || x0 < xi_lo || x1 > xi_hi {
        return Err(Error::Range {
            start: x0.min(t0),
            end: x1.max(t1),
            lo: xi_lo.min(tau_lo),
            hi: xi_hi.max(tau_hi),
        });
    }
    if forced && law == Law::Energy && x0 < 0.0 && x1 > 0.0 {
        return Err(Error::InvalidParameter(
            "energy test function must be supported away from the forced site".into(),
        ));
    }
    let trapezoid_weights = |xs: &[f64]| -> Vec<f64> {
        let n = xs.len();
        (0..n)
            .map(|k| {
                let left = if k > 0 { xs[k] - xs[k - 1] } else { 0.0 };
                let right = if k + 1 < n { xs[k + 1] - xs[k] } else { 0.0 };
                0.5 * (left + right)
            })
            .collect()
    };
    let taus: Vec<f64> = fields.slices.iter().map(|s| s.tau).collect();
    let wt = trapezoid_weights(&taus);
    let (mut value, mut scale) = (0.0, 0.0);
    for (s, &wt) in fields.slices.iter().zip(&wt) {
        let xis: Vec<f64> = s.cells.iter().map(|c| c.xi).collect();
        let wx = trapezoid_weights(&xis);
        for (c, &wx) in s.cells.iter().zip(&wx) {
            let (_, dt, dx) = test.eval(s.tau, c.xi);
            if dt == 0.0 && dx == 0.0 {
                continue;
            }
            let (rho, j) = law.density_flux(c);
            value += wt * wx * (rho * dt + j * dx);
            scale += wt * wx * ((rho * dt).abs() + (j * dx).abs());
        }
    }
    Ok(WeakResidual { value, scale })
}
