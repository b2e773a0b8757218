//! Velocity-Verlet time stepping of the first-order chain equations.
//!
//! One step is kick–drift–kick: velocities receive half a kick from the
//! forces at `t`, strains drift a full step with the half-step velocities,
//! and velocities receive the second half kick from the forces at `t + dt`.
//! The end sites hold their initial velocities (displacement Dirichlet
//! data), which keeps the interior a closed Hamiltonian system.

use serde::{Deserialize, Serialize};

use crate::chain::{discrete_energy, interior_index, ChainState, Forcing, Potential};
use crate::error::{Error, Result};

/// Default time step for unit sound speed.
pub const DEFAULT_DT: f64 = 0.05;

/// Ratio between the largest admissible `dt` and `1/c0`.
pub const MAX_DT_TIMES_C0: f64 = 0.1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// End sites keep their initial velocities.
    #[default]
    Dirichlet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub potential: Potential,
    pub initial: ChainState,
    #[serde(default)]
    pub forcing: Option<Forcing>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default)]
    pub boundary: Boundary,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_stride() -> usize {
    100
}

impl SimConfig {
    pub fn new(potential: Potential, initial: ChainState, t_end: f64) -> Self {
        SimConfig {
            potential,
            initial,
            forcing: None,
            dt: DEFAULT_DT,
            t_end,
            snapshot_stride: default_stride(),
            boundary: Boundary::Dirichlet,
        }
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        self.initial.check_finite()?;
        if let Some(f) = &self.forcing {
            f.validate()?;
        }
        let c0 = self.potential.sound_speed();
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if self.dt > MAX_DT_TIMES_C0 / c0 * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "time step {} exceeds the budget {}/c0 = {}",
                self.dt,
                MAX_DT_TIMES_C0,
                MAX_DT_TIMES_C0 / c0
            )));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "final time must be non-negative, got {}",
                self.t_end
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidParameter(
                "snapshot stride must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Number of Verlet steps needed to reach `t_end`.
    pub fn num_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// True when no signal travelling at the sound speed from the lattice
    /// ends can reach the centre before `t_end`.
    pub fn boundary_safe(&self) -> bool {
        let width = (self.initial.j_max() - self.initial.j_min()) as f64;
        self.t_end < 0.5 * width / self.potential.sound_speed()
    }
}

/// Run parameters echoed into a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub potential: Potential,
    pub forcing: Option<Forcing>,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
}

/// Output of [`simulate`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub info: RunInfo,
    /// States at `t0 + k·dt·snapshot_stride`, starting with the initial one.
    pub snapshots: Vec<ChainState>,
    /// Velocity of the forced atom after every step (empty without forcing).
    /// Entry `n` belongs to time `t0 + n·dt`.
    pub forced_velocity: Vec<f64>,
    pub final_state: ChainState,
}

impl Trajectory {
    pub fn start_time(&self) -> f64 {
        self.snapshots[0].t
    }

    pub fn snapshot_spacing(&self) -> f64 {
        self.info.dt * self.info.snapshot_stride as f64
    }

    /// Snapshot closest in time to `t`.
    pub fn snapshot_near(&self, t: f64) -> &ChainState {
        let k = ((t - self.start_time()) / self.snapshot_spacing()).round();
        let k = (k.max(0.0) as usize).min(self.snapshots.len() - 1);
        &self.snapshots[k]
    }
}

/// In-place Verlet stepper that caches `Φ'(r)` between steps.
pub(crate) struct Stepper<'a> {
    potential: Potential,
    forcing: Option<&'a Forcing>,
    dt: f64,
    force: Vec<f64>,
    forced_index: Option<usize>,
}

impl<'a> Stepper<'a> {
    pub(crate) fn new(
        state: &ChainState,
        potential: Potential,
        forcing: Option<&'a Forcing>,
        dt: f64,
    ) -> Self {
        let force = state
            .strains()
            .iter()
            .map(|&r| potential.force(r))
            .collect();
        let forced_index = forcing.and_then(|f| interior_index(state, f.site()));
        Stepper {
            potential,
            forcing,
            dt,
            force,
            forced_index,
        }
    }

    fn half_kick(&self, v: &mut [f64], t: f64) {
        let h = 0.5 * self.dt;
        let n = v.len();
        let f = &self.force;
        for k in 1..n - 1 {
            v[k] += h * (f[k] - f[k - 1]);
        }
        if let (Some(k), Some(forcing)) = (self.forced_index, self.forcing) {
            v[k] += h * forcing.value(t);
        }
    }

    pub(crate) fn step(&mut self, state: &mut ChainState) {
        let t = state.t;
        let dt = self.dt;
        let p = self.potential;
        {
            let (r, v) = state.parts_mut();
            self.half_kick(v, t);
            for ((rk, fk), w) in r.iter_mut().zip(self.force.iter_mut()).zip(v.windows(2)) {
                *rk += dt * (w[1] - w[0]);
                *fk = p.force(*rk);
            }
            self.half_kick(v, t + dt);
        }
        state.t = t + dt;
    }

    pub(crate) fn forced_velocity(&self, state: &ChainState) -> Option<f64> {
        self.forced_index.map(|k| state.velocities()[k])
    }
}

/// One velocity-Verlet step. Fails when the new state is not finite.
pub fn verlet_step(
    state: &ChainState,
    p: &Potential,
    forcing: Option<&Forcing>,
    dt: f64,
) -> Result<ChainState> {
    let mut next = state.clone();
    Stepper::new(state, *p, forcing, dt).step(&mut next);
    next.check_finite().map_err(|e| Error::IntegrationFault {
        t: next.t,
        reason: e.to_string(),
    })?;
    Ok(next)
}

/// Velocities negated, strains and time kept.
pub fn reverse(state: &ChainState) -> ChainState {
    state.reversed()
}

/// Integrates `cfg.initial` up to `cfg.t_end`.
///
/// Unforced runs abort when the discrete energy grows beyond ten times its
/// initial magnitude; every run aborts on non-finite values.
pub fn simulate(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let steps = cfg.num_steps();
    let stride = cfg.snapshot_stride;
    let mut state = cfg.initial.clone();
    let mut stepper = Stepper::new(&state, cfg.potential, cfg.forcing.as_ref(), cfg.dt);
    let e0 = discrete_energy(&state, &cfg.potential).abs();
    let guard_energy = cfg.forcing.as_ref().is_none_or(|f| f.is_zero());

    let mut snapshots = Vec::with_capacity(steps / stride + 1);
    snapshots.push(state.clone());
    let mut forced_velocity = Vec::new();
    if let Some(v0) = stepper.forced_velocity(&state) {
        forced_velocity.reserve(steps + 1);
        forced_velocity.push(v0);
    }

    for n in 1..=steps {
        stepper.step(&mut state);
        if let Some(v0) = stepper.forced_velocity(&state) {
            forced_velocity.push(v0);
        }
        if n % stride == 0 {
            state.check_finite().map_err(|e| Error::IntegrationFault {
                t: state.t,
                reason: e.to_string(),
            })?;
            if guard_energy {
                let e = discrete_energy(&state, &cfg.potential);
                if e.abs() > 10.0 * e0.max(f64::MIN_POSITIVE) {
                    return Err(Error::IntegrationFault {
                        t: state.t,
                        reason: format!("energy grew from {e0} to {e}"),
                    });
                }
            }
            snapshots.push(state.clone());
        }
    }
    state.check_finite().map_err(|e| Error::IntegrationFault {
        t: state.t,
        reason: e.to_string(),
    })?;

    Ok(Trajectory {
        info: RunInfo {
            potential: cfg.potential,
            forcing: cfg.forcing.clone(),
            dt: cfg.dt,
            t_end: cfg.t_end,
            snapshot_stride: stride,
        },
        snapshots,
        forced_velocity,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn standing_mode(sites: i64, mode: u32, amplitude: f64) -> ChainState {
        // x_j = a·sin(k(j − j_min)), fixed ends, zero velocity
        let k = mode as f64 * PI / sites as f64;
        ChainState::from_fn(
            0,
            sites,
            0.0,
            |j| amplitude * ((k * (j + 1) as f64).sin() - (k * j as f64).sin()),
            |_| 0.0,
        )
        .unwrap()
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        let s = ChainState::uniform(-20, 20, 1.0, 0.0).unwrap();
        let next = verlet_step(&s, &Potential::BiQuadratic, None, 0.05).unwrap();
        assert_eq!(next.strains(), s.strains());
        assert_eq!(next.velocities(), s.velocities());
        assert!((next.t - 0.05).abs() < 1e-15);
    }

    #[test]
    fn zero_chain_stays_zero() {
        let s = ChainState::uniform(-50, 50, 0.0, 0.0).unwrap();
        let f = Forcing::cosine(0.0, 1.0).unwrap();
        let cfg = SimConfig::new(Potential::unit_harmonic(), s.clone(), 20.0)
            .with_forcing(f)
            .with_stride(40);
        let traj = simulate(&cfg).unwrap();
        assert_eq!(traj.snapshots.len(), 11);
        for snap in &traj.snapshots {
            assert_eq!(snap.strains(), s.strains());
            assert_eq!(snap.velocities(), s.velocities());
        }
    }

    #[test]
    fn high_mode_energy_error_is_bounded() {
        // Verlet keeps a shadow energy; the true energy oscillates with a
        // relative amplitude of order (ω·dt)² but must not trend.
        let p = Potential::unit_harmonic();
        let mut s = standing_mode(64, 21, 0.3);
        let e0 = discrete_energy(&s, &p);
        let omega = 2.0 * (21.0 * PI / 128.0).sin();
        let bound = (omega * 0.05).powi(2) / 2.0;
        let mut first = 0.0f64;
        let mut last = 0.0f64;
        let mut stepper = Stepper::new(&s, p, None, 0.05);
        for n in 0..10_000 {
            stepper.step(&mut s);
            let rel = (discrete_energy(&s, &p) - e0).abs() / e0;
            assert!(rel < bound, "step {n}: {rel} vs {bound}");
            if n < 500 {
                first = first.max(rel);
            }
            if n >= 9_500 {
                last = last.max(rel);
            }
        }
        assert!(
            last < 1.5 * first + 1e-12,
            "energy error grows: {first} -> {last}"
        );
    }

    #[test]
    fn reverse_is_involution() {
        let s = standing_mode(16, 2, 0.1);
        let s = ChainState::new(
            1.5,
            0,
            s.strains().to_vec(),
            (0..17).map(|k| k as f64).collect(),
        )
        .unwrap();
        assert_eq!(reverse(&reverse(&s)), s);
        let r = reverse(&s);
        assert_eq!(r.strains(), s.strains());
        assert_eq!(r.t, s.t);
        assert!(r
            .velocities()
            .iter()
            .zip(s.velocities())
            .all(|(a, b)| *a == -*b));
    }

    #[test]
    fn config_validation() {
        let s = ChainState::uniform(0, 10, 0.0, 0.0).unwrap();
        let ok = SimConfig::new(Potential::unit_harmonic(), s.clone(), 1.0);
        assert!(ok.validate().is_ok());
        assert!(ok.clone().with_dt(0.2).validate().is_err());
        assert!(ok.clone().with_dt(-0.01).validate().is_err());
        assert!(ok.clone().with_stride(0).validate().is_err());
        let fast = Potential::harmonic(4.0, 0.0, 0.0).unwrap();
        assert!(SimConfig::new(fast, s, 1.0).validate().is_err());
    }

    #[test]
    fn non_finite_state_is_a_fault() {
        let mut v = vec![0.0; 11];
        v[5] = f64::MAX;
        v[6] = -f64::MAX;
        let s = ChainState::new(0.0, 0, vec![0.0; 10], v).unwrap();
        let err = verlet_step(&s, &Potential::unit_harmonic(), None, 0.05).unwrap_err();
        assert!(err.is_numerical());
    }
}
