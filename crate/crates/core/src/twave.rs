//! Exact travelling waves of the harmonic chain and their constant
//! thermodynamic fields.
//!
//! A wave with phase speed `c_ph` and modes `(κ_i, A_i, η_i)` has profiles
//!
//! ```text
//! R(φ) = R + Σ A_i cos(κ_i φ + κ_i/2 + η_i)
//! V(φ) = V + Σ b_i A_i cos(κ_i φ + η_i),   b_i = −2c0² sin(κ_i/2) / (c_ph κ_i)
//! ```
//!
//! in the phase variable `φ = j − c_ph t`. For roots on the first lobe of
//! the dispersion relation `b_i = −c0` for right-moving and `+c0` for
//! left-moving waves.

use serde::{Deserialize, Serialize};

use crate::chain::{ChainState, Potential};
use crate::error::{Error, Result};
use crate::spectral::omega;
use crate::thermo::CellFields;

/// Relative residual allowed in `c_ph²κ² = Ω(κ)²` for supplied modes.
pub const DISPERSION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn of_speed(c: f64) -> Direction {
        if c < 0.0 {
            Direction::Left
        } else {
            Direction::Right
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Direction::Left => -1.0,
            Direction::Right => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub kappa: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TravellingWaveSpec {
    pub potential: Potential,
    pub c_ph: f64,
    pub modes: Vec<Mode>,
    pub mean_strain: f64,
    pub mean_velocity: f64,
    pub direction: Direction,
}

impl TravellingWaveSpec {
    /// Single mode with `c_ph = ±|Ω(κ)|/κ`.
    pub fn single_mode(
        potential: Potential,
        kappa: f64,
        amplitude: f64,
        phase: f64,
        direction: Direction,
        mean_strain: f64,
        mean_velocity: f64,
    ) -> Self {
        let c0 = potential.sound_speed();
        TravellingWaveSpec {
            potential,
            c_ph: direction.sign() * omega(kappa, c0).abs() / kappa,
            modes: vec![Mode {
                kappa,
                amplitude,
                phase,
            }],
            mean_strain,
            mean_velocity,
            direction,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        let c0 = self.potential.sound_speed();
        if !(self.c_ph.is_finite() && self.c_ph != 0.0 && self.c_ph.abs() < c0) {
            return Err(Error::SpeedDomain {
                c_ph: self.c_ph,
                reason: "travelling waves need 0 < |c_ph| < c0",
            });
        }
        if Direction::of_speed(self.c_ph) != self.direction {
            return Err(Error::InvalidParameter(format!(
                "direction {:?} inconsistent with c_ph = {}",
                self.direction, self.c_ph
            )));
        }
        if !(self.mean_strain.is_finite() && self.mean_velocity.is_finite()) {
            return Err(Error::InvalidParameter("mean values must be finite".into()));
        }
        for m in &self.modes {
            if !(m.kappa > 0.0 && m.kappa.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "wave number must be positive, got {}",
                    m.kappa
                )));
            }
            if !(m.amplitude >= 0.0 && m.amplitude.is_finite() && m.phase.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "mode amplitude must be non-negative, got {}",
                    m.amplitude
                )));
            }
            let lhs = (self.c_ph * m.kappa).powi(2);
            let rhs = omega(m.kappa, c0).powi(2);
            if (lhs - rhs).abs() > DISPERSION_TOL * rhs.max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "κ = {} does not solve the dispersion relation at c_ph = {} (residual {:e})",
                    m.kappa,
                    self.c_ph,
                    lhs - rhs
                )));
            }
        }
        Ok(())
    }

    /// `A² = Σ A_i²`.
    pub fn amplitude_sq(&self) -> f64 {
        self.modes.iter().map(|m| m.amplitude * m.amplitude).sum()
    }
}

/// Sampler for the profiles of a validated spec.
#[derive(Clone, Debug)]
pub struct TravellingWave {
    spec: TravellingWaveSpec,
    velocity_coeffs: Vec<f64>,
}

pub fn build_wave(spec: &TravellingWaveSpec) -> Result<TravellingWave> {
    spec.validate()?;
    let c0 = spec.potential.sound_speed();
    let velocity_coeffs = spec
        .modes
        .iter()
        .map(|m| -2.0 * c0 * c0 * (0.5 * m.kappa).sin() / (spec.c_ph * m.kappa))
        .collect();
    Ok(TravellingWave {
        spec: spec.clone(),
        velocity_coeffs,
    })
}

impl TravellingWave {
    pub fn spec(&self) -> &TravellingWaveSpec {
        &self.spec
    }

    /// `(R(φ), V(φ))`.
    pub fn profile(&self, phi: f64) -> (f64, f64) {
        let mut r = self.spec.mean_strain;
        let mut v = self.spec.mean_velocity;
        for (m, b) in self.spec.modes.iter().zip(&self.velocity_coeffs) {
            let arg = m.kappa * phi + m.phase;
            r += m.amplitude * (arg + 0.5 * m.kappa).cos();
            v += b * m.amplitude * arg.cos();
        }
        (r, v)
    }

    /// Lattice state at time `t`: `r_j = R(j − c_ph t)`, `v_j = V(j − c_ph t)`.
    pub fn sample(&self, j_min: i64, j_max: i64, t: f64) -> Result<ChainState> {
        let c = self.spec.c_ph;
        ChainState::from_fn(
            j_min,
            j_max,
            t,
            |j| self.profile(j as f64 - c * t).0,
            |j| self.profile(j as f64 - c * t).1,
        )
    }
}

/// Closed-form fields of a harmonic travelling wave.
///
/// `Q = Σ c_gr,i·½c0²A_i²` with the signed group speed of each mode, which
/// reduces to `Q = c_gr·E_osc` for a single mode.
pub fn tw_mean_fields(spec: &TravellingWaveSpec) -> Result<CellFields> {
    spec.validate()?;
    let (c0, d1) = match spec.potential {
        Potential::Harmonic { c0, d1, .. } => (c0, d1),
        Potential::BiQuadratic => return Err(Error::Unsupported),
    };
    let r = spec.mean_strain;
    let v = spec.mean_velocity;
    let p = -c0 * c0 * r - d1;
    let e_non = 0.5 * v * v + spec.potential.value(r);
    let e_osc = 0.5 * c0 * c0 * spec.amplitude_sq();
    let sign = spec.direction.sign();
    let q: f64 = spec
        .modes
        .iter()
        .map(|m| {
            let lobe = (0.5 * m.kappa).sin().signum();
            sign * lobe * c0 * (0.5 * m.kappa).cos() * 0.5 * c0 * c0 * m.amplitude * m.amplitude
        })
        .sum();
    let e = e_non + e_osc;
    Ok(CellFields {
        xi: 0.0,
        r,
        v,
        p,
        e,
        f: v * p + q,
        u: e - 0.5 * v * v,
        q,
        e_osc,
        e_non,
        production: 0.0,
        truncated: false,
    })
}
