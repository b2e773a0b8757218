//! Closed-form phase transition waves of the bi-quadratic chain.
//!
//! A wave with phase speed `c_ph` connects an oscillatory state in the
//! `−1` well (behind a right-moving interface) with one in the `+1` well.
//! Given `c_ph`, both tail amplitudes and the mean velocity, the mass,
//! momentum and energy jump conditions fix all asymptotic fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::unique_kappa;

/// Tolerance of the internal consistency checks.
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveType {
    I,
    II,
}

/// `(⟦R⟧, ⟦V⟧) = (2/(1−c²), −2c/(1−c²))`; jumps are `X₊ − X₋`.
pub fn jump_conditions(c_ph: f64) -> Result<(f64, f64)> {
    if !(c_ph.is_finite() && c_ph.abs() < 1.0) {
        return Err(Error::SpeedDomain {
            c_ph,
            reason: "phase transition waves are subsonic, |c_ph| < 1",
        });
    }
    let d = 1.0 - c_ph * c_ph;
    Ok((2.0 / d, -2.0 * c_ph / d))
}

/// Asymptotic fields of a phase transition wave.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtWaveState {
    pub c_ph: f64,
    pub kappa: f64,
    pub c_gr: f64,
    pub r_minus: f64,
    pub r_plus: f64,
    pub v_minus: f64,
    pub v_plus: f64,
    pub a_minus: f64,
    pub a_plus: f64,
    pub p_minus: f64,
    pub p_plus: f64,
    pub e_osc_minus: f64,
    pub e_osc_plus: f64,
    pub q_minus: f64,
    pub q_plus: f64,
    pub jump_r: f64,
    pub jump_v: f64,
    pub jump_e_osc: f64,
    pub mean_r: f64,
    pub mean_v: f64,
    pub xi: f64,
    pub upsilon: f64,
    /// `R₊ > 0 > R₋`, i.e. the tails lie in the `+1` and `−1` wells.
    pub sign_condition: bool,
}

/// Builds the state for given speed, tail amplitudes and mean velocity.
pub fn close_family(c_ph: f64, a_minus: f64, a_plus: f64, mean_v: f64) -> Result<PtWaveState> {
    if c_ph == 0.0 {
        return Err(Error::SpeedDomain {
            c_ph,
            reason: "static interfaces are not covered",
        });
    }
    let (jump_r, jump_v) = jump_conditions(c_ph)?;
    if !(a_minus >= 0.0 && a_plus >= 0.0 && a_minus.is_finite() && a_plus.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tail amplitudes must be non-negative, got {a_minus} and {a_plus}"
        )));
    }
    if !mean_v.is_finite() {
        return Err(Error::InvalidParameter(
            "mean velocity must be finite".into(),
        ));
    }
    let root = unique_kappa(c_ph, 1.0)?;
    let c_gr = root.c_gr;
    let e_osc_minus = 0.5 * a_minus * a_minus;
    let e_osc_plus = 0.5 * a_plus * a_plus;
    let jump_e_osc = e_osc_plus - e_osc_minus;
    let mean_r = -(c_gr - c_ph) * jump_e_osc / (2.0 * c_ph);
    let r_minus = mean_r - 0.5 * jump_r;
    let r_plus = mean_r + 0.5 * jump_r;
    Ok(PtWaveState {
        c_ph,
        kappa: root.kappa,
        c_gr,
        r_minus,
        r_plus,
        v_minus: mean_v - 0.5 * jump_v,
        v_plus: mean_v + 0.5 * jump_v,
        a_minus,
        a_plus,
        p_minus: -r_minus - 1.0,
        p_plus: -r_plus + 1.0,
        e_osc_minus,
        e_osc_plus,
        q_minus: c_gr * e_osc_minus,
        q_plus: c_gr * e_osc_plus,
        jump_r,
        jump_v,
        jump_e_osc,
        mean_r,
        mean_v,
        xi: (c_gr - c_ph) * jump_e_osc,
        upsilon: well_upsilon(r_minus, r_plus),
        sign_condition: r_plus > 0.0 && r_minus < 0.0,
    })
}

/// `Υ = ⟦Φ(R)⟧ − ⟨Φ'(R)⟩⟦R⟧` with `R₊` in the `+1` well and `R₋` in the `−1` well.
fn well_upsilon(r_minus: f64, r_plus: f64) -> f64 {
    let phi_plus = 0.5 * (r_plus - 1.0).powi(2);
    let phi_minus = 0.5 * (r_minus + 1.0).powi(2);
    let mean_force = 0.5 * ((r_plus - 1.0) + (r_minus + 1.0));
    phi_plus - phi_minus - mean_force * (r_plus - r_minus)
}

impl PtWaveState {
    /// `c_ph → −c_ph`, `V± → −V±`; strains and amplitudes are kept.
    pub fn time_reversed(&self) -> Result<PtWaveState> {
        close_family(-self.c_ph, self.a_minus, self.a_plus, -self.mean_v)
    }

    pub fn e_non_minus(&self) -> f64 {
        0.5 * self.v_minus * self.v_minus + 0.5 * (self.r_minus + 1.0).powi(2)
    }

    pub fn e_non_plus(&self) -> f64 {
        0.5 * self.v_plus * self.v_plus + 0.5 * (self.r_plus - 1.0).powi(2)
    }

    /// Residuals of the mass, momentum and energy jump conditions
    /// `c⟦R⟧ + ⟦V⟧`, `c⟦V⟧ − ⟦P⟧`, `c⟦E⟧ − ⟦F⟧`.
    pub fn jump_residuals(&self) -> [f64; 3] {
        let c = self.c_ph;
        let dr = self.r_plus - self.r_minus;
        let dv = self.v_plus - self.v_minus;
        let dp = self.p_plus - self.p_minus;
        let de = (self.e_non_plus() + self.e_osc_plus) - (self.e_non_minus() + self.e_osc_minus);
        let df = (self.p_plus * self.v_plus + self.q_plus)
            - (self.p_minus * self.v_minus + self.q_minus);
        [c * dr + dv, c * dv - dp, c * de - df]
    }
}

/// `(Ξ, Υ)`, checking the kinetic relation `c_ph·Υ = Ξ` and `Ξ = −2c_ph⟨R⟩`.
pub fn xi_and_upsilon(state: &PtWaveState) -> Result<(f64, f64)> {
    if !state.sign_condition {
        return Err(Error::WellsUndetermined {
            r_minus: state.r_minus,
            r_plus: state.r_plus,
        });
    }
    let xi = (state.c_gr - state.c_ph) * state.jump_e_osc;
    let upsilon = well_upsilon(state.r_minus, state.r_plus);
    let scale = 1.0 + xi.abs() + (state.c_ph * state.mean_r).abs();
    debug_assert!((state.c_ph * upsilon - xi).abs() <= IDENTITY_TOL * scale);
    debug_assert!((xi + 2.0 * state.c_ph * state.mean_r).abs() <= IDENTITY_TOL * scale);
    Ok((xi, upsilon))
}

/// Type I when the group speed has the sign of the phase speed.
pub fn classify_type(c_ph: f64) -> Result<WaveType> {
    let root = unique_kappa(c_ph, 1.0)?;
    if c_ph.abs() >= 1.0 {
        return Err(Error::SpeedDomain {
            c_ph,
            reason: "phase transition waves are subsonic, |c_ph| < 1",
        });
    }
    Ok(if root.c_gr * c_ph > 0.0 {
        WaveType::I
    } else {
        WaveType::II
    })
}

/// The wave without oscillations ahead of the interface and with the tail
/// amplitude behind it fixed by the energy balance.
pub fn causality_wave(c_ph: f64, mean_v: f64) -> Result<PtWaveState> {
    if c_ph == 0.0 || !c_ph.is_finite() {
        return Err(Error::SpeedDomain {
            c_ph,
            reason: "static interfaces are not covered",
        });
    }
    let c_gr = unique_kappa(c_ph, 1.0)?.c_gr;
    let a = (2.0 * c_ph / (c_gr - c_ph)).abs();
    if c_ph > 0.0 {
        close_family(c_ph, a, 0.0, mean_v)
    } else {
        close_family(c_ph, 0.0, a, mean_v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriteriaReport {
    /// Ξ ≥ 0.
    pub som1: bool,
    /// The radiation flux points away from the interface on both sides.
    pub som2: bool,
    /// c_ph·Υ ≥ 0.
    pub entropy: bool,
    pub causality_consistent: bool,
    pub wave_type: WaveType,
    /// Same as `som2` for the flux relative to the interface.
    pub relative_flux_away: bool,
    pub sign_condition: bool,
}

/// `(Q̃₋, Q̃₊)` with `Q̃ = (c_gr − c_ph)·E_osc`.
pub fn relative_flux(state: &PtWaveState) -> (f64, f64) {
    let d = state.c_gr - state.c_ph;
    (d * state.e_osc_minus, d * state.e_osc_plus)
}

fn points_away(e_minus: f64, q_minus: f64, e_plus: f64, q_plus: f64) -> bool {
    (e_plus == 0.0 || q_plus >= 0.0) && (e_minus == 0.0 || q_minus <= 0.0)
}

pub fn evaluate_criteria(state: &PtWaveState) -> CriteriaReport {
    let (qt_minus, qt_plus) = relative_flux(state);
    let ahead_quiet = if state.c_ph > 0.0 {
        state.a_plus == 0.0
    } else {
        state.a_minus == 0.0
    };
    let som1 = state.xi >= 0.0;
    CriteriaReport {
        som1,
        som2: points_away(
            state.e_osc_minus,
            state.q_minus,
            state.e_osc_plus,
            state.q_plus,
        ),
        entropy: state.c_ph * state.upsilon >= 0.0,
        causality_consistent: ahead_quiet && som1,
        wave_type: if state.c_gr * state.c_ph > 0.0 {
            WaveType::I
        } else {
            WaveType::II
        },
        relative_flux_away: points_away(state.e_osc_minus, qt_minus, state.e_osc_plus, qt_plus),
        sign_condition: state.sign_condition,
    }
}
