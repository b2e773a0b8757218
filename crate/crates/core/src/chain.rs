//! Microscopic model: interaction potentials, chain states, point forcing
//! and the discrete energy.
//!
//! The state variables are strains `r_j = x_{j+1} - x_j` and velocities
//! `v_j = dx_j/dt`. A state on the lattice range `j_min..=j_max` carries
//! `j_max - j_min + 1` velocities and one fewer strain, so strain `r_j`
//! lives on the bond between sites `j` and `j + 1`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nearest-neighbour interaction law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    /// `Φ(r) = ½c0²r² + d1·r + d0`.
    Harmonic { c0: f64, d1: f64, d0: f64 },
    /// `Φ(r) = ½·min{(r−1)², (r+1)²}`, unit sound speed in both wells.
    BiQuadratic,
}

impl Potential {
    pub fn harmonic(c0: f64, d1: f64, d0: f64) -> Result<Self> {
        let p = Potential::Harmonic { c0, d1, d0 };
        p.validate()?;
        Ok(p)
    }

    /// Harmonic chain with unit sound speed and no linear or constant term.
    pub fn unit_harmonic() -> Self {
        Potential::Harmonic {
            c0: 1.0,
            d1: 0.0,
            d0: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Potential::Harmonic { c0, d1, d0 } => {
                if !(c0.is_finite() && c0 > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "sound speed c0 must be positive and finite, got {c0}"
                    )));
                }
                if !(d1.is_finite() && d0.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "harmonic coefficients must be finite".into(),
                    ));
                }
                Ok(())
            }
            Potential::BiQuadratic => Ok(()),
        }
    }

    /// Sound speed of the (harmonic) wells.
    pub fn sound_speed(&self) -> f64 {
        match *self {
            Potential::Harmonic { c0, .. } => c0,
            Potential::BiQuadratic => 1.0,
        }
    }

    /// `Φ(r)`.
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Potential::Harmonic { c0, d1, d0 } => 0.5 * c0 * c0 * r * r + d1 * r + d0,
            Potential::BiQuadratic => {
                let d = r - well_sign(r);
                0.5 * d * d
            }
        }
    }

    /// `Φ'(r)`. At the kink of the bi-quadratic law the `+1` well is used,
    /// so `Φ'(0) = −1`.
    #[inline]
    pub fn force(&self, r: f64) -> f64 {
        match *self {
            Potential::Harmonic { c0, d1, .. } => c0 * c0 * r + d1,
            Potential::BiQuadratic => r - well_sign(r),
        }
    }

    pub fn is_harmonic(&self) -> bool {
        matches!(self, Potential::Harmonic { .. })
    }
}

/// Well selector of the bi-quadratic law: `+1` for `r ≥ 0`, `−1` otherwise.
#[inline]
pub fn well_sign(r: f64) -> f64 {
    if r >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Snapshot of the chain on the lattice range `j_min..=j_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub t: f64,
    j_min: i64,
    r: Vec<f64>,
    v: Vec<f64>,
}

impl ChainState {
    /// `r` holds strains for `j_min..j_max` and `v` velocities for
    /// `j_min..=j_max`.
    pub fn new(t: f64, j_min: i64, r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if v.len() < 2 {
            return Err(Error::InvalidState("need at least two sites".to_string()));
        }
        if r.len() + 1 != v.len() {
            return Err(Error::InvalidState(format!(
                "expected {} strains for {} velocities, got {}",
                v.len() - 1,
                v.len(),
                r.len()
            )));
        }
        let state = ChainState { t, j_min, r, v };
        state.check_finite()?;
        Ok(state)
    }

    /// Constant strain and velocity on `j_min..=j_max`.
    pub fn uniform(j_min: i64, j_max: i64, r0: f64, v0: f64) -> Result<Self> {
        Self::from_fn(j_min, j_max, 0.0, |_| r0, |_| v0)
    }

    /// Samples `r_j = r_of(j)` and `v_j = v_of(j)`.
    pub fn from_fn(
        j_min: i64,
        j_max: i64,
        t: f64,
        r_of: impl Fn(i64) -> f64,
        v_of: impl Fn(i64) -> f64,
    ) -> Result<Self> {
        if j_max <= j_min {
            return Err(Error::InvalidState(format!(
                "empty lattice range {j_min}..={j_max}"
            )));
        }
        let r = (j_min..j_max).map(&r_of).collect();
        let v = (j_min..=j_max).map(&v_of).collect();
        Self::new(t, j_min, r, v)
    }

    /// Two-state data: `(r_minus, v_minus)` for `j < 0`, `(r_plus, v_plus)`
    /// for `j ≥ 0`.
    pub fn riemann(
        j_min: i64,
        j_max: i64,
        r_minus: f64,
        r_plus: f64,
        v_minus: f64,
        v_plus: f64,
    ) -> Result<Self> {
        Self::from_fn(
            j_min,
            j_max,
            0.0,
            |j| if j < 0 { r_minus } else { r_plus },
            |j| if j < 0 { v_minus } else { v_plus },
        )
    }

    pub fn j_min(&self) -> i64 {
        self.j_min
    }

    pub fn j_max(&self) -> i64 {
        self.j_min + self.v.len() as i64 - 1
    }

    pub fn num_sites(&self) -> usize {
        self.v.len()
    }

    pub fn strains(&self) -> &[f64] {
        &self.r
    }

    pub fn velocities(&self) -> &[f64] {
        &self.v
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.r, &mut self.v)
    }

    /// Strain on bond `(j, j+1)`, if stored.
    pub fn r_at(&self, j: i64) -> Option<f64> {
        let k = j.checked_sub(self.j_min)?;
        usize::try_from(k).ok().and_then(|k| self.r.get(k).copied())
    }

    pub fn v_at(&self, j: i64) -> Option<f64> {
        let k = j.checked_sub(self.j_min)?;
        usize::try_from(k).ok().and_then(|k| self.v.get(k).copied())
    }

    pub fn check_finite(&self) -> Result<()> {
        if let Some(k) = self.r.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidState(format!(
                "non-finite strain at j = {}",
                self.j_min + k as i64
            )));
        }
        if let Some(k) = self.v.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidState(format!(
                "non-finite velocity at j = {}",
                self.j_min + k as i64
            )));
        }
        Ok(())
    }

    /// Displacements `x_j` from prefix sums of the strains, anchored at
    /// `x_{j_min} = x0`.
    pub fn displacements(&self, x0: f64) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.v.len());
        let mut acc = x0;
        x.push(acc);
        for &r in &self.r {
            acc += r;
            x.push(acc);
        }
        x
    }

    /// Same strains and time, negated velocities.
    pub fn reversed(&self) -> ChainState {
        ChainState {
            t: self.t,
            j_min: self.j_min,
            r: self.r.clone(),
            v: self.v.iter().map(|v| -v).collect(),
        }
    }

    /// Largest absolute difference in strains and velocities.
    pub fn max_abs_diff(&self, other: &ChainState) -> f64 {
        assert_eq!(self.j_min, other.j_min, "lattice ranges differ");
        assert_eq!(self.v.len(), other.v.len(), "lattice ranges differ");
        self.r
            .iter()
            .zip(&other.r)
            .chain(self.v.iter().zip(&other.v))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One harmonic of a periodic forcing: `amplitude·cos(multiple·σ·t + phase)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Harmonic {
    pub amplitude: f64,
    #[serde(default = "one")]
    pub multiple: u32,
    #[serde(default)]
    pub phase: f64,
}

fn one() -> u32 {
    1
}

/// Periodic, zero-mean external force acting on atom `j = 0`.
///
/// The profile is a finite cosine series in the base frequency `sigma`
/// without a constant term, so `ζ(t + 2π/σ) = ζ(t)` and the forcing has no
/// net impulse over a period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Forcing {
    pub sigma: f64,
    pub harmonics: Vec<Harmonic>,
}

impl Forcing {
    /// `ζ(t) = amplitude·cos(σt)`.
    pub fn cosine(amplitude: f64, sigma: f64) -> Result<Self> {
        let f = Forcing {
            sigma,
            harmonics: vec![Harmonic {
                amplitude,
                multiple: 1,
                phase: 0.0,
            }],
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "forcing frequency must be positive, got {}",
                self.sigma
            )));
        }
        for h in &self.harmonics {
            if h.multiple == 0 {
                return Err(Error::InvalidParameter(
                    "forcing harmonics must have multiple ≥ 1 (zero mean)".into(),
                ));
            }
            if !(h.amplitude.is_finite() && h.phase.is_finite()) {
                return Err(Error::InvalidParameter(
                    "forcing harmonics must be finite".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.sigma
    }

    /// The forced site.
    pub fn site(&self) -> i64 {
        0
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        self.harmonics
            .iter()
            .map(|h| h.amplitude * (h.multiple as f64 * self.sigma * t + h.phase).cos())
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.harmonics.iter().all(|h| h.amplitude == 0.0)
    }

    /// Profile seen by the time-reversed run that starts at `t_end`:
    /// `ζ_rev(s) = ζ(t_end − s)`.
    pub fn time_reversed(&self, t_end: f64) -> Forcing {
        Forcing {
            sigma: self.sigma,
            harmonics: self
                .harmonics
                .iter()
                .map(|h| Harmonic {
                    amplitude: h.amplitude,
                    multiple: h.multiple,
                    phase: -(h.multiple as f64 * self.sigma * t_end) - h.phase,
                })
                .collect(),
        }
    }

    /// Trapezoid estimate of `∫₀^{t_per} ζ dt` with `n` panels.
    pub fn period_integral(&self, n: usize) -> f64 {
        let h = self.period() / n as f64;
        let inner: f64 = (1..n).map(|k| self.value(k as f64 * h)).sum();
        h * (inner + 0.5 * (self.value(0.0) + self.value(self.period())))
    }
}

/// Time derivatives of the first-order system.
///
/// `dr_j = v_{j+1} − v_j` on every bond and `dv_j = Φ'(r_j) − Φ'(r_{j−1})
/// (+ ζ(t) at j = 0)` on interior sites. The two end sites carry prescribed
/// (Dirichlet) velocities, so their `dv` is zero.
pub fn rhs(state: &ChainState, p: &Potential, forcing: Option<&Forcing>) -> (Vec<f64>, Vec<f64>) {
    let v = &state.v;
    let r = &state.r;
    let dr: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let mut dv = vec![0.0; v.len()];
    for k in 1..v.len() - 1 {
        dv[k] = p.force(r[k]) - p.force(r[k - 1]);
    }
    if let Some(f) = forcing {
        if let Some(k) = interior_index(state, f.site()) {
            dv[k] += f.value(state.t);
        }
    }
    (dr, dv)
}

/// Storage index of site `j` if it is an interior (non-Dirichlet) site.
pub(crate) fn interior_index(state: &ChainState, j: i64) -> Option<usize> {
    if j > state.j_min && j < state.j_max() {
        Some((j - state.j_min) as usize)
    } else {
        None
    }
}

/// `Σ ½v_j² + Σ Φ(r_j)` over the stored range.
pub fn discrete_energy(state: &ChainState, p: &Potential) -> f64 {
    let kinetic: f64 = state.v.iter().map(|v| 0.5 * v * v).sum();
    let potential: f64 = state.r.iter().map(|&r| p.value(r)).sum();
    kinetic + potential
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn biquadratic_values() {
        let p = Potential::BiQuadratic;
        assert_eq!(p.value(1.0), 0.0);
        assert_eq!(p.value(-1.0), 0.0);
        assert_eq!(p.value(0.0), 0.5);
        assert_eq!(p.value(3.0), 2.0);
        assert_eq!(p.force(2.0), 1.0);
        assert_eq!(p.force(-2.0), -1.0);
        assert_eq!(p.force(0.0), -1.0);
    }

    #[test]
    fn harmonic_values() {
        let p = Potential::unit_harmonic();
        assert_eq!(p.value(2.0), 2.0);
        let q = Potential::harmonic(2.0, 0.5, 1.0).unwrap();
        assert_eq!(q.value(1.0), 0.5 * 4.0 + 0.5 + 1.0);
        assert_eq!(q.force(1.0), 4.5);
        assert!(Potential::harmonic(0.0, 0.0, 0.0).is_err());
        assert!(Potential::harmonic(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn state_shape_is_checked() {
        assert!(ChainState::new(0.0, 0, vec![0.0; 3], vec![0.0; 3]).is_err());
        assert!(ChainState::new(0.0, 0, vec![0.0; 2], vec![0.0, f64::NAN, 0.0]).is_err());
        let s = ChainState::new(0.0, -2, vec![0.0; 4], vec![0.0; 5]).unwrap();
        assert_eq!(s.j_max(), 2);
        assert_eq!(s.r_at(-2), Some(0.0));
        assert_eq!(s.r_at(2), None);
        assert_eq!(s.v_at(2), Some(0.0));
        assert_eq!(s.v_at(-3), None);
    }

    #[test]
    fn rhs_uniform_state_is_equilibrium() {
        let s = ChainState::uniform(-5, 5, 0.3, -0.7).unwrap();
        let (dr, dv) = rhs(&s, &Potential::BiQuadratic, None);
        assert!(dr.iter().chain(&dv).all(|&x| x == 0.0));
    }

    #[test]
    fn rhs_single_bump() {
        // sites -1, 0, 1, 2 so that the middle bond carries r = 1
        let s = ChainState::new(0.0, -1, vec![0.0, 1.0, 0.0], vec![0.0; 4]).unwrap();
        let (_, dv) = rhs(&s, &Potential::unit_harmonic(), None);
        // bonds r_{-1}, r_0, r_1 = (0, 1, 0): site 0 sees Φ'(r_0) − Φ'(r_{-1}) = 1
        assert_eq!(dv[1], 1.0);
        assert_eq!(dv[2], -1.0);
    }

    #[test]
    fn rhs_forcing_hits_site_zero_only() {
        let s = ChainState::uniform(-3, 3, 0.0, 0.0).unwrap();
        let f = Forcing::cosine(1.0, 1.0).unwrap();
        let (_, dv) = rhs(&s, &Potential::unit_harmonic(), Some(&f));
        for (k, x) in dv.iter().enumerate() {
            let j = -3 + k as i64;
            assert_eq!(*x, if j == 0 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn energy_examples() {
        let s = ChainState::uniform(0, 4, 0.0, 0.0).unwrap();
        assert_eq!(discrete_energy(&s, &Potential::unit_harmonic()), 0.0);
        let s = ChainState::new(0.0, 0, vec![1.0], vec![2.0, 0.0]).unwrap();
        assert_eq!(discrete_energy(&s, &Potential::BiQuadratic), 2.0);
    }

    #[test]
    fn forcing_is_periodic_with_zero_mean() {
        let f = Forcing {
            sigma: 1.3,
            harmonics: vec![
                Harmonic {
                    amplitude: 1.0,
                    multiple: 1,
                    phase: 0.2,
                },
                Harmonic {
                    amplitude: -0.4,
                    multiple: 3,
                    phase: 1.0,
                },
            ],
        };
        f.validate().unwrap();
        for k in 0..50 {
            let t = 0.37 * k as f64;
            assert_relative_eq!(f.value(t), f.value(t + f.period()), epsilon = 1e-12);
        }
        assert!(f.period_integral(4096).abs() < 1e-12);
        let bad = Forcing {
            sigma: 1.0,
            harmonics: vec![Harmonic {
                amplitude: 1.0,
                multiple: 0,
                phase: 0.0,
            }],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn time_reversed_forcing_mirrors_profile() {
        let f = Forcing::cosine(0.8, 1.0).unwrap();
        let g = f.time_reversed(17.3);
        for k in 0..40 {
            let s = 0.41 * k as f64;
            assert_relative_eq!(g.value(s), f.value(17.3 - s), epsilon = 1e-12);
        }
    }

    #[test]
    fn displacements_recover_strains() {
        let s = ChainState::new(0.0, 0, vec![1.0, -2.0, 0.5], vec![0.0; 4]).unwrap();
        assert_eq!(s.displacements(3.0), vec![3.0, 4.0, 2.0, 2.5]);
    }
}
