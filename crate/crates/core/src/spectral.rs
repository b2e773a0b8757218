//! Dispersion relation of the harmonic chain, travelling-wave wave numbers,
//! critical speeds and the forced (discrete Helmholtz) problem.
//!
//! `Ω(k) = 2c0·sin(k/2)` and `Ω'(k) = c0·cos(k/2)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::chain::{ChainState, Forcing};
use crate::error::{Error, Result};

/// Number of uniform scan cells used to bracket travelling-wave roots.
pub const SCAN_CELLS: usize = 10_000;

/// Absolute bisection tolerance on `k`.
pub const BISECTION_TOL: f64 = 1e-13;

/// Tolerance below which a Helmholtz coefficient counts as zero.
pub const RADIATION_TOL: f64 = 1e-12;

#[inline]
pub fn omega(k: f64, c0: f64) -> f64 {
    2.0 * c0 * (0.5 * k).sin()
}

#[inline]
pub fn omega_prime(k: f64, c0: f64) -> f64 {
    c0 * (0.5 * k).cos()
}

/// Bisection on a bracketing interval `[a, b]` with `g(a)·g(b) ≤ 0`.
pub(crate) fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut ga = g(a);
    if ga == 0.0 {
        return a;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a) <= tol || m == a || m == b {
            return m;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Wave number of the time-periodic response to forcing at frequency
/// `sigma`: the solution of `σ = Ω(κ)` in `(0, π)`.
pub fn solve_kappa_forced(sigma: f64, c0: f64) -> Result<f64> {
    let edge = 2.0 * c0;
    if !(sigma > 0.0 && sigma < edge) {
        return Err(Error::OutOfBand { sigma, edge });
    }
    Ok(2.0 * (sigma / edge).asin())
}

/// A positive solution of `c_ph²k² = Ω(k)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionRoot {
    pub kappa: f64,
    /// `sign(c_ph)·Ω'(κ)`.
    pub c_gr: f64,
    /// Lobe of `|Ω|` containing the root: `κ ∈ (2π·i, 2π·(i+1))`.
    pub branch_index: u32,
}

/// All wave numbers of travelling waves with phase speed `c_ph`.
///
/// Roots of `|c_ph|·k = |Ω(k)|` are bracketed on a uniform scan of
/// `(0, 2c0/|c_ph|]`, beyond which the left side exceeds `2c0 ≥ |Ω|`, and
/// refined by bisection.
pub fn solve_kappa_tw(c_ph: f64, c0: f64) -> Result<Vec<DispersionRoot>> {
    let c = c_ph.abs();
    if !c_ph.is_finite() || c == 0.0 {
        return Err(Error::SpeedDomain {
            c_ph,
            reason: "phase speed must be non-zero",
        });
    }
    if c >= c0 {
        return Err(Error::SpeedDomain {
            c_ph,
            reason: "travelling waves of the harmonic chain are subsonic",
        });
    }
    let g = |k: f64| c * k - omega(k, c0).abs();
    let k_max = 2.0 * c0 / c;
    let h = k_max / SCAN_CELLS as f64;
    let sign = c_ph.signum();
    let mut roots = Vec::new();
    // g < 0 just above k = 0 because c < c0
    let mut a = 1e-3 * h;
    let mut ga = g(a);
    for i in 1..=SCAN_CELLS {
        let b = i as f64 * h;
        let gb = g(b);
        if gb == 0.0 || (ga < 0.0) != (gb < 0.0) {
            let kappa = if gb == 0.0 {
                b
            } else {
                bisect(g, a, b, BISECTION_TOL)
            };
            if roots
                .last()
                .is_none_or(|r: &DispersionRoot| (r.kappa - kappa).abs() > 10.0 * BISECTION_TOL)
            {
                roots.push(DispersionRoot {
                    kappa,
                    c_gr: sign * omega_prime(kappa, c0),
                    branch_index: (kappa / (2.0 * PI)).floor() as u32,
                });
            }
        }
        a = b;
        ga = gb;
    }
    Ok(roots)
}

/// The unique wave number for `c₂ < |c_ph| < c0`.
pub fn unique_kappa(c_ph: f64, c0: f64) -> Result<DispersionRoot> {
    let speeds = critical_speeds(c0);
    if c_ph.abs() <= speeds.c2 {
        return Err(Error::SpeedDomain {
            c_ph,
            reason: "|c_ph| ≤ c2: the wave number is not unique",
        });
    }
    let roots = solve_kappa_tw(c_ph, c0)?;
    match roots.as_slice() {
        [root] => Ok(*root),
        _ => Err(Error::SpeedDomain {
            c_ph,
            reason: "expected exactly one wave number",
        }),
    }
}

/// Reference speeds of the travelling-wave problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalSpeeds {
    /// `2Ω(π/2)/π`, the phase speed of the mode `κ = π/2`.
    pub c1: f64,
    /// Largest speed at which a second wave number appears (tangency of
    /// `c·k = |Ω(k)|` on the second lobe).
    pub c2: f64,
    /// `Ω(π)/π`: phase speed at which the group speed changes sign.
    pub c_reversal: f64,
}

/// `tan(x) = x` on `(π, 3π/2)`.
pub fn tangency_root() -> f64 {
    // sin x − x cos x changes sign on the bracket and has no poles
    bisect(|x| x.sin() - x * x.cos(), PI + 1e-9, 1.5 * PI - 1e-9, 1e-15)
}

pub fn critical_speeds(c0: f64) -> CriticalSpeeds {
    let x = tangency_root();
    CriticalSpeeds {
        c1: 2.0 * omega(0.5 * PI, c0) / PI,
        c2: -c0 * x.cos(),
        c_reversal: omega(PI, c0) / PI,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SommerfeldBranch {
    /// Outgoing waves; the forcing feeds energy in.
    Source,
    /// Incoming waves; the forcing extracts energy.
    Sink,
}

/// Special solution of the forced harmonic chain `ẍ_j − Δx_j = ζ(t)δ_{j0}`
/// with `c0 = 1` and `ζ(t) = −cos(σt)`.
///
/// In Helmholtz form, `x_j = Re(u_j e^{−iσt})` with
/// `u_j = u⁺_j + α e^{−iκj} + β e^{iκj}` and
/// `u⁺_j = e^{iκ|j|}/(2iΩ(κ)Ω'(κ))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SommerfeldSolution {
    pub sigma: f64,
    pub kappa: f64,
    /// Tail amplitude of strains and velocities, `1/(2Ω'(κ))`.
    pub amplitude: f64,
    pub branch: SommerfeldBranch,
    pub alpha: Complex64,
    pub beta: Complex64,
}

pub fn sommerfeld_solution(sigma: f64, branch: SommerfeldBranch) -> Result<SommerfeldSolution> {
    let kappa = solve_kappa_forced(sigma, 1.0)?;
    let om = omega(kappa, 1.0);
    let omp = omega_prime(kappa, 1.0);
    let coeff = match branch {
        SommerfeldBranch::Source => Complex64::new(0.0, 0.0),
        // −(2iΩΩ')⁻¹ = i/(2ΩΩ')
        SommerfeldBranch::Sink => Complex64::new(0.0, 1.0 / (2.0 * om * omp)),
    };
    Ok(SommerfeldSolution {
        sigma,
        kappa,
        amplitude: 1.0 / (2.0 * omp),
        branch,
        alpha: coeff,
        beta: coeff,
    })
}

impl SommerfeldSolution {
    fn time_sign(&self) -> f64 {
        match self.branch {
            SommerfeldBranch::Source => 1.0,
            SommerfeldBranch::Sink => -1.0,
        }
    }

    fn scale(&self) -> f64 {
        1.0 / (2.0 * omega(self.kappa, 1.0) * omega_prime(self.kappa, 1.0))
    }

    /// Forcing profile for which this is an exact solution.
    pub fn forcing(&self) -> Forcing {
        Forcing::cosine(-1.0, self.sigma).expect("sigma is in band")
    }

    /// Complex Helmholtz amplitude `u_j`.
    pub fn helmholtz(&self, j: f64) -> Complex64 {
        let i = Complex64::i();
        let special = (i * self.kappa * j.abs()).exp()
            / (2.0 * i * omega(self.kappa, 1.0) * omega_prime(self.kappa, 1.0));
        special + self.alpha * (-i * self.kappa * j).exp() + self.beta * (i * self.kappa * j).exp()
    }

    /// Real displacement `x_j(t) = sin(κ|j| ∓ σt)/(2Ω(κ)Ω'(κ))`.
    pub fn displacement(&self, j: i64, t: f64) -> f64 {
        let s = self.time_sign();
        self.scale() * (self.kappa * j.abs() as f64 - s * self.sigma * t).sin()
    }

    /// `v_j(t) = ∓A·cos(κ|j| ∓ σt)`.
    pub fn velocity(&self, j: i64, t: f64) -> f64 {
        let s = self.time_sign();
        -s * self.amplitude * (self.kappa * j.abs() as f64 - s * self.sigma * t).cos()
    }

    /// `r_j(t) = x_{j+1} − x_j = sgn(j+½)·A·cos(κ|j+½| ∓ σt)`.
    pub fn strain(&self, j: i64, t: f64) -> f64 {
        let s = self.time_sign();
        let m = j as f64 + 0.5;
        m.signum() * self.amplitude * (self.kappa * m.abs() - s * self.sigma * t).cos()
    }

    /// Samples the solution on `j_min..=j_max` at time `t`.
    pub fn sample(&self, j_min: i64, j_max: i64, t: f64) -> Result<ChainState> {
        ChainState::from_fn(
            j_min,
            j_max,
            t,
            |j| self.strain(j, t),
            |j| self.velocity(j, t),
        )
    }

    /// `∂_j u − iκu` at `j > 0` and `∂_j u + iκu` at `j < 0`, with `u`
    /// extended to real `j`. Both vanish for all `|j|` iff `α = β = 0`.
    pub fn radiation_defect(&self, j: f64) -> Complex64 {
        let i = Complex64::i();
        let k = self.kappa;
        let sj = j.signum();
        let special = (i * k * j.abs()).exp() / (2.0 * i * omega(k, 1.0) * omega_prime(k, 1.0));
        let du = i * k * sj * special - i * k * self.alpha * (-i * k * j).exp()
            + i * k * self.beta * (i * k * j).exp();
        du - sj * i * k * self.helmholtz(j)
    }
}

/// Macroscopic fields of a Sommerfeld solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SommerfeldFields {
    pub e_osc: f64,
    pub q_minus_inf: f64,
    pub q_plus_inf: f64,
    pub theta: f64,
}

/// Fields are constant away from the source: `R = V = P = 0`,
/// `E = E_osc = ½A²` and `Q = ±sgn(ξ)·Ω'(κ)·E_osc`.
pub fn sommerfeld_fields(sol: &SommerfeldSolution) -> SommerfeldFields {
    let s = sol.time_sign();
    let e_osc = 0.5 * sol.amplitude * sol.amplitude;
    let q_plus = s * omega_prime(sol.kappa, 1.0) * e_osc;
    SommerfeldFields {
        e_osc,
        q_minus_inf: -q_plus,
        q_plus_inf: q_plus,
        theta: 2.0 * q_plus,
    }
}

/// Discrete analogue of the asymptotic radiation condition: accepts
/// exactly the coefficient pair `α = β = 0`.
pub fn check_asymptotic_radiation(alpha: Complex64, beta: Complex64) -> bool {
    alpha.norm() <= RADIATION_TOL && beta.norm() <= RADIATION_TOL
}
