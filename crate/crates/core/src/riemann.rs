//! Riemann problems for the bi-quadratic chain.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{well_sign, ChainState, Potential};
use crate::error::{Error, Result};
use crate::integrator::{simulate, SimConfig, Trajectory, DEFAULT_DT};
use crate::ptwave::{
    causality_wave, classify_type, close_family, evaluate_criteria, jump_conditions,
    CriteriaReport, PtWaveState, WaveType,
};
use crate::thermo::{
    average_trajectory, production_xi, CellFields, FieldSlice, ScalingConfig, ThermoFields,
};

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_slices() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiemannConfig {
    pub r_minus: f64,
    pub r_plus: f64,
    pub v_minus: f64,
    pub v_plus: f64,
    /// Number of particles; the lattice is `|j| ≤ N/2`.
    pub n: usize,
    /// Final time in units of `N`.
    pub t_fin_bar: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Number of field slices after the initial one.
    #[serde(default = "default_slices")]
    pub slices: usize,
    #[serde(default)]
    pub scaling: Option<ScalingConfig>,
}

impl RiemannConfig {
    pub fn new(
        r_minus: f64,
        r_plus: f64,
        v_minus: f64,
        v_plus: f64,
        n: usize,
        t_fin_bar: f64,
    ) -> Self {
        RiemannConfig {
            r_minus,
            r_plus,
            v_minus,
            v_plus,
            n,
            t_fin_bar,
            dt: DEFAULT_DT,
            slices: default_slices(),
            scaling: None,
        }
    }

    pub fn scaling(&self) -> ScalingConfig {
        self.scaling
            .unwrap_or_else(|| ScalingConfig::for_particles(self.n))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("r_minus", self.r_minus),
            ("r_plus", self.r_plus),
            ("v_minus", self.v_minus),
            ("v_plus", self.v_plus),
        ] {
            if !x.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        if self.n < 500 {
            return Err(Error::Config(format!(
                "N must be at least 500, got {}",
                self.n
            )));
        }
        if !(self.t_fin_bar > 0.0 && self.t_fin_bar < 0.5) {
            return Err(Error::Config(format!(
                "t_fin_bar must lie in (0, 1/2), got {}",
                self.t_fin_bar
            )));
        }
        if self.slices < 8 {
            return Err(Error::Config(format!(
                "need at least 8 slices, got {}",
                self.slices
            )));
        }
        self.scaling().validate()
    }
}

/// Simulated trajectory and its averaged fields, one slice per snapshot.
#[derive(Clone, Debug)]
pub struct RiemannRun {
    pub config: RiemannConfig,
    pub trajectory: Trajectory,
    pub fields: ThermoFields,
}

pub fn run_riemann(cfg: &RiemannConfig) -> Result<RiemannRun> {
    cfg.validate()?;
    let half = (cfg.n / 2) as i64;
    let initial = ChainState::riemann(
        -half,
        half,
        cfg.r_minus,
        cfg.r_plus,
        cfg.v_minus,
        cfg.v_plus,
    )?;
    let t_end = cfg.t_fin_bar * cfg.n as f64;
    let steps = (t_end / cfg.dt).round() as usize;
    let stride = (steps / cfg.slices).max(1);
    let sim = SimConfig::new(Potential::BiQuadratic, initial, t_end)
        .with_dt(cfg.dt)
        .with_stride(stride);
    let trajectory = simulate(&sim)?;
    let mut fields = average_trajectory(&trajectory, &cfg.scaling())?;
    production_xi(&mut fields, &Potential::BiQuadratic);
    Ok(RiemannRun {
        config: cfg.clone(),
        trajectory,
        fields,
    })
}

/// Runs several configurations in parallel.
pub fn run_batch(cfgs: &[RiemannConfig]) -> Vec<Result<RiemannRun>> {
    cfgs.par_iter().map(run_riemann).collect()
}

/// Relative tolerance for plateau membership, as a fraction of the range of
/// each field over the lattice.
pub const PLATEAU_TOL: f64 = 0.05;

/// Absolute floor of the plateau tolerance.
pub const PLATEAU_FLOOR: f64 = 1e-3;

/// Minimal plateau length in cells.
pub const MIN_PLATEAU_CELLS: usize = 8;

/// Number of final slices used for speed regression.
pub const REGRESSION_SLICES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveKind {
    Contact,
    OscillationFront,
    PhaseTransition,
    Unclassified,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub xi_start: f64,
    pub xi_end: f64,
    pub r: f64,
    pub v: f64,
    pub e_osc: f64,
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectedWave {
    pub kind: WaveKind,
    /// Location at the final time.
    pub xi: f64,
    pub speed: f64,
    /// Extent of the transition region at the final time.
    pub xi_start: f64,
    pub xi_end: f64,
    /// `(τ, ξ)` of the wave in the slices used for the speed.
    pub track: Vec<(f64, f64)>,
}

/// Plateaus and the waves between them, ordered in `ξ`. Wave `k` connects
/// plateaus `k` and `k + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveDecomposition {
    pub tau: f64,
    pub states: Vec<Plateau>,
    pub waves: Vec<DetectedWave>,
    /// Fewer than two plateaus were found.
    pub degenerate: bool,
}

impl WaveDecomposition {
    pub fn phase_transitions(&self) -> Vec<usize> {
        (0..self.waves.len())
            .filter(|&k| self.waves[k].kind == WaveKind::PhaseTransition)
            .collect()
    }
}

fn field_range<'a>(
    cells: impl Iterator<Item = &'a CellFields>,
    f: impl Fn(&CellFields) -> f64,
) -> f64 {
    let (lo, hi) = cells.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
        (lo.min(f(c)), hi.max(f(c)))
    });
    if hi > lo {
        hi - lo
    } else {
        0.0
    }
}

/// Mean of the middle 60% of `xs`.
fn trimmed_mean(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let cut = xs.len() / 5;
    let mid = &xs[cut..xs.len() - cut];
    mid.iter().sum::<f64>() / mid.len() as f64
}

fn plateau_of(cells: &[CellFields]) -> Plateau {
    // the outer fifth on each side is influenced by the neighbouring waves
    let cut = cells.len() / 5;
    let inner = &cells[cut..cells.len() - cut];
    Plateau {
        xi_start: cells[0].xi,
        xi_end: cells[cells.len() - 1].xi,
        r: trimmed_mean(inner.iter().map(|c| c.r).collect()),
        v: trimmed_mean(inner.iter().map(|c| c.v).collect()),
        e_osc: trimmed_mean(inner.iter().map(|c| c.e_osc).collect()),
        q: trimmed_mean(inner.iter().map(|c| c.q).collect()),
    }
}

/// Linear-interpolated crossing of `level` by `f` nearest to `target`,
/// searched in `[lo, hi]`.
fn crossing(
    cells: &[CellFields],
    f: impl Fn(&CellFields) -> f64,
    level: f64,
    lo: f64,
    hi: f64,
    target: f64,
) -> Option<f64> {
    let mut best: Option<f64> = None;
    for w in cells.windows(2) {
        if w[1].xi < lo || w[0].xi > hi {
            continue;
        }
        let (a, b) = (f(&w[0]) - level, f(&w[1]) - level);
        if a == b || a * b > 0.0 {
            continue;
        }
        let x = w[0].xi + (w[1].xi - w[0].xi) * a / (a - b);
        if best.is_none_or(|y| (x - target).abs() < (y - target).abs()) {
            best = Some(x);
        }
    }
    best
}

fn regression_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mt = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mx = points.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = points.iter().map(|p| (p.0 - mt) * (p.1 - mx)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mt).powi(2)).sum();
    num / den
}

/// Splits the final slice into plateaus and waves and tracks every wave
/// through the last slices to estimate its speed.
pub fn decompose(fields: &ThermoFields) -> Result<WaveDecomposition> {
    let last = fields.last();
    let cells: Vec<CellFields> = last
        .cells
        .iter()
        .filter(|c| !c.truncated)
        .copied()
        .collect();
    if cells.len() < MIN_PLATEAU_CELLS {
        return Err(Error::InvalidState(
            "too few cells for a decomposition".into(),
        ));
    }
    let tol = |range: f64| (PLATEAU_TOL * range).max(PLATEAU_FLOOR);
    let tol_r = tol(field_range(cells.iter(), |c| c.r));
    let tol_v = tol(field_range(cells.iter(), |c| c.v));
    let tol_e = tol(field_range(cells.iter(), |c| c.e_osc));

    // greedy runs of cells close to the running mean of the run
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    let (mut sr, mut sv, mut se) = (0.0, 0.0, 0.0);
    for (m, c) in cells.iter().enumerate() {
        let n = (m - start) as f64;
        let fits = m == start
            || ((c.r - sr / n).abs() <= tol_r
                && (c.v - sv / n).abs() <= tol_v
                && (c.e_osc - se / n).abs() <= tol_e);
        if !fits {
            runs.push((start, m));
            start = m;
            (sr, sv, se) = (0.0, 0.0, 0.0);
        }
        sr += c.r;
        sv += c.v;
        se += c.e_osc;
    }
    runs.push((start, cells.len()));

    let mut plateaus: Vec<(usize, usize)> = Vec::new();
    for (a, b) in runs.into_iter().filter(|(a, b)| b - a >= MIN_PLATEAU_CELLS) {
        // neighbouring runs with matching values are one plateau split by noise
        if let Some(prev) = plateaus.last_mut() {
            let p = plateau_of(&cells[prev.0..prev.1]);
            let q = plateau_of(&cells[a..b]);
            if (p.r - q.r).abs() <= tol_r
                && (p.v - q.v).abs() <= tol_v
                && (p.e_osc - q.e_osc).abs() <= tol_e
            {
                prev.1 = b;
                continue;
            }
        }
        plateaus.push((a, b));
    }

    let states: Vec<Plateau> = plateaus
        .iter()
        .map(|&(a, b)| plateau_of(&cells[a..b]))
        .collect();
    let tau_f = last.tau;
    let mut tracked: Vec<&FieldSlice> = fields
        .slices
        .iter()
        .rev()
        .filter(|s| s.tau > 0.0)
        .take(REGRESSION_SLICES)
        .collect();
    tracked.reverse();
    let margin = 2.0 * fields.h_xi().max(fields.epsilon);

    let mut waves = Vec::new();
    for k in 1..plateaus.len() {
        let (left, right) = (&states[k - 1], &states[k]);
        let xi_start = cells[plateaus[k - 1].1 - 1].xi;
        let xi_end = cells[plateaus[k].0].xi;
        let kind = if well_sign(left.r) != well_sign(right.r) {
            WaveKind::PhaseTransition
        } else if (left.r - right.r).abs() <= tol_r && (left.e_osc - right.e_osc).abs() > tol_e {
            WaveKind::OscillationFront
        } else if left.e_osc.abs() <= tol_e && right.e_osc.abs() <= tol_e {
            WaveKind::Contact
        } else {
            WaveKind::Unclassified
        };
        let locate = |s: &FieldSlice| -> Option<f64> {
            let scale = s.tau / tau_f;
            let (lo, hi) = (xi_start * scale - margin, xi_end * scale + margin);
            let target = 0.5 * (lo + hi);
            match kind {
                WaveKind::PhaseTransition => crossing(&s.cells, |c| c.r, 0.0, lo, hi, target),
                WaveKind::OscillationFront => crossing(
                    &s.cells,
                    |c| c.e_osc,
                    0.5 * (left.e_osc + right.e_osc),
                    lo,
                    hi,
                    target,
                ),
                _ => crossing(&s.cells, |c| c.r, 0.5 * (left.r + right.r), lo, hi, target),
            }
        };
        let track: Vec<(f64, f64)> = tracked
            .iter()
            .filter_map(|s| locate(s).map(|x| (s.tau, x)))
            .collect();
        let xi = locate(last).unwrap_or(0.5 * (xi_start + xi_end));
        let speed = if track.len() >= 2 {
            regression_slope(&track)
        } else {
            xi / tau_f
        };
        waves.push(DetectedWave {
            kind,
            xi,
            speed,
            xi_start,
            xi_end,
            track,
        });
    }

    Ok(WaveDecomposition {
        tau: tau_f,
        degenerate: states.len() < 2,
        states,
        waves,
    })
}

/// Measured asymptotic fields around a detected phase transition wave.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredWave {
    pub c_ph: f64,
    pub r_minus: f64,
    pub r_plus: f64,
    pub v_minus: f64,
    pub v_plus: f64,
    pub a_minus: f64,
    pub a_plus: f64,
    pub q_minus: f64,
    pub q_plus: f64,
    /// `∫Ξ dξ` across the interface, averaged over the tracked slices.
    pub xi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deviations {
    pub r_minus: f64,
    pub r_plus: f64,
    pub v_minus: f64,
    pub v_plus: f64,
    pub a_minus: f64,
    pub xi: f64,
    /// Amplitude ahead of the interface relative to the one behind it.
    pub quiet_side: f64,
}

impl Deviations {
    pub fn max(&self) -> f64 {
        [
            self.r_minus,
            self.r_plus,
            self.v_minus,
            self.v_plus,
            self.a_minus,
            self.xi,
            self.quiet_side,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub const DEFAULT_CAUSALITY_TOL: f64 = 0.1;
pub const JUMP_TOL: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CausalityComparison {
    pub measured: MeasuredWave,
    pub predicted: PtWaveState,
    pub deviations: Deviations,
    pub tolerance: f64,
    pub pass: bool,
    /// Relative deviations of the measured `⟦R⟧`, `⟦V⟧` from the jump
    /// conditions at the measured speed.
    pub jump_r_deviation: f64,
    pub jump_v_deviation: f64,
    pub jumps_pass: bool,
    pub wave_type: WaveType,
    /// Criteria evaluated on the measured speed and amplitudes.
    pub criteria: CriteriaReport,
}

fn rel(measured: f64, predicted: f64) -> f64 {
    (measured - predicted).abs() / predicted.abs()
}

/// Compares the single phase transition wave of `dec` with the causality
/// wave at the measured speed and mean velocity.
pub fn compare_to_causality(
    dec: &WaveDecomposition,
    fields: &ThermoFields,
    tolerance: f64,
) -> Result<CausalityComparison> {
    let pts = dec.phase_transitions();
    if pts.len() != 1 {
        return Err(Error::NotApplicable(format!(
            "expected one phase transition wave, found {}",
            pts.len()
        )));
    }
    let k = pts[0];
    let wave = &dec.waves[k];
    let (minus, plus) = (&dec.states[k], &dec.states[k + 1]);
    let c = wave.speed;
    let mean_v = 0.5 * (minus.v + plus.v);
    let predicted = causality_wave(c, mean_v)?;
    let amplitude = |p: &Plateau| (2.0 * p.e_osc.max(0.0)).sqrt();

    // Ξ concentrates at the interface; integrate over the transition region
    let tau_f = dec.tau;
    let mut xi_sum = 0.0;
    let mut xi_count = 0;
    for s in fields
        .slices
        .iter()
        .filter(|s| s.tau > 0.0)
        .rev()
        .take(REGRESSION_SLICES)
    {
        let scale = s.tau / tau_f;
        let pad = fields.h_xi();
        let (lo, hi) = (wave.xi_start * scale - pad, wave.xi_end * scale + pad);
        let xs: Vec<&CellFields> = s
            .cells
            .iter()
            .filter(|c| c.xi >= lo && c.xi <= hi)
            .collect();
        let integral: f64 = xs
            .windows(2)
            .map(|w| 0.5 * (w[0].production + w[1].production) * (w[1].xi - w[0].xi))
            .sum();
        xi_sum += integral;
        xi_count += 1;
    }
    let measured = MeasuredWave {
        c_ph: c,
        r_minus: minus.r,
        r_plus: plus.r,
        v_minus: minus.v,
        v_plus: plus.v,
        a_minus: amplitude(minus),
        a_plus: amplitude(plus),
        q_minus: minus.q,
        q_plus: plus.q,
        xi: xi_sum / xi_count.max(1) as f64,
    };
    let (a_behind_pred, a_behind, a_ahead) = if c >= 0.0 {
        (predicted.a_minus, measured.a_minus, measured.a_plus)
    } else {
        (predicted.a_plus, measured.a_plus, measured.a_minus)
    };
    let deviations = Deviations {
        r_minus: rel(measured.r_minus, predicted.r_minus),
        r_plus: rel(measured.r_plus, predicted.r_plus),
        v_minus: rel(measured.v_minus, predicted.v_minus),
        v_plus: rel(measured.v_plus, predicted.v_plus),
        a_minus: rel(a_behind, a_behind_pred),
        xi: rel(measured.xi, predicted.xi),
        quiet_side: a_ahead / a_behind.max(f64::MIN_POSITIVE),
    };
    let (jump_r, jump_v) = jump_conditions(c)?;
    let jump_r_deviation = rel(plus.r - minus.r, jump_r);
    let jump_v_deviation = rel(plus.v - minus.v, jump_v);
    // amplitudes below the tolerance count as an oscillation-free side
    let quiet = |a: f64| if a < tolerance * a_behind { 0.0 } else { a };
    let measured_state = close_family(c, quiet(measured.a_minus), quiet(measured.a_plus), mean_v)?;
    Ok(CausalityComparison {
        measured,
        predicted,
        pass: deviations.max() < tolerance,
        deviations,
        tolerance,
        jump_r_deviation,
        jump_v_deviation,
        jumps_pass: jump_r_deviation < JUMP_TOL && jump_v_deviation < JUMP_TOL,
        wave_type: classify_type(c)?,
        criteria: evaluate_criteria(&measured_state),
    })
}

/// Summary written by the command-line front end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiemannReport {
    pub config: RiemannConfig,
    pub decomposition: WaveDecomposition,
    /// Speed of the phase transition wave, if exactly one was found.
    pub c_ph: Option<f64>,
    pub wave_type: Option<WaveType>,
    pub comparison: Option<CausalityComparison>,
    /// Why no comparison was made.
    pub note: Option<String>,
}

pub fn analyze(run: &RiemannRun, tolerance: f64) -> Result<RiemannReport> {
    let decomposition = decompose(&run.fields)?;
    let (comparison, note) = match compare_to_causality(&decomposition, &run.fields, tolerance) {
        Ok(c) => (Some(c), None),
        Err(e @ (Error::NotApplicable(_) | Error::SpeedDomain { .. })) => {
            (None, Some(e.to_string()))
        }
        Err(e) => return Err(e),
    };
    Ok(RiemannReport {
        config: run.config.clone(),
        c_ph: comparison.as_ref().map(|c| c.measured.c_ph),
        wave_type: comparison.as_ref().map(|c| c.wave_type),
        decomposition,
        comparison,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let ok = RiemannConfig::new(-4.0, 1.0, 1.0, -1.0, 1000, 0.4);
        assert!(ok.validate().is_ok());
        assert_eq!(ok.scaling(), ScalingConfig::for_particles(1000));
        let bad = [
            RiemannConfig {
                n: 499,
                ..ok.clone()
            },
            RiemannConfig {
                t_fin_bar: 0.5,
                ..ok.clone()
            },
            RiemannConfig {
                t_fin_bar: 0.0,
                ..ok.clone()
            },
            RiemannConfig {
                slices: 7,
                ..ok.clone()
            },
            RiemannConfig {
                r_plus: f64::NAN,
                ..ok.clone()
            },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{cfg:?}");
        }
    }

    #[test]
    fn config_json_defaults() {
        let cfg: RiemannConfig = serde_json::from_str(
            r#"{"r_minus":-4,"r_plus":1,"v_minus":1,"v_plus":-1,"n":4000,"t_fin_bar":0.4}"#,
        )
        .unwrap();
        assert_eq!(cfg, RiemannConfig::new(-4.0, 1.0, 1.0, -1.0, 4000, 0.4));
        assert!(serde_json::from_str::<RiemannConfig>(r#"{"r_minus":-4,"r_plus":1,"v_minus":1,"v_plus":-1,"n":4000,"t_fin_bar":0.4,"extra":1}"#).is_err());
    }

    #[test]
    fn wave_kinds_are_kebab_case() {
        assert_eq!(
            serde_json::to_string(&WaveKind::PhaseTransition).unwrap(),
            "\"phase-transition\""
        );
        assert_eq!(
            serde_json::to_string(&WaveKind::OscillationFront).unwrap(),
            "\"oscillation-front\""
        );
    }

    #[test]
    fn deviations_max_includes_quiet_side() {
        let d = Deviations {
            r_minus: 0.01,
            r_plus: 0.02,
            v_minus: 0.0,
            v_plus: 0.0,
            a_minus: 0.03,
            xi: 0.04,
            quiet_side: 0.2,
        };
        assert_eq!(d.max(), 0.2);
    }

    #[test]
    fn run_produces_requested_slices() {
        let mut cfg = RiemannConfig::new(1.0, 1.0, 0.0, 0.0, 500, 0.1);
        cfg.slices = 8;
        let run = run_riemann(&cfg).unwrap();
        assert_eq!(run.fields.slices.len(), 9);
        assert!((run.fields.last().tau - 0.1).abs() < 1e-12);
    }
}
