//! Simulation and analysis of nearest-neighbour atomic chains.
//!
//! The crate covers the microscopic model ([`chain`]), symplectic time
//! stepping ([`integrator`]), dispersion and the forced Helmholtz problem
//! ([`spectral`]), exact harmonic travelling waves ([`twave`]), empirical
//! hyperbolic-scaling averages ([`thermo`]), closed-form phase transition
//! waves and their selection criteria ([`ptwave`]), and a Riemann-problem
//! harness ([`riemann`]). The [`cli`] module backs the `latticewave` binary.

pub mod chain;
pub mod cli;
pub mod error;
pub mod integrator;
pub mod ptwave;
pub mod riemann;
pub mod spectral;
pub mod thermo;
pub mod twave;

pub use chain::{ChainState, Forcing, Potential};
pub use error::{Error, Result};
pub use integrator::{simulate, verlet_step, SimConfig, Trajectory};
pub use ptwave::{CriteriaReport, PtWaveState, WaveType};
pub use spectral::{CriticalSpeeds, DispersionRoot, SommerfeldBranch, SommerfeldSolution};
pub use thermo::{ScalingConfig, ThermoFields};
pub use twave::{Direction, TravellingWaveSpec};
