//! Simulation and analysis of periodic beta-Fermi-Pasta-Ulam chains in thermal
//! equilibrium.
//!
//! The crate is organised by subsystem:
//!
//! * [`chain`]: physical-space state, energies, forces, initial conditions and
//!   the energy-localization diagnostic.
//! * [`integrator`]: split-operator composition schemes (sixth-order Yoshida).
//! * [`thermo`]: canonical-ensemble bond moments, temperature, renormalization
//!   factors and effective nonlinearity.
//! * [`spectral`]: Fourier / normal / renormalized mode transforms and the
//!   statistical estimators built on them.
//! * [`resonance`]: four-wave resonance manifolds with Umklapp branches.
//! * [`linewidth`]: the near-resonance closure for the two-point correlation.
//! * [`breather`]: frequency filtering and discrete-breather tracking.
//! * [`chaos`]: Lyapunov exponents of the chain and of the logistic map.

pub mod breather;
pub mod chain;
pub mod chaos;
pub mod error;
pub mod integrator;
pub mod linewidth;
pub mod quadrature;
pub mod resonance;
pub mod spectral;
pub mod thermo;

pub use chain::{ChainState, ModelParams, SiteEnergy};
pub use error::{FpuError, Result};
pub use integrator::{CompositionScheme, Integrator};
pub use num_complex::Complex64;
pub use thermo::ThermoSolution;
