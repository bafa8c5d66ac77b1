//! Simulation of an n-qubit conditional phase-flip (CPF) gate on a string of
//! three-level trapped ions sharing one vibrational mode, and of Grover search
//! built on top of it.
//!
//! The crate is layered bottom-up:
//!
//! * [`hilbert`]: basis bookkeeping for `(3 levels)^n ⊗ Fock(d)` and the
//!   logical `2^n` subspace.
//! * [`pulse`]: Gaussian pulses, the first red-sideband Hamiltonian, an RK4
//!   propagator and the closed-form evolutions it is checked against.
//! * [`cpf`]: the analytic gate diagonal (`α_s`, `β`), coefficient counting
//!   and the logical single-qubit / marking / diffusion operators.
//! * [`simulate`]: extraction of the logical gate matrix from pulse dynamics.
//! * [`metrics`]: fidelity and success probability, sweeps over the coupling
//!   ratio and optimal-ratio search.
//! * [`grover`]: Grover iterations with ideal or imperfect CPF gates.
//! * [`planner`]: trap/laser timing plans and the heating budget.
//! * [`validation`]: the oracle suite behind `trapsearch validate`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cpf;
pub mod error;
pub mod format;
pub mod grover;
pub mod hilbert;
pub mod metrics;
pub mod planner;
pub mod pulse;
pub mod simulate;
pub mod validation;

pub use cpf::{CpfDiagonal, GateParams, MarkedState};
pub use error::{Error, Result};
pub use grover::{GateMode, GroverConfig, GroverTrace, TracePoint};
pub use hilbert::{CompositeSpace, LevelLabel, LogicalIndexMap, Operator, StateVector};
pub use metrics::{GateQuality, SweepCurve};
pub use planner::{Regime, TimingPlan, TrapParams};
pub use pulse::{GaussianPulse, PulseArea, PulseSchedule};

pub use num_complex::Complex64 as C64;
