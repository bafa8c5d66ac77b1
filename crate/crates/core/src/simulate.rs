//! Logical gate matrix obtained by actually driving the ions.
//!
//! Each logical basis state is embedded with the mode in `|0⟩`, propagated
//! through the gate schedule with RK4, and projected back onto the logical
//! subspace. The columns form the (sub-unitary) logical gate.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::cpf::{cpf_diagonal, GateParams};
use crate::error::{invalid, Result};
use crate::hilbert::{
    logical_levels, logical_project, CompositeSpace, LogicalIndexMap, StateVector,
};
use crate::pulse::{evolve_adaptive_with, Propagator, PulseSchedule, DEFAULT_KAPPA, DEFAULT_STEPS};

/// Largest `n` accepted by [`simulate_cpf_gate`].
pub const MAX_SIMULATED_QUBITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub eta: f64,
    pub fock_dim: usize,
    /// Pulse width; only sets the time unit.
    pub tau: f64,
    /// `t₀ / τ`.
    pub kappa: f64,
    /// Starting RK4 step count; doubled until the drift target is met.
    pub steps: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            eta: 0.1,
            fock_dim: 4,
            tau: 1e-3,
            kappa: DEFAULT_KAPPA,
            steps: DEFAULT_STEPS,
        }
    }
}

/// Simulated gate and its comparison against [`cpf_diagonal`].
#[derive(Debug, Clone)]
pub struct SimulatedGate {
    pub params: GateParams,
    /// `U[(row, col)] = ⟨row| U |col⟩` on the logical subspace.
    pub logical: Array2<C64>,
    /// `max_b |U_bb − A_b|`.
    pub max_diagonal_deviation: f64,
    /// `max_{a≠b} |U_ab|`.
    pub max_off_diagonal: f64,
    /// Largest norm² leaving the logical subspace from any basis input.
    pub max_leakage: f64,
    /// Largest RK4 step count used.
    pub steps: usize,
    /// Largest norm drift over all propagations.
    pub norm_drift: f64,
}

impl SimulatedGate {
    /// `U` at the all-ones input.
    pub fn all_ones_entry(&self) -> C64 {
        let last = self.logical.nrows() - 1;
        self.logical[(last, last)]
    }
}

/// Bound on off-diagonal logical amplitudes:
/// `m (1 − cos(√(1+m²) π/m)) / (1 + m²)`.
pub fn off_diagonal_envelope(m: f64) -> f64 {
    let m2 = m * m;
    m * (1.0 - ((1.0 + m2).sqrt() * std::f64::consts::PI / m).cos()) / (1.0 + m2)
}

pub fn simulate_cpf_gate(params: GateParams, opts: SimOptions) -> Result<SimulatedGate> {
    let n = params.n;
    if n > MAX_SIMULATED_QUBITS {
        return invalid(format!(
            "pulse simulation is limited to n <= {MAX_SIMULATED_QUBITS}, got {n}"
        ));
    }
    let space = CompositeSpace::new(n, opts.fock_dim)?;
    let schedule = PulseSchedule::cpf(n, params.m, opts.eta, opts.tau, opts.kappa)?;
    let prop = Propagator::new(&schedule, &space)?;
    let map = LogicalIndexMap::new(space);
    let dim = 1usize << n;

    let columns = (0..dim)
        .into_par_iter()
        .map(|bits| {
            let input = StateVector::basis(space, &logical_levels(bits, n), 0)?;
            let ev = evolve_adaptive_with(&prop, &input, opts.steps)?;
            let (col, leak) = logical_project(&ev.state, &map)?;
            Ok((col, leak, ev.steps, ev.norm_drift))
        })
        .collect::<Result<Vec<_>>>()?;

    let analytic = cpf_diagonal(params);
    let mut logical = Array2::zeros((dim, dim));
    let (mut max_leakage, mut steps, mut norm_drift) = (0.0f64, 0usize, 0.0f64);
    for (c, (col, leak, s, drift)) in columns.into_iter().enumerate() {
        logical.column_mut(c).assign(&col);
        max_leakage = max_leakage.max(leak);
        steps = steps.max(s);
        norm_drift = norm_drift.max(drift);
    }
    let mut max_diagonal_deviation = 0.0f64;
    let mut max_off_diagonal = 0.0f64;
    for ((r, c), v) in logical.indexed_iter() {
        if r == c {
            max_diagonal_deviation = max_diagonal_deviation.max((v - analytic.entry(r)).norm());
        } else {
            max_off_diagonal = max_off_diagonal.max(v.norm());
        }
    }
    Ok(SimulatedGate {
        params,
        logical,
        max_diagonal_deviation,
        max_off_diagonal,
        max_leakage,
        steps,
        norm_drift,
    })
}
