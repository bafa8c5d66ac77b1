//! Trap and laser timing plans for the CPF gate.
//!
//! The target ion needs `η Ω_eff √(2π) τ = π`. Trap frequency follows
//! `ν(n) = 2π · 0.5 MHz / n`; the control drive `Ω_m` is `ην/10` in the weak
//! regime and `ν/2` in the strong one. The quoted gate times are not
//! reproduced by `Ω_eff = Ω_m` alone, so one dimensionless `fit_constant`
//! (`Ω_eff = fit_constant · Ω_m`) is calibrated against the weak-regime n = 2
//! reference time and then frozen; see [`FIT_CONSTANT`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::format::{round_sig, sig};
use crate::pulse::DEFAULT_KAPPA;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Atomic mass unit (kg).
pub const AMU: f64 = 1.660_539_066_60e-27;

/// Lamb–Dicke parameter used by the timing table.
pub const DEFAULT_ETA: f64 = 0.1;
/// Motional heating time of the ground state (s).
pub const DEFAULT_HEATING_TIME: f64 = 4e-3;
pub const DEFAULT_GATES_PER_ITERATION: usize = 2;

/// Reference `t₀` values in ms for n = 2..=8, weak then strong regime.
pub const REFERENCE_T0_MS: [(Regime, [f64; 7]); 2] = [
    (
        Regime::Weak,
        [19.14, 28.71, 38.29, 47.86, 57.43, 67.00, 76.57],
    ),
    (
        Regime::Strong,
        [0.383, 0.574, 0.766, 0.957, 1.148, 1.340, 1.531],
    ),
];

/// `fit_constant` calibrated on (weak, n = 2, 19.14 ms) with `η = 0.1` and
/// `κ = 5`; equals [`calibrate_fit_constant`] on those inputs.
pub const FIT_CONSTANT: f64 = 0.208_433_793_313_183_26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `Ω_m ≪ ην`
    Weak,
    /// `Ω_m = ν/2`
    Strong,
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Regime::Weak),
            "strong" => Ok(Regime::Strong),
            other => invalid(format!(
                "unknown regime '{other}' (expected weak or strong)"
            )),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Weak => "weak",
            Regime::Strong => "strong",
        })
    }
}

/// `η = k √(ħ / (2 n ν M))`, with `k` in 1/m, `ν` in rad/s and `M` in kg.
pub fn lamb_dicke(k: f64, n: usize, nu: f64, mass: f64) -> Result<f64> {
    if n == 0 || !(k > 0.0) || !(nu > 0.0) || !(mass > 0.0) {
        return invalid("lamb_dicke needs positive k, n, nu and mass");
    }
    Ok(k * (HBAR / (2.0 * n as f64 * nu * mass)).sqrt())
}

/// Trap frequency `2π · 0.5 MHz / n` in rad/s.
pub fn trap_frequency(n: usize) -> f64 {
    2.0 * PI * 0.5e6 / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapParams {
    pub n: usize,
    /// rad/s
    pub nu: f64,
    pub eta: f64,
    pub regime: Regime,
    /// Control-ion peak Rabi frequency (rad/s).
    pub omega_m: f64,
}

impl TrapParams {
    /// Standard parameters for `n` ions in `regime`.
    pub fn standard(n: usize, regime: Regime, eta: f64) -> Result<Self> {
        if n < 2 {
            return invalid(format!("planning needs n >= 2, got {n}"));
        }
        let nu = trap_frequency(n);
        let omega_m = match regime {
            Regime::Weak => eta * nu / 10.0,
            Regime::Strong => nu / 2.0,
        };
        Self::new(n, nu, eta, regime, omega_m)
    }

    pub fn new(n: usize, nu: f64, eta: f64, regime: Regime, omega_m: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return invalid(format!(
                "Lamb-Dicke parameter must lie in (0, 1), got {eta}"
            ));
        }
        if !(nu > 0.0) || !(omega_m > 0.0) {
            return invalid("trap and Rabi frequencies must be positive");
        }
        let limit = match regime {
            Regime::Weak => eta * nu / 10.0,
            Regime::Strong => nu / (10.0 * eta),
        };
        if omega_m > limit * (1.0 + 1e-12) {
            return Err(Error::Infeasible(format!(
                "{regime} regime needs Omega_m <= {limit:.6e} rad/s, got {omega_m:.6e}"
            )));
        }
        Ok(Self {
            n,
            nu,
            eta,
            regime,
            omega_m,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingPlan {
    pub trap: TrapParams,
    pub fit_constant: f64,
    pub kappa: f64,
    /// Effective drive `fit_constant · Ω_m` (rad/s).
    pub omega_eff: f64,
    /// s
    pub tau: f64,
    /// s
    pub t0: f64,
    /// `2 t₀` (s)
    pub gate_time: f64,
    /// `gates_per_iteration · t₀` with the default two CPF gates (s).
    pub grover_iteration_time: f64,
    /// Default heating budget margin, see [`heating_budget`].
    pub heating_margin: f64,
}

/// `fit_constant` that maps the given reference `t₀` (s) onto the plan
/// formula.
pub fn calibrate_fit_constant(
    reference_t0: f64,
    n: usize,
    regime: Regime,
    eta: f64,
    kappa: f64,
) -> Result<f64> {
    let trap = TrapParams::standard(n, regime, eta)?;
    Ok(kappa * PI / (eta * trap.omega_m * (2.0 * PI).sqrt() * reference_t0))
}

pub fn plan(n: usize, regime: Regime, eta: f64, fit_constant: f64) -> Result<TimingPlan> {
    plan_for(
        TrapParams::standard(n, regime, eta)?,
        fit_constant,
        DEFAULT_KAPPA,
    )
}

pub fn plan_for(trap: TrapParams, fit_constant: f64, kappa: f64) -> Result<TimingPlan> {
    if !(fit_constant > 0.0) || !(kappa > 0.0) {
        return invalid("fit_constant and kappa must be positive");
    }
    let omega_eff = fit_constant * trap.omega_m;
    let tau = PI / (trap.eta * omega_eff * (2.0 * PI).sqrt());
    let t0 = kappa * tau;
    let gpi = DEFAULT_GATES_PER_ITERATION as f64;
    Ok(TimingPlan {
        trap,
        fit_constant,
        kappa,
        omega_eff,
        tau,
        t0,
        gate_time: 2.0 * t0,
        grover_iteration_time: gpi * t0,
        heating_margin: DEFAULT_HEATING_TIME / (gpi * t0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatingReport {
    pub heating_time: f64,
    pub gates_per_iteration: usize,
    pub iteration_time: f64,
    /// `heating_time / (gates_per_iteration · t₀)`
    pub margin: f64,
    pub feasible: bool,
}

pub fn heating_budget(
    plan: &TimingPlan,
    heating_time: f64,
    gates_per_iteration: usize,
) -> Result<HeatingReport> {
    if !(heating_time > 0.0) || gates_per_iteration == 0 {
        return invalid("heating time and gates per iteration must be positive");
    }
    let iteration_time = gates_per_iteration as f64 * plan.t0;
    let margin = heating_time / iteration_time;
    Ok(HeatingReport {
        heating_time,
        gates_per_iteration,
        iteration_time,
        margin,
        feasible: margin > 1.0,
    })
}

/// Plans for both regimes and n = 2..=8, weak first.
pub fn timing_table(eta: f64, fit_constant: f64) -> Result<Vec<TimingPlan>> {
    [Regime::Weak, Regime::Strong]
        .iter()
        .flat_map(|&r| (2..=8).map(move |n| (n, r)))
        .map(|(n, r)| plan(n, r, eta, fit_constant))
        .collect()
}

pub fn reference_t0_ms(regime: Regime, n: usize) -> Option<f64> {
    REFERENCE_T0_MS
        .iter()
        .find(|(r, _)| *r == regime)
        .and_then(|(_, row)| row.get(n.checked_sub(2)?).copied())
}

pub const TABLE_CSV_HEADER: &str = "regime,n,nu_MHz_over_2pi,Omega_m,t0_ms";

fn nu_mhz(p: &TimingPlan) -> f64 {
    p.trap.nu / (2.0 * PI) / 1e6
}

/// `Ω_m / 2π` in kHz.
fn omega_khz(p: &TimingPlan) -> f64 {
    p.trap.omega_m / (2.0 * PI) / 1e3
}

/// `Omega_m` is written in kHz/2π for both regimes.
pub fn table_csv(plans: &[TimingPlan]) -> String {
    let mut out = String::from(TABLE_CSV_HEADER);
    out.push('\n');
    for p in plans {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.trap.regime,
            p.trap.n,
            sig(nu_mhz(p)),
            sig(omega_khz(p)),
            sig(p.t0 * 1e3)
        ));
    }
    out
}

pub fn table_json(plans: &[TimingPlan]) -> Value {
    Value::Array(
        plans
            .iter()
            .map(|p| {
                json!({
                    "regime": p.trap.regime.to_string(),
                    "n": p.trap.n,
                    "nu_MHz_over_2pi": round_sig(nu_mhz(p)),
                    "Omega_m": round_sig(omega_khz(p)),
                    "t0_ms": round_sig(p.t0 * 1e3),
                })
            })
            .collect(),
    )
}
