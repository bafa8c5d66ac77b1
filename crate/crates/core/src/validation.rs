//! Oracle suite behind `trapsearch validate`.
//!
//! Every check compares two independent routes to the same quantity. Checks of
//! kind [`CheckKind::Reference`] compare against published reference numbers;
//! they are reported but do not decide the suite's verdict.

use std::f64::consts::PI;

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use crate::cpf::{
    alpha, binomial, count_coefficient, diffusion, ideal_cpf, mark_operator, max_abs_diff,
    GateParams, MarkedState,
};
use crate::error::Result;
use crate::format::sig;
use crate::grover::{
    ideal_marked_probability, iteration_operator, optimal_iterations, reduced_circuit, run_search,
    standard_circuit, GateMode, GroverConfig,
};
use crate::metrics::{
    fidelity_oracle, gate_fidelity, gate_success, linear_grid, optimal_m_default, success_oracle,
    sweep, sweep_csv, OPTIMAL_M_RANGE, OPTIMAL_M_STEP,
};
use crate::planner::{
    heating_budget, reference_t0_ms, table_csv, timing_table, DEFAULT_ETA, DEFAULT_HEATING_TIME,
    FIT_CONSTANT,
};
use crate::pulse::closed_form_multi_g;
use crate::simulate::{off_diagonal_envelope, simulate_cpf_gate, SimOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Oracle,
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    /// True when every oracle check passed.
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.kind == CheckKind::Oracle)
            .all(|c| c.passed)
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let status = match (c.passed, c.kind) {
                (true, _) => "PASS",
                (false, CheckKind::Oracle) => "FAIL",
                (false, CheckKind::Reference) => "DIFF",
            };
            let kind = match c.kind {
                CheckKind::Oracle => "oracle",
                CheckKind::Reference => "reference",
            };
            out.push_str(&format!(
                "{status}  {:<width$}  {kind:<9}  {}\n",
                c.name, c.detail
            ));
        }
        out
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("name,kind,passed,detail\n");
        for c in &self.checks {
            let kind = match c.kind {
                CheckKind::Oracle => "oracle",
                CheckKind::Reference => "reference",
            };
            out.push_str(&format!(
                "{},{kind},{},\"{}\"\n",
                c.name,
                c.passed,
                c.detail.replace('"', "'")
            ));
        }
        out
    }
}

type CheckFn = fn() -> Result<Check>;

fn oracle(name: &'static str, passed: bool, detail: String) -> Result<Check> {
    Ok(Check {
        name,
        kind: CheckKind::Oracle,
        passed,
        detail,
    })
}

fn reference(name: &'static str, passed: bool, detail: String) -> Result<Check> {
    Ok(Check {
        name,
        kind: CheckKind::Reference,
        passed,
        detail,
    })
}

/// α_s from the formula against the Λ-system closed form at `ηϑ_n = π`.
fn coefficient_closed_form() -> Result<Check> {
    let eta = 0.1;
    let theta_n = PI / eta;
    let mut worst = 0.0f64;
    for &m in &[0.01, 0.0122, 0.05, 0.1, 0.2] {
        for s in 1..=11 {
            let amp = closed_form_multi_g(&vec![theta_n / m; s], theta_n, eta)?;
            worst = worst
                .max((amp.diagonal.re - alpha(s, m)?).abs())
                .max(amp.diagonal.im.abs());
        }
    }
    oracle(
        "alpha_vs_lambda_system",
        worst < 1e-12,
        format!("max |diff| = {:.3e}", worst),
    )
}

/// Counts by enumeration, Pascal recurrence and the sum rule.
fn coefficient_counts() -> Result<Check> {
    let mut ok = true;
    for n in 3..=12usize {
        for s in 0..=n {
            let enumerated = (0usize..1 << n)
                .filter(|b| {
                    b & 1 == 1
                        && (b >> 1).count_zeros() as usize - (usize::BITS as usize - (n - 1)) == s
                })
                .count() as u64;
            let expected = if (2..n).contains(&s) { enumerated } else { 0 };
            ok &= count_coefficient(n, s) == expected;
            if n > 3 && (3..n).contains(&s) {
                ok &= count_coefficient(n, s)
                    == count_coefficient(n - 1, s) + count_coefficient(n - 1, s - 1);
            }
        }
        let total: u64 = (2..n).map(|s| count_coefficient(n, s)).sum();
        ok &= total == (1u64 << (n - 1)) - n as u64;
        ok &= (2..n).all(|s| count_coefficient(n, s) == binomial((n - 1) as u64, s as u64));
    }
    oracle(
        "count_coefficient",
        ok,
        "enumeration, Pascal and sum rule for n <= 12".into(),
    )
}

fn formula_vs_state() -> Result<Check> {
    let grid = linear_grid(0.004, 0.2, 50)?;
    let mut worst = 0.0f64;
    for n in 3..=9 {
        for &m in &grid {
            worst = worst
                .max((gate_fidelity(n, m)? - fidelity_oracle(n, m)?).abs())
                .max((gate_success(n, m)? - success_oracle(n, m)?).abs());
        }
    }
    oracle(
        "fidelity_vs_state_vector",
        worst < 1e-12,
        format!("n = 3..9, 50 m values, max |diff| = {:.3e}", worst),
    )
}

/// Golden-section optimum against a plain scan at the same grid step.
fn optimal_ratio() -> Result<Check> {
    let mut ok = true;
    let mut parts = Vec::new();
    let (lo, hi) = OPTIMAL_M_RANGE;
    let count = ((hi - lo) / OPTIMAL_M_STEP).round() as usize;
    for n in [3, 6, 9] {
        let best = optimal_m_default(n)?;
        let mut brute = (lo, f64::NEG_INFINITY);
        for i in 0..=count {
            let m = lo + (hi - lo) * i as f64 / count as f64;
            let f = gate_fidelity(n, m)?;
            if f > brute.1 {
                brute = (m, f);
            }
        }
        ok &= best.fidelity >= brute.1 - 1e-15 && (best.m - brute.0).abs() <= OPTIMAL_M_STEP;
        parts.push(format!("n={} m*={}", n, sig(best.m)));
    }
    oracle("optimal_m_vs_grid", ok, parts.join("; "))
}

fn dynamics() -> Result<Check> {
    let params = GateParams::new(3, 0.1)?;
    let gate = simulate_cpf_gate(params, SimOptions::default())?;
    let envelope = off_diagonal_envelope(params.m);
    let flip = (gate.all_ones_entry() + 1.0).norm();
    let ok = gate.max_diagonal_deviation < 1e-3
        && gate.max_off_diagonal <= envelope + 1e-3
        && flip < 1e-4;
    oracle(
        "pulse_dynamics_n3",
        ok,
        format!(
            "diag dev {:.3e}, off-diag {:.3e} (envelope {:.3e}), |U_11..1 + 1| {:.3e}",
            gate.max_diagonal_deviation, gate.max_off_diagonal, envelope, flip
        ),
    )
}

fn grover_closed_form() -> Result<Check> {
    let mut worst = 0.0f64;
    for n in 2..=10 {
        let marked = MarkedState::new(n, (1 << n) - 1)?;
        let cfg = GroverConfig::new(n, marked, 2 * optimal_iterations(n), GateMode::Ideal)?;
        for p in &run_search(&cfg)?.points {
            worst = worst.max((p.p_marked - ideal_marked_probability(n, p.k)).abs());
        }
    }
    oracle(
        "grover_vs_closed_form",
        worst < 1e-12,
        format!("n = 2..10, max |diff| = {:.3e}", worst),
    )
}

fn circuit_identities() -> Result<Check> {
    let n = 4;
    let dim = 1 << n;
    let base = ideal_cpf(n);
    let mut worst = 0.0f64;
    let mut expected_d: Array2<f64> = Array2::from_elem((dim, dim), 2.0 / dim as f64);
    for i in 0..dim {
        expected_d[(i, i)] -= 1.0;
    }
    worst = worst.max(max_abs_diff(&diffusion(n, &base)?, &expected_d));
    for rho in 0..dim {
        let marked = MarkedState::new(n, rho)?;
        let mut expected: Array2<f64> = Array2::eye(dim);
        expected[(rho, rho)] = -1.0;
        worst = worst.max(max_abs_diff(&mark_operator(&marked, &base)?, &expected));
        for k in 1..=3 {
            let q = iteration_operator(&marked, &base)?;
            let qk = (1..k).fold(q.clone(), |acc, _| acc.dot(&q));
            worst = worst.max(max_abs_diff(&standard_circuit(&marked, &base, k), &qk));
            worst = worst.max(max_abs_diff(&reduced_circuit(&marked, &base, k)?, &qk));
        }
    }
    oracle(
        "circuit_identities_n4",
        worst < 1e-12,
        format!("max |diff| = {:.3e}", worst),
    )
}

fn reference_coefficients() -> Result<Check> {
    let quoted = [(2, 0.99952), (3, 0.99516), (1, 0.99988)];
    let mut parts = Vec::new();
    let mut ok = true;
    for (s, q) in quoted {
        let a = alpha(s, 0.1)?;
        ok &= (a - q).abs() <= 1e-5;
        parts.push(format!("alpha_{s}={:.7} (quoted {q})", a));
    }
    reference("coefficients_m0.1", ok, parts.join("; "))
}

fn timing_reference() -> Result<Check> {
    let plans = timing_table(DEFAULT_ETA, FIT_CONSTANT)?;
    let mut worst = 0.0f64;
    for p in &plans {
        if let Some(r) = reference_t0_ms(p.trap.regime, p.trap.n) {
            worst = worst.max((p.t0 * 1e3 / r - 1.0).abs());
        }
    }
    reference(
        "timing_table",
        worst <= 5e-3,
        format!("max relative t0 error {:.3e}", worst),
    )
}

const CHECKS: [CheckFn; 9] = [
    coefficient_closed_form,
    coefficient_counts,
    formula_vs_state,
    optimal_ratio,
    dynamics,
    grover_closed_form,
    circuit_identities,
    reference_coefficients,
    timing_reference,
];

/// Runs every check on the current rayon pool; order is fixed.
pub fn run_suite() -> Result<Report> {
    let checks = CHECKS.par_iter().map(|f| f()).collect::<Result<Vec<_>>>()?;
    Ok(Report { checks })
}

/// A named data file produced alongside the suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: &'static str,
    pub contents: String,
}

/// Grover traces for n ∈ {4, 5}, ideal and m ∈ {0.02, 0.05, 0.1}, to twice
/// the optimal iteration count.
pub fn grover_curves_csv() -> Result<String> {
    let mut out = String::new();
    let modes = [
        GateMode::Ideal,
        GateMode::Approximate(0.02),
        GateMode::Approximate(0.05),
        GateMode::Approximate(0.1),
    ];
    for n in [4usize, 5] {
        let marked = MarkedState::new(n, (1 << n) - 1)?;
        for mode in modes {
            let cfg = GroverConfig::new(n, marked, 2 * optimal_iterations(n), mode)?;
            let csv = run_search(&cfg)?.to_csv();
            let body = if out.is_empty() {
                csv.as_str()
            } else {
                csv.split_once('\n').map_or("", |(_, b)| b)
            };
            out.push_str(body);
        }
    }
    Ok(out)
}

/// Deterministic data files: gate-quality sweep, Grover curves, the timing
/// table and the check table.
pub fn artifacts(report: &Report) -> Result<Vec<Artifact>> {
    let grid = linear_grid(0.001, 0.2, 200)?;
    let plans = timing_table(DEFAULT_ETA, FIT_CONSTANT)?;
    let mut heating = String::from("regime,n,t0_ms,margin,feasible\n");
    for p in &plans {
        let h = heating_budget(p, DEFAULT_HEATING_TIME, 2)?;
        heating.push_str(&format!(
            "{},{},{},{},{}\n",
            p.trap.regime,
            p.trap.n,
            sig(p.t0 * 1e3),
            sig(h.margin),
            h.feasible
        ));
    }
    Ok(vec![
        Artifact {
            name: "sweep.csv",
            contents: sweep_csv(&sweep(&[3, 6, 9], &grid)?),
        },
        Artifact {
            name: "grover.csv",
            contents: grover_curves_csv()?,
        },
        Artifact {
            name: "timing.csv",
            contents: table_csv(&plans),
        },
        Artifact {
            name: "heating.csv",
            contents: heating,
        },
        Artifact {
            name: "checks.csv",
            contents: report.csv(),
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_checks_pass() {
        for f in [
            coefficient_closed_form,
            coefficient_counts,
            grover_closed_form,
            circuit_identities,
        ] {
            let c = f().unwrap();
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn reference_failures_do_not_fail_suite() {
        let report = Report {
            checks: vec![
                Check {
                    name: "a",
                    kind: CheckKind::Oracle,
                    passed: true,
                    detail: String::new(),
                },
                Check {
                    name: "b",
                    kind: CheckKind::Reference,
                    passed: false,
                    detail: String::new(),
                },
            ],
        };
        assert!(report.passed());
        assert!(report.table().contains("DIFF"));
    }

    #[test]
    fn grover_csv_single_header() {
        let csv = grover_curves_csv().unwrap();
        assert_eq!(csv.matches("n,marked").count(), 1);
    }
}
