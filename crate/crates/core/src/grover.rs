//! Grover search on the logical subspace with ideal or approximate CPF gates.
//!
//! One iteration is `Q = W^{⊗n} J_{0…0} W^{⊗n} J_ρ = −D J_ρ`. In approximate
//! mode both `J_ρ` and `J_{0…0}` are built from the sub-unitary
//! [`cpf_diagonal`]; the lost norm is the probability that a phonon was left
//! behind, so the state is carried unnormalized and `|⟨ρ|ψ_k⟩|²` is the joint
//! probability of no leakage and measuring `ρ`.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cpf::{
    cpf_diagonal, flip, flip_mask, hadamard_all, ideal_cpf, layer, mark_diagonal, r_one_bit,
    r_prime, r_zero_bit, zero_diagonal, CpfDiagonal, GateParams, LogicalOp, MarkedState,
};
use crate::error::{invalid, Result};
use crate::format::{round_sig, sig};

/// Largest register [`run_search`] accepts.
pub const MAX_GROVER_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GateMode {
    Ideal,
    Approximate(f64),
}

impl GateMode {
    pub fn base(&self, n: usize) -> Result<CpfDiagonal> {
        match *self {
            GateMode::Ideal => Ok(ideal_cpf(n)),
            GateMode::Approximate(m) => Ok(cpf_diagonal(GateParams::new(n, m)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroverConfig {
    pub n: usize,
    pub marked: MarkedState,
    pub iterations: usize,
    pub mode: GateMode,
}

impl GroverConfig {
    pub fn new(n: usize, marked: MarkedState, iterations: usize, mode: GateMode) -> Result<Self> {
        if !(2..=MAX_GROVER_QUBITS).contains(&n) {
            return invalid(format!(
                "grover search needs 2 <= n <= {MAX_GROVER_QUBITS}, got {n}"
            ));
        }
        if marked.n() != n {
            return invalid(format!(
                "marked state has {} bits, expected {n}",
                marked.n()
            ));
        }
        let cap = iteration_cap(n);
        if iterations > cap {
            return invalid(format!(
                "{iterations} iterations exceeds the cap {cap} for n = {n}"
            ));
        }
        if let GateMode::Approximate(m) = mode {
            GateParams::new(n, m)?;
        }
        Ok(Self {
            n,
            marked,
            iterations,
            mode,
        })
    }
}

/// `10 · ⌈π √(2^n) / 4⌉`.
pub fn iteration_cap(n: usize) -> usize {
    10 * (PI * 2f64.powf(n as f64 / 2.0) / 4.0).ceil() as usize
}

/// Nearest integer to `π √(2^n) / 4` (ties to even); `n = 2` returns 1, the
/// exact hit for four entries.
pub fn optimal_iterations(n: usize) -> usize {
    if n == 2 {
        return 1;
    }
    (PI * 2f64.powf(n as f64 / 2.0) / 4.0).round_ties_even() as usize
}

/// `2^{-n/2} Σ_b |b⟩`.
pub fn prepare_uniform(n: usize) -> Array1<f64> {
    let dim = 1usize << n;
    Array1::from_elem(dim, 1.0 / (dim as f64).sqrt())
}

/// In-place `W^{⊗n}` by the fast Walsh–Hadamard transform.
pub fn apply_hadamard_all(v: &mut Array1<f64>) {
    let dim = v.len();
    let mut h = 1;
    while h < dim {
        for i in (0..dim).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (dim as f64).sqrt();
    v.mapv_inplace(|x| x * scale);
}

/// Diagonals of `J_ρ` and `J_{0…0}` for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct GroverGates {
    pub mark: Array1<f64>,
    pub zero: Array1<f64>,
}

impl GroverGates {
    pub fn new(marked: &MarkedState, base: &CpfDiagonal) -> Result<Self> {
        Ok(Self {
            mark: Array1::from(mark_diagonal(marked, base)?),
            zero: Array1::from(zero_diagonal(base)),
        })
    }

    pub fn for_config(config: &GroverConfig) -> Result<Self> {
        Self::new(&config.marked, &config.mode.base(config.n)?)
    }
}

/// `ψ ← W J_{0…0} W J_ρ ψ`.
pub fn grover_iteration(state: &Array1<f64>, gates: &GroverGates) -> Array1<f64> {
    let mut psi = state * &gates.mark;
    apply_hadamard_all(&mut psi);
    psi *= &gates.zero;
    apply_hadamard_all(&mut psi);
    psi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub k: usize,
    /// `|⟨ρ|ψ_k⟩|²` of the unnormalized state.
    pub p_marked: f64,
    /// `‖ψ_k‖²`
    pub norm2: f64,
    /// `p_marked / norm2`
    pub p_renorm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroverTrace {
    pub n: usize,
    pub marked: MarkedState,
    pub mode: GateMode,
    /// Iterations `0..=iterations`.
    pub points: Vec<TracePoint>,
}

impl GroverTrace {
    pub fn last(&self) -> &TracePoint {
        self.points.last().expect("trace always holds iteration 0")
    }

    fn mode_value(&self) -> Value {
        match self.mode {
            GateMode::Ideal => json!("ideal"),
            GateMode::Approximate(m) => json!(round_sig(m)),
        }
    }

    fn mode_text(&self) -> String {
        match self.mode {
            GateMode::Ideal => "ideal".into(),
            GateMode::Approximate(m) => sig(m),
        }
    }

    pub fn to_json(&self) -> Value {
        let trace: Vec<Value> = self
            .points
            .iter()
            .map(|p| {
                json!({
                    "k": p.k,
                    "p_marked": round_sig(p.p_marked),
                    "norm2": round_sig(p.norm2),
                    "p_renorm": round_sig(p.p_renorm),
                })
            })
            .collect();
        json!({
            "n": self.n,
            "marked": self.marked.to_string(),
            "m": self.mode_value(),
            "trace": trace,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        let (marked, mode) = (self.marked.to_string(), self.mode_text());
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.n,
                marked,
                mode,
                p.k,
                sig(p.p_marked),
                sig(p.norm2),
                sig(p.p_renorm)
            ));
        }
        out
    }
}

pub const TRACE_CSV_HEADER: &str = "n,marked,m,k,p_marked,norm2,p_renorm";

fn trace_point(k: usize, psi: &Array1<f64>, rho: usize) -> TracePoint {
    let p_marked = psi[rho] * psi[rho];
    let norm2 = psi.dot(psi);
    TracePoint {
        k,
        p_marked,
        norm2,
        p_renorm: p_marked / norm2,
    }
}

pub fn run_search(config: &GroverConfig) -> Result<GroverTrace> {
    let gates = GroverGates::for_config(config)?;
    let rho = config.marked.bits();
    let mut psi = prepare_uniform(config.n);
    let mut points = Vec::with_capacity(config.iterations + 1);
    points.push(trace_point(0, &psi, rho));
    for k in 1..=config.iterations {
        psi = grover_iteration(&psi, &gates);
        points.push(trace_point(k, &psi, rho));
    }
    Ok(GroverTrace {
        n: config.n,
        marked: config.marked,
        mode: config.mode,
        points,
    })
}

/// `sin²((2k+1) θ)` with `sin θ = 2^{-n/2}`.
pub fn ideal_marked_probability(n: usize, k: usize) -> f64 {
    let theta = 2f64.powf(-(n as f64) / 2.0).asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

/// Dense `Q = W J_{0…0} W J_ρ`.
pub fn iteration_operator(marked: &MarkedState, base: &CpfDiagonal) -> Result<LogicalOp> {
    let n = base.n();
    let w = hadamard_all(n);
    let gates = GroverGates::new(marked, base)?;
    let j0 = Array2::from_diag(&gates.zero);
    let jr = Array2::from_diag(&gates.mark);
    Ok(w.dot(&j0).dot(&w).dot(&jr))
}

/// `J_{0…0} = σ_{x,n} S_{x,n−1} ⋯ S_{x,1} J_{1…1} S_{x,1} ⋯ S_{x,n−1} σ_{x,n}`
/// as an explicit product of single-ion flips.
pub fn zero_gate_from_flips(base: &CpfDiagonal) -> LogicalOp {
    let n = base.n();
    let mut left: LogicalOp = Array2::eye(1 << n);
    for ion in (0..n).rev() {
        left = left.dot(&flip(n, ion));
    }
    let right: LogicalOp = (0..n).fold(Array2::eye(1 << n), |acc, ion| acc.dot(&flip(n, ion)));
    left.dot(&base.to_operator()).dot(&right)
}

/// `Q^k` written gate by gate with `W`, `S_x` and `σ_x`.
pub fn standard_circuit(marked: &MarkedState, base: &CpfDiagonal, iterations: usize) -> LogicalOp {
    let n = base.n();
    let all = (1usize << n) - 1;
    let w = hadamard_all(n);
    let x_all = flip_mask(n, all);
    let x_zero = flip_mask(n, marked.zero_mask());
    let j = base.to_operator();
    let q = w
        .dot(&x_all)
        .dot(&j)
        .dot(&x_all)
        .dot(&w)
        .dot(&x_zero)
        .dot(&j)
        .dot(&x_zero);
    (0..iterations).fold(Array2::eye(1 << n), |acc, _| acc.dot(&q))
}

/// `Q^k` with adjacent single-qubit gates merged into the reduced transforms:
///
/// ```text
/// [R_one]ⁿ J L_in J (L_out J L_in J)^{k−1} X_zero
/// ```
///
/// where `L_out` applies `R_one = W X` on qubits whose marked bit is 1 and
/// `R_zero = X W X` on the others, and `L_in` applies `R' = X W` on bit-1
/// qubits and `R_zero` on bit-0 qubits.
pub fn reduced_circuit(
    marked: &MarkedState,
    base: &CpfDiagonal,
    iterations: usize,
) -> Result<LogicalOp> {
    if iterations == 0 {
        return Ok(Array2::eye(1 << base.n()));
    }
    let n = base.n();
    if marked.n() != n {
        return invalid("marked state and gate sizes differ");
    }
    let pick = |one: Array2<f64>| -> LogicalOp {
        layer(
            &(0..n)
                .map(|i| {
                    if marked.bit(i) {
                        one.clone()
                    } else {
                        r_zero_bit()
                    }
                })
                .collect::<Vec<_>>(),
        )
    };
    let outer = layer(&vec![r_one_bit(); n]);
    let l_out = pick(r_one_bit());
    let l_in = pick(r_prime());
    let j = base.to_operator();
    let mut op = outer.dot(&j).dot(&l_in).dot(&j);
    for _ in 1..iterations {
        op = op.dot(&l_out).dot(&j).dot(&l_in).dot(&j);
    }
    Ok(op.dot(&flip_mask(n, marked.zero_mask())))
}

/// State after `k` reduced-circuit iterations from `|0…0⟩`, with `R'` on every
/// qubit as the preparation layer.
pub fn reduced_circuit_state(
    marked: &MarkedState,
    base: &CpfDiagonal,
    iterations: usize,
) -> Result<Array1<f64>> {
    let n = base.n();
    let prep = layer(&vec![r_prime(); n]);
    let mut zero = Array1::zeros(1 << n);
    zero[0] = 1.0;
    let start = prep.dot(&zero);
    // R'|0⟩ is the uniform state, which the trailing X_zero of the reduced
    // circuit leaves unchanged
    Ok(reduced_circuit(marked, base, iterations)?.dot(&start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpf::{diffusion, mark_operator, max_abs_diff};

    fn ms(s: &str) -> MarkedState {
        s.parse().unwrap()
    }

    #[test]
    fn uniform_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(prepare_uniform(1).iter().all(|&a| (a - s).abs() < 1e-15));
        assert!(prepare_uniform(4).iter().all(|&a| a == 0.25));
        let mut e0 = Array1::zeros(16);
        e0[0] = 1.0;
        let via_op = hadamard_all(4).dot(&e0);
        assert!((&via_op - &prepare_uniform(4))
            .iter()
            .all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn fwht_matches_dense() {
        let v = Array1::from_iter((0..32).map(|i| (i as f64 * 0.37).sin()));
        let mut fast = v.clone();
        apply_hadamard_all(&mut fast);
        let dense = hadamard_all(5).dot(&v);
        assert!((&fast - &dense).iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn two_qubit_search_is_exact() {
        let cfg = GroverConfig::new(2, ms("11"), 1, GateMode::Ideal).unwrap();
        let t = run_search(&cfg).unwrap();
        assert!((t.last().p_marked - 1.0).abs() < 1e-13);
        assert_eq!(t.points[0].p_marked, 0.25);
    }

    #[test]
    fn closed_form_examples() {
        let t = run_search(&GroverConfig::new(4, ms("1001"), 3, GateMode::Ideal).unwrap()).unwrap();
        assert!((t.last().p_marked - 0.96128).abs() < 1e-4);
        let t5 =
            run_search(&GroverConfig::new(5, ms("10011"), 4, GateMode::Ideal).unwrap()).unwrap();
        assert!((t5.last().p_marked - 0.9992).abs() < 1e-4);
        let t0 =
            run_search(&GroverConfig::new(6, ms("000111"), 0, GateMode::Ideal).unwrap()).unwrap();
        assert_eq!(t0.points.len(), 1);
        assert!((t0.points[0].p_marked - 1.0 / 64.0).abs() < 1e-16);
    }

    #[test]
    fn iteration_matrix_matches_reflections() {
        let rho = ms("1001");
        let ideal = ideal_cpf(4);
        let q = iteration_operator(&rho, &ideal).unwrap();
        let d = diffusion(4, &ideal).unwrap();
        let mut jr: Array2<f64> = Array2::eye(16);
        jr[(9, 9)] = -1.0;
        assert!(max_abs_diff(&q, &(-d.dot(&jr))) < 1e-13);
        assert!(max_abs_diff(&mark_operator(&rho, &ideal).unwrap(), &jr) < 1e-15);
    }

    #[test]
    fn approximate_first_step_norm() {
        let cfg = GroverConfig::new(4, ms("1001"), 1, GateMode::Approximate(0.1)).unwrap();
        let base = cpf_diagonal(GateParams::new(4, 0.1).unwrap());
        let t = run_search(&cfg).unwrap();
        // ‖J_0 W J_ρ ψ₀‖²: W is orthogonal, both J's are diagonal
        let w = hadamard_all(4);
        let jr = mark_operator(&cfg.marked, &base).unwrap();
        let u = w.dot(&jr.dot(&prepare_uniform(4)));
        let j0 = zero_diagonal(&base);
        let norm2: f64 = u.iter().zip(&j0).map(|(a, d)| (a * d).powi(2)).sum();
        assert!((t.points[1].norm2 - norm2).abs() < 1e-14);
        assert!(t.points[1].norm2 < 1.0);
    }

    #[test]
    fn optimal_iteration_counts() {
        assert_eq!(optimal_iterations(2), 1);
        assert_eq!(optimal_iterations(4), 3);
        assert_eq!(optimal_iterations(5), 4);
        assert_eq!(optimal_iterations(8), 13);
    }

    #[test]
    fn config_validation() {
        assert!(GroverConfig::new(4, ms("10011"), 3, GateMode::Ideal).is_err());
        assert!(GroverConfig::new(4, ms("1001"), iteration_cap(4) + 1, GateMode::Ideal).is_err());
        assert!(GroverConfig::new(4, ms("1001"), 3, GateMode::Approximate(0.0)).is_err());
        assert!(GroverConfig::new(1, ms("1"), 1, GateMode::Ideal).is_err());
    }

    #[test]
    fn eq22_flip_product() {
        for base in [ideal_cpf(3), cpf_diagonal(GateParams::new(3, 0.1).unwrap())] {
            let direct = Array2::from_diag(&Array1::from(zero_diagonal(&base)));
            assert!(max_abs_diff(&zero_gate_from_flips(&base), &direct) < 1e-15);
        }
    }

    #[test]
    fn reduced_circuit_matches_standard() {
        let rho = ms("1001");
        for base in [ideal_cpf(4), cpf_diagonal(GateParams::new(4, 0.1).unwrap())] {
            for k in 1..4 {
                let std_op = standard_circuit(&rho, &base, k);
                let red = reduced_circuit(&rho, &base, k).unwrap();
                assert!(max_abs_diff(&std_op, &red) < 1e-12, "k = {k}");
            }
        }
    }

    #[test]
    fn trace_serialisation() {
        let t = run_search(&GroverConfig::new(2, ms("11"), 1, GateMode::Ideal).unwrap()).unwrap();
        let j = t.to_json();
        assert_eq!(j["m"], "ideal");
        assert_eq!(j["marked"], "11");
        assert_eq!(j["trace"].as_array().unwrap().len(), 2);
        let csv = t.to_csv();
        assert!(csv.starts_with(TRACE_CSV_HEADER));
        assert_eq!(csv.lines().count(), 3);
        let ta =
            run_search(&GroverConfig::new(2, ms("11"), 1, GateMode::Approximate(0.1)).unwrap())
                .unwrap();
        assert_eq!(ta.to_json()["m"], 0.1);
    }
}
