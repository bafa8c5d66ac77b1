//! Fidelity and success probability of the approximate CPF gate.
//!
//! For the uniform input `|Ψ₀⟩ = 2^{-n/2} Σ|b⟩`, with `A` the approximate
//! diagonal and `N = 2^n`:
//!
//! ```text
//! S₁ = Σ_{s=2}^{n-1} C_s α_s  + (n−1) β  + 2^{n−1} + 1
//! S₂ = Σ_{s=2}^{n-1} C_s α_s² + (n−1) β² + 2^{n−1} + 1
//! F  = S₁² / (N S₂),   P = S₂ / N
//! ```

use rayon::prelude::*;
use serde::Serialize;

use crate::cpf::{alpha, count_coefficient, cpf_diagonal, ideal_cpf, GateParams};
use crate::error::{invalid, Result};
use crate::format::sig;

/// Search window for the optimal coupling ratio: the plotted range of `m`.
pub const OPTIMAL_M_RANGE: (f64, f64) = (0.01, 0.05);
/// Coarse grid step of the optimal-ratio scan.
pub const OPTIMAL_M_STEP: f64 = 1e-4;
/// Upper end of sweep grids.
pub const MAX_SWEEP_M: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateQuality {
    pub n: usize,
    pub m: f64,
    pub fidelity: f64,
    pub success_probability: f64,
    pub infidelity: f64,
}

impl GateQuality {
    pub fn evaluate(n: usize, m: f64) -> Result<Self> {
        Ok(Self {
            n,
            m,
            fidelity: gate_fidelity(n, m)?,
            success_probability: gate_success(n, m)?,
            infidelity: gate_infidelity(n, m)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCurve {
    pub n: usize,
    pub points: Vec<GateQuality>,
}

fn check(n: usize, m: f64) -> Result<()> {
    if n < 2 {
        return invalid(format!("fidelity formulas need n >= 2, got {n}"));
    }
    if n > 62 {
        return invalid(format!("n = {n} is too large"));
    }
    if !(m > 0.0) || !m.is_finite() {
        return invalid(format!("coupling ratio m must be positive, got {m}"));
    }
    Ok(())
}

/// `(S₁, S₂)`; for `n = 2` the α sum is empty and only β contributes.
fn sums(n: usize, m: f64) -> Result<(f64, f64)> {
    check(n, m)?;
    let b = alpha(1, m)?;
    let dark = 2f64.powi(n as i32 - 1) + 1.0;
    let (mut s1, mut s2) = ((n - 1) as f64 * b + dark, (n - 1) as f64 * b * b + dark);
    for s in 2..n {
        let a = alpha(s, m)?;
        let c = count_coefficient(n, s) as f64;
        s1 += c * a;
        s2 += c * a * a;
    }
    Ok((s1, s2))
}

pub fn gate_fidelity(n: usize, m: f64) -> Result<f64> {
    let (s1, s2) = sums(n, m)?;
    Ok(s1 * s1 / (2f64.powi(n as i32) * s2))
}

pub fn gate_success(n: usize, m: f64) -> Result<f64> {
    let (_, s2) = sums(n, m)?;
    Ok(s2 / 2f64.powi(n as i32))
}

/// `1 − F` without cancellation: with `ε_b = 1 − A_b·I_b`,
/// `1 − F = Σ_b (ε_b − ε̄)² / Σ_b A_b²`.
pub fn gate_infidelity(n: usize, m: f64) -> Result<f64> {
    let (_, s2) = sums(n, m)?;
    let m2 = m * m;
    // (count, ε) per coefficient class; dark states and the −1 entry have ε = 0
    let eps = |s: usize| {
        let half = (m2 + s as f64).sqrt() * std::f64::consts::PI / m / 2.0;
        2.0 * m2 * half.sin().powi(2) / (m2 + s as f64)
    };
    let mut classes: Vec<(f64, f64)> = vec![((n - 1) as f64, eps(1))];
    classes.extend((2..n).map(|s| (count_coefficient(n, s) as f64, eps(s))));
    let total = 2f64.powi(n as i32);
    let mean = classes.iter().map(|(c, e)| c * e).sum::<f64>() / total;
    let exact = total - classes.iter().map(|(c, _)| c).sum::<f64>();
    let spread = classes
        .iter()
        .map(|(c, e)| c * (e - mean).powi(2))
        .sum::<f64>()
        + exact * mean * mean;
    Ok(spread / s2)
}

/// Fidelity from explicit state vectors: `|⟨Ψ₀|U_ideal† A|Ψ₀⟩|² / ⟨Ψ_f|Ψ_f⟩`
/// with `|Ψ_f⟩ = A|Ψ₀⟩`.
pub fn fidelity_oracle(n: usize, m: f64) -> Result<f64> {
    let (psi0, psi_f, ideal) = oracle_states(n, m)?;
    let target = ideal.dot(&psi0);
    let overlap = target.dot(&psi_f);
    Ok(overlap * overlap / psi_f.dot(&psi_f))
}

/// `‖A|Ψ₀⟩‖²`.
pub fn success_oracle(n: usize, m: f64) -> Result<f64> {
    let (_, psi_f, _) = oracle_states(n, m)?;
    Ok(psi_f.dot(&psi_f))
}

type Oracle = (
    ndarray::Array1<f64>,
    ndarray::Array1<f64>,
    ndarray::Array2<f64>,
);

fn oracle_states(n: usize, m: f64) -> Result<Oracle> {
    if n > 12 {
        return invalid(format!("dense oracle limited to n <= 12, got {n}"));
    }
    let params = GateParams { n, m };
    check(n, m)?;
    let a = cpf_diagonal(params).to_operator();
    let ideal = ideal_cpf(n).to_operator();
    let dim = 1usize << n;
    let psi0 = ndarray::Array1::from_elem(dim, 1.0 / (dim as f64).sqrt());
    let psi_f = a.dot(&psi0);
    Ok((psi0, psi_f, ideal))
}

/// `points` evenly spaced values on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Ok(Vec::new());
    }
    if !(lo > 0.0) || !(hi >= lo) || hi > MAX_SWEEP_M {
        return invalid(format!(
            "m range must satisfy 0 < lo <= hi <= {MAX_SWEEP_M}, got [{lo}, {hi}]"
        ));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    if hi == lo {
        return invalid("a grid with several points needs lo < hi");
    }
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo + i as f64 * step
            }
        })
        .collect())
}

/// Evaluates every `(n, m)` pair. Results keep the order of `n_list` and
/// `m_grid` whatever the thread count.
pub fn sweep(n_list: &[usize], m_grid: &[f64]) -> Result<Vec<SweepCurve>> {
    if m_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("m grid must be strictly increasing");
    }
    if m_grid.iter().any(|&m| !(m > 0.0 && m <= MAX_SWEEP_M)) {
        return invalid(format!("m grid must lie within (0, {MAX_SWEEP_M}]"));
    }
    for &n in n_list {
        check(n, 0.1)?;
    }
    n_list
        .iter()
        .map(|&n| {
            let points = m_grid
                .par_iter()
                .map(|&m| GateQuality::evaluate(n, m))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepCurve { n, points })
        })
        .collect()
}

pub const SWEEP_CSV_HEADER: &str = "n,m,infidelity,success_probability";

pub fn sweep_csv(curves: &[SweepCurve]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for c in curves {
        for p in &c.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.n,
                sig(p.m),
                sig(p.infidelity),
                sig(p.success_probability)
            ));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalRatio {
    pub n: usize,
    pub m: f64,
    pub fidelity: f64,
    pub infidelity: f64,
}

/// Maximum of `F` over `[lo, hi]` resolved at `step`: a scan on the grid,
/// then golden-section refinement inside the best grid cell pair. `F` has
/// resonances narrower than `step`, so the answer depends on the grid.
pub fn optimal_m(n: usize, lo: f64, hi: f64, step: f64) -> Result<OptimalRatio> {
    if !(lo > 0.0 && hi > lo && step > 0.0) {
        return invalid(format!("bad search interval [{lo}, {hi}] step {step}"));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let mut best = (lo, gate_infidelity(n, lo)?);
    for i in 1..count {
        let m = lo + i as f64 * step;
        let inf = gate_infidelity(n, m)?;
        if inf < best.1 {
            best = (m, inf);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (gate_infidelity(n, c)?, gate_infidelity(n, d)?);
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = gate_infidelity(n, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = gate_infidelity(n, d)?;
        }
    }
    let mid = 0.5 * (a + b);
    let refined = gate_infidelity(n, mid)?;
    let (m, infidelity) = if refined < best.1 {
        (mid, refined)
    } else {
        best
    };
    Ok(OptimalRatio {
        n,
        m,
        fidelity: gate_fidelity(n, m)?,
        infidelity,
    })
}

/// [`optimal_m`] over [`OPTIMAL_M_RANGE`] at [`OPTIMAL_M_STEP`].
pub fn optimal_m_default(n: usize) -> Result<OptimalRatio> {
    optimal_m(n, OPTIMAL_M_RANGE.0, OPTIMAL_M_RANGE.1, OPTIMAL_M_STEP)
}
