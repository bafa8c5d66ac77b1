//! Analytic CPF gate diagonals and the logical operators Grover search is
//! assembled from.
//!
//! Logical basis states are indexed by bitstring with ion 0 as the most
//! significant bit and the target (last ion) as bit 0. With control ratio
//! `m = Ω_max^n / Ω_max^i` and `ηϑ_n = π`, the gate is diagonal on the logical
//! subspace:
//!
//! * target bit 0 → `1` (dark state, exact),
//! * target bit 1, all controls 1 → `−1`,
//! * target bit 1, one control 0 → `β = α₁`,
//! * target bit 1, `s ≥ 2` controls 0 → `α_s`.
//!
//! Everything here is real; logical operators are `Array2<f64>`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use ndarray::{array, Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Dense real operator on the logical `2^n` space.
pub type LogicalOp = Array2<f64>;

/// `α_s = [m² cos(√(m²+s) π/m) + s] / (m² + s)`.
///
/// As `m → 0⁺`, `α_s → 1` with `|α_s − 1| ≤ 2m²/(s+m²)`; `m = 0` itself is
/// rejected.
pub fn alpha(s: usize, m: f64) -> Result<f64> {
    if s < 1 {
        return invalid("alpha needs s >= 1");
    }
    if !(m > 0.0) || !m.is_finite() {
        return invalid(format!("coupling ratio m must be positive, got {m}"));
    }
    let m2 = m * m;
    let s = s as f64;
    Ok((m2 * ((m2 + s).sqrt() * PI / m).cos() + s) / (m2 + s))
}

/// `β = α₁`.
pub fn beta(m: f64) -> Result<f64> {
    alpha(1, m)
}

/// Upper bound on `|α_s − 1|`.
pub fn alpha_deviation_bound(s: usize, m: f64) -> f64 {
    2.0 * m * m / (s as f64 + m * m)
}

/// Number of logical basis states carrying `α_s` in the n-qubit gate: target
/// bit 1 and exactly `s` of the `n − 1` controls in `|g⟩`. Outside
/// `2 ≤ s ≤ n − 1` the count is 0.
pub fn count_coefficient(n: usize, s: usize) -> u64 {
    if n < 3 || s < 2 || s > n - 1 {
        return 0;
    }
    binomial((n - 1) as u64, s as u64)
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Gate size and coupling ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateParams {
    pub n: usize,
    pub m: f64,
}

impl GateParams {
    pub fn new(n: usize, m: f64) -> Result<Self> {
        if n < 2 {
            return invalid(format!("CPF gate needs n >= 2 qubits, got {n}"));
        }
        if n > 24 {
            return invalid(format!(
                "n = {n} is beyond the dense logical space this crate handles"
            ));
        }
        if !(m > 0.0 && m < 1.0) {
            return invalid(format!("coupling ratio m must lie in (0, 1), got {m}"));
        }
        Ok(Self { n, m })
    }
}

/// Diagonal of a `J_{1…1}`-type gate, indexed by logical bitstring.
#[derive(Debug, Clone, PartialEq)]
pub struct CpfDiagonal {
    n: usize,
    entries: Vec<f64>,
}

impl CpfDiagonal {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entry(&self, bits: usize) -> f64 {
        self.entries[bits]
    }

    pub fn to_operator(&self) -> LogicalOp {
        Array2::from_diag(&Array1::from(self.entries.clone()))
    }

    /// `max_b (1 − |entry_b|)` over the entries other than `±1`; zero for the
    /// ideal gate.
    pub fn max_deviation(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| 1.0 - e.abs())
            .fold(0.0, f64::max)
    }
}

/// Number of control ions (bits `1..n` from the top) that are in `|g⟩`, i.e.
/// logical 0.
pub fn zero_controls(bits: usize, n: usize) -> usize {
    (1..n).filter(|&shift| (bits >> shift) & 1 == 0).count()
}

pub fn cpf_diagonal(params: GateParams) -> CpfDiagonal {
    let GateParams { n, m } = params;
    let coeffs: Vec<f64> = (0..n)
        .map(|s| if s == 0 { -1.0 } else { alpha(s, m).unwrap() })
        .collect();
    let entries = (0..1usize << n)
        .map(|bits| {
            if bits & 1 == 0 {
                1.0
            } else {
                coeffs[zero_controls(bits, n)]
            }
        })
        .collect();
    CpfDiagonal { n, entries }
}

/// `diag{1, …, 1, −1}`.
pub fn ideal_cpf(n: usize) -> CpfDiagonal {
    let mut entries = vec![1.0; 1usize << n];
    *entries.last_mut().unwrap() = -1.0;
    CpfDiagonal { n, entries }
}

/// A search target, stored MSB-first (ion 0 first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkedState {
    n: usize,
    bits: usize,
}

impl MarkedState {
    pub fn new(n: usize, bits: usize) -> Result<Self> {
        if n == 0 || n >= usize::BITS as usize || bits >> n != 0 {
            return invalid(format!("bit pattern {bits:#b} does not fit {n} qubits"));
        }
        Ok(Self { n, bits })
    }

    pub fn parse_for(s: &str, n: usize) -> Result<Self> {
        let rho: MarkedState = s.parse()?;
        if rho.n != n {
            return invalid(format!(
                "marked state '{s}' has {} bits, expected {n}",
                rho.n
            ));
        }
        Ok(rho)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Mask of positions where the marked state has a 0.
    pub fn zero_mask(&self) -> usize {
        !self.bits & ((1usize << self.n) - 1)
    }

    /// Bit of ion `ion` (0 = MSB).
    pub fn bit(&self, ion: usize) -> bool {
        (self.bits >> (self.n - 1 - ion)) & 1 == 1
    }
}

impl FromStr for MarkedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > 24 {
            return invalid(format!("marked state '{s}' must have 1..=24 bits"));
        }
        let mut bits = 0usize;
        for ch in s.chars() {
            bits = match ch {
                '0' => bits << 1,
                '1' => (bits << 1) | 1,
                _ => return invalid(format!("marked state '{s}' may contain only 0 and 1")),
            };
        }
        Self::new(s.len(), bits)
    }
}

impl fmt::Display for MarkedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.n)
    }
}

pub fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        for ((k, l), &y) in b.indexed_iter() {
            out[(i * br + k, j * bc + l)] = x * y;
        }
    }
    out
}

/// Tensor product of one 2×2 matrix per qubit, qubit 0 outermost.
pub fn layer(gates: &[Array2<f64>]) -> LogicalOp {
    gates.iter().fold(Array2::eye(1), |acc, g| kron(&acc, g))
}

pub fn hadamard() -> Array2<f64> {
    array![[1.0, 1.0], [1.0, -1.0]] * FRAC_1_SQRT_2
}

pub fn pauli_x() -> Array2<f64> {
    array![[0.0, 1.0], [1.0, 0.0]]
}

/// `W^{⊗n}`.
pub fn hadamard_all(n: usize) -> LogicalOp {
    layer(&vec![hadamard(); n])
}

/// `S_{x,ion}` (controls) or `σ_{x,n}` (target) on the logical space; both
/// act as a bit flip on that qubit.
pub fn flip(n: usize, ion: usize) -> LogicalOp {
    let gates: Vec<_> = (0..n)
        .map(|j| if j == ion { pauli_x() } else { Array2::eye(2) })
        .collect();
    layer(&gates)
}

/// Product of bit flips on every qubit in `mask` (bit `n-1-ion` ↔ ion).
pub fn flip_mask(n: usize, mask: usize) -> LogicalOp {
    let gates: Vec<_> = (0..n)
        .map(|j| {
            if (mask >> (n - 1 - j)) & 1 == 1 {
                pauli_x()
            } else {
                Array2::eye(2)
            }
        })
        .collect();
    layer(&gates)
}

/// Diagonal of `J_ρ` built from `base` by flipping the zero bits of `ρ`.
pub fn mark_diagonal(rho: &MarkedState, base: &CpfDiagonal) -> Result<Vec<f64>> {
    if rho.n != base.n {
        return invalid(format!(
            "marked state has {} bits but the gate acts on {} qubits",
            rho.n, base.n
        ));
    }
    let flip = rho.zero_mask();
    Ok((0..base.entries.len())
        .map(|b| base.entries[b ^ flip])
        .collect())
}

/// `J_ρ = (Π S_x) J_{1…1} (Π S_x)` with a flip on every position where `ρ`
/// has a 0. With the ideal base this is `I − 2|ρ⟩⟨ρ|`.
pub fn mark_operator(rho: &MarkedState, base: &CpfDiagonal) -> Result<LogicalOp> {
    if rho.n != base.n {
        return invalid(format!(
            "marked state has {} bits but the gate acts on {} qubits",
            rho.n, base.n
        ));
    }
    let x = flip_mask(base.n, rho.zero_mask());
    Ok(x.dot(&base.to_operator()).dot(&x))
}

/// `J_{0…0}` diagonal: every bit flipped.
pub fn zero_diagonal(base: &CpfDiagonal) -> Vec<f64> {
    let full = base.entries.len() - 1;
    (0..=full).map(|b| base.entries[b ^ full]).collect()
}

/// `D = −W^{⊗n} J_{0…0} W^{⊗n}`; with the ideal base `D_ij = 2/N − δ_ij`.
pub fn diffusion(n: usize, base: &CpfDiagonal) -> Result<LogicalOp> {
    if base.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: base.n,
        });
    }
    let w = hadamard_all(n);
    let j0 = Array2::from_diag(&Array1::from(zero_diagonal(base)));
    Ok(-w.dot(&j0).dot(&w))
}

/// `W X`: layer between iterations on a qubit whose marked bit is 1.
pub fn r_one_bit() -> Array2<f64> {
    array![[1.0, 1.0], [-1.0, 1.0]] * FRAC_1_SQRT_2
}

/// `X W X`: layer on a qubit whose marked bit is 0.
pub fn r_zero_bit() -> Array2<f64> {
    array![[-1.0, 1.0], [1.0, 1.0]] * FRAC_1_SQRT_2
}

/// `X W`.
pub fn r_prime() -> Array2<f64> {
    array![[1.0, -1.0], [1.0, 1.0]] * FRAC_1_SQRT_2
}

/// The reduced single-qubit transforms `(R_i, R'_i)` of the four-qubit
/// circuit for marked state 1001, ion `i ∈ 0..4`, scaled by `1/√2`.
pub fn r_transforms(ion: usize) -> Result<(Array2<f64>, Array2<f64>)> {
    match ion {
        0 | 3 => Ok((r_one_bit(), r_prime())),
        1 | 2 => Ok((r_zero_bit(), r_prime())),
        _ => invalid(format!(
            "reduced transforms are defined for ions 0..4, got {ion}"
        )),
    }
}

/// Largest entry-wise `|a − b|`.
pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
