//! Basis bookkeeping for the composite ion–phonon space.
//!
//! Every ion carries three levels `{g, f, e}` and all ions share one
//! center-of-mass mode truncated to `fock_dim` Fock states. A basis state is
//! addressed row-major with ion 0 as the most significant digit and the phonon
//! number as the least significant one:
//!
//! ```text
//! idx = (Σ_j level_j · 3^(n-1-j)) · fock_dim + phonon
//! ```
//!
//! with `g = 0`, `f = 1`, `e = 2`. The logical qubit of a control ion
//! (`0..n-1`) is `g ↔ 0`, `f ↔ 1`; the last ion is the target with
//! `g ↔ 0`, `e ↔ 1`.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};

/// Dense complex operator on a [`CompositeSpace`].
pub type Operator = Array2<C64>;

/// Internal level of one ion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LevelLabel {
    G = 0,
    F = 1,
    E = 2,
}

impl LevelLabel {
    pub const ALL: [LevelLabel; 3] = [LevelLabel::G, LevelLabel::F, LevelLabel::E];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

/// `(3 levels)^n_ions ⊗ Fock(fock_dim)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositeSpace {
    n_ions: usize,
    fock_dim: usize,
}

impl CompositeSpace {
    pub fn new(n_ions: usize, fock_dim: usize) -> Result<Self> {
        if n_ions == 0 {
            return invalid("n_ions must be positive");
        }
        if fock_dim < 2 {
            return invalid(format!("fock_dim must be at least 2, got {fock_dim}"));
        }
        if 3usize
            .checked_pow(n_ions as u32)
            .and_then(|x| x.checked_mul(fock_dim))
            .is_none()
        {
            return invalid("composite dimension overflows usize");
        }
        Ok(Self { n_ions, fock_dim })
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn dim(&self) -> usize {
        3usize.pow(self.n_ions as u32) * self.fock_dim
    }

    /// Index distance between neighbouring levels of `ion`.
    pub fn ion_stride(&self, ion: usize) -> usize {
        3usize.pow((self.n_ions - 1 - ion) as u32) * self.fock_dim
    }

    /// Inverse of [`basis_index`].
    pub fn decompose(&self, idx: usize) -> (Vec<LevelLabel>, usize) {
        let phonon = idx % self.fock_dim;
        let mut rest = idx / self.fock_dim;
        let mut levels = vec![LevelLabel::G; self.n_ions];
        for slot in levels.iter_mut().rev() {
            *slot = LevelLabel::from_index(rest % 3).unwrap();
            rest /= 3;
        }
        (levels, phonon)
    }

    pub fn level_of(&self, idx: usize, ion: usize) -> LevelLabel {
        LevelLabel::from_index((idx / self.ion_stride(ion)) % 3).unwrap()
    }

    pub fn phonon_of(&self, idx: usize) -> usize {
        idx % self.fock_dim
    }
}

/// Row-major basis index of `(levels, phonon)`.
pub fn basis_index(levels: &[LevelLabel], phonon: usize, space: &CompositeSpace) -> Result<usize> {
    if levels.len() != space.n_ions {
        return invalid(format!(
            "expected {} levels, got {}",
            space.n_ions,
            levels.len()
        ));
    }
    if phonon >= space.fock_dim {
        return invalid(format!(
            "phonon {phonon} outside Fock truncation {}",
            space.fock_dim
        ));
    }
    let ions = levels.iter().fold(0usize, |acc, l| acc * 3 + l.index());
    Ok(ions * space.fock_dim + phonon)
}

/// A pure state on a [`CompositeSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: CompositeSpace,
    amplitudes: Array1<C64>,
}

impl StateVector {
    pub fn new(space: CompositeSpace, amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                actual: amplitudes.len(),
            });
        }
        Ok(Self { space, amplitudes })
    }

    pub fn basis(space: CompositeSpace, levels: &[LevelLabel], phonon: usize) -> Result<Self> {
        let idx = basis_index(levels, phonon, &space)?;
        let mut amplitudes = Array1::zeros(space.dim());
        amplitudes[idx] = C64::new(1.0, 0.0);
        Ok(Self { space, amplitudes })
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Array1<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                actual: other.space.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Population summed over basis states with the given phonon number.
    pub fn phonon_population(&self, phonon: usize) -> f64 {
        let d = self.space.fock_dim;
        self.amplitudes
            .iter()
            .skip(phonon)
            .step_by(d)
            .map(|a| a.norm_sqr())
            .sum()
    }
}

/// Map between logical bitstrings and composite basis indices (phonon 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalIndexMap {
    space: CompositeSpace,
    indices: Vec<usize>,
}

impl LogicalIndexMap {
    pub fn new(space: CompositeSpace) -> Self {
        let n = space.n_ions;
        let indices = (0..1usize << n)
            .map(|bits| {
                let levels = logical_levels(bits, n);
                basis_index(&levels, 0, &space).expect("logical levels are always in range")
            })
            .collect();
        Self { space, indices }
    }

    pub fn n(&self) -> usize {
        self.space.n_ions
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    /// Composite index of logical bitstring `bits` (ion 0 is the MSB).
    pub fn index(&self, bits: usize) -> usize {
        self.indices[bits]
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Embeds a logical amplitude vector into the composite space.
    pub fn embed(&self, logical: &Array1<C64>) -> Result<StateVector> {
        if logical.len() != self.indices.len() {
            return Err(Error::DimensionMismatch {
                expected: self.indices.len(),
                actual: logical.len(),
            });
        }
        let mut amps = Array1::zeros(self.space.dim());
        for (&idx, &a) in self.indices.iter().zip(logical.iter()) {
            amps[idx] = a;
        }
        StateVector::new(self.space, amps)
    }
}

/// Ion levels encoding logical bitstring `bits` for `n` qubits.
pub fn logical_levels(bits: usize, n: usize) -> Vec<LevelLabel> {
    (0..n)
        .map(|ion| {
            let one = (bits >> (n - 1 - ion)) & 1 == 1;
            match (one, ion + 1 == n) {
                (false, _) => LevelLabel::G,
                (true, false) => LevelLabel::F,
                (true, true) => LevelLabel::E,
            }
        })
        .collect()
}

/// Logical amplitudes of `state` and the norm² that left the logical subspace.
pub fn logical_project(
    state: &StateVector,
    mapping: &LogicalIndexMap,
) -> Result<(Array1<C64>, f64)> {
    if state.space != mapping.space {
        return Err(Error::DimensionMismatch {
            expected: mapping.space.dim(),
            actual: state.space.dim(),
        });
    }
    let logical: Array1<C64> = mapping
        .indices
        .iter()
        .map(|&i| state.amplitudes[i])
        .collect();
    let kept: f64 = logical.iter().map(|a| a.norm_sqr()).sum();
    Ok((logical, state.norm_sqr() - kept))
}

/// Lifts a one-ion operator (3×3, or 2×2 on that ion's logical pair) to the
/// full composite space.
pub fn embed_single_ion(op: &Array2<C64>, ion: usize, space: &CompositeSpace) -> Result<Operator> {
    if ion >= space.n_ions {
        return invalid(format!("ion {ion} out of range for {} ions", space.n_ions));
    }
    let local = match op.dim() {
        (3, 3) => op.clone(),
        (2, 2) => lift_logical(op, ion + 1 == space.n_ions),
        (r, c) => {
            return invalid(format!(
                "single-ion operator must be 2x2 or 3x3, got {r}x{c}"
            ))
        }
    };
    let dim = space.dim();
    let stride = space.ion_stride(ion);
    let mut out = Operator::zeros((dim, dim));
    for col in 0..dim {
        let lc = (col / stride) % 3;
        let base = col - lc * stride;
        for lr in 0..3 {
            let v = local[(lr, lc)];
            if v != C64::new(0.0, 0.0) {
                out[(base + lr * stride, col)] = v;
            }
        }
    }
    Ok(out)
}

/// 2×2 logical operator on `{|0⟩,|1⟩}` as a 3×3 level operator; the unused
/// level (e for controls, f for the target) is left as identity.
pub fn lift_logical(op: &Array2<C64>, target: bool) -> Array2<C64> {
    let one = if target {
        LevelLabel::E.index()
    } else {
        LevelLabel::F.index()
    };
    let unused = if target {
        LevelLabel::F.index()
    } else {
        LevelLabel::E.index()
    };
    let slots = [LevelLabel::G.index(), one];
    let mut out = Array2::zeros((3, 3));
    for (i, &r) in slots.iter().enumerate() {
        for (j, &c) in slots.iter().enumerate() {
            out[(r, c)] = op[(i, j)];
        }
    }
    out[(unused, unused)] = C64::new(1.0, 0.0);
    out
}

/// `a` on Fock(d), embedded as identity on the ions.
pub fn annihilation(space: &CompositeSpace) -> Operator {
    let dim = space.dim();
    let d = space.fock_dim;
    let mut out = Operator::zeros((dim, dim));
    for col in 0..dim {
        let k = col % d;
        if k > 0 {
            out[(col - 1, col)] = C64::new((k as f64).sqrt(), 0.0);
        }
    }
    out
}

/// `|e⟩⟨g|` on one ion.
pub fn sigma_plus() -> Array2<C64> {
    let mut s = Array2::zeros((3, 3));
    s[(LevelLabel::E.index(), LevelLabel::G.index())] = C64::new(1.0, 0.0);
    s
}

/// `|g⟩⟨e|` on one ion.
pub fn sigma_minus() -> Array2<C64> {
    sigma_plus().t().to_owned()
}

pub fn identity(dim: usize) -> Operator {
    Operator::eye(dim)
}

pub fn dagger(op: &Operator) -> Operator {
    op.t().mapv(|z| z.conj())
}

/// Largest entry-wise modulus of `a - b`.
pub fn max_abs_diff(a: &Operator, b: &Operator) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use LevelLabel::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn index_examples() {
        let s22 = CompositeSpace::new(2, 2).unwrap();
        assert_eq!(basis_index(&[G, G], 0, &s22).unwrap(), 0);
        assert_eq!(basis_index(&[G, E], 1, &s22).unwrap(), 5);
        let s33 = CompositeSpace::new(3, 3).unwrap();
        // (1*9 + 0*3 + 2) * 3
        assert_eq!(basis_index(&[F, G, E], 0, &s33).unwrap(), 33);
    }

    #[test]
    fn index_errors() {
        let s = CompositeSpace::new(2, 2).unwrap();
        assert!(basis_index(&[G], 0, &s).is_err());
        assert!(basis_index(&[G, G], 2, &s).is_err());
        assert!(CompositeSpace::new(2, 1).is_err());
        assert!(CompositeSpace::new(0, 2).is_err());
    }

    #[test]
    fn decompose_inverts_index() {
        let s = CompositeSpace::new(3, 4).unwrap();
        for idx in 0..s.dim() {
            let (levels, ph) = s.decompose(idx);
            assert_eq!(basis_index(&levels, ph, &s).unwrap(), idx);
            for (ion, l) in levels.iter().enumerate() {
                assert_eq!(s.level_of(idx, ion), *l);
            }
        }
    }

    #[test]
    fn embed_identity_is_identity() {
        let s = CompositeSpace::new(2, 3).unwrap();
        for ion in 0..2 {
            let id = embed_single_ion(&Array2::eye(3), ion, &s).unwrap();
            assert_eq!(id, identity(s.dim()));
        }
        assert!(embed_single_ion(&Array2::eye(3), 2, &s).is_err());
    }

    #[test]
    fn sigma_x_on_target_swaps_g_and_e() {
        let s = CompositeSpace::new(1, 2).unwrap();
        let sx = ndarray::array![[c(0.0), c(1.0)], [c(1.0), c(0.0)]];
        let op = embed_single_ion(&sx, 0, &s).unwrap();
        for ph in 0..2 {
            let g = basis_index(&[G], ph, &s).unwrap();
            let e = basis_index(&[E], ph, &s).unwrap();
            let f = basis_index(&[F], ph, &s).unwrap();
            assert_eq!(op[(e, g)], c(1.0));
            assert_eq!(op[(g, e)], c(1.0));
            assert_eq!(op[(f, f)], c(1.0));
        }
    }

    #[test]
    fn sigma_plus_raises_first_ion() {
        let s = CompositeSpace::new(2, 2).unwrap();
        let op = embed_single_ion(&sigma_plus(), 0, &s).unwrap();
        let psi = StateVector::basis(s, &[G, F], 0).unwrap();
        let out = op.dot(psi.amplitudes());
        let want = StateVector::basis(s, &[E, F], 0).unwrap();
        assert_eq!(&out, want.amplitudes());
    }

    #[test]
    fn project_examples() {
        let s = CompositeSpace::new(2, 2).unwrap();
        let map = LogicalIndexMap::new(s);

        let fe = StateVector::basis(s, &[F, E], 0).unwrap();
        let (l, leak) = logical_project(&fe, &map).unwrap();
        assert_eq!(l[0b11], c(1.0));
        assert_eq!(l.iter().filter(|a| a.norm() > 0.0).count(), 1);
        assert!(leak.abs() < 1e-15);

        let gg1 = StateVector::basis(s, &[G, G], 1).unwrap();
        let (l, leak) = logical_project(&gg1, &map).unwrap();
        assert!(l.iter().all(|a| a.norm() == 0.0));
        assert!((leak - 1.0).abs() < 1e-15);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = (fe.amplitudes() + gg1.amplitudes()).mapv(|a| a * h);
        let mix = StateVector::new(s, amps).unwrap();
        let (l, leak) = logical_project(&mix, &map).unwrap();
        let kept: f64 = l.iter().map(|a| a.norm_sqr()).sum();
        assert!((kept - 0.5).abs() < 1e-15);
        assert!((leak - 0.5).abs() < 1e-15);
    }

    #[test]
    fn logical_levels_convention() {
        assert_eq!(logical_levels(0b1001, 4), vec![F, G, G, E]);
        assert_eq!(logical_levels(0b0110, 4), vec![G, F, F, G]);
    }

    #[test]
    fn annihilation_lowers_phonon() {
        let s = CompositeSpace::new(1, 3).unwrap();
        let a = annihilation(&s);
        let i2 = basis_index(&[E], 2, &s).unwrap();
        let i1 = basis_index(&[E], 1, &s).unwrap();
        assert!((a[(i1, i2)].re - 2f64.sqrt()).abs() < 1e-15);
    }
}
