//! Gaussian laser pulses, the first red-sideband interaction Hamiltonian and
//! its time evolution.
//!
//! In the Lamb–Dicke regime, to first order in `η`, each ion `j` couples its
//! `g ↔ e` transition to the shared mode through
//!
//! ```text
//! H(t) = Σ_j i η Ω_j(t) (a⁺ σ_j⁻ e^{-iφ_j} − a σ_j⁺ e^{iφ_j})
//! ```
//!
//! which for `φ_j = π/2` is the real Jaynes–Cummings form
//! `η Ω_j(t) (a⁺σ_j⁻ + aσ_j⁺)`. The `f` level never couples.
//!
//! Two routes to the propagator live here: [`evolve_numeric`] (fixed-step RK4
//! over the pulse window) and the closed forms
//! [`closed_form_no_g`], [`closed_form_single_g`], [`closed_form_multi_g`].

use std::f64::consts::{FRAC_PI_2, PI};

use ndarray::Array1;
use num_complex::Complex64 as C64;
use statrs::function::erf::erf;

use crate::error::{invalid, Error, Result};
use crate::hilbert::{
    annihilation, dagger, embed_single_ion, sigma_minus, CompositeSpace, Operator, StateVector,
};

/// Default ratio `t₀/τ`; keeps `erf(t₀/√2τ) ≈ 1 − 6e-7`.
pub const DEFAULT_KAPPA: f64 = 5.0;
/// Default RK4 steps per pulse window.
pub const DEFAULT_STEPS: usize = 4000;
/// Hard limit on RK4 steps in [`evolve_adaptive`].
pub const MAX_STEPS: usize = 1 << 20;
/// Norm drift above which [`evolve_numeric`] refuses the result.
pub const DRIFT_LIMIT: f64 = 1e-6;
/// Drift target of [`evolve_adaptive`].
pub const DRIFT_TARGET: f64 = 1e-9;
/// Largest population tolerated in the top Fock level.
pub const TOP_FOCK_LIMIT: f64 = 1e-8;

/// `Ω(t) = Ω_max exp(−(t − t₀)² / 2τ²)` with laser phase `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulse {
    pub omega_max: f64,
    pub tau: f64,
    pub t_center: f64,
    pub phase: f64,
}

impl GaussianPulse {
    /// Pulse with the default phase `π/2`.
    pub fn new(omega_max: f64, tau: f64, t_center: f64) -> Result<Self> {
        Self::with_phase(omega_max, tau, t_center, FRAC_PI_2)
    }

    pub fn with_phase(omega_max: f64, tau: f64, t_center: f64, phase: f64) -> Result<Self> {
        if !(omega_max >= 0.0) || !omega_max.is_finite() {
            return invalid(format!(
                "omega_max must be finite and >= 0, got {omega_max}"
            ));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return invalid(format!("tau must be positive, got {tau}"));
        }
        if !t_center.is_finite() || t_center < 0.0 {
            return invalid(format!("t_center must be finite and >= 0, got {t_center}"));
        }
        Ok(Self {
            omega_max,
            tau,
            t_center,
            phase,
        })
    }

    pub fn rabi_envelope(&self, t: f64) -> f64 {
        let x = (t - self.t_center) / self.tau;
        self.omega_max * (-0.5 * x * x).exp()
    }

    /// Area over `[0, 2t₀]`.
    pub fn pulse_area(&self) -> AreaEstimate {
        let approx = self.omega_max * (2.0 * PI).sqrt() * self.tau;
        let exact = approx * erf(self.t_center / (std::f64::consts::SQRT_2 * self.tau));
        let rel_error = if exact == 0.0 {
            0.0
        } else {
            (approx - exact) / exact
        };
        AreaEstimate {
            exact,
            approx,
            rel_error,
        }
    }
}

/// Free-function form of [`GaussianPulse::rabi_envelope`].
pub fn rabi_envelope(pulse: &GaussianPulse, t: f64) -> f64 {
    pulse.rabi_envelope(t)
}

/// Free-function form of [`GaussianPulse::pulse_area`].
pub fn pulse_area(pulse: &GaussianPulse) -> AreaEstimate {
    pulse.pulse_area()
}

/// Pulse area with and without the finite-window `erf` factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaEstimate {
    /// `Ω_max √(2π) τ erf(t₀/√2τ)`
    pub exact: f64,
    /// `Ω_max √(2π) τ`
    pub approx: f64,
    /// `(approx − exact)/exact`
    pub rel_error: f64,
}

/// Per-ion pulse areas of a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseArea {
    pub thetas: Vec<f64>,
}

impl PulseArea {
    /// `ϑ = √(ϑ_target² + Σ_{j∈g_ions} ϑ_j²)`.
    pub fn aggregate(&self, g_ions: &[usize], target: usize) -> f64 {
        let t = self.thetas[target];
        (t * t + g_ions.iter().map(|&j| self.thetas[j].powi(2)).sum::<f64>()).sqrt()
    }
}

/// Simultaneous Gaussian drive of every ion over the window `[0, 2t₀]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pulses: Vec<GaussianPulse>,
    eta: f64,
}

impl PulseSchedule {
    pub fn new(pulses: Vec<GaussianPulse>, eta: f64) -> Result<Self> {
        if pulses.is_empty() {
            return invalid("schedule needs one pulse per ion");
        }
        if !(eta > 0.0 && eta < 1.0) {
            return invalid(format!(
                "Lamb-Dicke parameter must lie in (0, 1), got {eta}"
            ));
        }
        let t0 = pulses[0].t_center;
        if pulses.iter().any(|p| p.t_center != t0) {
            return invalid("all pulses must share the same center t0");
        }
        Ok(Self { pulses, eta })
    }

    /// Gate schedule for `n` ions: equal widths `τ`, `t₀ = κτ`, the last ion's
    /// peak chosen so `η ϑ_n = π` (with the `erf` factor) and the control
    /// peaks `Ω_n / m`.
    pub fn cpf(n: usize, m: f64, eta: f64, tau: f64, kappa: f64) -> Result<Self> {
        if n < 1 {
            return invalid("need at least one ion");
        }
        if !(m > 0.0) {
            return invalid(format!("coupling ratio m must be positive, got {m}"));
        }
        if !(kappa > 0.0) {
            return invalid(format!("kappa must be positive, got {kappa}"));
        }
        let t0 = kappa * tau;
        let unit = GaussianPulse::new(1.0, tau, t0)?.pulse_area().exact;
        let omega_n = PI / (eta * unit);
        let mut pulses = vec![GaussianPulse::new(omega_n / m, tau, t0)?; n - 1];
        pulses.push(GaussianPulse::new(omega_n, tau, t0)?);
        Self::new(pulses, eta)
    }

    pub fn pulses(&self) -> &[GaussianPulse] {
        &self.pulses
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn t_center(&self) -> f64 {
        self.pulses[0].t_center
    }

    pub fn window(&self) -> (f64, f64) {
        (0.0, 2.0 * self.t_center())
    }

    pub fn areas(&self) -> PulseArea {
        PulseArea {
            thetas: self.pulses.iter().map(|p| p.pulse_area().exact).collect(),
        }
    }

    fn check_space(&self, space: &CompositeSpace) -> Result<()> {
        if space.n_ions() != self.pulses.len() {
            return Err(Error::DimensionMismatch {
                expected: self.pulses.len(),
                actual: space.n_ions(),
            });
        }
        Ok(())
    }
}

/// Time-independent part of ion `ion`'s coupling:
/// `η (i e^{-iφ} a⁺σ⁻ − i e^{iφ} aσ⁺)`.
pub fn coupling_operator(
    ion: usize,
    phase: f64,
    eta: f64,
    space: &CompositeSpace,
) -> Result<Operator> {
    let a = annihilation(space);
    let lower = embed_single_ion(&sigma_minus(), ion, space)?;
    let emit = dagger(&a).dot(&lower);
    let absorb = dagger(&emit);
    let c_emit = C64::new(0.0, 1.0) * C64::from_polar(eta, -phase);
    let c_absorb = C64::new(0.0, -1.0) * C64::from_polar(eta, phase);
    Ok(emit.mapv(|z| z * c_emit) + absorb.mapv(|z| z * c_absorb))
}

/// Dense `H(t)`.
pub fn build_hamiltonian(
    schedule: &PulseSchedule,
    space: &CompositeSpace,
    t: f64,
) -> Result<Operator> {
    schedule.check_space(space)?;
    let dim = space.dim();
    let mut h = Operator::zeros((dim, dim));
    for (ion, p) in schedule.pulses.iter().enumerate() {
        let w = p.rabi_envelope(t);
        if w == 0.0 {
            continue;
        }
        let k = coupling_operator(ion, p.phase, schedule.eta, space)?;
        h.scaled_add(C64::new(w, 0.0), &k);
    }
    Ok(h)
}

/// Non-zero entries of a coupling operator; the RK4 kernel only ever needs
/// `K_j ψ`, and each `K_j` has at most `dim` entries.
#[derive(Debug, Clone)]
struct Coupling {
    entries: Vec<(usize, usize, C64)>,
    pulse: GaussianPulse,
}

impl Coupling {
    fn from_dense(op: &Operator, pulse: GaussianPulse) -> Self {
        let entries = op
            .indexed_iter()
            .filter(|(_, v)| v.norm() > 0.0)
            .map(|((r, c), v)| (r, c, *v))
            .collect();
        Self { entries, pulse }
    }
}

/// Result of a numerical propagation.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: StateVector,
    /// `|‖ψ(T)‖ − 1|`
    pub norm_drift: f64,
    pub steps: usize,
    /// Largest population seen in the top Fock level at any step.
    pub max_top_fock: f64,
}

/// Precomputed propagator inputs for one schedule on one space.
#[derive(Debug, Clone)]
pub struct Propagator {
    space: CompositeSpace,
    couplings: Vec<Coupling>,
    window: (f64, f64),
}

impl Propagator {
    pub fn new(schedule: &PulseSchedule, space: &CompositeSpace) -> Result<Self> {
        schedule.check_space(space)?;
        let couplings = schedule
            .pulses
            .iter()
            .enumerate()
            .filter(|(_, p)| p.omega_max > 0.0)
            .map(|(ion, p)| {
                Ok(Coupling::from_dense(
                    &coupling_operator(ion, p.phase, schedule.eta, space)?,
                    *p,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            space: *space,
            couplings,
            window: schedule.window(),
        })
    }

    /// `out = −i H(t) ψ`
    fn rhs(&self, t: f64, psi: &Array1<C64>, out: &mut Array1<C64>) {
        out.fill(C64::new(0.0, 0.0));
        for c in &self.couplings {
            let w = C64::new(0.0, -c.pulse.rabi_envelope(t));
            for &(r, col, v) in &c.entries {
                out[r] += w * v * psi[col];
            }
        }
    }

    /// Fixed-step RK4 without renormalisation.
    pub fn run(&self, initial: &StateVector, steps: usize) -> Result<Evolution> {
        if steps == 0 {
            return invalid("steps must be >= 1");
        }
        if *initial.space() != self.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                actual: initial.space().dim(),
            });
        }
        let n0 = initial.norm_sqr();
        if (n0 - 1.0).abs() > 1e-10 {
            return invalid(format!("initial state must be normalized, norm^2 = {n0}"));
        }
        let top = self.space.fock_dim() - 1;
        let mut psi = initial.amplitudes().clone();
        let dim = psi.len();
        let (t_start, t_end) = self.window;
        let h = (t_end - t_start) / steps as f64;
        let half = C64::new(0.5 * h, 0.0);
        let full = C64::new(h, 0.0);
        let sixth = C64::new(h / 6.0, 0.0);
        let mut k1 = Array1::zeros(dim);
        let mut k2 = Array1::zeros(dim);
        let mut k3 = Array1::zeros(dim);
        let mut k4 = Array1::zeros(dim);
        let mut tmp = Array1::zeros(dim);
        let mut max_top = top_population(&psi, &self.space, top);

        if !self.couplings.is_empty() {
            for step in 0..steps {
                let t = t_start + step as f64 * h;
                self.rhs(t, &psi, &mut k1);
                tmp.assign(&psi);
                tmp.scaled_add(half, &k1);
                self.rhs(t + 0.5 * h, &tmp, &mut k2);
                tmp.assign(&psi);
                tmp.scaled_add(half, &k2);
                self.rhs(t + 0.5 * h, &tmp, &mut k3);
                tmp.assign(&psi);
                tmp.scaled_add(full, &k3);
                self.rhs(t + h, &tmp, &mut k4);
                for i in 0..dim {
                    psi[i] += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
                max_top = max_top.max(top_population(&psi, &self.space, top));
            }
        }

        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        Ok(Evolution {
            state: StateVector::new(self.space, psi)?,
            norm_drift: (norm - 1.0).abs(),
            steps,
            max_top_fock: max_top,
        })
    }
}

fn top_population(psi: &Array1<C64>, space: &CompositeSpace, top: usize) -> f64 {
    psi.iter()
        .skip(top)
        .step_by(space.fock_dim())
        .map(|a| a.norm_sqr())
        .sum()
}

fn accept(ev: Evolution, drift_limit: f64) -> Result<Evolution> {
    if ev.max_top_fock > TOP_FOCK_LIMIT {
        return Err(Error::FockTruncation {
            population: ev.max_top_fock,
            limit: TOP_FOCK_LIMIT,
        });
    }
    if ev.norm_drift > drift_limit {
        return Err(Error::IntegrationAccuracy {
            drift: ev.norm_drift,
            steps: ev.steps,
            limit: drift_limit,
        });
    }
    Ok(ev)
}

/// Integrates `i dψ/dt = H(t) ψ` over the schedule window with `steps` RK4
/// steps. Fails if the norm drifts by more than [`DRIFT_LIMIT`] or the top
/// Fock level is ever populated above [`TOP_FOCK_LIMIT`].
pub fn evolve_numeric(
    initial: &StateVector,
    schedule: &PulseSchedule,
    steps: usize,
) -> Result<Evolution> {
    let prop = Propagator::new(schedule, initial.space())?;
    accept(prop.run(initial, steps)?, DRIFT_LIMIT)
}

/// Like [`evolve_numeric`] but doubles the step count, starting from
/// `initial_steps`, until the drift is below [`DRIFT_TARGET`].
pub fn evolve_adaptive(
    initial: &StateVector,
    schedule: &PulseSchedule,
    initial_steps: usize,
) -> Result<Evolution> {
    let prop = Propagator::new(schedule, initial.space())?;
    evolve_adaptive_with(&prop, initial, initial_steps)
}

pub fn evolve_adaptive_with(
    prop: &Propagator,
    initial: &StateVector,
    initial_steps: usize,
) -> Result<Evolution> {
    let mut steps = initial_steps.max(1);
    loop {
        let ev = prop.run(initial, steps)?;
        if ev.max_top_fock > TOP_FOCK_LIMIT {
            return accept(ev, DRIFT_TARGET);
        }
        if ev.norm_drift < DRIFT_TARGET || steps >= MAX_STEPS {
            return accept(ev, DRIFT_TARGET);
        }
        steps = (steps * 2).min(MAX_STEPS);
    }
}

/// Amplitudes of `|e_n,0⟩` and `|g_n,1⟩` when only the target ion couples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoGAmplitudes {
    pub excited: C64,
    pub phonon: C64,
}

pub fn closed_form_no_g(theta_n: f64, eta: f64) -> NoGAmplitudes {
    let a = eta * theta_n;
    NoGAmplitudes {
        excited: C64::new(a.cos(), 0.0),
        phonon: C64::new(0.0, -a.sin()),
    }
}

/// Amplitudes after one control ion `k` in `g` plus the target in `e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleGAmplitudes {
    /// `|g_k e_n 0⟩`
    pub diagonal: C64,
    /// `|e_k g_n 0⟩`
    pub cross: C64,
    /// `|g_k g_n 1⟩`
    pub phonon: C64,
}

pub fn closed_form_single_g(theta_k: f64, theta_n: f64, eta: f64) -> Result<SingleGAmplitudes> {
    let multi = closed_form_multi_g(&[theta_k], theta_n, eta)?;
    Ok(SingleGAmplitudes {
        diagonal: multi.diagonal,
        cross: multi.cross[0],
        phonon: multi.phonon,
    })
}

/// Amplitudes after `s` control ions in `g` plus the target in `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGAmplitudes {
    /// Initial state `|g…g e_n 0⟩`.
    pub diagonal: C64,
    /// `|…e_k… g_n 0⟩` for each driven control `k`, in input order.
    pub cross: Vec<C64>,
    /// `|g…g g_n 1⟩`.
    pub phonon: C64,
}

/// The target and the `s` controls form a Λ system around `|g…g g_n 1⟩`:
/// only the bright combination `(ϑ_n|e_n⟩ + Σϑ_k|e_k⟩)/ϑ` rotates, by angle
/// `ηϑ` with `ϑ = √(ϑ_n² + Σϑ_k²)`.
pub fn closed_form_multi_g(thetas: &[f64], theta_n: f64, eta: f64) -> Result<MultiGAmplitudes> {
    if thetas.is_empty() {
        return invalid("need at least one control ion in g");
    }
    if theta_n < 0.0 || thetas.iter().any(|&t| t < 0.0) {
        return invalid("pulse areas must be non-negative");
    }
    let total2 = theta_n * theta_n + thetas.iter().map(|t| t * t).sum::<f64>();
    if total2 == 0.0 {
        return invalid("at least one pulse area must be positive");
    }
    let total = total2.sqrt();
    let (c, s) = ((eta * total).cos(), (eta * total).sin());
    let tn2 = theta_n * theta_n;
    Ok(MultiGAmplitudes {
        diagonal: C64::new(tn2 / total2 * c + (total2 - tn2) / total2, 0.0),
        cross: thetas
            .iter()
            .map(|&tk| C64::new(theta_n * tk / total2 * (c - 1.0), 0.0))
            .collect(),
        phonon: C64::new(0.0, -theta_n / total * s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_index, LevelLabel::*};

    #[test]
    fn envelope_examples() {
        let p = GaussianPulse::new(2.0 * PI * 1000.0, 1e-3, 5e-3).unwrap();
        assert_eq!(p.rabi_envelope(5e-3), p.omega_max);
        let sigma = p.omega_max * (-0.5f64).exp();
        assert!((p.rabi_envelope(4e-3) - sigma).abs() < 1e-9);
        assert!((p.rabi_envelope(6e-3) - sigma).abs() < 1e-9);
        let two = 2.0 * PI * 1000.0 * (-2.0f64).exp();
        assert!((p.rabi_envelope(7e-3) - two).abs() < 1e-9);
    }

    #[test]
    fn area_examples() {
        let p = GaussianPulse::new(1.0, 1.0, 40.0).unwrap();
        assert!((p.pulse_area().exact - 2.506628).abs() < 1e-6);
        let z = GaussianPulse::new(0.0, 1.0, 5.0).unwrap();
        assert_eq!(z.pulse_area().exact, 0.0);
        let p5 = GaussianPulse::new(1.0, 1.0, 5.0).unwrap().pulse_area();
        // erf(5/√2) = 1 − 5.733e-7
        assert!((p5.exact / p5.approx - (1.0 - 5.733031e-7)).abs() < 1e-12);
        assert!((p5.exact - 2.506627).abs() < 1e-6);
        assert!(p5.rel_error > 0.0 && p5.rel_error < 1e-6);
    }

    #[test]
    fn pulse_validation() {
        assert!(GaussianPulse::new(-1.0, 1.0, 5.0).is_err());
        assert!(GaussianPulse::new(1.0, 0.0, 5.0).is_err());
        let a = GaussianPulse::new(1.0, 1.0, 5.0).unwrap();
        let b = GaussianPulse::new(1.0, 1.0, 4.0).unwrap();
        assert!(PulseSchedule::new(vec![a, b], 0.1).is_err());
        assert!(PulseSchedule::new(vec![a, a], 1.0).is_err());
        assert!(PulseSchedule::new(vec![a, a], 0.1).is_ok());
    }

    #[test]
    fn zero_drive_hamiltonian_vanishes() {
        let s = CompositeSpace::new(2, 3).unwrap();
        let p = GaussianPulse::new(0.0, 1.0, 5.0).unwrap();
        let sched = PulseSchedule::new(vec![p, p], 0.1).unwrap();
        let h = build_hamiltonian(&sched, &s, 5.0).unwrap();
        assert!(h.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn single_jc_matrix_element() {
        let s = CompositeSpace::new(1, 3).unwrap();
        let p = GaussianPulse::new(3.0, 1.0, 5.0).unwrap();
        let sched = PulseSchedule::new(vec![p], 0.1).unwrap();
        let h = build_hamiltonian(&sched, &s, 5.0).unwrap();
        let g1 = basis_index(&[G], 1, &s).unwrap();
        let e0 = basis_index(&[E], 0, &s).unwrap();
        assert!((h[(g1, e0)] - C64::new(0.3, 0.0)).norm() < 1e-15);
        assert!((h[(e0, g1)] - C64::new(0.3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_drive_is_identity() {
        let s = CompositeSpace::new(2, 3).unwrap();
        let p = GaussianPulse::new(0.0, 1.0, 5.0).unwrap();
        let sched = PulseSchedule::new(vec![p, p], 0.1).unwrap();
        let psi = StateVector::basis(s, &[G, E], 0).unwrap();
        let ev = evolve_numeric(&psi, &sched, 10).unwrap();
        assert_eq!(ev.state, psi);
    }

    fn single_ion(area: f64) -> (CompositeSpace, PulseSchedule) {
        let s = CompositeSpace::new(1, 4).unwrap();
        let eta = 0.1;
        let unit = GaussianPulse::new(1.0, 1.0, 5.0)
            .unwrap()
            .pulse_area()
            .exact;
        let p = GaussianPulse::new(area / (eta * unit), 1.0, 5.0).unwrap();
        (s, PulseSchedule::new(vec![p], eta).unwrap())
    }

    #[test]
    fn full_area_flips_sign() {
        let (s, sched) = single_ion(PI);
        let psi = StateVector::basis(s, &[E], 0).unwrap();
        let ev = evolve_adaptive(&psi, &sched, DEFAULT_STEPS).unwrap();
        let overlap = psi.inner(&ev.state).unwrap();
        // fidelity with −|e,0⟩
        assert!((overlap + 1.0).norm_sqr() < 1e-12);
        assert!(overlap.norm_sqr() >= 1.0 - 1e-6);
    }

    #[test]
    fn half_area_moves_to_phonon() {
        let (s, sched) = single_ion(FRAC_PI_2);
        let psi = StateVector::basis(s, &[E], 0).unwrap();
        let ev = evolve_adaptive(&psi, &sched, DEFAULT_STEPS).unwrap();
        let g1 = basis_index(&[G], 1, &s).unwrap();
        assert!((ev.state.amplitudes()[g1] - C64::new(0.0, -1.0)).norm() < 1e-6);
    }

    #[test]
    fn coarse_steps_are_rejected() {
        let (s, sched) = single_ion(40.0 * PI);
        let psi = StateVector::basis(s, &[E], 0).unwrap();
        assert!(matches!(
            evolve_numeric(&psi, &sched, 20),
            Err(Error::IntegrationAccuracy { .. })
        ));
    }

    #[test]
    fn top_fock_population_is_rejected() {
        let s = CompositeSpace::new(1, 2).unwrap();
        let (_, sched) = single_ion(FRAC_PI_2);
        let psi = StateVector::basis(s, &[E], 0).unwrap();
        assert!(matches!(
            evolve_numeric(&psi, &sched, 4000),
            Err(Error::FockTruncation { .. })
        ));
    }

    #[test]
    fn single_g_degenerates_to_target_only() {
        let a = closed_form_single_g(0.0, 7.0, 0.1).unwrap();
        let b = closed_form_no_g(7.0, 0.1);
        assert!((a.diagonal - b.excited).norm() < 1e-15);
        assert!((a.phonon - b.phonon).norm() < 1e-15);
        assert_eq!(a.cross, C64::new(0.0, 0.0));
        assert!(closed_form_single_g(0.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn single_g_beta_value() {
        let eta = 0.1;
        let theta_n = PI / eta;
        let a = closed_form_single_g(theta_n / 0.1, theta_n, eta).unwrap();
        assert!((a.diagonal.re - 0.99988).abs() < 1e-5);
    }

    #[test]
    fn multi_g_matches_alpha_values() {
        let eta = 0.1;
        let tn = PI / eta;
        let tk = tn / 0.1;
        let one = closed_form_multi_g(&[tk], tn, eta).unwrap();
        let single = closed_form_single_g(tk, tn, eta).unwrap();
        assert_eq!(one.diagonal, single.diagonal);
        assert_eq!(one.cross[0], single.cross);
        let a3 = closed_form_multi_g(&[tk, tk, tk], tn, eta).unwrap();
        assert!((a3.diagonal.re - 0.99516).abs() < 1e-5);
        // α₂ from the Λ-system algebra
        let a2 = closed_form_multi_g(&[tk, tk], tn, eta).unwrap();
        assert!((a2.diagonal.re - 0.999246758783).abs() < 1e-11);
    }

    #[test]
    fn multi_g_is_unitary() {
        let amps = closed_form_multi_g(&[3.0, 5.0, 11.0], 2.0, 0.37).unwrap();
        let total = amps.diagonal.norm_sqr()
            + amps.cross.iter().map(|c| c.norm_sqr()).sum::<f64>()
            + amps.phonon.norm_sqr();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cpf_schedule_target_area() {
        let sched = PulseSchedule::cpf(3, 0.1, 0.1, 1.0, DEFAULT_KAPPA).unwrap();
        let areas = sched.areas();
        assert!((0.1 * areas.thetas[2] - PI).abs() < 1e-12);
        assert!((areas.thetas[2] / areas.thetas[0] - 0.1).abs() < 1e-14);
        assert!((areas.aggregate(&[0, 1], 2) - areas.thetas[0] * (2.01f64).sqrt()).abs() < 1e-9);
    }
}
