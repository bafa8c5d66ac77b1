use ndarray::{Array1, Array2};
use proptest::prelude::*;
use trapsearch_core::cpf::{
    alpha, alpha_deviation_bound, count_coefficient, cpf_diagonal, diffusion, ideal_cpf,
    mark_operator, max_abs_diff,
};
use trapsearch_core::grover::{ideal_marked_probability, run_search};
use trapsearch_core::hilbert::{basis_index, embed_single_ion, logical_levels};
use trapsearch_core::metrics::{gate_fidelity, gate_infidelity, gate_success};
use trapsearch_core::planner::{plan, FIT_CONSTANT};
use trapsearch_core::pulse::{closed_form_multi_g, evolve_adaptive, PulseSchedule, DEFAULT_STEPS};
use trapsearch_core::{
    CompositeSpace, GateMode, GateParams, GroverConfig, LevelLabel, MarkedState, Regime,
    StateVector, C64,
};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_op(vals: &[(f64, f64)]) -> Array2<C64> {
    Array2::from_shape_fn((3, 3), |(r, k)| {
        let (a, b) = vals[3 * r + k];
        c(a, b)
    })
}

proptest! {
    #[test]
    fn basis_index_round_trips(n in 1usize..5, d in 2usize..6, seed in any::<u64>()) {
        let space = CompositeSpace::new(n, d).unwrap();
        let idx = (seed % space.dim() as u64) as usize;
        let (levels, phonon) = space.decompose(idx);
        prop_assert_eq!(basis_index(&levels, phonon, &space).unwrap(), idx);
    }

    #[test]
    fn single_ion_embeds_commute(
        a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        b in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        i in 0usize..3, j in 0usize..3,
    ) {
        prop_assume!(i != j);
        let space = CompositeSpace::new(3, 2).unwrap();
        let ea = embed_single_ion(&random_op(&a), i, &space).unwrap();
        let eb = embed_single_ion(&random_op(&b), j, &space).unwrap();
        let diff = ea.dot(&eb) - eb.dot(&ea);
        prop_assert!(diff.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn alpha_stays_within_bound(s in 1usize..12, m in 1e-4f64..1.0) {
        let a = alpha(s, m).unwrap();
        prop_assert!(a <= 1.0 + 1e-15);
        prop_assert!(1.0 - a <= alpha_deviation_bound(s, m) + 1e-15);
    }

    #[test]
    fn count_symmetry(n in 3usize..20, s in 2usize..19) {
        prop_assume!(s < n && n - 1 - s >= 2);
        prop_assert_eq!(count_coefficient(n, s), count_coefficient(n, n - 1 - s));
    }

    #[test]
    fn quality_in_unit_interval(n in 2usize..30, m in 1e-3f64..0.2) {
        let f = gate_fidelity(n, m).unwrap();
        let p = gate_success(n, m).unwrap();
        let inf = gate_infidelity(n, m).unwrap();
        prop_assert!(f > 0.0 && f <= 1.0 + 1e-15);
        prop_assert!(p > 0.0 && p <= 1.0 + 1e-15);
        prop_assert!(inf >= 0.0);
        prop_assert!((1.0 - f - inf).abs() < 1e-12);
    }

    #[test]
    fn lambda_closed_form_is_unitary(thetas in prop::collection::vec(0.0f64..200.0, 1..6), tn in 0.1f64..60.0, eta in 0.01f64..0.5) {
        let amp = closed_form_multi_g(&thetas, tn, eta).unwrap();
        let norm = amp.diagonal.norm_sqr() + amp.phonon.norm_sqr() + amp.cross.iter().map(|z| z.norm_sqr()).sum::<f64>();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ideal_grover_matches_closed_form(n in 2usize..11, seed in any::<u64>(), k in 0usize..20) {
        let marked = MarkedState::new(n, (seed % (1u64 << n)) as usize).unwrap();
        let k = k.min(trapsearch_core::grover::iteration_cap(n));
        let trace = run_search(&GroverConfig::new(n, marked, k, GateMode::Ideal).unwrap()).unwrap();
        for p in &trace.points {
            prop_assert!((p.p_marked - ideal_marked_probability(n, p.k)).abs() < 1e-12);
            prop_assert!((p.norm2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn approximate_norm_never_grows(n in 2usize..9, seed in any::<u64>(), m in 0.005f64..0.2) {
        let marked = MarkedState::new(n, (seed % (1u64 << n)) as usize).unwrap();
        let cfg = GroverConfig::new(n, marked, 10, GateMode::Approximate(m)).unwrap();
        let trace = run_search(&cfg).unwrap();
        for w in trace.points.windows(2) {
            prop_assert!(w[1].norm2 <= w[0].norm2 + 1e-13);
        }
    }

    #[test]
    fn reflections_are_involutions(n in 2usize..7, seed in any::<u64>()) {
        let base = ideal_cpf(n);
        let marked = MarkedState::new(n, (seed % (1u64 << n)) as usize).unwrap();
        let eye: Array2<f64> = Array2::eye(1 << n);
        let j = mark_operator(&marked, &base).unwrap();
        let d = diffusion(n, &base).unwrap();
        prop_assert!(max_abs_diff(&j.dot(&j), &eye) < 1e-13);
        prop_assert!(max_abs_diff(&d.dot(&d), &eye) < 1e-12);
    }

    #[test]
    fn marked_state_text_round_trips(n in 1usize..20, seed in any::<u64>()) {
        let marked = MarkedState::new(n, (seed % (1u64 << n)) as usize).unwrap();
        let back = MarkedState::parse_for(&marked.to_string(), n).unwrap();
        prop_assert_eq!(back, marked);
    }

    #[test]
    fn plan_is_deterministic(n in 2usize..9, strong in any::<bool>()) {
        let regime = if strong { Regime::Strong } else { Regime::Weak };
        let a = plan(n, regime, 0.1, FIT_CONSTANT).unwrap();
        let b = plan(n, regime, 0.1, FIT_CONSTANT).unwrap();
        prop_assert_eq!(a.t0.to_bits(), b.t0.to_bits());
        let weak = plan(n, Regime::Weak, 0.1, FIT_CONSTANT).unwrap();
        let strong = plan(n, Regime::Strong, 0.1, FIT_CONSTANT).unwrap();
        prop_assert!((weak.t0 / strong.t0 - 50.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn numeric_matches_lambda_closed_form(m in 0.1f64..0.5) {
        let eta = 0.1;
        let schedule = PulseSchedule::cpf(2, m, eta, 1.0, 5.0).unwrap();
        let space = CompositeSpace::new(2, 3).unwrap();
        let input = StateVector::basis(space, &[LevelLabel::G, LevelLabel::E], 0).unwrap();
        let ev = evolve_adaptive(&input, &schedule, DEFAULT_STEPS).unwrap();
        let thetas = schedule.areas().thetas;
        let amp = closed_form_multi_g(&thetas[..1], thetas[1], eta).unwrap();
        let at = |l: [LevelLabel; 2], ph| ev.state.amplitudes()[basis_index(&l, ph, &space).unwrap()];
        prop_assert!((at([LevelLabel::G, LevelLabel::E], 0) - amp.diagonal).norm() < 1e-6);
        prop_assert!((at([LevelLabel::E, LevelLabel::G], 0) - amp.cross[0]).norm() < 1e-6);
        prop_assert!((at([LevelLabel::G, LevelLabel::G], 1) - amp.phonon).norm() < 1e-6);
    }

    #[test]
    fn evolution_is_linear(a in -1.0f64..1.0, b in -1.0f64..1.0, phase in 0.0f64..std::f64::consts::TAU) {
        prop_assume!(a.abs() + b.abs() > 0.1);
        let schedule = PulseSchedule::cpf(2, 0.3, 0.1, 1.0, 5.0).unwrap();
        let space = CompositeSpace::new(2, 3).unwrap();
        let x = StateVector::basis(space, &logical_levels(0b01, 2), 0).unwrap();
        let y = StateVector::basis(space, &logical_levels(0b11, 2), 0).unwrap();
        let norm = (a * a + b * b).sqrt();
        let (ca, cb) = (c(a / norm, 0.0), C64::from_polar(b / norm, phase));
        let mix: Array1<C64> = x.amplitudes().mapv(|z| z * ca) + y.amplitudes().mapv(|z| z * cb);
        let steps = 8000;
        let run = |s: &StateVector| trapsearch_core::pulse::evolve_numeric(s, &schedule, steps).unwrap().state;
        let ux = run(&x);
        let uy = run(&y);
        let umix = run(&StateVector::new(space, mix).unwrap());
        let expect = ux.amplitudes().mapv(|z| z * ca) + uy.amplitudes().mapv(|z| z * cb);
        prop_assert!(umix.amplitudes().iter().zip(expect.iter()).all(|(p, q)| (p - q).norm() < 1e-12));
    }
}

#[test]
fn dark_states_are_untouched() {
    let schedule = PulseSchedule::cpf(3, 0.1, 0.1, 1.0, 5.0).unwrap();
    let space = CompositeSpace::new(3, 3).unwrap();
    for bits in [0b000, 0b010, 0b100, 0b110] {
        let input = StateVector::basis(space, &logical_levels(bits, 3), 0).unwrap();
        let ev = evolve_adaptive(&input, &schedule, DEFAULT_STEPS).unwrap();
        assert!((ev.state.inner(&input).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn analytic_diagonal_layout_for_three_qubits() {
    let d = cpf_diagonal(GateParams::new(3, 0.1).unwrap());
    let a2 = alpha(2, 0.1).unwrap();
    let b = alpha(1, 0.1).unwrap();
    assert_eq!(d.entries(), &[1.0, a2, 1.0, b, 1.0, b, 1.0, -1.0]);
}
