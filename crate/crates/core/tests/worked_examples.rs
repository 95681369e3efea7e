//! Small hand-checkable cases across the whole pipeline.

use std::f64::consts::PI;

use num_complex::Complex64;
use psforge::algebra::{from_su2, inner_product, is_special_unitary, to_su2, Mat2, Su2, Vector3};
use psforge::dalembert::ChainGrid;
use psforge::dalembert::{
    assemble_frame, extended_frame, frame_from_generalized, revolution_potentials,
    NormalizedPotentials,
};
use psforge::hirota::{
    extract_transitions, hirota_residual, hirota_step, lattice_frames, lattice_mesh, quad_residual,
    reconstruct_lattice, FrameProvider, GaugeFixed, HirotaGrid,
};
use psforge::loops::{
    birkhoff_split, swap_plus_minus, Factor, FactorChain, IncrementalSplit, MinusFactor,
    Normalization, PhaseFactor, PlusFactor, Side,
};
use psforge::surface::{build_mesh, Window};
use psforge::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real(x: f64) -> Complex64 {
    c(x, 0.0)
}

fn samples() -> Vec<Complex64> {
    let mut v: Vec<Complex64> = [0.3, 0.7, 1.0, 1.6, 2.5, 4.0, -0.5, -1.3]
        .into_iter()
        .map(real)
        .collect();
    v.extend((0..8).map(|k| Complex64::from_polar(1.0, 0.35 + 0.7 * k as f64)));
    v
}

#[test]
fn su2_identification() {
    let x = to_su2(Vector3::new(1.0, 0.0, 0.0));
    assert_eq!(
        *x.matrix(),
        Mat2::new(c(0.0, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(0.0, 0.0))
    );
    let z = to_su2(Vector3::new(0.0, 0.0, 1.0));
    assert_eq!(from_su2(&z), Vector3::new(0.0, 0.0, 1.0));
    let m = Mat2::new(c(0.0, 0.0), c(0.0, 0.4), c(0.0, 0.4), c(0.0, 0.0));
    let v = from_su2(&Su2::try_from_matrix(m, 1e-12).unwrap());
    assert!(v.max_abs_diff(&Vector3::new(0.8, 0.0, 0.0)) < 1e-15);
    let w = to_su2(Vector3::new(3.0, 4.0, 0.0));
    assert!((inner_product(&w, &w) - 25.0).abs() < 1e-13);
    let y = to_su2(Vector3::new(0.0, 1.0, 0.0));
    assert!(inner_product(&x, &y).abs() < 1e-15);
    assert!(!is_special_unitary(&Mat2::diag(real(2.0), real(0.5)), 1e-9));
}

#[test]
fn elementary_factor_values() {
    let e = PlusFactor::new(0.0, c(0.0, 0.5))
        .unwrap()
        .eval(real(1.0))
        .unwrap();
    let s = 1.0 / 1.25f64.sqrt();
    let expected = Mat2::new(real(s), c(0.0, 0.5 * s), c(0.0, 0.5 * s), real(s));
    assert!(e.max_diff(&expected) < 1e-15);
    let ph = PhaseFactor::new(PI / 2.0).matrix();
    assert!(ph.max_diff(&Mat2::diag(c(0.0, 1.0), c(0.0, -1.0))) < 1e-15);
}

#[test]
fn swap_degenerate_cases() {
    let p = PlusFactor::new(0.4, real(0.0)).unwrap();
    let m = MinusFactor::new(-0.3, c(0.2, 0.5)).unwrap();
    let (mt, pt) = swap_plus_minus(&p, &m, Normalization::ZeroKappa);
    assert_eq!(mt.kappa(), 0.0);
    assert!((mt.b() - m.b() * Complex64::from_polar(1.0, 2.0 * 0.4 - 0.3)).norm() < 1e-15);
    assert!((pt.theta() - 0.1).abs() < 1e-15);
    assert_eq!(pt.a(), real(0.0));

    let p = PlusFactor::new(0.4, c(0.3, -0.2)).unwrap();
    let m = MinusFactor::new(0.9, real(0.0)).unwrap();
    let (mt, pt) = swap_plus_minus(&p, &m, Normalization::ZeroKappa);
    assert_eq!(mt.b(), real(0.0));
    for l in samples() {
        let lhs = p.eval(l).unwrap() * m.eval(l).unwrap();
        let rhs = mt.eval(l).unwrap() * pt.eval(l).unwrap();
        assert!(lhs.max_diff(&rhs) < 1e-14);
    }
}

#[test]
fn swap_reference_case() {
    let p = PlusFactor::new(0.3, c(0.4, 0.2)).unwrap();
    let m = MinusFactor::new(-0.7, c(0.0, -0.5)).unwrap();
    for norm in [Normalization::ZeroKappa, Normalization::ZeroTheta] {
        let (mt, pt) = swap_plus_minus(&p, &m, norm);
        for l in samples() {
            let lhs = p.eval(l).unwrap() * m.eval(l).unwrap();
            let rhs = mt.eval(l).unwrap() * pt.eval(l).unwrap();
            assert!(lhs.max_diff(&rhs) < 1e-12);
        }
    }
}

#[test]
fn absorbing_a_half_turn() {
    let a = c(0.3, -0.1);
    let p = PlusFactor::new(0.0, a).unwrap().absorb(PI, Side::Left);
    assert!((p.theta() - PI).abs() < 1e-15);
    assert!((p.a() + a).norm() < 1e-15);
    assert_eq!(
        PlusFactor::new(0.2, a).unwrap().absorb(0.0, Side::Right),
        PlusFactor::new(0.2, a).unwrap()
    );
}

#[test]
fn inverse_examples() {
    let id = Factor::from(PlusFactor::new(0.0, real(0.0)).unwrap());
    assert_eq!(id.inverse(), id);
    assert_eq!(
        Factor::from(PhaseFactor::new(PI / 4.0)).inverse(),
        Factor::from(PhaseFactor::new(-PI / 4.0))
    );
}

#[test]
fn split_of_sorted_and_single_pair_chains() {
    let m = MinusFactor::new(0.0, c(0.1, 0.6)).unwrap();
    let p = PlusFactor::new(0.2, c(-0.4, 0.3)).unwrap();
    let sorted = FactorChain::from_factors(vec![m.into(), p.into()]);
    let s = birkhoff_split(&sorted).unwrap();
    assert_eq!(s.swaps, 0);
    assert_eq!(s.minus.factors(), &[Factor::Minus(m)]);
    assert_eq!(s.plus.factors(), &[Factor::Plus(p)]);

    let pair = FactorChain::from_factors(vec![p.into(), m.into()]);
    let s = birkhoff_split(&pair).unwrap();
    assert_eq!(s.swaps, 1);
    let (mt, pt) = swap_plus_minus(&p, &m, Normalization::ZeroKappa);
    assert_eq!(s.minus.factors(), &[Factor::Minus(mt)]);
    assert_eq!(s.plus.factors(), &[Factor::Plus(pt)]);
}

#[test]
fn periodic_chain_split_follows_pairwise_recursion() {
    // (B₋B₊)^k splits as B₋ B₋,₁ ⋯ B₋,ₖ₋₁ · B₊,ₖ₋₁ ⋯ B₊,₁ B₊ with
    // B₊,ᵢ B₋,ᵢ = B₋,ᵢ₊₁ B₊,ᵢ₊₁ and B₊,₀ = B₊, B₋,₀ = B₋.
    let gp = revolution_potentials(0.8, 8).unwrap();
    let eta_inv = gp.eta_n(0).inverse();
    let b_minus = match eta_inv.factors()[0] {
        Factor::Minus(m) => m,
        _ => unreachable!(),
    };
    let (ph, a_inv) = match (eta_inv.factors()[1], eta_inv.factors()[2]) {
        (Factor::Phase(ph), Factor::Plus(p)) => (ph, p),
        _ => unreachable!(),
    };
    let b_plus = a_inv.absorb(ph.delta(), Side::Left);
    let k = 5;

    let mut minus = vec![b_minus];
    let mut plus = vec![b_plus];
    let (mut bm, mut bp) = (b_minus, b_plus);
    for _ in 1..k {
        let (m_next, p_next) = swap_plus_minus(&bp, &bm, Normalization::ZeroKappa);
        minus.push(m_next);
        plus.push(p_next);
        bm = m_next;
        bp = p_next;
    }
    let v_minus: FactorChain = minus.into_iter().map(Factor::Minus).collect();
    let v_plus_inv: FactorChain = plus.into_iter().rev().map(Factor::Plus).collect();

    let chain = eta_inv.power(k);
    let split = birkhoff_split(&chain).unwrap();
    for l in samples() {
        let scale = chain.eval(l).unwrap().max_abs().max(1.0);
        assert!(
            split
                .minus
                .eval(l)
                .unwrap()
                .max_diff(&v_minus.eval(l).unwrap())
                < 1e-11 * scale
        );
        assert!(
            split
                .plus
                .eval(l)
                .unwrap()
                .max_diff(&v_plus_inv.eval(l).unwrap())
                < 1e-11 * scale
        );
    }
}

#[test]
fn incremental_split_basics() {
    let inc = IncrementalSplit::new();
    assert!(inc.minus_part().is_empty() && inc.plus_part().is_empty());
    let mut inc = IncrementalSplit::new();
    let m = MinusFactor::new(0.0, c(0.2, 0.1)).unwrap();
    inc.push(m.into()).unwrap();
    assert_eq!(inc.minus_part().factors(), &[Factor::Minus(m)]);
    assert!(inc.plus_part().is_empty());
}

#[test]
fn potential_factors() {
    let pot = NormalizedPotentials::new(
        vec![0.0, PI / 2.0, 0.3],
        vec![0.0, PI, -0.2],
        vec![1.0, 1.0, 0.8],
        vec![1.0, 1.0, 0.8],
    )
    .unwrap();
    assert!((pot.xi_plus(0).unwrap().a() - c(0.0, 0.5)).norm() < 1e-15);
    assert!((pot.xi_plus(1).unwrap().a() - real(0.5)).norm() < 1e-15);
    let a = pot.xi_plus(2).unwrap().a();
    assert!((a - c(0.0, 0.4) * Complex64::from_polar(1.0, -0.3)).norm() < 1e-15);
    let l = real(1.3);
    let e = pot.xi_plus(2).unwrap().eval(l).unwrap();
    let delta = (1.0 + 0.16 * 1.69f64).sqrt();
    assert!((e.m21 - c(0.0, 0.4) * Complex64::from_polar(1.0, 0.3) * 1.3 / delta).norm() < 1e-15);

    assert!((pot.xi_minus(0).unwrap().b() - c(0.0, -0.5)).norm() < 1e-15);
    assert!((pot.xi_minus(1).unwrap().b() - c(0.0, 0.5)).norm() < 1e-15);
    assert!(
        (pot.xi_minus(2).unwrap().b() - c(0.0, -0.4) * Complex64::from_polar(1.0, -0.2)).norm()
            < 1e-15
    );

    assert!((pot.k(2).unwrap() + PI).abs() < 1e-15);
}

#[test]
fn k_of_two_steps() {
    let pot =
        NormalizedPotentials::new(vec![0.0, 0.5], vec![0.0], vec![1.0, 1.0], vec![1.0]).unwrap();
    assert_eq!(pot.k(0).unwrap(), 0.0);
    assert_eq!(pot.k(1).unwrap(), 0.0);
    assert!((pot.k(2).unwrap() + 1.0).abs() < 1e-15);
    assert!((pot.phase_k(2).unwrap().delta() + 0.5).abs() < 1e-15);
}

#[test]
fn constant_plus_frame_is_a_power() {
    let pot = NormalizedPotentials::constant(3, 1, 0.0, 0.0, 1.1, 0.8).unwrap();
    let f = pot.solve_frame_plus(3).unwrap();
    let one = pot.xi_plus(0).unwrap();
    for l in samples() {
        let e = one.eval(l).unwrap();
        assert!(f.eval(l).unwrap().max_diff(&(e * e * e)) < 1e-14);
    }
    assert!(pot.solve_frame_plus(0).unwrap().is_empty());
}

#[test]
fn small_frames() {
    let pot = NormalizedPotentials::constant(2, 2, 0.0, 0.0, 0.8, 0.8).unwrap();
    assert!(extended_frame(&pot, 0, 0).unwrap().is_empty());
    let f10 = extended_frame(&pot, 1, 0).unwrap();
    let direct = pot.solve_frame_plus(1).unwrap();
    for l in samples() {
        assert!(f10.eval(l).unwrap().max_diff(&direct.eval(l).unwrap()) < 1e-14);
    }

    // (2,2) against the product U(0,0) U(1,0) V(2,0) V(2,1) of the lattice matrices.
    let grid = HirotaGrid::from_potentials(&pot, Window::new(2, 2).unwrap()).unwrap();
    let f22 = extended_frame(&pot, 2, 2).unwrap();
    for l in [
        real(0.5),
        real(1.0),
        real(2.0),
        Complex64::from_polar(1.0, PI / 3.0),
    ] {
        let direct = grid.u_matrix(0, 0, l).unwrap()
            * grid.u_matrix(1, 0, l).unwrap()
            * grid.v_matrix(2, 0, l).unwrap()
            * grid.v_matrix(2, 1, l).unwrap();
        assert!(f22.eval(l).unwrap().max_diff(&direct) < 1e-10);
    }
}

#[test]
fn revolution_parameters() {
    let gp = revolution_potentials(0.8, 8).unwrap();
    let eta = gp.eta_n(0);
    assert_eq!(eta.len(), 3);
    assert!((eta.phase_factors().next().unwrap().delta() - PI / 8.0).abs() < 1e-15);
    assert!((eta.plus_factors().next().unwrap().a() - c(0.0, 0.4)).norm() < 1e-15);
    assert!((eta.minus_factors().next().unwrap().b() - c(0.0, -0.4)).norm() < 1e-15);
    let flat = revolution_potentials(0.4, 1).unwrap();
    let l = flat.eta_n(0).phase_factors().next().unwrap().matrix();
    assert!(l.max_diff(&Mat2::diag(real(-1.0), real(-1.0))) < 1e-15);
    assert!(revolution_potentials(2.0, 8).is_err());
}

#[test]
fn generalized_frames_from_both_sides() {
    let gp = revolution_potentials(0.8, 8).unwrap();
    assert!(frame_from_generalized(&gp, 0, 0).unwrap().is_empty());
    let f = assemble_frame(&gp, 3, 2).unwrap();
    for l in samples() {
        let a = f.via_n.eval(l).unwrap();
        assert!(a.max_diff(&f.via_m.eval(l).unwrap()) < 1e-11 * a.max_abs().max(1.0));
    }
}

#[test]
fn lattice_step_cases() {
    assert_eq!(hirota_step(0.0, 0.0, 0.0, 0.8, 0.8).unwrap(), 0.0);
    let v = hirota_step(0.1, 0.4, -0.2, 1e-9, 1e-9).unwrap();
    assert!((v - (0.4 - 0.2 - 0.1)).abs() < 1e-15);
    let v = hirota_step(0.1, 0.4, -0.2, 0.8, 0.8).unwrap();
    assert!(quad_residual(0.1, 0.4, -0.2, v, 0.8, 0.8) < 1e-15);
}

#[test]
fn lattice_residual_cases() {
    let w = Window::new(3, 3).unwrap();
    let zero = HirotaGrid::new(w, vec![0.0; 16], vec![0.8; 3], vec![1.2; 3]).unwrap();
    assert_eq!(hirota_residual(&zero), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noise: Vec<f64> = (0..16).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let noisy = HirotaGrid::new(w, noise, vec![0.8; 3], vec![1.2; 3]).unwrap();
    assert!(hirota_residual(&noisy) > 1e-3);
}

#[test]
fn constant_data_lattice() {
    let pot = NormalizedPotentials::constant(4, 4, 0.0, 0.0, 0.8, 0.8).unwrap();
    let grid = HirotaGrid::from_potentials(&pot, Window::new(4, 4).unwrap()).unwrap();
    for n in 0..=4 {
        assert_eq!(grid.u(n, 0), 0.0);
    }
    let frames = lattice_frames(&grid, real(1.0)).unwrap();
    let u = grid.u_matrix(0, 0, real(1.0)).unwrap();
    assert!(frames.get(2, 0).max_diff(&(u * u)) < 1e-15);
}

#[test]
fn random_lattice_matches_chain_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let half = PI / 2.0;
    let mut alpha: Vec<f64> = (0..5).map(|_| rng.gen_range(-half..half)).collect();
    alpha[0] = 0.0;
    let beta: Vec<f64> = (0..5).map(|_| rng.gen_range(-half..half)).collect();
    let pot = NormalizedPotentials::new(alpha, beta, vec![0.8; 5], vec![0.8; 5]).unwrap();
    let w = Window::new(5, 5).unwrap();
    let grid = HirotaGrid::from_potentials(&pot, w).unwrap();
    let chains = ChainGrid::build(&pot, 5, 5).unwrap();
    let frames = lattice_frames(&grid, real(1.0)).unwrap();
    for n in 0..=5 {
        for m in 0..=5 {
            assert!(
                chains
                    .frame(n, m, real(1.0))
                    .unwrap()
                    .max_diff(&frames.get(n, m))
                    < 1e-9
            );
        }
    }
    let a = build_mesh(&pot, w, 1.0).unwrap();
    let b = lattice_mesh(&grid, 1.0, 1e-5).unwrap();
    assert!(a.max_deviation(&b) < 1e-8);
}

#[test]
fn transitions_of_known_lattice() {
    let pot = NormalizedPotentials::new(
        vec![0.0, 1.2, -0.4],
        vec![0.7, -1.1, 0.3],
        vec![0.6, -1.4, 1.0],
        vec![1.5, 0.9, -0.8],
    )
    .unwrap();
    let grid = HirotaGrid::from_potentials(&pot, Window::new(3, 3).unwrap()).unwrap();
    let wrap4 = |x: f64| x - 4.0 * PI * (x / (4.0 * PI)).round();
    for n in 0..3 {
        for m in 0..3 {
            let t = extract_transitions(&grid, n, m, &[0.5, 1.0, 2.0]).unwrap();
            assert!(wrap4(t.u.u_diff() - (grid.u(n + 1, m) - grid.u(n, m))).abs() < 1e-9);
            let v = if grid.q()[m] < 0.0 {
                t.v.flipped()
            } else {
                t.v
            };
            assert!(wrap4(v.u_sum() - (grid.u(n, m + 1) + grid.u(n, m))).abs() < 1e-9);
        }
    }
}

#[test]
fn revolution_couplings_are_constant() {
    let gp = revolution_potentials(0.8, 8).unwrap();
    let chains = ChainGrid::build(&gp, 5, 5).unwrap();
    let fixed = GaugeFixed::new(&chains).unwrap();
    let rec = reconstruct_lattice(&fixed, &[0.5, 1.0, 2.0], None).unwrap();
    let p0 = rec.grid.p()[0];
    let q0 = rec.grid.q()[0];
    assert!(rec.grid.p().iter().all(|p| (p - p0).abs() < 1e-12));
    assert!(rec.grid.q().iter().all(|q| (q - q0).abs() < 1e-12));
    assert!((p0.abs() - 0.8).abs() < 1e-12, "{p0}");
    assert!((q0.abs() - 0.8).abs() < 1e-12, "{q0}");
}

#[test]
fn phase_frames_do_not_fit() {
    struct Phases;
    impl FrameProvider for Phases {
        fn window(&self) -> Window {
            Window { n: 1, m: 1 }
        }
        fn frame(&self, n: usize, m: usize, _: Complex64) -> psforge::Result<Mat2> {
            Ok(PhaseFactor::new(0.3 * n as f64 + 0.5 * m as f64).matrix())
        }
    }
    assert!(matches!(
        extract_transitions(&Phases, 0, 0, &[0.5, 2.0]),
        Err(Error::DegenerateTransition { .. }) | Err(Error::TransitionFit { .. })
    ));
}
