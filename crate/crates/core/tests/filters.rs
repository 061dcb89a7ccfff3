mod common;

use bellfilter::filtercore::{
    associated_operator, complete_basis, extract_filters, factorize, plan, AssociatedOperator,
    FactorTrace, LocalFilter,
};
use bellfilter::matcore::{
    c, det2, herm_eig, kron, pauli, tilde_inner, tilde_op, vec_concurrence, CMat2, CMat4,
    SweepOrder,
};
use bellfilter::sampling::{random_entangled, random_su2};
use bellfilter::transform::{apply_filter, extractable_concurrence, verify_bell_diagonal};
use bellfilter::wootters::{load_density, wootters_decomposition};
use bellfilter::{CompletionChoice, DensityMatrix, Error, Tolerances};
use common::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn check_operator(op: &AssociatedOperator, ws: &bellfilter::WoottersSet) {
    let f = op.f;
    assert!((f * tilde_op(&f)).dist(&CMat4::identity()) < 1e-9);
    assert!((f.det() - c(1.0, 0.0)).norm() < 1e-9);
    for (i, xi) in ws.x.iter().enumerate() {
        for (j, xj) in ws.x.iter().enumerate() {
            let target = if i == j { ws.lambdas[i] } else { 0.0 };
            assert!((f.sandwich(xi, xj) - c(target, 0.0)).norm() < 1e-9);
        }
    }
    let oracle = hermitian_eigenvalues(&f);
    assert!((op.lambda_min_f - oracle[3]).abs() < 1e-9 * oracle[0]);
}

fn check_factors(op: &AssociatedOperator, ft: &FactorTrace) {
    assert!(kron(&ft.ga, &ft.gb).dist(&op.f) < 1e-9);
    assert!((det2(&ft.ga) - c(1.0, 0.0)).norm() < 1e-9);
    assert!((det2(&ft.gb) - c(1.0, 0.0)).norm() < 1e-9);
    assert!(herm_eig(&ft.ga).unwrap().min() > 0.0);
    assert!(herm_eig(&ft.gb).unwrap().min() > 0.0);
    for i in 0..4 {
        for j in 0..4 {
            let target = if i == j { 1.0 } else { 0.0 };
            assert!((tilde_inner(&ft.y[i], &ft.y[j]) - c(target, 0.0)).norm() < 1e-9);
        }
    }
    let sum =
        ft.z.iter()
            .fold(CMat4::zeros(), |acc, z| acc + z.projector());
    assert!(sum.dist(&op.f) < 1e-9 * op.f.frob_norm());
    let scale = op.f.frob_norm();
    for z in &ft.z {
        assert!(tilde_inner(z, z).norm() <= 1e-8 * z.norm_sqr().max(1.0));
        assert!(vec_concurrence(z).unwrap() <= 1e-8 * scale);
    }
    // <z_1|z~_2> = <z_3|z~_4> = 1, every other pairing vanishes.
    for i in 0..4 {
        for j in 0..4 {
            let target = if i / 2 == j / 2 && i != j { 1.0 } else { 0.0 };
            assert!((tilde_inner(&ft.z[i], &ft.z[j]) - c(target, 0.0)).norm() < 1e-8);
        }
    }
    let a: Vec<f64> = ft.z.iter().map(|z| z.norm()).collect();
    assert!((a[0] * a[1] - a[2] * a[3]).abs() < 1e-8 * scale);
}

fn check_filter(op: &AssociatedOperator, lf: &LocalFilter) {
    let s = pauli();
    for (f, a, m) in [(&lf.fa, lf.a, lf.m), (&lf.fb, lf.b, lf.n)] {
        let e = herm_eig(f).unwrap();
        assert!((e.max() - 1.0).abs() < 1e-10);
        assert!(e.min() > 0.0);
        assert!((0.0..=1.0).contains(&a));
        assert!(((m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt() - 1.0).abs() < 1e-12);
        let rebuilt = (CMat2::identity()
            + (s[0].scale_re(m[0]) + s[1].scale_re(m[1]) + s[2].scale_re(m[2])).scale_re(a))
        .scale_re(1.0 / (1.0 + a));
        assert!(rebuilt.dist(f) < 1e-9);
    }
    assert!((lf.det_fa * lf.det_fb - op.lambda_min_f).abs() < 1e-9);
    assert!(lf.associated().dist(&op.f) < 1e-9 * op.f.frob_norm());
}

fn run_full(rho: &DensityMatrix, choice: CompletionChoice) {
    let p = plan(rho, choice, &tol()).unwrap();
    let op = p.operator.as_ref().unwrap();
    check_operator(op, &p.wootters);
    check_factors(op, p.factors.as_ref().unwrap());
    let lf = p.filter.as_ref().unwrap();
    check_filter(op, lf);
    let t = apply_filter(rho, lf, &tol()).unwrap();
    assert!(verify_bell_diagonal(&t, &tol()).bell_diagonal);
    assert!((t.p_f - p.p_f.unwrap()).abs() < 1e-12);
    let c_out = extractable_concurrence(&t, &p.wootters, &tol()).unwrap();
    assert!(c_out <= 1.0 + 1e-8 && c_out >= p.wootters.concurrence - 1e-8);
    // Bell components carry the weights lambda_i / tr R.
    let total: f64 = t.components.iter().map(|b| b.p).sum();
    assert!((total - 1.0).abs() < 1e-9);
    for (b, l) in t.components.iter().zip(p.wootters.lambdas) {
        assert!((b.p - l / p.wootters.tr_r).abs() < 1e-8);
        assert!(vec_concurrence(&b.e).unwrap() >= 1.0 - 1e-8);
    }
    let mut out = t.wootters_out.lambdas;
    out.sort_by(|a, b| b.total_cmp(a));
    let expect = p.wootters.lambdas.map(|l| l / p.wootters.tr_r);
    assert!(max_abs_diff(&out, &expect) < 1e-8);
}

#[test]
fn full_invariants_on_random_states() {
    let mut r = rng(201);
    for rank in 1..=4 {
        for _ in 0..150 {
            let m = random_entangled(rank, 0.0, &mut r, &tol());
            let rho = load_density(&m, &tol()).unwrap();
            run_full(&rho, CompletionChoice::Canonical);
        }
    }
}

/// `t` minimizing `||F(t) F(t)~ - I||` for `F(t) = A + t B`, found without
/// reference to the closed answer.
fn solve_t(a: &CMat4, b: &CMat4) -> f64 {
    let defect = |t: f64| {
        let f = *a + b.scale_re(t);
        (f * tilde_op(&f)).dist(&CMat4::identity())
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while defect(hi) < defect(hi / 2.0) {
        hi *= 2.0;
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if defect(m1) < defect(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    (lo + hi) / 2.0
}

#[test]
fn rank_three_t44_is_forced_by_the_norm_condition() {
    let mut r = rng(202);
    for _ in 0..30 {
        let m = random_entangled(3, 1e-2, &mut r, &tol());
        let rho = load_density(&m, &tol()).unwrap();
        let ws = wootters_decomposition(&rho, &tol()).unwrap();
        let x = complete_basis(&rho, &ws, CompletionChoice::Canonical, &tol()).unwrap();
        let tn: Vec<f64> = x.iter().map(|v| tilde_inner(v, v).re).collect();
        let proj = |i: usize| bellfilter::matcore::tilde_state(&x[i]).projector();
        let a = (0..3).fold(CMat4::zeros(), |acc, i| acc + proj(i).scale_re(1.0 / tn[i]));
        let b = proj(3).scale_re(1.0 / (tn[3] * tn[3]));
        let t44 = solve_t(&a, &b);
        assert!((t44 - tn[3]).abs() < 1e-6 * tn[3], "{t44} vs {}", tn[3]);
        let op = associated_operator(&x, &ws, &tol()).unwrap();
        assert!((op.t_diag[1] - tn[3]).abs() < 1e-9);
    }
}

#[test]
fn rank_two_cross_term_vanishes() {
    let mut r = rng(203);
    for _ in 0..30 {
        let m = random_entangled(2, 1e-2, &mut r, &tol());
        let rho = load_density(&m, &tol()).unwrap();
        let p = plan(&rho, CompletionChoice::Canonical, &tol()).unwrap();
        let op = p.operator.unwrap();
        assert!(op.t_34.norm() < 1e-9);
        assert!((op.t_diag[0] - op.tilde_norms[2]).abs() < 1e-9);
        assert!((op.t_diag[1] - op.tilde_norms[3]).abs() < 1e-9);
    }
}

#[test]
fn operator_is_unique_for_ranks_three_and_four() {
    let mut r = rng(204);
    for rank in [3, 4] {
        for _ in 0..50 {
            let m = random_entangled(rank, 0.0, &mut r, &tol());
            let rho = load_density(&m, &tol()).unwrap();
            let a = plan(&rho, CompletionChoice::Canonical, &tol()).unwrap();
            let col = tol().with_sweep(SweepOrder::ColumnCyclic);
            let rho_col = load_density(&m, &col).unwrap();
            let b = plan(&rho_col, CompletionChoice::Canonical, &col).unwrap();
            let (fa, fb) = (a.operator.unwrap().f, b.operator.unwrap().f);
            assert!(fa.dist(&fb) < 1e-8 * fa.frob_norm());
            let (la, lb) = (a.filter.unwrap(), b.filter.unwrap());
            assert!(la.fa.dist(&lb.fa) < 1e-8 && la.fb.dist(&lb.fb) < 1e-8);
        }
    }
}

#[test]
fn rank_two_completions_give_distinct_valid_operators() {
    let mut r = rng(205);
    for _ in 0..40 {
        let m = random_entangled(2, 1e-2, &mut r, &tol());
        let rho = load_density(&m, &tol()).unwrap();
        let mut seen: Vec<CMat4> = Vec::new();
        let mut best = 0.0f64;
        for h in [0.0, 0.3, -0.3, 0.8, -0.8] {
            let choice = CompletionChoice::hyperbolic(h);
            run_full(&rho, choice);
            let p = plan(&rho, choice, &tol()).unwrap();
            let f = p.operator.unwrap().f;
            for g in &seen {
                assert!(f.dist(g) > 1e-6);
            }
            seen.push(f);
            best = best.max(p.p_f.unwrap());
        }
        run_full(&rho, CompletionChoice::Rank2Optimal);
        let opt = plan(&rho, CompletionChoice::Rank2Optimal, &tol())
            .unwrap()
            .p_f
            .unwrap();
        assert!(opt >= best - 1e-12);
        for i in -40..=40 {
            let h = i as f64 / 20.0;
            let p = plan(&rho, CompletionChoice::hyperbolic(h), &tol())
                .unwrap()
                .p_f
                .unwrap();
            assert!(opt >= p - 1e-9, "h = {h}: {p} > {opt}");
        }
    }
}

#[test]
fn optimal_completion_needs_rank_two() {
    let mut r = rng(207);
    let m = random_entangled(3, 1e-2, &mut r, &tol());
    let rho = load_density(&m, &tol()).unwrap();
    assert!(matches!(
        plan(&rho, CompletionChoice::Rank2Optimal, &tol()),
        Err(Error::InvalidCompletion(_))
    ));
}

#[test]
fn p_f_and_output_concurrence_are_local_unitary_invariant() {
    let mut r = rng(206);
    for rank in 1..=4 {
        for _ in 0..40 {
            let m = random_entangled(rank, 1e-3, &mut r, &tol());
            let u = kron(&random_su2(&mut r), &random_su2(&mut r));
            let m2 = (u * m * u.adjoint()).hermitian_part();
            let (rho, rho2) = (
                load_density(&m, &tol()).unwrap(),
                load_density(&m2, &tol()).unwrap(),
            );
            let (a, b) = (
                plan(&rho, CompletionChoice::Canonical, &tol()).unwrap(),
                plan(&rho2, CompletionChoice::Canonical, &tol()).unwrap(),
            );
            assert!((a.p_f.unwrap() - b.p_f.unwrap()).abs() < 1e-8);
            let ta = apply_filter(&rho, a.filter.as_ref().unwrap(), &tol()).unwrap();
            let tb = apply_filter(&rho2, b.filter.as_ref().unwrap(), &tol()).unwrap();
            assert!((ta.c_out - tb.c_out).abs() < 1e-8);
            // With U in SU(2) x SU(2), U~ = U and F' = U F U^dagger wherever F
            // is unique.
            if rank >= 3 {
                let fa = a.operator.unwrap().f;
                let fb = b.operator.unwrap().f;
                let moved = u * fa * u.adjoint();
                assert!(moved.dist(&fb) < 1e-8 * fa.frob_norm());
            }
        }
    }
}

#[test]
fn schmidt_state_is_purified() {
    use bellfilter::matcore::CVec4;
    let v = CVec4::from_real([0.0, 0.8f64.sqrt(), -(0.2f64.sqrt()), 0.0]);
    let rho = load_density(&v.projector(), &tol()).unwrap();
    let p = plan(&rho, CompletionChoice::Canonical, &tol()).unwrap();
    assert!((p.p_f.unwrap() - 0.4).abs() < 1e-12);
    let lf = p.filter.unwrap();
    for f in [lf.fa, lf.fb] {
        assert!(f.0[0][1].norm() < 1e-12);
    }
    let t = apply_filter(&rho, &lf, &tol()).unwrap();
    assert!((t.c_out - 1.0).abs() < 1e-12);
    assert!(verify_bell_diagonal(&t, &tol()).bell_diagonal);
}

#[test]
fn non_product_operator_is_rejected() {
    let mut m = CMat4::identity();
    m.0[1][2] = c(0.5, 0.0);
    m.0[2][1] = c(0.5, 0.0);
    let op = AssociatedOperator {
        f: m,
        lambda_min_f: 0.5,
        eig: herm_eig(&m).unwrap(),
        completed_x: [bellfilter::bell::singlet(); 4],
        tilde_norms: [1.0; 4],
        t_diag: [1.0; 2],
        t_34: c(0.0, 0.0),
        norm_defect: 0.0,
        condition_defect: 0.0,
    };
    assert!(matches!(factorize(&op, &tol()), Err(Error::NotProduct(_))));
}

#[test]
fn identity_factors_give_identity_filters() {
    let op = AssociatedOperator {
        f: CMat4::identity(),
        lambda_min_f: 1.0,
        eig: herm_eig(&CMat4::identity()).unwrap(),
        completed_x: bellfilter::bell::basis(),
        tilde_norms: [1.0; 4],
        t_diag: [1.0; 2],
        t_34: c(0.0, 0.0),
        norm_defect: 0.0,
        condition_defect: 0.0,
    };
    let ft = factorize(&op, &tol()).unwrap();
    assert!(ft.ga.dist(&CMat2::identity()) < 1e-12);
    let lf = extract_filters(&ft).unwrap();
    assert!(lf.fa.dist(&CMat2::identity()) < 1e-12 && lf.a < 1e-12 && lf.b < 1e-12);
    assert_eq!(lf.m, [0.0, 0.0, 1.0]);
}

#[test]
fn near_degenerate_input_carries_a_warning() {
    let fp = bellfilter::family::FamilyParams::new(0.8, [0.6, 0.1, 0.3 - 1e-8, 1e-8]).unwrap();
    let rho = load_density(&fp.state(), &tol()).unwrap();
    let p = plan(&rho, CompletionChoice::Canonical, &tol()).unwrap();
    assert!(p.filter.is_some());
    assert!(p.warnings.iter().any(|w| w.contains("near-degenerate")));
}

#[test]
fn separable_and_lambda_n_zero_plans() {
    let mixed = load_density(&CMat4::identity().scale_re(0.25), &tol()).unwrap();
    assert!(matches!(
        plan(&mixed, CompletionChoice::Canonical, &tol()),
        Err(Error::Separable(_))
    ));
    let fp = bellfilter::family::FamilyParams::new(0.8, [0.6, 0.1, 0.3, 0.0]).unwrap();
    let rho = load_density(&fp.state(), &tol()).unwrap();
    let p = plan(&rho, CompletionChoice::Canonical, &tol()).unwrap();
    assert_eq!(p.classification, bellfilter::Classification::LambdaNZero);
    assert!(p.filter.is_none() && p.p_f.is_none());
}
