mod common;

use common::*;
use qcompress_core::circuit::{build_template, evaluate, Arch};
use qcompress_core::compress::{
    adam_minimize_fn, epsilon_between, restricted_between, select_best, sequential_schedule, AdamHyperparams,
    AdamState, CostKind, HyperGrid, OptimizationRun, ScheduleConfig, Serial, Targets,
};
use qcompress_core::model::{exact_propagator, sector_table, ModelKind, ModelSpec};

fn hyper(lr: f64, iterations: usize) -> AdamHyperparams {
    AdamHyperparams { lr, beta1: 0.9, beta2: 0.999, delta: 1e-8, iterations }
}

#[test]
fn epsilon_matches_trace_formula() {
    let spec = ModelSpec::new(ModelKind::Xxz, 4).unwrap();
    let u = exact_propagator(&spec, 0.6).unwrap();
    let tpl = build_template(Arch::Tivb2, 4, 1).unwrap();
    let mut rng = Lcg(3);
    let p: Vec<f64> = (0..tpl.param_count()).map(|_| rng.next()).collect();
    let cop = evaluate(&tpl, &p).unwrap();
    let (cm, um) = (Mat::from_op(&cop), Mat::from_op(&u));
    let tr: f64 = (0..16).map(|i| cm.dagger().mul(&um).at(i, i).re).sum();
    let want = 1.0 - tr / 16.0;
    assert!((epsilon_between(&cop, &u).unwrap() - want).abs() < 1e-14);
    assert!(epsilon_between(&u, &u).unwrap().abs() < 1e-14);
    let full_norm: f64 = cm.d.iter().zip(&um.d).map(|(a, b)| (a - b).norm_sqr()).sum();
    assert!((full_norm - 32.0 * want).abs() < 1e-12);
}

#[test]
fn restricted_cost_matches_masked_sum() {
    let spec = ModelSpec::new(ModelKind::Pxp, 6).unwrap();
    let table = sector_table(&spec).unwrap();
    let u = exact_propagator(&spec, 1.0).unwrap();
    let c = exact_propagator(&spec, 1.1).unwrap();
    let mask = table.mask_d1_o1().unwrap();
    let ind = mask.indicator();
    let (cm, um) = (Mat::from_op(&c), Mat::from_op(&u));
    let s: f64 = (0..cm.d.len()).filter(|&k| ind[k]).map(|k| (cm.d[k] - um.d[k]).norm_sqr()).sum();
    let ne = ind.iter().filter(|&&b| b).count();
    assert_eq!(ne, mask.entry_count());
    let want = s / (2.0 * (ne as f64).sqrt());
    assert!((restricted_between(&c, &u, &mask).unwrap() - want).abs() < 1e-14);
}

#[test]
fn adam_steps_follow_the_update_rule() {
    let h = AdamHyperparams { lr: 0.05, beta1: 0.8, beta2: 0.99, delta: 1e-3, iterations: 0 };
    let grads = [[0.5, -2.0], [0.1, 0.3], [-1.0, 0.0]];
    let mut st = AdamState::new(2);
    let mut p = [0.2, -0.4];
    let (mut m, mut v, mut q) = ([0.0; 2], [0.0; 2], p);
    for (i, g) in grads.iter().enumerate() {
        st.step(&mut p, g, &h);
        let k = (i + 1) as i32;
        for j in 0..2 {
            m[j] = 0.8 * m[j] + 0.2 * g[j];
            v[j] = 0.99 * v[j] + 0.01 * g[j] * g[j];
            let mh = m[j] / (1.0 - 0.8f64.powi(k));
            let vh = v[j] / (1.0 - 0.99f64.powi(k));
            q[j] -= 0.05 * mh / (vh.sqrt() + 1e-3);
        }
        assert!((p[0] - q[0]).abs() < 1e-15 && (p[1] - q[1]).abs() < 1e-15);
    }
}

#[test]
fn adam_minimizes_a_quadratic() {
    let target = [0.7, -1.3, 0.05];
    let f = |p: &[f64]| {
        let v: f64 = p.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum();
        let g = p.iter().zip(&target).map(|(a, b)| 2.0 * (a - b)).collect();
        Ok((v, g))
    };
    let run = adam_minimize_fn(f, &[0.0; 3], &hyper(0.05, 2000), 0).unwrap();
    assert!(run.aborted_at.is_none());
    assert_eq!(run.trace.len(), 2001);
    assert!(run.best_epsilon < 1e-8);
    for (a, b) in run.best_params.iter().zip(&target) {
        assert!((a - b).abs() < 1e-4);
    }
    let bsf = run.best_so_far();
    assert!(bsf.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*bsf.last().unwrap(), run.best_epsilon);
}

#[test]
fn grids_are_lexicographic() {
    assert_eq!(HyperGrid::paper(true).len(), 384);
    assert_eq!(HyperGrid::paper(false).len(), 384);
    let g = HyperGrid::reduced(true);
    assert_eq!(g.len(), 24);
    let pts = g.points(7);
    assert_eq!(pts.len(), 24);
    assert!(pts.iter().all(|p| p.iterations == 7 && p.validate().is_ok()));
    assert_eq!(pts[0].lr, g.lr[0]);
    assert_eq!(pts[1].delta, g.delta[1]);
    assert_eq!(pts[1].lr, g.lr[0]);
    assert_eq!(pts[pts.len() - 1].lr, *g.lr.last().unwrap());
}

fn run_with(best: f64, aborted: bool) -> OptimizationRun {
    OptimizationRun {
        hyper: hyper(0.1, 1),
        seed: 0,
        initial_epsilon: 1.0,
        best_epsilon: best,
        best_params: vec![],
        trace: vec![best],
        aborted_at: aborted.then_some(0),
    }
}

#[test]
fn best_run_selection() {
    let runs = [run_with(0.3, false), run_with(0.1, true), run_with(0.2, false), run_with(0.2, false)];
    assert_eq!(select_best(&runs), Some(2));
    assert_eq!(select_best(&[]), None);
}

#[test]
fn warm_started_schedule_improves_on_trotter() {
    let targets = Targets::new(ModelKind::Pxp, &[4, 6]).unwrap();
    let cfg = ScheduleConfig {
        ladder: vec![4, 6],
        iterations: vec![150, 50],
        grid: HyperGrid::single(hyper(0.01, 0)),
        cost: CostKind::Full,
        seed: 1,
    };
    let out = sequential_schedule(&targets, Arch::BlockedPxp, 8, &[0.5, 1.0], &cfg, &Serial).unwrap();
    assert_eq!(out.len(), 2);
    let first = out[0].1.as_ref().unwrap();
    let second = out[1].1.as_ref().unwrap();
    assert_eq!(first.stages.len(), 2);
    assert_eq!(second.stages[0].run.best_params.len(), 2);
    // warm start: the second time begins from the first time's final parameters
    let tpl = build_template(Arch::BlockedPxp, 4, 8).unwrap();
    let u = targets.unitary(4, 1.0).unwrap();
    let warm = epsilon_between(&evaluate(&tpl, &first.final_stage().run.best_params).unwrap(), &u).unwrap();
    assert!((second.stages[0].run.initial_epsilon - warm).abs() < 1e-12);

    let spec = ModelSpec::new(ModelKind::Pxp, 6).unwrap();
    for r in [first, second] {
        let (trot, p) = qcompress_core::circuit::build_trotter(&spec, 1, 2, r.t).unwrap();
        let e_trot = epsilon_between(&evaluate(&trot, &p).unwrap(), &exact_propagator(&spec, r.t).unwrap()).unwrap();
        assert!(r.final_stage().epsilon <= e_trot + 1e-9, "t={} {} vs {e_trot}", r.t, r.final_stage().epsilon);
    }

    let bad = ScheduleConfig { ladder: vec![6, 4], ..cfg.clone() };
    assert!(sequential_schedule(&targets, Arch::BlockedPxp, 8, &[0.5], &bad, &Serial).is_err());
    assert!(sequential_schedule(&targets, Arch::BlockedPxp, 8, &[1.0, 0.5], &cfg, &Serial).is_err());
}
