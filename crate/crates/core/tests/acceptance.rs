//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use eloforge::bounds::{lemma1_constant, lemma2_constant, lemma3_bound, phi, table1_row};
use eloforge::dynamics::{apply_move, Move};
use eloforge::path_engine::{make_upset_free, REWRITE_TOL};
use eloforge::search::{compare, solve, SearchProblem};
use eloforge::strategies::{ladder, repeat_win_value};
use eloforge::{PotFunction, TailFunctions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: u8,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn powers_of_ten(from: u32, to: u32) -> Vec<u64> {
    (from..=to).map(|e| 10u64.pow(e)).collect()
}

fn builtins() -> Vec<PotFunction> {
    vec![
        PotFunction::logistic(),
        PotFunction::erf(),
        PotFunction::algebraic(1.0).unwrap(),
        PotFunction::algebraic(2.0).unwrap(),
        PotFunction::algebraic(3.0).unwrap(),
    ]
}

fn two_player_growth() -> Outcome {
    let started = Instant::now();
    let mut worst = (0.0f64, String::new());
    for pot in builtins() {
        let tails = TailFunctions::new(pot.clone());
        for k in powers_of_ten(1, 6) {
            let r = repeat_win_value(&pot, k);
            let mid = tails.invert_f(2.0 * k as f64).unwrap() / 2.0;
            let dev = (r - mid).abs();
            if dev > worst.0 {
                worst = (dev, format!("{} k={k}", pot.name()));
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    Outcome {
        id: 1,
        name: "two-player growth",
        passed: worst.0 <= 3.0 && secs < 10.0,
        detail: format!("max |r(k) - f^-1(2k)/2| = {:.4} at {} (limit 3); {secs:.2} s (limit 10 s)", worst.0, worst.1),
    }
}

fn asymptotic_forms() -> Outcome {
    let ks = powers_of_ten(3, 6);
    let mut notes = Vec::new();
    let mut passed = true;
    for pot in [PotFunction::logistic(), PotFunction::erf()] {
        let devs: Vec<f64> =
            ks.iter().map(|&k| repeat_win_value(&pot, k) - table1_row(&pot, k).unwrap().n2_value).collect();
        let width = devs.iter().cloned().fold(f64::MIN, f64::max) - devs.iter().cloned().fold(f64::MAX, f64::min);
        passed &= width <= 6.0;
        notes.push(format!("{} width {width:.4}", pot.name()));
    }
    for p in [1.0, 2.0, 3.0] {
        let pot = PotFunction::algebraic(p).unwrap();
        let k = 1_000_000;
        let form = table1_row(&pot, k).unwrap().n2_value;
        let rel = (repeat_win_value(&pot, k) - form).abs() / form;
        passed &= rel < 0.05;
        notes.push(format!("alg p={p} rel {rel:.2e}"));
    }
    Outcome { id: 2, name: "two-player closed forms", passed, detail: notes.join("; ") + " (limits: width 6, rel 5%)" }
}

fn ladder_guarantee() -> Outcome {
    let pot = PotFunction::logistic();
    let a = pot.compute_a().unwrap();
    let c1 = pot.c1().unwrap();
    let mut passed = (a - 2.21772).abs() <= 5e-6 && (c1 - 0.785).abs() <= 5e-4;
    let mut notes = vec![format!("A={a:.6} c1={c1:.6}")];
    let mut secs = 0.0;
    for k in powers_of_ten(3, 6) {
        let started = Instant::now();
        let run = ladder(&pot, k).unwrap();
        secs = started.elapsed().as_secs_f64();
        let certs = run.certificates();
        let min_margin = certs.iter().map(|c| c.margin()).fold(f64::MAX, f64::min);
        let budget = run.player_budget();
        passed &= certs.iter().all(|c| c.holds()) && budget.holds();
        notes.push(format!(
            "k={k}: r1={:.3}>={:.3}, players {}<={:.2}, min margin {min_margin:.3}",
            run.r1, run.guarantee, budget.rhs, budget.lhs
        ));
    }
    passed &= secs < 30.0;
    notes.push(format!("k=1e6 in {secs:.2} s (limit 30 s)"));
    Outcome { id: 3, name: "ladder guarantee", passed, detail: notes.join("; ") }
}

fn exact_search() -> Outcome {
    let pot = PotFunction::logistic();
    let tails = TailFunctions::new(pot.clone());
    let mut violations = Vec::new();
    let mut nodes = 0u64;
    for n in 2..=4 {
        for k in 1..=8 {
            let p = SearchProblem::new(pot.clone(), n, k).unwrap();
            let c = compare(&p, &tails).unwrap();
            let best = solve(&p).unwrap();
            nodes += best.nodes_expanded;
            let replayed = best.best_transcript.replay(&pot).unwrap().final_state.max();
            if (replayed - best.best_value).abs() > 1e-9 {
                violations.push(format!("n={n} k={k}: replay {replayed} vs {}", best.best_value));
            }
            violations.extend(c.violations.iter().map(|v| format!("n={n} k={k}: {v}")));
        }
    }
    for n in 2..=3 {
        for k in 0..=5 {
            let p = SearchProblem::new(pot.clone(), n, k).unwrap();
            let reduced = solve(&p).unwrap().best_value;
            let full = solve(&p.without_symmetry()).unwrap().best_value;
            if reduced.to_bits() != full.to_bits() {
                violations.push(format!("n={n} k={k}: reduced {reduced} vs full {full}"));
            }
        }
    }
    Outcome {
        id: 4,
        name: "exact search consistency",
        passed: violations.is_empty(),
        detail: if violations.is_empty() {
            format!("n<=4, k<=8 consistent; reduced == full on n<=3, k<=5; {nodes} nodes")
        } else {
            violations.join("; ")
        },
    }
}

fn upset_free_rewriting() -> Outcome {
    let pot = PotFunction::logistic();
    let tails = TailFunctions::new(pot.clone());
    let c1 = lemma1_constant(&pot);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    let (mut worst_ratio, mut worst_endpoint, mut worst_local) = (0.0f64, 0.0f64, 0.0f64);
    let mut rewrites = 0usize;
    for trial in 0..500 {
        let n = rng.gen_range(2..=5);
        let path = loop {
            let random_edges = rng.gen_range(1..=50);
            let p = common::random_path(&mut rng, &pot, n, random_edges, 1.0);
            if p.len() <= 60 {
                break p;
            }
        };
        match make_upset_free(n, &path, &tails, 1.0) {
            Ok((_, report)) => {
                worst_ratio = worst_ratio.max(report.length_ratio);
                worst_endpoint = worst_endpoint.max(report.endpoint_error);
                worst_local = worst_local.max(report.max_rewrite_error);
                rewrites += report.rewrites;
                if !report.certified() || report.max_rewrite_error > REWRITE_TOL {
                    failures.push(format!("path {trial}: {report:?}"));
                }
            }
            Err(e) => failures.push(format!("path {trial}: {e}")),
        }
    }
    let c1_ok = (c1 - (1.0 + std::f64::consts::E)).abs() <= 1e-6;
    Outcome {
        id: 5,
        name: "upset-free rewriting",
        passed: failures.is_empty() && c1_ok,
        detail: if failures.is_empty() {
            format!(
                "500 paths: worst ratio {worst_ratio:.4} <= C1 {c1:.4}, endpoint error {worst_endpoint:.1e} <= 1e-7, \
                 per-rewrite error {worst_local:.1e} <= 1e-9, {rewrites} rewrites"
            )
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
    }
}

fn potential_growth() -> Outcome {
    let pot = PotFunction::logistic();
    let tails = TailFunctions::new(pot.clone());
    let c2 = lemma2_constant(&pot);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    let mut min_slack = f64::MAX;
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=8);
        let state = common::random_state(&mut rng, n, 5.0);
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (w, l) = if state.rating(i) >= state.rating(j) { (i, j) } else { (j, i) };
        let t = 1.0 - rng.gen::<f64>();
        let next = apply_move(&state, &Move::new(w, l, t).unwrap(), &pot).unwrap();
        let before = phi(&state, &tails).unwrap().value;
        let after = phi(&next, &tails).unwrap().value;
        let noise = 10.0 * tails.quad_tol() * before.abs().max(after.abs()).max(1.0);
        let slack = c2 * t - (after - before);
        min_slack = min_slack.min(slack / t);
        if slack < -noise {
            violations += 1;
        }
    }
    let c2_ok = (c2 - 17.155).abs() <= 1e-3;
    Outcome {
        id: 6,
        name: "potential growth per edge",
        passed: violations == 0 && c2_ok,
        detail: format!("C2={c2:.4}; {violations} violations in 10000 edges; min (C2 t - dPhi)/t = {min_slack:.4}"),
    }
}

fn potential_lower_bound() -> Outcome {
    let tails = TailFunctions::new(PotFunction::logistic());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    let mut min_ratio = f64::MAX;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=20);
        let state = common::random_state(&mut rng, n, 10.0);
        let r_max = state.max();
        let value = phi(&state, &tails).unwrap().value;
        let bound = lemma3_bound(r_max, &tails).unwrap();
        min_ratio = min_ratio.min(value / bound);
        if value < bound {
            violations += 1;
        }
    }
    Outcome {
        id: 7,
        name: "potential lower bound",
        passed: violations == 0,
        detail: format!("{violations} violations in 1000 states; min Phi / bound = {min_ratio:.4}"),
    }
}

fn numerical_core() -> Outcome {
    let tails = TailFunctions::new(PotFunction::logistic());
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let (mut f_err, mut g_err, mut paths_err) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..=600 {
        let x = 0.05 * i as f64;
        f_err = f_err.max(rel(tails.eval_f(x).unwrap(), x + x.exp() - 1.0));
        g_err = g_err.max(rel(tails.eval_g(x).unwrap(), (x - 1.0) * x.exp() + 1.0));
        if x >= 0.1 {
            paths_err = paths_err.max(rel(tails.eval_g_direct(x).unwrap(), tails.eval_g(x).unwrap()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut trip = 0.0f64;
    for _ in 0..1000 {
        let x = rng.gen_range(0.0..=50.0);
        trip = trip.max((tails.invert_f(tails.eval_f(x).unwrap()).unwrap() - x).abs());
        trip = trip.max((tails.invert_g(tails.eval_g(x).unwrap()).unwrap() - x).abs());
    }
    Outcome {
        id: 8,
        name: "numerical core",
        passed: f_err <= 1e-8 && g_err <= 1e-8 && trip <= 1e-8 && paths_err <= 1e-6,
        detail: format!(
            "f err {f_err:.1e}, g err {g_err:.1e} (<= 1e-8 on [0,30]); round trip {trip:.1e} (<= 1e-8); \
             g paths {paths_err:.1e} (<= 1e-6)"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 8] = [
        two_player_growth,
        asymptotic_forms,
        ladder_guarantee,
        exact_search,
        upset_free_rewriting,
        potential_growth,
        potential_lower_bound,
        numerical_core,
    ];
    let mut failed = 0;
    for criterion in criteria {
        let o = criterion();
        println!("criterion {} {:<27} {}  {}", o.id, o.name, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
