//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs without the libtest harness so that the summary lines are always
//! printed; the process exits non-zero if any criterion fails.

mod common;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use polyvol::k_ball::{approx_k_ball_volume, from_two_ball, KBallInstance};
use polyvol::knapsack::{approx_knapsack_dual_volume, build_params, KnapsackDualInstance};
use polyvol::oracles::{
    count_large_sets, exact_hull_volume, exact_intersection_volume, hardness_reduction_check, mc_volume,
    restricted_two_ball_volume,
};
use polyvol::rational::{int, ratio, to_f64};
use polyvol::two_ball::{
    approx_two_ball_volume, dp_stage, grid_resolution, staircase_value, EngineOptions, GridStrategy,
    StaircaseTable, TwoBallInstance,
};
use polyvol::vpolytope::{exact_volume, VPolytopeInstance};
use polyvol::{cross_polytope_volume, CrossPolytope, Rational, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{all_vectors, cross_vertices, in_general_position, random_point, random_two_ball};

const SLACK: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ball(c: &[Rational], r: Rational) -> CrossPolytope {
    CrossPolytope::new(Vector::new(c.to_vec()).unwrap(), r).unwrap()
}

fn two_ball_guarantee() -> Outcome {
    let deltas = [ratio(1, 2), ratio(1, 5), ratio(1, 10)];
    let (mut runs, mut failures, mut worst) = (0, Vec::new(), 0.0f64);
    for n in 1..=3 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + n as u64);
        for _ in 0..50 {
            let inst = random_two_ball(&mut rng, n);
            let oracle = to_f64(&exact_intersection_volume(&inst.balls()).unwrap());
            for delta in &deltas {
                let z = approx_two_ball_volume(&inst, delta).unwrap().value;
                let d = to_f64(delta);
                runs += 1;
                worst = worst.max((z / oracle - 1.0) / d);
                if !(oracle <= z * (1.0 + SLACK) && z <= (1.0 + d) * oracle * (1.0 + SLACK)) {
                    failures.push(format!("n={n} c={:?} r={} delta={d}: Z={z} V={oracle}", inst.c(), inst.r()));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{runs} runs, {} violations, max (Z/V - 1)/delta = {worst:.4}{}",
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

fn sandwich_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2000);
    let mut instances = vec![TwoBallInstance::new(vec![ratio(1, 5), ratio(1, 5)], ratio(1, 2)).unwrap()];
    instances.extend((0..8).map(|_| random_two_ball(&mut rng, 2)));
    let (mut checked, mut violations, mut worst) = (0usize, 0usize, f64::NEG_INFINITY);
    for inst in &instances {
        for m in [4usize, 8] {
            let mq = int(m as i64);
            let mut table = StaircaseTable::stage_zero(m, inst.r().clone()).unwrap();
            for stage in 0..=2usize {
                if stage > 0 {
                    table = dp_stage(&table, &inst.c()[stage - 1]).unwrap();
                }
                let prefix = &inst.c()[..stage];
                let shift_u = int(stage as i64) / &mq;
                let shift_v = inst.r() * &shift_u;
                for k in 0..=m {
                    for l in 0..=m {
                        let u = int(k as i64) / &mq;
                        let v = inst.r() * int(l as i64) / &mq;
                        let lo = to_f64(&restricted_two_ball_volume(prefix, &u, &v).unwrap());
                        let hi = to_f64(&restricted_two_ball_volume(prefix, &(&u + &shift_u), &(&v + &shift_v)).unwrap());
                        let g = table.get(k, l);
                        let excess = (lo - g).max(g - hi);
                        worst = worst.max(excess);
                        checked += 1;
                        if excess > SLACK {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(
        violations == 0,
        format!("{checked} grid points, {violations} violations, largest signed excess over the bounds {worst:.2e}"),
    )
}

fn knapsack_guarantee() -> Outcome {
    const M_CAP: usize = 20_000;
    let (mut total, mut run, mut failures) = (0, 0, Vec::new());
    let mut max_m = 0;
    let mut memo: HashMap<(Vec<u64>, Rational), f64> = HashMap::new();
    for n in 1..=3 {
        for a in all_vectors(n, 4) {
            let inst = KnapsackDualInstance::new(a.clone()).unwrap();
            let exact = to_f64(&exact_hull_volume(&inst.vertices()).unwrap());
            for eps in [ratio(1, 2), ratio(1, 4)] {
                total += 1;
                let params = build_params(&inst, &eps).unwrap();
                let m = grid_resolution(n, &params.inner_delta).unwrap();
                if m > M_CAP {
                    continue;
                }
                run += 1;
                max_m = max_m.max(m);
                // The engine sorts `a` on ingestion, so every permutation is
                // the same computation; the oracle still sees the ordered `a`.
                let v = *memo
                    .entry((inst.a().to_vec(), eps.clone()))
                    .or_insert_with(|| approx_knapsack_dual_volume(&inst, &eps).unwrap().value);
                let e = to_f64(&params.epsilon);
                if !((1.0 - e) * exact * (1.0 - SLACK) <= v && v <= (1.0 + e) * exact * (1.0 + SLACK)) {
                    failures.push(format!("a={a:?} eps={e}: V={v} exact={exact}"));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "coverage {run}/{total} configurations (M <= {M_CAP}, largest M = {max_m}, {} distinct engine runs), {} violations{}",
            memo.len(),
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

fn random_k_ball(rng: &mut ChaCha8Rng, k: usize, n: usize) -> KBallInstance {
    loop {
        let centers = (0..k)
            .map(|_| (0..n).map(|_| common::random_rational(rng, -1, 1, 10) / int(4)).collect())
            .collect();
        let radii = (0..k).map(|_| ratio(rng.gen_range(4..=8), 8)).collect();
        if let Ok(inst) = KBallInstance::new(centers, radii) {
            return inst;
        }
    }
}

fn k_ball_consistency() -> Outcome {
    let delta = ratio(1, 4);
    let d = to_f64(&delta);
    let mut rng = ChaCha8Rng::seed_from_u64(4000);
    let mut failures = Vec::new();
    let mut worst_pair = 1.0f64;
    let mut shared = 0;
    while shared < 20 {
        let n = 1 + shared % 2;
        let inst = random_two_ball(&mut rng, n);
        let Ok(kinst) = from_two_ball(inst.c(), inst.r()) else {
            continue;
        };
        shared += 1;
        let z2 = approx_two_ball_volume(&inst, &delta).unwrap().value;
        let zk = approx_k_ball_volume(&kinst, &delta).unwrap().value;
        let ratio_pair = (z2 / zk).max(zk / z2);
        worst_pair = worst_pair.max(ratio_pair);
        if ratio_pair > (1.0 + d).powi(2) * (1.0 + SLACK) {
            failures.push(format!("k=2 c={:?} r={}: two-ball {z2}, k-ball {zk}", inst.c(), inst.r()));
        }
    }

    let mut triples = vec![KBallInstance::new(
        vec![vec![int(0), int(0)], vec![ratio(1, 10), int(0)], vec![int(0), ratio(1, 10)]],
        vec![int(1), int(1), int(1)],
    )
    .unwrap()];
    triples.extend((0..9).map(|_| random_k_ball(&mut rng, 3, 2)));
    let mut worst_triple = 0.0f64;
    for inst in &triples {
        let z = approx_k_ball_volume(inst, &delta).unwrap().value;
        let v = to_f64(&exact_intersection_volume(&inst.balls()).unwrap());
        worst_triple = worst_triple.max(z / v);
        if !(v <= z * (1.0 + SLACK) && z <= (1.0 + d) * v * (1.0 + SLACK)) {
            failures.push(format!("k=3 centers={:?}: Z={z} V={v}", inst.centers()));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "20 shared k=2 instances (max ratio {worst_pair:.4} vs bound {:.4}), {} k=3 instances (max Z/V {worst_triple:.4}), {} violations{}",
            (1.0 + d).powi(2),
            triples.len(),
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

fn vpolytope_exactness() -> Outcome {
    let mut failures = Vec::new();
    let mut cross_checked = 0;
    for n in 2..=4 {
        for r in [int(1), ratio(3, 2), ratio(2, 7)] {
            let inst = VPolytopeInstance::new(cross_vertices(n, &r)).unwrap();
            cross_checked += 1;
            if exact_volume(&inst).unwrap() != cross_polytope_volume(n, &r) {
                failures.push(format!("cross-polytope n={n} r={r}"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5000);
    let mut random_checked = 0;
    while random_checked < 30 {
        let n = 1 + random_checked % 3;
        let k = 1 + (random_checked / 3) % 3;
        let points: Vec<Vec<Rational>> = (0..n + k).map(|_| random_point(&mut rng, n, 5)).collect();
        if !in_general_position(&points) {
            continue;
        }
        let Ok(inst) = VPolytopeInstance::new(points.clone()) else {
            continue;
        };
        random_checked += 1;
        let ours = exact_volume(&inst).unwrap();
        let oracle = exact_hull_volume(&points).unwrap();
        if ours != oracle {
            failures.push(format!("points {points:?}: {ours} vs {oracle}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{cross_checked} cross-polytopes and {random_checked} random instances, {} mismatches{}",
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

fn reduction_identity() -> Outcome {
    let (mut checked, mut failures) = (0, Vec::new());
    for n in 2..=3 {
        for a in all_vectors(n, 3).into_iter().filter(|a| a.iter().sum::<u64>() % 2 == 0) {
            checked += 1;
            let check = hardness_reduction_check(&a).unwrap();
            let brute = count_large_sets(&a).unwrap().positive;
            if !check.pass || check.rhs != brute {
                failures.push(format!("a={a:?}: lhs {} rhs {}", check.lhs, check.rhs));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} vectors, {} failures{}",
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

fn time_full(inst: &TwoBallInstance, m: usize) -> Duration {
    let opts = EngineOptions { strategy: GridStrategy::Full, threads: 1 };
    let start = Instant::now();
    let z = staircase_value(inst, m, &opts).unwrap();
    let elapsed = start.elapsed();
    assert!(z > 0.0);
    elapsed
}

fn complexity_scaling() -> Outcome {
    const M: usize = 400;
    let inst = TwoBallInstance::new(vec![ratio(1, 5), ratio(1, 5)], ratio(1, 2)).unwrap();
    time_full(&inst, M / 2);
    let ratios: Vec<f64> = (0..3)
        .map(|_| {
            let small = time_full(&inst, M);
            let large = time_full(&inst, 2 * M);
            large.as_secs_f64() / small.as_secs_f64()
        })
        .collect();
    let pass = ratios.iter().all(|r| (8.0 * 0.6..=8.0 * 1.4).contains(r));
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    outcome(
        pass,
        format!("n=2, M={M} -> {}: time ratios [{}] (band 4.80..11.20 per repetition)", 2 * M, shown.join(", ")),
    )
}

fn monte_carlo_consistency() -> Outcome {
    let balls = [ball(&[int(0), int(0)], int(1)), ball(&[ratio(1, 5), ratio(1, 5)], ratio(1, 2))];
    let exact = to_f64(&exact_intersection_volume(&balls).unwrap());
    let covered = (0..20u64)
        .filter(|&seed| mc_volume(&balls, 1_000_000, seed).unwrap().covers(exact))
        .count();
    outcome(covered >= 17, format!("exact {exact} inside the 95% interval for {covered}/20 seeds (need 17)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("two-ball guarantee", two_ball_guarantee),
        ("sandwich bounds", sandwich_bounds),
        ("knapsack-dual guarantee", knapsack_guarantee),
        ("k-ball consistency", k_ball_consistency),
        ("exact V-polytope volume", vpolytope_exactness),
        ("sign-count identity", reduction_identity),
        ("complexity scaling", complexity_scaling),
        ("Monte Carlo consistency", monte_carlo_consistency),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {} [{verdict}] {name}: {} ({:.1}s)",
            i + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!result.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
