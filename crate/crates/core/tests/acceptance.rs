//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use gsqg_core::dynamics::{run, RunConfig, RunResult, SimState, Stepper};
use gsqg_core::gate::{
    check_decay, classify_j_max, classify_params, geometric_check, serrin_check_series,
    GeometricParams, Regime, SerrinVerdict,
};
use gsqg_core::lp::{
    dissipation_integral, dyadic_block, lp_norm, shell_dissipation, top_shell,
    verify_multiplier_bounds, BesovIndex, SequenceSpec,
};
use gsqg_core::spectral::random_band;
use gsqg_core::{Grid, MultiplierSpec, ScalarField};

const PRESETS: [&str; 5] = [
    "navier_stokes",
    "sqg",
    "modified_sqg",
    "log_euler",
    "generalized_sqg",
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Config JSON for `preset`. Navier–Stokes fixes `α = 1`; the generalized
/// family gets `β = 0.5`.
fn preset_config(preset: &str, alpha: f64, extra: Value) -> RunConfig {
    let mut v = json!({"preset": preset, "alpha": alpha});
    if preset == "navier_stokes" {
        v.as_object_mut().unwrap().remove("alpha");
    }
    if preset == "generalized_sqg" {
        v["P"] = json!({"family": "power", "beta": 0.5});
    }
    for (k, x) in extra.as_object().unwrap() {
        v[k] = x.clone();
    }
    RunConfig::from_value(v).expect("valid acceptance config")
}

fn single_mode_error(preset: &str, alpha: f64) -> (f64, f64) {
    let cfg = preset_config(
        preset,
        alpha,
        json!({
            "kappa": 1.0, "grid": {"n": 64}, "dt": 1e-3, "t_end": 1.0, "cadence": 1.0,
            "initial": {"kind": "single_mode", "m1": 1, "m2": 0},
            "diagnostics": {"monitors": ["norms"]}
        }),
    );
    let started = Instant::now();
    let result = run(&cfg, None).expect("run");
    let secs = started.elapsed().as_secs_f64();
    let exact = ScalarField::from_fn(cfg.grid, |x, _| (-1.0f64).exp() * x.sin());
    (result.final_state.theta().max_abs_diff(&exact), secs)
}

fn fixed_step_error(integrator: &str, dt: f64) -> f64 {
    let cfg = preset_config(
        "sqg",
        0.5,
        json!({
            "kappa": 1.0, "grid": {"n": 64}, "t_end": 1.0, "integrator": integrator,
            "initial": {"kind": "single_mode", "m1": 1, "m2": 0}
        }),
    );
    let mut stepper = Stepper::new(&cfg);
    let mut state = SimState::new(cfg.initial.generate(cfg.grid).unwrap());
    let steps = (1.0 / dt).round() as usize;
    for _ in 0..steps {
        state = stepper.step(&state, dt).unwrap();
    }
    let exact = ScalarField::from_fn(cfg.grid, |x, _| (-1.0f64).exp() * x.sin());
    state.theta().max_abs_diff(&exact)
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    let mut cases = 0;
    for preset in PRESETS {
        let alphas: &[f64] = if preset == "navier_stokes" {
            &[1.0]
        } else {
            &[0.25, 0.5, 0.75, 1.0]
        };
        for &alpha in alphas {
            let (err, secs) = single_mode_error(preset, alpha);
            worst = worst.max(err);
            slowest = slowest.max(secs);
            cases += 1;
        }
    }
    let ratio = fixed_step_error("rk4", 0.1) / fixed_step_error("rk4", 0.05);
    let if_ratio = fixed_step_error("ifrk4", 0.1) / fixed_step_error("ifrk4", 0.05);
    let pass = worst <= 1e-8 && (8.0..=32.0).contains(&ratio) && slowest < 10.0;
    outcome(
        pass,
        format!(
            "{cases} preset/alpha cases, max error {worst:.2e} (<= 1e-8), rk4 halving ratio {ratio:.2} \
             (in [8, 32]), slowest run {slowest:.2}s (< 10s); ifrk4 ratio {if_ratio:.2} is roundoff-limited"
        ),
    )
}

fn random_run(preset: &str, kappa: f64) -> (RunResult, f64) {
    let cfg = preset_config(
        preset,
        0.5,
        json!({
            "kappa": kappa, "grid": {"n": 128}, "t_end": 1.0, "cadence": 0.1,
            "initial": {"kind": "random_band", "j_min": -1, "j_max": 4, "slope": 2.0,
                        "amplitude": 1.0, "seed": 7},
            "diagnostics": {"monitors": ["norms"]}
        }),
    );
    let started = Instant::now();
    let result = run(&cfg, None).expect("run");
    (result, started.elapsed().as_secs_f64())
}

fn channel(result: &RunResult, name: &str) -> Vec<f64> {
    result
        .records
        .iter()
        .map(|r| r.get(name).unwrap_or(f64::NAN))
        .collect()
}

fn criteria_2_and_3() -> (Outcome, Outcome) {
    let mut mp_pass = true;
    let mut worst_over: f64 = f64::NEG_INFINITY;
    let mut slowest: f64 = 0.0;
    let mut worst_increase: f64 = f64::NEG_INFINITY;
    let mut worst_drift: f64 = 0.0;
    let mut energy_pass = true;
    for preset in PRESETS {
        let (viscous, secs) = random_run(preset, 0.1);
        slowest = slowest.max(secs);
        let inf = channel(&viscous, "lp_inf");
        let completed = !viscous.summary.status.is_abort() && inf.len() == 11;
        for v in &inf {
            worst_over = worst_over.max(v / inf[0] - 1.0);
            mp_pass &= *v <= inf[0] * (1.0 + 1e-6);
        }
        mp_pass &= completed && secs < 60.0;

        let l2 = channel(&viscous, "lp_2");
        for w in l2.windows(2) {
            let inc = (w[1] - w[0]) / w[0];
            worst_increase = worst_increase.max(inc);
            energy_pass &= inc <= 1e-8;
        }
        let (inviscid, _) = random_run(preset, 0.0);
        let l2 = channel(&inviscid, "lp_2");
        energy_pass &= !inviscid.summary.status.is_abort() && l2.len() == 11;
        for v in &l2 {
            let d = (v - l2[0]).abs() / l2[0];
            worst_drift = worst_drift.max(d);
            energy_pass &= d <= 1e-6;
        }
        energy_pass &= completed;
    }
    (
        outcome(
            mp_pass,
            format!(
                "5 presets, kappa 0.1, n 128: max lp_inf(t)/lp_inf(0) - 1 = {worst_over:.2e} (<= 1e-6), \
                 slowest {slowest:.2}s (< 60s)"
            ),
        ),
        outcome(
            energy_pass,
            format!(
                "kappa 0.1 max relative L2 increase {worst_increase:.2e} (<= 1e-8); \
                 kappa 0 max relative L2 drift {worst_drift:.2e} (<= 1e-6)"
            ),
        ),
    )
}

fn inner(a: &ScalarField, b: &ScalarField) -> f64 {
    let dx = a.grid().dx();
    dx * dx
        * a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| x * y)
            .sum::<f64>()
}

fn criterion_4() -> Outcome {
    let grid = Grid::periodic(128).unwrap();
    let top = top_shell(grid);
    let mut worst_rec: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    for seed in 0..100u64 {
        let hat = random_band(grid, 0.0, grid.max_radius() + 1.0, 1.0, seed);
        let theta = hat.inverse().unwrap();
        let blocks: Vec<ScalarField> = (-1..=top).map(|j| dyadic_block(&hat, j).0).collect();
        let mut sum = vec![0.0; grid.len()];
        for b in &blocks {
            for (s, v) in sum.iter_mut().zip(b.values()) {
                *s += v;
            }
        }
        let sum = ScalarField::new(grid, sum).unwrap();
        worst_rec = worst_rec.max(sum.max_abs_diff(&theta) / theta.max_abs());
        let energy = inner(&theta, &theta);
        let pieces: f64 = blocks.iter().map(|b| inner(b, b)).sum();
        worst_orth = worst_orth.max((pieces - energy).abs() / energy);
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                worst_orth = worst_orth.max(inner(&blocks[i], &blocks[j]).abs() / energy);
            }
        }
    }
    outcome(
        worst_rec <= 1e-10 && worst_orth <= 1e-10,
        format!(
            "100 fields, n 128: reconstruction {worst_rec:.2e}, orthogonality {worst_orth:.2e} (<= 1e-10)"
        ),
    )
}

fn criterion_5() -> Outcome {
    let grid = Grid::periodic(128).unwrap();
    let mut pass = true;
    let mut min_margin = f64::INFINITY;
    let mut min_q = f64::INFINITY;
    let mut checks = 0;
    for j in 0..=5 {
        for seed in 0..5u64 {
            let hat = random_band(
                grid,
                2f64.powi(j),
                2f64.powi(j + 1),
                0.0,
                100 * j as u64 + seed,
            );
            let block = dyadic_block(&hat, j).0;
            let l2 = lp_norm(&block, 2.0);
            for alpha in [0.25, 0.5, 1.0] {
                let lhs = shell_dissipation(&hat, j, alpha);
                let rhs = 2f64.powf(2.0 * alpha * j as f64) * l2 * l2;
                pass &= lhs >= rhs;
                min_margin = min_margin.min(lhs / rhs - 1.0);
                for q in [4.0, 16.0] {
                    let d = dissipation_integral(&block, alpha, q).unwrap();
                    pass &= d >= 0.0;
                    min_q = min_q.min(d);
                }
                checks += 1;
            }
        }
    }
    outcome(
        pass,
        format!(
            "{checks} shell/alpha cases: min lhs/rhs - 1 = {min_margin:.3e} (>= 0, no tolerance); \
             min q-dissipation at q in {{4, 16}} = {min_q:.3e} (>= 0)"
        ),
    )
}

fn criterion_6() -> Outcome {
    let symbols = [
        MultiplierSpec::Identity,
        MultiplierSpec::Power { beta: 0.5 },
        MultiplierSpec::Power { beta: 1.0 },
        MultiplierSpec::LogPower { gamma: 1.0 },
        MultiplierSpec::LogPower { gamma: 2.0 },
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for p in &symbols {
        let r = verify_multiplier_bounds(p, 20, 2026);
        let spread = r.qinf_spread();
        pass &= r.shells.len() == 6
            && r.ratio2_q2_max <= 1.0 + 1e-12
            && spread.is_finite()
            && spread < 10.0;
        parts.push(format!(
            "{} q2 {:.4} spread {:.2}",
            p.family_name(),
            r.ratio2_q2_max,
            spread
        ));
    }
    outcome(pass, format!("20 seeds, j 0..5: {}", parts.join("; ")))
}

/// `d_j` evaluated directly in floating point.
fn decay_oracle(
    p: &MultiplierSpec,
    a: &SequenceSpec,
    s: f64,
    alpha: f64,
    kappa: f64,
    j: i32,
) -> f64 {
    let seq = |j: i32| match *a {
        _ if j < -1 => 0.0,
        SequenceSpec::Linear => j as f64 + 1.0,
        SequenceSpec::Power { b } => (j as f64 + 1.0).powf(b),
    };
    let r = 2f64.powi(j + 2);
    let symbol = match *p {
        MultiplierSpec::Identity => 1.0,
        MultiplierSpec::Power { beta } => r.powf(beta),
        MultiplierSpec::LogPower { gamma } => (1.0 + r * r).ln().powf(gamma),
        MultiplierSpec::LoglogPower { gamma } => (1.0 + (1.0 + r * r).ln()).ln().powf(gamma),
        MultiplierSpec::PowerTimesLog { beta, gamma } => {
            r.powf(beta) * (1.0 + r * r).ln().powf(gamma)
        }
    };
    2f64.powf(s * (seq(j) - seq(j - 2)))
        * (j + 2) as f64
        * symbol
        * 2f64.powf(-2.0 * alpha * j as f64)
        / kappa
}

fn criterion_7() -> Outcome {
    let idx = BesovIndex::default();
    let cases = [
        (
            "log-euler preset",
            MultiplierSpec::LogPower { gamma: 1.0 },
            0.5,
            Regime::LogEulerCorollary,
        ),
        (
            "beta 0.5 < 2alpha 0.8",
            MultiplierSpec::Power { beta: 0.5 },
            0.4,
            Regime::Sub2alphaCorollary,
        ),
        (
            "beta = 2alpha = 0.8",
            MultiplierSpec::Power { beta: 0.8 },
            0.4,
            Regime::ModifiedSqgOpen,
        ),
        (
            "beta 1, 2alpha 0.6",
            MultiplierSpec::Power { beta: 1.0 },
            0.3,
            Regime::SupercriticalOpen,
        ),
    ];
    let mut matches = 0;
    let mut worst_rel: f64 = 0.0;
    for (_, p, alpha, expected) in &cases {
        let verdict = classify_params(p, *alpha, 1.0, &idx).unwrap();
        if verdict.regime == *expected && !verdict.decay_sequence.is_empty() {
            matches += 1;
        }
        let report = check_decay(p, &idx.a, idx.s, *alpha, 1.0, classify_j_max(*alpha)).unwrap();
        for &(j, v) in report.sequence.iter().filter(|x| x.0 <= 60) {
            let o = decay_oracle(p, &idx.a, idx.s, *alpha, 1.0, j);
            worst_rel = worst_rel.max((v - o).abs() / o.abs());
        }
    }
    let pow = SequenceSpec::Power { b: 1.5 };
    let report = check_decay(
        &MultiplierSpec::PowerTimesLog {
            beta: 0.3,
            gamma: 1.0,
        },
        &pow,
        1.0,
        0.35,
        0.5,
        40,
    )
    .unwrap();
    for &(j, v) in &report.sequence {
        let o = decay_oracle(
            &MultiplierSpec::PowerTimesLog {
                beta: 0.3,
                gamma: 1.0,
            },
            &pow,
            1.0,
            0.35,
            0.5,
            j,
        );
        worst_rel = worst_rel.max((v - o).abs() / o.abs());
    }
    outcome(
        matches == cases.len() && worst_rel <= 1e-12,
        format!("{matches}/{} regimes match; decay sequence vs direct oracle {worst_rel:.2e} (<= 1e-12)", cases.len()),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let exps = [1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0, f64::INFINITY];
    let pick = |rng: &mut ChaCha8Rng, xs: &[f64]| xs[rng.random_range(0..xs.len())];
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let mut agree = 0;
    let mut holds_seen = [0, 0];
    let rows = 20;
    for row in 0..rows {
        let alpha = pick(&mut rng, &[0.25, 0.5, 0.75, 1.0]);
        let sigma = pick(&mut rng, &[0.125, 0.25, 0.5, 0.75]);
        let g = GeometricParams {
            p1: pick(&mut rng, &exps),
            p2: pick(&mut rng, &exps),
            r1: pick(&mut rng, &exps),
            r2: pick(&mut rng, &exps),
            q: f64::INFINITY,
            sigma,
            beta: 1.0,
            alpha,
        };
        // at beta = 1 the criterion reads 1/p1 + 1/p2 + alpha/r1 + alpha/r2 <= alpha + sigma/2
        let lhs = inv(g.p1) + inv(g.p2) + alpha * (inv(g.r1) + inv(g.r2));
        let expect_geo = lhs <= alpha + sigma / 2.0;
        let rep = geometric_check(&g).unwrap();
        let q_form = rep.r_condition.is_none_or(|rc| rc == expect_geo);
        let geo_ok = rep.holds == expect_geo && rep.s == sigma && q_form;

        let p = pick(&mut rng, &[2.5, 3.0, 4.0, 6.0, 8.0, 16.0]).max(1.0 / alpha + 0.5);
        let r = pick(&mut rng, &[1.5, 2.0, 3.0, 4.0, 8.0, 32.0]);
        let expect_serrin = inv(p) + alpha * inv(r) <= alpha;
        let times: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let norms: Vec<f64> = times.iter().map(|t| 1.0 + t).collect();
        let report = serrin_check_series(&times, &norms, p, r, alpha, 1.0).unwrap();
        let serrin_ok = report.condition_holds == expect_serrin
            && (report.verdict == SerrinVerdict::Satisfied) == expect_serrin;
        if geo_ok && serrin_ok {
            agree += 1;
        } else {
            eprintln!("criterion 8 row {row} disagrees: {g:?}, p {p}, r {r}");
        }
        holds_seen[expect_geo as usize] += 1;
    }
    outcome(
        agree == rows,
        format!(
            "{agree}/{rows} rows agree with the beta = 1 arithmetic ({} hold, {} fail)",
            holds_seen[1], holds_seen[0]
        ),
    )
}

fn criterion_9() -> Outcome {
    let cfg = RunConfig::from_value(json!({
        "preset": "sqg", "kappa": 0.1, "alpha": 0.5, "grid": {"n": 64},
        "t_end": 0.5, "cadence": 0.05,
        "initial": {"kind": "random_band", "j_min": 0, "j_max": 3, "slope": 1.0, "amplitude": 1.0, "seed": 11}
    }))
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let mut texts = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        single.install(|| run(&cfg, Some(&out))).unwrap();
        texts.push(fs::read(out.join("diagnostics.ndjson")).unwrap());
    }
    let parallel = dir.path().join("p");
    let result = run(&cfg, Some(&parallel)).unwrap();
    let reference = single.install(|| run(&cfg, None)).unwrap();
    let mut worst: f64 = 0.0;
    for (a, b) in result.records.iter().zip(&reference.records) {
        for (k, v) in &a.channels {
            let w = b.get(k).unwrap_or(f64::NAN);
            worst = worst.max((v - w).abs() / w.abs().max(1e-300));
        }
    }
    let lines = texts[0]
        .split(|&c| c == b'\n')
        .filter(|l| !l.is_empty())
        .count();
    let bitwise = texts[0] == texts[1] && lines == 11;
    outcome(
        bitwise && worst <= 1e-12 && result.records.len() == reference.records.len(),
        format!(
            "single-threaded diagnostics bitwise identical: {bitwise} ({lines} records); \
             parallel vs single max relative difference {worst:.2e} (<= 1e-12)"
        ),
    )
}

fn main() {
    let started = Instant::now();
    let (c2, c3) = criteria_2_and_3();
    let results = [
        ("1", "exact single-mode decay", criterion_1()),
        ("2", "maximum principle", c2),
        ("3", "energy behavior", c3),
        ("4", "Littlewood-Paley exactness", criterion_4()),
        ("5", "dissipation lower bound", criterion_5()),
        ("6", "multiplier bound ratios", criterion_6()),
        ("7", "gate case analysis", criterion_7()),
        ("8", "criterion arithmetic", criterion_8()),
        ("9", "determinism", criterion_9()),
    ];
    let mut failed = 0;
    for (id, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id} ({name}): {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        results.len() - failed,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
