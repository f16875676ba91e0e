//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use extremaldep::bootstrap::{
    decide_strong, default_resample_size, default_resample_tail, BootstrapConfig, BootstrapDraws,
    Significance,
};
use extremaldep::chi2::{chi2_quantile, wilson_hilferty};
use extremaldep::classifier::{classify_once, classify_repeated, ClassifierConfig, DependenceClass};
use extremaldep::polar::{to_polar_sample, BivariateObservation, Cone, PolarObservation};
use extremaldep::stats::{d_stat, fit_cone, t_stat, AngularWeight, ConeFit, StatisticKind};
use extremaldep::stream::StreamKey;
use extremaldep::synth::{gen_class_sample, gen_pareto, ClassSpec};
use extremaldep::tail::{hill_alpha, hill_log_mean, order_tail};
use extremaldep::threshold::{capped_k, KCap};
use rand::Rng;
use rayon::prelude::*;

struct Check {
    ok: bool,
    detail: String,
}

impl Check {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Self { ok, detail: detail.into() }
    }
}

type Criterion = (&'static str, Duration, fn() -> Check);

fn main() {
    let criteria: [Criterion; 9] = [
        ("resample sizes and tail cap", Duration::from_secs(1), procedural_constants),
        ("polar and Cartesian cone distance agree", Duration::from_secs(1), distance_forms),
        ("scale invariance", Duration::from_secs(10), scale_invariance),
        ("classifier accuracy on synthetic classes", Duration::from_secs(600), class_accuracy),
        ("cone fit recovers the angular support", Duration::from_secs(120), cone_fit_consistency),
        ("Hill calibration", Duration::from_secs(10), hill_calibration),
        ("chi-square quantiles", Duration::from_secs(1), chi2_values),
        ("classify-matrix output is deterministic", Duration::from_secs(120), determinism),
        ("decision rule exactness", Duration::from_secs(1), decision_rules),
    ];
    let mut failed = Vec::new();
    for (idx, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let check = run();
        let took = start.elapsed();
        let in_time = took <= limit;
        let ok = check.ok && in_time;
        println!(
            "{} [{}] {name}: {} ({:.2}s, limit {}s{})",
            if ok { "PASS" } else { "FAIL" },
            idx + 1,
            check.detail,
            took.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", too slow" }
        );
        if !ok {
            failed.push(idx + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}

fn procedural_constants() -> Check {
    let m = default_resample_size(822, 100);
    let k_m = default_resample_tail(m);
    let cap = KCap::default();
    let caps = [50, 100, 200].map(|k| capped_k(k, cap));
    Check::new(
        m == 50 && k_m == 10 && caps == [80, 100, 120],
        format!("m = {m}, k(m) = {k_m}, capped 50/100/200 -> {caps:?}"),
    )
}

fn distance_forms() -> Check {
    let mut rng = StreamKey::new(1).child_str("distance").rng();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let x = rng.random::<f64>() * 100.0;
        let y = rng.random::<f64>() * 100.0;
        let u: f64 = rng.random_range(1e-6..=1.0);
        let v: f64 = rng.random_range(1e-6..=1.0);
        let cone = Cone::new(u.min(v), u.max(v)).expect("valid cone");
        let obs = BivariateObservation::new(x, y).expect("valid point");
        let polar = cone.distance(&obs.to_polar().expect("positive radius"));
        let cart = cone.distance_xy(&obs);
        let scale = polar.abs().max(cart.abs());
        if scale > 0.0 {
            worst = worst.max((polar - cart).abs() / scale);
        }
    }
    Check::new(worst <= 1e-10, format!("largest relative gap {worst:.2e} over 10^4 cases"))
}

fn rel_drift(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(1.0)
}

fn scale_invariance() -> Check {
    let specs = [
        ClassSpec::full(1.0, 0.5),
        ClassSpec::strong(1.0, 0.3, 0.7),
        ClassSpec::weak(1.0),
        ClassSpec::independence(1.0),
    ];
    let cone = Cone::new(0.3, 0.7).expect("valid cone");
    let mut drift: f64 = 0.0;
    let mut same_decisions = true;
    for (i, spec) in specs.iter().enumerate() {
        let obs = gen_class_sample(spec, 822, StreamKey::new(30 + i as u64)).expect("valid spec");
        let stats = |c: f64| {
            let scaled: Vec<PolarObservation> = to_polar_sample(&obs).0.iter().map(|p| p.scaled(c)).collect();
            let tail = order_tail(&scaled, 100).expect("tail");
            let direct = [
                d_stat(&tail, &cone).value,
                t_stat(&tail, AngularWeight::Identity).map_or(f64::NAN, |s| s.value),
                t_stat(&tail, AngularWeight::G).map_or(f64::NAN, |s| s.value),
                hill_log_mean(&tail),
            ];
            let cfg = ClassifierConfig { seed: 5, ..Default::default() };
            let cls = classify_repeated(&scaled, &cfg).expect("classifier runs");
            (direct, cls)
        };
        let (base_stats, base) = stats(1.0);
        for c in [1e-3, 1e3] {
            let (s, cls) = stats(c);
            for (x, y) in base_stats.iter().zip(s) {
                if !(x.is_nan() && y.is_nan()) {
                    drift = drift.max(rel_drift(*x, y));
                }
            }
            let (bd, cd) = (&base.diagnostics, &cls.diagnostics);
            drift = drift.max(rel_drift(bd.alpha_hat.alpha_hat, cd.alpha_hat.alpha_hat));
            drift = drift.max(rel_drift(bd.cone_fit.objective, cd.cone_fit.objective));
            same_decisions &= bd.k_n == cd.k_n && bd.cone_fit.cone == cd.cone_fit.cone;
            same_decisions &= base.vector == cls.vector;
            for (p, q) in bd.per_repetition.iter().zip(&cd.per_repetition) {
                match (p, q) {
                    (Some(p), Some(q)) => {
                        same_decisions &= p.class == q.class && p.precheck == q.precheck;
                        for (u, v) in [(p.h1, q.h1), (p.h2, q.h2), (p.h3, q.h3)] {
                            match (u, v) {
                                (Some(u), Some(v)) => {
                                    same_decisions &= u.decision == v.decision;
                                    drift = drift.max(rel_drift(u.statistic, v.statistic));
                                }
                                (None, None) => {}
                                _ => same_decisions = false,
                            }
                        }
                    }
                    (None, None) => {}
                    _ => same_decisions = false,
                }
            }
        }
    }
    Check::new(
        same_decisions && drift <= 1e-12,
        format!("decisions identical: {same_decisions}, largest statistic drift {drift:.2e}"),
    )
}

fn class_accuracy() -> Check {
    const RUNS: u64 = 20;
    let specs = [
        ClassSpec::full(1.0, 0.5),
        ClassSpec::strong(1.0, 0.3, 0.7),
        ClassSpec::weak(1.0),
        ClassSpec::independence(1.0),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for spec in specs {
        let vectors: Vec<_> = (0..RUNS)
            .into_par_iter()
            .map(|run| {
                let key = StreamKey::new(run).child_str(spec.class().name());
                let obs = gen_class_sample(&spec, 822, key.child(0)).expect("valid spec");
                let (sample, _) = to_polar_sample(&obs);
                let cfg = ClassifierConfig { seed: key.child(1).value(), ..Default::default() };
                classify_repeated(&sample, &cfg).ok().and_then(|c| c.vector)
            })
            .collect();
        let majority = |accept: &[DependenceClass]| {
            vectors.iter().flatten().filter(|v| accept.contains(&v.majority())).count()
        };
        let mean = |c: DependenceClass| vectors.iter().flatten().map(|v| v.weight(c)).sum::<f64>() / RUNS as f64;
        use DependenceClass::*;
        let (pass, text) = match spec.class() {
            Full => {
                let hits = majority(&[Full]);
                (hits * 100 >= 80 * RUNS as usize, format!("full {hits}/{RUNS} (need 80%)"))
            }
            Strong => {
                let hits = majority(&[Strong, Full]);
                let (s, f) = (mean(Strong), mean(Full));
                (
                    hits * 100 >= 80 * RUNS as usize && s >= f,
                    format!("strong {hits}/{RUNS} strong-or-full (need 80%), mean strong {s:.2} vs full {f:.2} (need strong >= full)"),
                )
            }
            Weak => {
                let hits = majority(&[Weak]);
                (hits * 100 >= 70 * RUNS as usize, format!("weak {hits}/{RUNS} (need 70%)"))
            }
            Independence => {
                let hits = majority(&[Independence]);
                (hits * 100 >= 70 * RUNS as usize, format!("independence {hits}/{RUNS} (need 70%)"))
            }
        };
        ok &= pass;
        parts.push(text);
    }
    Check::new(ok, parts.join("; "))
}

fn cone_fit_consistency() -> Check {
    let hits = (0..50u64)
        .into_par_iter()
        .filter(|rep| {
            let spec = ClassSpec::strong(1.0, 0.3, 0.7);
            let obs = gen_class_sample(&spec, 20_000, StreamKey::new(*rep).child_str("cone")).expect("valid spec");
            let (sample, _) = to_polar_sample(&obs);
            let tail = order_tail(&sample, 1000).expect("tail");
            let alpha = hill_alpha(&tail).expect("hill");
            let fit = fit_cone(&tail, alpha.inv_alpha_hat, 4.0, 0.01).expect("fit");
            let (a, b) = (fit.cone.a(), fit.cone.b());
            (0.2..=0.4).contains(&a) && (0.6..=0.8).contains(&b)
        })
        .count();
    Check::new(hits >= 45, format!("{hits}/50 fits inside [0.2, 0.4] x [0.6, 0.8] (need 45)"))
}

fn hill_calibration() -> Check {
    let mean = (0..100u64)
        .map(|rep| {
            let x = gen_pareto(2.0, 10_000, StreamKey::new(rep).child_str("hill")).expect("valid alpha");
            let sample: Vec<PolarObservation> = x
                .iter()
                .map(|v| PolarObservation::new(*v, 0.5).expect("positive"))
                .collect();
            hill_alpha(&order_tail(&sample, 100).expect("tail")).expect("hill").alpha_hat
        })
        .sum::<f64>()
        / 100.0;
    Check::new((mean - 2.0).abs() <= 0.4, format!("mean alpha {mean:.4} (need within 0.4 of 2)"))
}

fn chi2_values() -> Check {
    let q2 = chi2_quantile(0.95, 2).expect("valid");
    let exact = -2.0 * 0.05_f64.ln();
    let q199 = chi2_quantile(0.95, 199).expect("valid");
    let wh = wilson_hilferty(0.95, 199);
    let rel = (q199 / wh - 1.0).abs();
    Check::new(
        (q2 - exact).abs() <= 1e-10 && rel <= 0.005,
        format!("df 2: {q2:.12} vs {exact:.12}; df 199: {q199:.4} vs {wh:.4} ({:.3}%)", rel * 100.0),
    )
}

fn determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_extremaldep");
    let input = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/prices6.csv");
    let dir = tempfile::tempdir().expect("temp dir");
    let mut outputs = Vec::new();
    for (run, threads) in [(0, 1), (1, 1), (2, 4), (3, 4)] {
        let out = dir.path().join(format!("run{run}"));
        let status = Command::new(bin)
            .args(["classify-matrix", "--seed", "42", "--input"])
            .arg(&input)
            .arg("--out")
            .arg(&out)
            .env("EXTREMALDEP_THREADS", threads.to_string())
            .output()
            .expect("binary runs");
        if !status.status.success() {
            return Check::new(false, format!("run {run} failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
        let read = |name: &str| std::fs::read(out.join(name)).expect("output written");
        outputs.push((read("matrix.json"), read("heatmap.svg")));
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    Check::new(
        same,
        format!("4 runs (threads 1, 1, 4, 4): matrix.json and heatmap.svg identical: {same}"),
    )
}

fn decision_rules() -> Check {
    let cfg = BootstrapConfig::for_sample(822, 100, Significance::Standard, 0).expect("config");
    let inv_alpha = 0.5;
    let outside = inv_alpha + 2.0 * cfg.band_half_width(inv_alpha);
    let draws = |exceed: usize| BootstrapDraws {
        values: (0..cfg.resamples).map(|i| if i < exceed { outside } else { inv_alpha }).collect(),
        kind: StatisticKind::D,
        failed: 0,
    };
    let ten = decide_strong(&draws(10), inv_alpha, &cfg).expect("decides").rejected();
    let nine = decide_strong(&draws(9), inv_alpha, &cfg).expect("decides").rejected();

    // Wide fitted cones on samples of every class, with random bootstrap seeds.
    let mut rng = StreamKey::new(9).child_str("precheck").rng();
    let specs = [
        ClassSpec::full(1.0, 0.5),
        ClassSpec::strong(1.0, 0.3, 0.7),
        ClassSpec::weak(1.0),
        ClassSpec::independence(1.0),
    ];
    let mut confined = true;
    let fixtures = 100;
    for i in 0..fixtures {
        let spec = &specs[i % specs.len()];
        let obs = gen_class_sample(spec, 822, StreamKey::new(i as u64).child_str("wide")).expect("valid spec");
        let (sample, _) = to_polar_sample(&obs);
        let a = rng.random_range(0.001..0.15);
        let width = rng.random_range(0.85..=(1.0 - a));
        let fit = ConeFit {
            cone: Cone::new(a, (a + width).min(1.0)).expect("valid cone"),
            objective: 0.0,
            lambda: 4.0,
            grid_step: 0.01,
        };
        let boot = BootstrapConfig::for_sample(822, 100, Significance::Standard, rng.random()).expect("config");
        let inv = hill_log_mean(&order_tail(&sample, 100).expect("tail"));
        if let Ok(out) = classify_once(&sample, &boot, &fit, inv, Some(0.85)) {
            confined &= matches!(out.class, DependenceClass::Independence | DependenceClass::Weak)
                && out.h1.is_none()
                && out.h2.is_none();
        }
    }
    Check::new(
        ten && !nine && confined,
        format!("10 exceedances reject: {ten}, 9 reject: {nine}; wide cones confined to independence/weak on {fixtures} fixtures: {confined}"),
    )
}
