//! Runs the classifier on synthetic samples of each class and prints how
//! often the majority class comes out right.
//!
//! cargo run --release --example class_accuracy -- [runs] [n]

use extremaldep::classifier::{classify_repeated, Classification, ClassifierConfig};
use extremaldep::polar::to_polar_sample;
use extremaldep::stream::StreamKey;
use extremaldep::synth::{gen_class_sample, ClassSpec};
use rayon::prelude::*;

fn main() {
    let mut args = std::env::args().skip(1);
    let runs: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(822);
    let specs = [
        ClassSpec::full(1.0, 0.5),
        ClassSpec::strong(1.0, 0.3, 0.7),
        ClassSpec::weak(1.0),
        ClassSpec::independence(1.0),
    ];
    for spec in specs {
        let results: Vec<Option<Classification>> = (0..runs)
            .into_par_iter()
            .map(|run| {
                let key = StreamKey::new(run).child_str(spec.class().name());
                let obs = gen_class_sample(&spec, n, key.child(0)).expect("valid spec");
                let (sample, _) = to_polar_sample(&obs);
                let cfg = ClassifierConfig { seed: key.child(1).value(), ..Default::default() };
                classify_repeated(&sample, &cfg).ok()
            })
            .collect();
        let mut majority = [0usize; 4];
        let mut mean = [0.0; 4];
        // alpha, k(n), cone width, pre-check share, mean H2 and H3 statistic
        let mut diag = Means::default();
        for c in results.iter().flatten() {
            let d = &c.diagnostics;
            diag.alpha.push(d.alpha_hat.alpha_hat);
            diag.k.push(d.k_n as f64);
            diag.width.push(d.cone_fit.width());
            for o in d.per_repetition.iter().flatten() {
                diag.precheck.push(if o.precheck { 1.0 } else { 0.0 });
                diag.h2.extend(o.h2.map(|t| t.statistic));
                diag.h3.extend(o.h3.map(|t| t.statistic));
            }
            if let Some(v) = &c.vector {
                majority[v.majority().index()] += 1;
                for (m, w) in mean.iter_mut().zip(v.weights) {
                    *m += w / runs as f64;
                }
            }
        }
        println!(
            "{:<12} majority [ind weak strong full] = {:?}  mean weights = [{:.2}, {:.2}, {:.2}, {:.2}]",
            spec.class().name(),
            majority,
            mean[0],
            mean[1],
            mean[2],
            mean[3]
        );
        println!(
            "             alpha {:.2}  k(n) {:.0}  width {:.2}  precheck {:.2}  H2 stat {:.3} (n={})  H3 stat {:.3} (n={})",
            avg(&diag.alpha),
            avg(&diag.k),
            avg(&diag.width),
            avg(&diag.precheck),
            avg(&diag.h2),
            diag.h2.len(),
            avg(&diag.h3),
            diag.h3.len()
        );
    }
}

#[derive(Default)]
struct Means {
    alpha: Vec<f64>,
    k: Vec<f64>,
    width: Vec<f64>,
    precheck: Vec<f64>,
    h2: Vec<f64>,
    h3: Vec<f64>,
}

fn avg(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}
