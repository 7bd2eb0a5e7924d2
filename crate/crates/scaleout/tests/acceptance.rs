//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs without a harness so the lines always reach the terminal.

use std::cell::Cell;
use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use scaleout::reference::{load_reference_data, lookup, write_reference, REFERENCE_CSV};
use scaleout::report::csv_body;
use scaleout_core::{
    bundled_trace, fuse, min_ratio_for_target, scaling_factor, simulate, transmission_time,
    AddCostModel, ClusterConfig, CompressionModel, FusionConfig, GradientEvent, ModelName,
    ModelTrace, RatioSearch, SimConfig, DEFAULT_RATIO_GRID,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn ms(s: f64) -> f64 {
    s * 1e3
}

fn transmission_arithmetic() -> Outcome {
    let cluster = ClusterConfig::new(2, 100e9).unwrap();
    let cases = [
        (97_000_000u64, 7.8),
        (170_000_000, 13.6),
        (527_000_000, 42.2),
    ];
    let mut worst: f64 = 0.0;
    let mut got = Vec::new();
    for (bytes, quoted_ms) in cases {
        let t = ms(transmission_time(bytes, &cluster, &CompressionModel::NONE));
        worst = worst.max((t - quoted_ms).abs() / quoted_ms);
        got.push(format!("{t:.2}"));
    }
    let msg = format!(
        "{} ms vs 7.8/13.6/42.2, worst {:.2}% (tol 1%)",
        got.join("/"),
        worst * 100.0
    );
    if worst <= 0.01 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn trace_of(events: &[(u64, f64)], t_batch_scale: f64) -> ModelTrace {
    let events: Vec<GradientEvent> = events
        .iter()
        .enumerate()
        .map(|(i, &(size_bytes, ready_time))| GradientEvent {
            layer_index: i as u32,
            size_bytes,
            ready_time,
        })
        .collect();
    let t_back = events.iter().map(|e| e.ready_time).fold(0.0, f64::max);
    ModelTrace::new("random", events, t_back * t_batch_scale).unwrap()
}

fn closed_form_oracle() -> Outcome {
    let strategy = (
        prop::collection::vec((0u64..=50_000_000, 0.0f64..0.2), 1..=100),
        1.0f64..3.0,
        1u32..=128,
        9.0f64..11.7,
        prop_oneof![Just(1.0), 1.0f64..100.0],
        11.0f64..12.3,
    );
    let worst = Cell::new(0.0_f64);
    let mut runner = runner(1000);
    let result = runner.run(
        &strategy,
        |(mut events, scale, n, log_bw, ratio, log_mem)| {
            events[0] = (events[0].0.max(1), events[0].1.max(1e-3));
            let trace = trace_of(&events, scale);
            let bw = 10f64.powf(log_bw);
            let mem_bw = 10f64.powf(log_mem);
            let config = SimConfig {
                cluster: ClusterConfig::new(n, bw).unwrap(),
                fusion: FusionConfig::unbounded(),
                compression: CompressionModel::new(ratio).unwrap(),
                add_model: AddCostModel::linear(mem_bw).unwrap(),
            };
            let r = simulate(&trace, &config);
            prop_assert_eq!(r.flush_log.len(), 1);

            // written out independently of the cost model
            let s = trace.total_bytes() as f64;
            let nf = n as f64;
            let expected_cost = if n == 1 {
                0.0
            } else {
                let shard = (s / nf + 0.5).floor();
                2.0 * s * 8.0 * (nf - 1.0) / nf / bw / ratio + (nf - 1.0) * 3.0 * shard / mem_bw
            };
            let err = (r.t_sync - (trace.t_back() + expected_cost)).abs();
            worst.set(worst.get().max(err));
            prop_assert!(err <= 1e-9, "error {} s", err);
            Ok(())
        },
    );
    let msg = format!(
        "1000 single-flush cases, worst |t_sync - closed form| = {:.1e} s (tol 1e-9)",
        worst.get()
    );
    result
        .map(|_| msg.clone())
        .map_err(|e| format!("{msg}: {e}"))
}

/// Replays the flush rules on a 1 µs clock. Ready times and the timeout are
/// whole ticks.
fn brute_force(events: &[(u64, u64)], timeout: u64, cap: u64) -> Vec<(u64, u64, Vec<u32>)> {
    let end = events.iter().map(|e| e.1).max().unwrap();
    let mut out = Vec::new();
    let mut layers: Vec<u32> = Vec::new();
    let mut bytes = 0u64;
    let mut deadline = 0u64;
    for tick in 0..=end {
        if !layers.is_empty() && deadline == tick {
            out.push((tick, bytes, std::mem::take(&mut layers)));
            bytes = 0;
        }
        for (i, &(size, _)) in events.iter().enumerate().filter(|e| e.1 .1 == tick) {
            if !layers.is_empty() && bytes + size > cap {
                out.push((tick, bytes, std::mem::take(&mut layers)));
                bytes = 0;
            }
            if size > cap {
                out.push((tick, size, vec![i as u32]));
                continue;
            }
            if layers.is_empty() {
                deadline = tick + timeout;
            }
            layers.push(i as u32);
            bytes += size;
        }
    }
    if !layers.is_empty() {
        out.push((end, bytes, layers));
    }
    out
}

fn fusion_oracle() -> Outcome {
    let strategy = (
        prop::collection::vec((0u64..=150_000, 0u64..=20_000, 0usize..3), 1..=100),
        prop_oneof![1u64..=5_000, Just(250u64), Just(1_000), Just(5_000)],
        1_000u64..=100_000,
    );
    let mut runner = runner(500);
    let flushes = Cell::new(0usize);
    let result = runner.run(&strategy, |(raw, timeout, cap)| {
        // coarse grids make simultaneous arrivals and timeouts likely
        let events: Vec<(u64, u64)> = raw
            .iter()
            .map(|&(size, tick, grid)| (size, tick / [1, 250, 1_000][grid] * [1, 250, 1_000][grid]))
            .collect();
        if events.iter().all(|e| e.1 == 0) || events.iter().all(|e| e.0 == 0) {
            return Ok(());
        }
        let trace = trace_of(
            &events
                .iter()
                .map(|&(s, t)| (s, t as f64 * 1e-6))
                .collect::<Vec<_>>(),
            1.0,
        );
        let config = FusionConfig::new(timeout as f64 * 1e-6, cap).unwrap();
        let got: Vec<(u64, u64, Vec<u32>)> = fuse(&trace, &config)
            .into_iter()
            .map(|b| {
                (
                    (b.flush_time * 1e6).round() as u64,
                    b.total_bytes,
                    b.member_layers,
                )
            })
            .collect();
        let want = brute_force(&events, timeout, cap);
        flushes.set(flushes.get() + want.len());
        if got != want {
            return Err(TestCaseError::fail(format!(
                "fuse {got:?}\noracle {want:?}"
            )));
        }
        Ok(())
    });
    let msg = format!(
        "500 random traces, {} flushes identical to the 1 us interpreter",
        flushes.get()
    );
    result
        .map(|_| msg.clone())
        .map_err(|e| format!("{msg}: {e}"))
}

fn f_sim(trace: &ModelTrace, n: u32, bw: f64, ratio: f64, fusion: FusionConfig) -> f64 {
    let config = SimConfig {
        cluster: ClusterConfig::new(n, bw).unwrap(),
        fusion,
        compression: CompressionModel::new(ratio).unwrap(),
        add_model: AddCostModel::default(),
    };
    simulate(trace, &config).f_sim
}

fn monotonicity() -> Outcome {
    // Events of at least 1 MB keep whole-byte shard rounding far below the
    // growth of (N-1)/N for N <= 64, so the N ordering holds exactly.
    let strategy = (
        prop::collection::vec((1_000_000u64..=100_000_000, 0.0f64..0.15), 1..=60),
        1.0f64..2.5,
        (0.5f64..10.0, 8_000_000u64..=128_000_000),
        (2u32..=64, 2u32..=64),
        (9.0f64..11.7, 9.0f64..11.7),
        (1.0f64..100.0, 1.0f64..100.0),
    );
    let mut runner = runner(300);
    let result = runner.run(
        &strategy,
        |(mut events, scale, (timeout_ms, cap), (n1, n2), (b1, b2), (r1, r2))| {
            events[0].1 = events[0].1.max(1e-3);
            let trace = trace_of(&events, scale);
            let fusion = FusionConfig::new(timeout_ms * 1e-3, cap).unwrap();
            let (n_lo, n_hi) = (n1.min(n2), n1.max(n2));
            let (bw_lo, bw_hi) = (10f64.powf(b1.min(b2)), 10f64.powf(b1.max(b2)));
            let (r_lo, r_hi) = (r1.min(r2), r1.max(r2));

            let base = f_sim(&trace, n_lo, bw_lo, r_lo, fusion);
            prop_assert!(base > 0.0 && base <= 1.0);
            prop_assert!(
                f_sim(&trace, n_lo, bw_hi, r_lo, fusion) >= base,
                "bandwidth"
            );
            prop_assert!(f_sim(&trace, n_lo, bw_lo, r_hi, fusion) >= base, "ratio");
            prop_assert!(f_sim(&trace, n_hi, bw_lo, r_lo, fusion) <= base, "workers");
            // extremes the model pins exactly
            prop_assert_eq!(f_sim(&trace, 1, bw_lo, r_lo, fusion), 1.0);
            prop_assert!(f_sim(&trace, n_lo, f64::INFINITY, f64::INFINITY, fusion) >= base);
            Ok(())
        },
    );
    let msg = "300 random traces: f_sim up in bandwidth and ratio, down in N, 1 at N=1".to_owned();
    result
        .map(|_| msg.clone())
        .map_err(|e| format!("{msg}: {e}"))
}

fn full_utilization() -> Outcome {
    let mut worst = (1.0, String::new());
    for m in ModelName::ALL {
        let trace = bundled_trace(m);
        for n in [16, 32, 64] {
            let f = f_sim(&trace, n, 100e9, 1.0, FusionConfig::default());
            if f < worst.0 {
                worst = (f, format!("{m} N={n}"));
            }
        }
    }
    let msg = format!(
        "min f_sim at 100 Gbps over 3 models x N in {{16,32,64}} = {:.4} ({}) (need >= 0.99)",
        worst.0, worst.1
    );
    if worst.0 >= 0.99 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn compression_headline() -> Outcome {
    let cluster = ClusterConfig::new(16, 10e9).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for m in ModelName::ALL {
        let r = min_ratio_for_target(
            &bundled_trace(m),
            &cluster,
            &FusionConfig::default(),
            &AddCostModel::default(),
            0.99,
            &DEFAULT_RATIO_GRID,
        )
        .unwrap();
        let pass = match (m, r) {
            (ModelName::Vgg16, RatioSearch::Found(x)) => x <= 10.0,
            (_, RatioSearch::Found(x)) => (2.0..=5.0).contains(&x),
            (_, RatioSearch::Unreachable) => false,
        };
        ok &= pass;
        parts.push(match r {
            RatioSearch::Found(x) => format!("{m} {x}x"),
            RatioSearch::Unreachable => format!("{m} unreachable"),
        });
    }
    let msg = format!(
        "min ratio for 0.99 at 10 Gbps, N=16: {} (ResNets in [2,5], vgg16 <= 10)",
        parts.join(", ")
    );
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn identity_and_reference() -> Outcome {
    let mut runner = runner(1000);
    let identity = runner.run(&(1e-6f64..1e3), |t| {
        prop_assert_eq!(scaling_factor(t, 0.0).unwrap(), 1.0);
        Ok(())
    });
    if let Err(e) = identity {
        return Err(format!("scaling_factor(t, 0) != 1: {e}"));
    }
    let points = load_reference_data();
    let mut buf = Vec::new();
    write_reference(&points, &mut buf).unwrap();
    let two: Vec<f64> = ["resnet50", "resnet101", "vgg16"]
        .iter()
        .map(|m| lookup(&points, m, 2).unwrap().measured_scaling_factor)
        .collect();
    let msg = format!(
        "scaling_factor(t, 0) == 1 on 1000 values; {} reference points, 2-server {two:?}",
        points.len()
    );
    if buf == REFERENCE_CSV.as_bytes() && points.len() == 9 && two == [0.7505, 0.6892, 0.5599] {
        Ok(msg)
    } else {
        Err(format!("{msg}: reference CSV did not round-trip"))
    }
}

fn run_sweep_cli(dir: &Path, epoch: &str, extra: &[&str]) -> Vec<(String, Vec<u8>)> {
    let status = Command::new(env!("CARGO_BIN_EXE_scaleout"))
        .arg("sweep")
        .args(extra)
        .arg("--out-dir")
        .arg(dir)
        .env("SOURCE_DATE_EPOCH", epoch)
        .output()
        .expect("run scaleout");
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let bytes = std::fs::read(&p).unwrap();
            let bytes = if name.ends_with(".csv") {
                csv_body(&String::from_utf8(bytes).unwrap()).into_bytes()
            } else {
                bytes
            };
            (name, bytes)
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let sweeps: [&[&str]; 3] = [
        &[],
        &[
            "--models",
            "vgg16,resnet50",
            "--bandwidths-gbps",
            "10,100",
            "--ratios",
            "1,2,5,10",
        ],
        &[
            "--models",
            "resnet101",
            "--workers",
            "8,16,32,64",
            "--bandwidths-gbps",
            "25",
        ],
    ];
    let mut files = 0;
    for (i, args) in sweeps.iter().enumerate() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let first = run_sweep_cli(a.path(), "0", args);
        let second = run_sweep_cli(b.path(), "1700000000", args);
        if first != second || first.len() < 2 {
            return Err(format!("sweep {i} differs between runs"));
        }
        files += first.len();
    }
    Ok(format!(
        "3 sweeps run twice: {files} CSV bodies and SVGs byte-identical"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("transmission arithmetic", transmission_arithmetic),
        ("closed-form oracle", closed_form_oracle),
        ("fusion oracle", fusion_oracle),
        ("monotonicity", monotonicity),
        ("full-utilization headline", full_utilization),
        ("compression headline", compression_headline),
        (
            "scaling-factor identity and reference data",
            identity_and_reference,
        ),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
