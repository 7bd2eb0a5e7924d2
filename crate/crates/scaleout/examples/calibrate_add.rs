//! Measures element-wise f32 vector addition on this host and prints an
//! add-cost table usable with `scaleout simulate --add-model`.
//!
//! ```text
//! cargo run --release --example calibrate_add > host_add.csv
//! ```
//!
//! The numbers describe the CPU running the example. For a GPU cluster, run an
//! equivalent kernel on the device and write the same two-column format.

use std::hint::black_box;
use std::time::Instant;

use scaleout::addcsv::write_add_model;
use scaleout::core::AddCostModel;

const SIZES: [usize; 7] = [
    4 << 10,
    64 << 10,
    256 << 10,
    1 << 20,
    4 << 20,
    16 << 20,
    64 << 20,
];

fn median_add_seconds(bytes: usize) -> f64 {
    let n = bytes / 4;
    let mut acc = vec![1.0f32; n];
    let inc = vec![0.5f32; n];
    let reps = (256 << 20) / bytes;
    let mut runs: Vec<f64> = (0..9)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..reps {
                for (a, b) in acc.iter_mut().zip(&inc) {
                    *a += *b;
                }
                black_box(&mut acc);
            }
            start.elapsed().as_secs_f64() / reps as f64
        })
        .collect();
    runs.sort_by(f64::total_cmp);
    runs[runs.len() / 2]
}

fn main() {
    let mut samples = vec![(0u64, 0.0)];
    let mut last = 0.0;
    for bytes in SIZES {
        // keep the table non-decreasing despite timer noise
        last = median_add_seconds(bytes).max(last);
        samples.push((bytes as u64, last));
    }
    let model = AddCostModel::new(samples).expect("measured table is monotone");
    write_add_model(&model, std::io::stdout().lock()).expect("write to stdout");
}
