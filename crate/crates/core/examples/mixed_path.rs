// One path of the mixed sequence `Z_n`, stepped by hand and then run to
// the horizon with suffix-sup deviations at checkpoints.

use slln_lab::generators::{DependenceMode, TailEnvelope, XFamily};
use slln_lab::mixture::{run_path, MixedSequenceConfig, PathRunner};
use slln_lab::schedules::{build_sparsity, MomentSchedule};

pub fn run_example() -> slln_lab::Result<()> {
    let schedule = MomentSchedule::inv_sqrt_log();
    let config = MixedSequenceConfig::new(
        XFamily::ParityRademacher { block_bits: 4 },
        TailEnvelope::Pareto { gamma: 2.0 },
        DependenceMode::Comonotone,
        schedule,
        build_sparsity(&schedule, 1.0)?,
        100_000,
        0,
    );
    let alpha = config.alpha_table();

    let mut runner = PathRunner::new(&config, &alpha, 0);
    let z: Vec<f64> = (0..12).map(|_| runner.next_z()).collect::<slln_lab::Result<_>>()?;
    let st = runner.state();
    println!("first Z: {z:.3?}");
    println!("after {} steps: {} heavy, {} light, sum {:.4}", st.n, st.phi, st.psi, st.total());

    let summary = run_path(&config, &alpha, &[100, 1_000, 10_000, 100_000], 0)?;
    for (n, (avg, d)) in summary.checkpoints.iter().zip(summary.averages.iter().zip(&summary.deviations)) {
        println!("n = {n:>6}: S_n/n = {avg:+.5}, D(n) = {d:.5}");
    }
    println!("heavy terms: {}, largest |Z|: {:.3}", summary.phi, summary.max_abs_z);
    Ok(())
}

#[allow(dead_code)]
fn main() -> slln_lab::Result<()> {
    run_example()
}
