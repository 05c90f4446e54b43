// Ensembles of paths turned into a convergence verdict, for the theorem
// regime, the pairwise independent part alone and a violated setup.

use slln_lab::diagnostics::{prefix_drop, run_ensemble, x_part_experiment, EnsembleOptions};
use slln_lab::generators::{DependenceMode, TailEnvelope, XFamily};
use slln_lab::mixture::MixedSequenceConfig;
use slln_lab::schedules::{build_sparsity, MomentSchedule, SparsityPattern};

pub fn run_example() -> slln_lab::Result<()> {
    let opts = EnsembleOptions {
        n_paths: 50,
        checkpoints: vec![1_000, 10_000, 50_000, 100_000],
        ..EnsembleOptions::default()
    };
    let schedule = MomentSchedule::inv_sqrt_log();
    let theorem = MixedSequenceConfig::new(
        XFamily::ParityRademacher { block_bits: 4 },
        TailEnvelope::Pareto { gamma: 2.0 },
        DependenceMode::Comonotone,
        schedule,
        build_sparsity(&schedule, 1.0)?,
        100_000,
        0,
    );
    let mut violated = theorem.clone();
    violated.pattern = SparsityPattern::all_one(1.0);

    for (label, config) in [("theorem regime", &theorem), ("every index heavy", &violated)] {
        let r = run_ensemble(config, &opts)?;
        println!("{label}: {:?}", r.verdict);
        for row in &r.rows {
            println!("  n = {:>6}: median D {:.5}, q90 {:.5}, q99 {:.5}", row.checkpoint, row.median, row.q90, row.q99);
        }
    }

    let x = x_part_experiment(XFamily::ParityRademacher { block_bits: 1 }, 100_000, 0, &opts)?;
    println!("i.i.d. signs alone: {:?}, final median D {:.5}", x.verdict, x.rows.last().unwrap().median);
    println!("fixed prefix of 100 ones over n: {:?}", prefix_drop(&[1.0; 100], &[1_000, 100_000]));
    Ok(())
}

#[allow(dead_code)]
fn main() -> slln_lab::Result<()> {
    run_example()
}
