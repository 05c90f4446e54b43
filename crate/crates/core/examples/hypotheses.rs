// Checks every assumption of the limit theorem on a concrete setup.

use slln_lab::generators::{TailEnvelope, XFamily};
use slln_lab::hypotheses::{cesaro_tail_constant, check_hypotheses, envelope_constant, HypothesisInputs, HypothesisThresholds};
use slln_lab::schedules::{build_sparsity, MomentSchedule, SparsityPattern};

pub fn run_example() -> slln_lab::Result<()> {
    let th = HypothesisThresholds::default();
    let c = cesaro_tail_constant(&XFamily::IidUniform { half_width: 1.0 }, 1, 1e-9, 1e12)?;
    println!("C(1) for uniform(-1, 1) = {c:.12}");
    let e = envelope_constant(&TailEnvelope::Pareto { gamma: 2.0 }, 1e-9);
    println!("C_G for pareto(2) = {} (quadrature {:.12})", e.analytic, e.quadrature);
    let divergent = cesaro_tail_constant(&XFamily::IidParetoCentered { shape: 1.0 }, 1, 1e-9, 1e12);
    println!("pareto(1) X: {}", divergent.unwrap_err());

    let schedule = MomentSchedule::inv_sqrt_log();
    let envelope = TailEnvelope::Pareto { gamma: 2.0 };
    let family = XFamily::ParityRademacher { block_bits: 4 };
    for (label, pattern) in [
        ("automatic pattern", build_sparsity(&schedule, 1.0)?),
        ("every index heavy", SparsityPattern::all_one(1.0)),
    ] {
        let report = check_hypotheses(
            HypothesisInputs {
                family: &family,
                envelope: &envelope,
                schedule: &schedule,
                pattern: &pattern,
                horizon: 100_000,
            },
            &th,
        );
        println!("{label}: all pass = {}", report.all_pass());
        for e in &report.entries {
            println!("  {:?} {:?}: {}", e.id, e.status, e.detail);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> slln_lab::Result<()> {
    run_example()
}
