// The series bounds behind the heavy part: partial sums plus closed-form
// remainders checked against `p/(p-1) C_G`, `C_G` and `(2p-1)/(p-1) C_G`,
// and the block schedule `N_k` that makes the tails summable.

use slln_lab::calculus::{build_block_schedule, combined_series_bound, truncated_power_moment, DEFAULT_P_VALUES};
use slln_lab::generators::TailEnvelope;
use slln_lab::schedules::MomentSchedule;

fn label(env: &TailEnvelope) -> String {
    match env {
        TailEnvelope::Exp => "exp".into(),
        TailEnvelope::Pareto { gamma } => format!("pareto({gamma})"),
    }
}

pub fn run_example() -> slln_lab::Result<()> {
    let env = TailEnvelope::Pareto { gamma: 2.0 };
    println!("E min(V, 10)^2 bound for pareto(2): {:.10}", truncated_power_moment(&env, 10, 2.0)?);

    println!("{:>14} {:>6} {:>12} {:>10} {:>12} {:>10}", "envelope", "p", "A+B", "bound", "slack", "B");
    for env in [TailEnvelope::Exp, TailEnvelope::Pareto { gamma: 1.5 }, TailEnvelope::Pareto { gamma: 2.0 }] {
        for p in DEFAULT_P_VALUES {
            let c = combined_series_bound(&env, p, 10_000)?;
            println!(
                "{:>14} {:>6} {:>12.6} {:>10.4} {:>12.6} {:>10.6}",
                label(&env),
                p,
                c.combined,
                c.bound,
                c.slack,
                c.b.numeric
            );
        }
    }

    let blocks = build_block_schedule(&TailEnvelope::Exp, &MomentSchedule::constant(0.5), 5)?;
    println!("blocks for exp / a = 1/2: N = {:?}", blocks.n);
    println!("tail bounds: {:.6?}", blocks.tail_bounds);

    match build_block_schedule(&env, &MomentSchedule::inv_sqrt_log(), 3) {
        Ok(b) => println!("inv_sqrt_log blocks: {:?}", b.n),
        Err(e) => println!("inv_sqrt_log blocks: {e}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> slln_lab::Result<()> {
    run_example()
}
