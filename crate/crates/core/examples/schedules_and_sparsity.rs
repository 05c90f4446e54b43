// Moment-order schedules `a_n` and the sparsity pattern that places the
// heavy terms.

use slln_lab::schedules::{build_sparsity, ratio_scan, validate_schedule, MomentSchedule, ScheduleForm};

pub fn run_example() -> slln_lab::Result<()> {
    for s in [
        MomentSchedule::inv_sqrt_log(),
        MomentSchedule::loglog_over_log(),
        MomentSchedule::constant(0.5),
    ] {
        let r = validate_schedule(&s, 1_000_000, 3.0)?;
        println!(
            "{:?}: a in [{:.4}, {:.4}] on [1, 1e6]; a_n ln n >= 3 first at {:?}",
            s.form, r.min_a, r.max_a, r.growth.first_index_within_horizon
        );
    }

    // a_n ln n = 1 forever: rejected by the hypothesis check, not here
    let broken = MomentSchedule::new(ScheduleForm::InvLog);
    let r = validate_schedule(&broken, 100_000, 3.0)?;
    println!("InvLog growth condition passes: {}", r.growth.passes);

    let bad = MomentSchedule::constant(1.5);
    println!("constant 1.5: {}", validate_schedule(&bad, 10, 3.0).unwrap_err());

    let s = MomentSchedule::inv_sqrt_log();
    let pattern = build_sparsity(&s, 1.0)?;
    let table = pattern.materialize(1_000_000);
    let scan = ratio_scan(&pattern, &s, 1_000_000);
    println!(
        "phi(1e6) = {} heavy terms; sup phi_n / n^a_n = {:.3} at n = {}",
        table.phi_at_horizon(),
        scan.sup,
        scan.argmax
    );
    let first: Vec<u64> = pattern.iter().filter(|st| st.alpha).take(8).map(|st| st.n).collect();
    println!("first insertion positions: {first:?}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> slln_lab::Result<()> {
    run_example()
}
