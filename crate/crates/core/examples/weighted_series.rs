// Almost-sure summability of the heavy terms, `sum_k |Y_k| / k^{1/a_k}`.
//
// Each path draws `Y_k = V_k^{1/a_k}` with `a_k` read at the global index
// where the k-th heavy term is inserted, and checks how much the partial
// sums still move over the last decade of terms.

use slln_lab::calculus::{weighted_series_ensemble, weighted_y_series, WeightedSeriesEnsemble};
use slln_lab::generators::{DependenceMode, TailEnvelope};
use slln_lab::schedules::MomentSchedule;

pub fn ensemble(seed: u64) -> WeightedSeriesEnsemble {
    weighted_series_ensemble(
        &TailEnvelope::Pareto { gamma: 2.0 },
        DependenceMode::Independent,
        &MomentSchedule::inv_sqrt_log(),
        1.0,
        10_000,
        100,
        seed,
        1e-3,
    )
}

pub fn run_with_seed(seed: u64) -> slln_lab::Result<()> {
    let zeta2 = weighted_y_series(&vec![1.0; 10_000], &vec![0.5; 10_000]);
    println!(
        "sum k^-2 to 1e4 = {:.6} (pi^2/6 = {:.6})",
        zeta2.partial_sums.last().unwrap(),
        std::f64::consts::PI.powi(2) / 6.0
    );
    let e = ensemble(seed);
    let mut inc = e.increments.clone();
    inc.sort_by(f64::total_cmp);
    println!(
        "seed {seed}: {:.0}% of {} paths moved < 1e-3 over the last decade (median {:.2e}, worst {:.2e})",
        100.0 * e.converged_fraction,
        e.n_paths,
        inc[inc.len() / 2],
        inc[inc.len() - 1]
    );
    Ok(())
}

pub fn run_example() -> slln_lab::Result<()> {
    run_with_seed(0)
}

#[allow(dead_code)]
fn main() -> slln_lab::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    run_with_seed(seed)
}
