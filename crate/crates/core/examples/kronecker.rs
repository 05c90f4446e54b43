// The Kronecker lemma on finite data: a Cauchy series `sum x_n / b_n`
// forces `(1/b_N) sum x_k` towards zero.

use slln_lab::calculus::kronecker_check;

pub fn run_example() -> slln_lab::Result<()> {
    let n = 10_000;
    let b: Vec<f64> = (1..=n).map(|k| k as f64).collect();
    let cases: [(&str, Vec<f64>); 3] = [
        ("(-1)^k", (1..=n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect()),
        ("1", vec![1.0; n]),
        ("1/k^2", (1..=n).map(|k| 1.0 / (k as f64).powi(2)).collect()),
    ];
    for (label, x) in cases {
        let r = kronecker_check(&x, &b, 1e-2)?;
        println!(
            "x_k = {label:>6}: sum x/b = {:+.6}, cauchy tail {:.2e}, (1/b_N) sum x = {:.2e} -> {:?}",
            r.series_sum, r.cauchy_tail, r.normalized_sum, r.outcome
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> slln_lab::Result<()> {
    run_example()
}
