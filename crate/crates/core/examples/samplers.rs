// The two ingredients: a centered pairwise independent `X` and a heavy
// `Y = V^{1/a}` whose tail is dominated by an integrable envelope.

use slln_lab::generators::{
    centered_mean_check, infinite_mean_onset, sample_y, sample_x_block, DependenceMode, TailEnvelope, XFamily,
};
use slln_lab::rng::{derive_stream, Channel, StreamKey};
use slln_lab::schedules::MomentSchedule;

pub fn run_example() -> slln_lab::Result<()> {
    let mut stream = derive_stream(StreamKey::new(3, 0, Channel::X));

    // b = 2: blocks (e1, e2, e1 e2), pairwise independent but the product
    // of a block is always +1
    let parity = XFamily::ParityRademacher { block_bits: 2 };
    let x = sample_x_block(&parity, 30, &mut stream);
    println!("parity blocks: {:?}", &x[..9]);
    let triples = x.chunks(3).filter(|b| b[0] * b[1] * b[2] < 0.0).count();
    println!("blocks with product -1: {triples}");

    for family in [
        XFamily::IidUniform { half_width: 1.0 },
        XFamily::IidShiftedExp { rate: 1.0 },
        XFamily::ParityRademacher { block_bits: 4 },
        XFamily::IidParetoCentered { shape: 3.0 },
    ] {
        let c = centered_mean_check(&family, 100_000, &mut stream)?;
        println!("{family:?}: mean {:+.5} within band {:.5}: {:?}", c.mean, c.band, c.status);
    }

    let env = TailEnvelope::Pareto { gamma: 2.0 };
    let s = MomentSchedule::inv_sqrt_log();
    let mut ys = derive_stream(StreamKey::new(3, 0, Channel::Y));
    for n in [10u64, 1_000, 1_000_000] {
        let a = s.eval_a(n);
        let y = sample_y(&env, DependenceMode::Independent, a, &mut ys, None)?;
        println!("n = {n}: a_n = {a:.4}, Y = {y:.4e}");
    }
    println!("E|Y_n| is infinite from n = {:?}", infinite_mean_onset(&env, &s));
    Ok(())
}

#[allow(dead_code)]
fn main() -> slln_lab::Result<()> {
    run_example()
}
