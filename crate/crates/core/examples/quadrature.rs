// Tail integrals by adaptive Simpson, split at kinks and octaves.

use slln_lab::generators::TailEnvelope;
use slln_lab::quadrature::{adaptive_simpson, integrate};

pub fn run_example() -> slln_lab::Result<()> {
    let v = adaptive_simpson(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
    println!("int_0^pi sin = {v:.12}");

    let env = TailEnvelope::Pareto { gamma: 2.0 };
    let head = integrate(|t| env.gbar(t), 0.0, 1e4, &env.breakpoints(), 1e-12, 0.0);
    let total = head + env.tail_integral(1e4);
    println!("C_G for pareto(2): quadrature + remainder = {total:.12}, exact {}", env.c_g());
    Ok(())
}

#[allow(dead_code)]
fn main() -> slln_lab::Result<()> {
    run_example()
}
