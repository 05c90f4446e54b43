// The batch front end: load a bundled JSON config, shrink it, run every
// stage and write the artifacts.

use slln_lab::experiment::{load_config, run, Overrides, Subcommand};

pub fn run_example() -> slln_lab::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/theorem.json");
    let out = std::env::temp_dir().join("slln-config-run-example");
    let spec = Overrides {
        n_paths: Some(40),
        horizon: Some(100_000),
        out: Some(out),
        ..Overrides::default()
    }
    .apply(load_config(path)?)?;
    println!("resolved checkpoints: {:?}", spec.checkpoints);

    let (report, written) = run(&spec, Subcommand::All, None, true)?;
    println!("status {:?}", report.status);
    for f in &report.failures {
        println!("  {f}");
    }
    if let Some(c) = &report.calculus {
        println!("calculus: {:?}, blocks {:?}", c.status, c.blocks.status);
    }
    println!("wrote {}", written.report.display());
    if let Some(p) = &written.deviations {
        print!("{}", std::fs::read_to_string(p)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> slln_lab::Result<()> {
    run_example()
}
