//! Drives the JSON-configured pipelines through the library API (the same
//! path the `frackix` binary uses) and prints the files they emit.
//!
//! Run with `cargo run --release --example cli_pipelines`.

use frackix::config::parse_config;
use frackix::run::{run, RunOverrides};

fn main() -> frackix::Result<()> {
    let dir = std::env::temp_dir().join("frackix_example_out");
    let out = dir.to_string_lossy().to_string();

    let spectra = format!(
        r#"{{"alpha": 1.5, "kernel": {{"type": "cosine"}}, "out_dir": "{out}/spectra"}}"#
    );
    let mc = format!(
        r#"{{"alpha": 1.5, "epsilon": 0.2, "tau1": 0.3,
            "geometry": {{"kind": "interval", "extent": 1.0}},
            "rho": {{"preset": "gaussian", "amplitude": 0.5, "center": 0.6, "width": 0.2}},
            "particles": 20000, "n_cells": 50, "horizon": 0.5,
            "snapshots": [0.25, 0.5], "seed": 9, "out_dir": "{out}/mc"}}"#
    );
    let macro_cfg = format!(
        r#"{{"alpha": 1.5, "epsilon": 0.2, "tau1": 0.3,
            "geometry": {{"kind": "interval", "extent": 1.0}},
            "rho": {{"preset": "gaussian", "amplitude": 0.5, "center": 0.6, "width": 0.2}},
            "n_cells": 128, "horizon": 0.5, "snapshots": [0.25, 0.5],
            "scheme": "imex", "out_dir": "{out}/macro"}}"#
    );
    let milne = format!(
        r#"{{"alpha": 1.5, "milne": {{"ordinates": 16, "r_max": 2000.0}},
            "out_dir": "{out}/milne"}}"#
    );

    for (name, cfg_text) in [
        ("spectra", &spectra),
        ("mc", &mc),
        ("macro", &macro_cfg),
        ("milne", &milne),
    ] {
        let cfg = parse_config(cfg_text)?;
        let result = run(name, &cfg, &RunOverrides::default())?;
        println!("{name}:");
        for f in result.files {
            println!("  {}", f.display());
        }
    }
    println!("\nInspect the CSV files and their .meta.json sidecars under {out}");
    Ok(())
}
