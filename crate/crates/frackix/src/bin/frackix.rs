//! Thin CLI over the pipeline dispatcher:
//! `frackix <subcommand> --config <file> [--seed N] [--out DIR] [--dump-operator]`.

use frackix::config::parse_config;
use frackix::run::{run, RunOverrides};
use std::process::ExitCode;

fn usage() -> String {
    format!(
        "usage: frackix <{}> --config <file> [--seed N] [--out DIR] [--dump-operator]",
        frackix::config::SUBCOMMANDS.join("|")
    )
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        println!("{}", usage());
        return ExitCode::SUCCESS;
    }
    let subcommand = args[0].clone();
    let mut config_path: Option<String> = None;
    let mut overrides = RunOverrides::default();
    let mut i = 1;
    while i < args.len() {
        match args[i].as_str() {
            "--config" => {
                i += 1;
                config_path = args.get(i).cloned();
            }
            "--seed" => {
                i += 1;
                overrides.seed = match args.get(i).and_then(|v| v.parse::<u64>().ok()) {
                    Some(s) => Some(s),
                    None => return fail("config", "--seed expects an unsigned integer", 2),
                };
            }
            "--out" => {
                i += 1;
                overrides.out_dir = args.get(i).cloned();
            }
            "--dump-operator" => {
                overrides.dump_operator = true;
            }
            other => {
                return fail("config", &format!("unknown flag {other:?}; {}", usage()), 2);
            }
        }
        i += 1;
    }
    let Some(path) = config_path else {
        return fail("config", &format!("missing --config; {}", usage()), 2);
    };
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => return fail("io", &format!("cannot read {path}: {e}"), 5),
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail(e.category(), &e.to_string(), e.exit_code()),
    };
    let started = std::time::Instant::now();
    match run(&subcommand, &cfg, &overrides) {
        Ok(out) => {
            for f in &out.files {
                println!("{}", f.display());
            }
            eprintln!(
                "frackix {subcommand}: {} file(s) in {:.2}s",
                out.files.len(),
                started.elapsed().as_secs_f64()
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.category(), &e.to_string(), e.exit_code()),
    }
}

fn fail(category: &str, message: &str, code: i32) -> ExitCode {
    eprintln!(
        "{}",
        serde_json::json!({"error": {"category": category, "message": message}})
    );
    ExitCode::from(code as u8)
}
