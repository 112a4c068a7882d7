//! Command-line front end for the `powerburr` crate.
//!
//! Every command is reproducible from its `--seed`; reports are JSON and
//! embed the resolved configuration. Exit codes: 0 success, 2 parse error,
//! 3 fit failure, 4 configuration error, 1 anything else.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;

use args::{Cli, Command};
use config::Resolved;
use error::CliError;

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Other(e.to_string()))
}

fn with_pool<T>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError>
where
    T: Send,
{
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Other(e.to_string())),
        None => Ok(f()),
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Fit(a) => {
            let cfg = Resolved::new(&a.common)?;
            let report = with_pool(cfg.threads, || commands::cmd_fit(a, cfg.clone()))??;
            commands::write_out(a.common.out.as_deref(), &to_json(&report)?)
        }
        Command::Reserve(a) => {
            let cfg = Resolved::new(&a.common)?;
            let report = with_pool(cfg.threads, || commands::cmd_reserve(a, cfg.clone()))??;
            commands::write_out(a.common.out.as_deref(), &to_json(&report)?)
        }
        Command::Backtest(a) => {
            let cfg = Resolved::new(&a.common)?;
            let report = with_pool(cfg.threads, || commands::cmd_backtest(a, cfg.clone()))??;
            commands::write_out(a.common.out.as_deref(), &to_json(&report)?)
        }
        Command::Sample(a) => {
            let cfg = Resolved::new(&a.common)?;
            let csv = commands::cmd_sample(a, &cfg)?;
            commands::write_out(a.common.out.as_deref(), &csv)
        }
        Command::Study(a) => {
            let cfg = Resolved::new(&a.common)?;
            let (report, tables) = with_pool(cfg.threads, || commands::cmd_study(a, cfg.clone()))??;
            match &a.common.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    commands::write_out(Some(&dir.join("report.json")), &to_json(&report)?)?;
                    for (slug, csv, text) in &tables {
                        commands::write_out(Some(&dir.join(format!("{slug}.csv"))), csv)?;
                        commands::write_out(Some(&dir.join(format!("{slug}.txt"))), text)?;
                    }
                    Ok(())
                }
                None => {
                    for (_, _, text) in &tables {
                        println!("{text}");
                    }
                    Ok(())
                }
            }
        }
    }
}
