//! Command-line driver: configuration parsing, subcommand dispatch and all
//! file output.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Arg, ArgAction, Command as Cli};
use immersed_fsi::bench::{thread_cap_from_env, with_thread_cap};

use commands::{dispatch, Command, Outcome};
use config::{RunConfig, KEYS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

fn cli() -> Cli {
    let mut cli = Cli::new("immersed-fsi")
        .about("Unfitted finite element fluid-structure simulations")
        .subcommand_required(true)
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .value_parser(clap::value_parser!(PathBuf))
                .global(true)
                .help("plain-text file of `section.key = value` lines"),
        );
    for &(key, default, help) in KEYS {
        cli = cli.arg(
            Arg::new(key)
                .long(key)
                .value_name("VALUE")
                .action(ArgAction::Set)
                .global(true)
                .help(format!("{help} [default: {default}]"))
                .help_heading("Configuration overrides"),
        );
    }
    for cmd in Command::ALL {
        cli = cli.subcommand(Cli::new(cmd.name()).about(cmd.about()));
    }
    cli
}

/// Parse `args` (including the program name), run the selected subcommand
/// and return the process exit status: 0 on success, 1 on a failed run, 2
/// on a configuration error.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_CONFIG;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let cmd = Command::parse(name).expect("subcommands come from Command::ALL");
    let file = sub.get_one::<PathBuf>("config");
    let overrides: Vec<(String, String)> = KEYS
        .iter()
        .filter_map(|&(key, _, _)| sub.get_one::<String>(key).map(|v| (key.to_string(), v.clone())))
        .collect();

    let (cfg, defaulted) = match RunConfig::load(file.map(PathBuf::as_path), &overrides) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "config error: {e}");
            return EXIT_CONFIG;
        }
    };
    if !defaulted.is_empty() {
        let _ = writeln!(err, "notice: using defaults for {}", defaulted.join(", "));
    }

    match with_thread_cap(thread_cap_from_env(), || {
        let mut log = Vec::new();
        let r = dispatch(cmd, &cfg, &mut log);
        (r, log)
    }) {
        (Ok(outcome), log) => {
            let _ = out.write_all(&log);
            match outcome {
                Outcome::Success => EXIT_OK,
                Outcome::Failed => EXIT_FAILED,
            }
        }
        (Err(e), log) => {
            let _ = out.write_all(&log);
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILED
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        cli().debug_assert();
    }

    #[test]
    fn unknown_flag_is_a_config_error() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run_cli(["immersed-fsi", "check", "--scheme.nope", "1"], &mut o, &mut e), EXIT_CONFIG);
    }
}
