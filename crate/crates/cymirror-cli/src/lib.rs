//! Command-line driver for the cymirror pipelines.
//!
//! Exit status: 0 on success, 1 for configuration errors, 2 for input
//! errors and 3 when a verification report contains a failing check.

pub mod args;
pub mod commands;
pub mod config;
pub mod emit;
pub mod error;
pub mod report;
pub mod verify;

use args::{Cli, Command, GkzAction, MirrorAction, VerifyTarget};
use commands::Output;
use config::RunConfig;
use error::{CliError, CHECK_FAILURE};
use report::Report;

fn gkz_source(a: &GkzAction) -> &args::Source {
    match a {
        GkzAction::Build(s) | GkzAction::Pf(s) | GkzAction::Series(s) => s,
    }
}

fn mirror_source(a: &MirrorAction) -> &args::Source {
    match a {
        MirrorAction::Map(s) | MirrorAction::Invert(s) | MirrorAction::Yukawa(s) | MirrorAction::Instantons(s) => s,
    }
}

fn verify(target: VerifyTarget, polytope: &Option<std::path::PathBuf>, cfg: &RunConfig) -> Result<Report, CliError> {
    match target {
        VerifyTarget::Hhhh => verify::verify_hhhh(cfg),
        VerifyTarget::FourH => verify::verify_4h(cfg),
        VerifyTarget::Appendix => verify::verify_appendix(cfg),
        VerifyTarget::Morrison => verify::verify_morrison(&commands::load_polytope(polytope, cfg)?),
        VerifyTarget::All => Ok(Report::merge(
            "all",
            vec![verify::verify_hhhh(cfg)?, verify::verify_4h(cfg)?, verify::verify_appendix(cfg)?],
        )),
    }
}

/// Runs a parsed command. Returns the rendered output (empty when written
/// to `--out`) and the exit status.
pub fn run(cli: &Cli) -> Result<(String, i32), CliError> {
    let source = match &cli.command {
        Command::Gkz { action } => Some(gkz_source(action)),
        Command::Mirror { action } => Some(mirror_source(action)),
        Command::Emit { source, .. } => Some(source),
        _ => None,
    };
    let cfg = RunConfig::resolve(&cli.global, source)?;
    let out = match &cli.command {
        Command::Polytope { action } => commands::polytope(action, &cfg)?,
        Command::Fan { action } => commands::fan(action, &cfg)?,
        Command::Gkz { action } => commands::gkz(action, &cfg)?,
        Command::Mirror { action } => commands::mirror(action, &cfg)?,
        Command::Verify { target, polytope } => Output::Report(verify(*target, polytope, &cfg)?),
        Command::Emit { series, .. } => commands::emit(*series, &cfg)?,
    };
    let code = match &out {
        Output::Report(r) if !r.pass => CHECK_FAILURE,
        _ => 0,
    };
    let text = commands::render(&out, cfg.format)?;
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
            Ok((String::new(), code))
        }
        None => Ok((text, code)),
    }
}
