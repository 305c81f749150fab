//! Command-line grammar.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Exact mirror-symmetry pipelines for Calabi–Yau double covers.
#[derive(Debug, Parser)]
#[command(name = "cymirror", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand; they override the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Truncation order in q (number of coefficients kept).
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lattice-polytope operations.
    Polytope {
        #[command(subcommand)]
        action: PolytopeAction,
    },
    /// Fan operations.
    Fan {
        #[command(subcommand)]
        action: FanAction,
    },
    /// GKZ systems and Picard–Fuchs operators.
    Gkz {
        #[command(subcommand)]
        action: GkzAction,
    },
    /// Mirror maps, Yukawa couplings and instanton numbers.
    Mirror {
        #[command(subcommand)]
        action: MirrorAction,
    },
    /// Verification reports against the known values.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
        /// Polytope JSON for the morrison target.
        #[arg(long)]
        polytope: Option<PathBuf>,
    },
    /// Serialize one series of a pipeline.
    Emit {
        #[arg(value_enum)]
        series: EmitSeries,
        #[command(flatten)]
        source: Source,
    },
}

/// Input polytope.
#[derive(Debug, Clone, Args)]
pub struct PolytopeInput {
    /// Polytope JSON: {"rank": n, "vertices": [[...], ...]}.
    #[arg(long)]
    pub polytope: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum PolytopeAction {
    /// Polar dual.
    Dual(PolytopeInput),
    /// Lattice points.
    Points(PolytopeInput),
    /// Reflexivity test.
    Reflexive(PolytopeInput),
    /// Nested-pyramid checks.
    Morrison(PolytopeInput),
}

/// Input fan.
#[derive(Debug, Clone, Args)]
pub struct FanInput {
    /// Fan JSON: {"lattice_basis": [...], "rays": [...], "max_cones": [...]}.
    #[arg(long)]
    pub fan: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum FanAction {
    /// Star subdivision at a primitive vector.
    Subdivide {
        #[command(flatten)]
        input: FanInput,
        /// Comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        ray: Vec<i64>,
    },
    /// Canonical lifting to N × ℤ.
    Lift(FanInput),
    /// Contraction along a semiample divisor.
    Contract {
        #[command(flatten)]
        input: FanInput,
        /// Comma-separated divisor coefficients, one per ray.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        divisor: Vec<i64>,
    },
    /// Box elements of the canonical stacky fan.
    Box(FanInput),
}

/// Where a GKZ system comes from.
#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Named example, or `custom` with --fan and --partition.
    #[arg(long, value_enum)]
    pub example: Option<ExampleChoice>,
    /// Fan JSON for a custom system.
    #[arg(long)]
    pub fan: Option<PathBuf>,
    /// Nef-partition for a custom system, parts separated by `;`, e.g. `0;1;2;3`.
    #[arg(long)]
    pub partition: Option<String>,
    /// Classical triple intersection for a custom system.
    #[arg(long)]
    pub classical: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum ExampleChoice {
    #[value(name = "hhhh")]
    #[serde(rename = "hhhh")]
    Hhhh,
    #[value(name = "4h")]
    #[serde(rename = "4h")]
    FourH,
    #[value(name = "custom")]
    #[serde(rename = "custom")]
    Custom,
}

#[derive(Debug, Subcommand)]
pub enum GkzAction {
    /// Exponent matrix, γ, β and the relation lattice.
    Build(Source),
    /// Picard–Fuchs operator.
    Pf(Source),
    /// Holomorphic period series.
    Series(Source),
}

#[derive(Debug, Subcommand)]
pub enum MirrorAction {
    /// Mirror map q(z).
    Map(Source),
    /// Inverse mirror map z(q).
    Invert(Source),
    /// Yukawa coupling and the correlation K(q).
    Yukawa(Source),
    /// Instanton numbers.
    Instantons(Source),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    #[value(name = "hhhh")]
    Hhhh,
    #[value(name = "4h")]
    FourH,
    Appendix,
    Morrison,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmitSeries {
    /// Holomorphic period y₀(z).
    Y0,
    /// Mirror map q(z).
    MirrorMap,
    /// Inverse mirror map z(q).
    Inverse,
    /// Correlation K(q).
    Correlation,
    /// Two-variable inverse mirror map q₁(Q₁, Q₂).
    AppendixQ1,
    /// Two-variable W₂.
    AppendixW2,
    /// Two-variable W₃.
    AppendixW3,
}
