//! The two double-cover families worked through end to end.
//!
//! `hhhh` is the branch locus of four hyperplanes in ℙ³ (four parts), `4h`
//! the branch locus of a quartic (one part).

use crate::fan::Fan;
use crate::gkz::{build_aext, derive_pf, GkzSystem, LinearRatio, PfOperator};
use crate::rational::{int, Rational};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A named example.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Example {
    #[serde(rename = "hhhh")]
    Hhhh,
    #[serde(rename = "4h")]
    FourH,
}

impl Example {
    pub const ALL: [Example; 2] = [Example::Hhhh, Example::FourH];

    /// The nef-partition of the rays of ℙ³.
    pub fn partition(self) -> Vec<Vec<usize>> {
        match self {
            Example::Hhhh => vec![vec![0], vec![1], vec![2], vec![3]],
            Example::FourH => vec![vec![0, 1, 2, 3]],
        }
    }

    /// GKZ system of the example.
    pub fn system(self) -> GkzSystem {
        build_aext(&p3_fan(), &self.partition()).expect("the examples are valid nef-partitions")
    }

    /// Picard–Fuchs operator of the holomorphic period.
    pub fn operator(self) -> PfOperator {
        let sys = self.system();
        let ell = sys.kernel_vector(0).expect("rank-one kernel");
        derive_pf(&LinearRatio::from_relation(&sys.gamma, &ell)).expect("indicial root at zero")
    }

    /// Classical triple intersection `∫H³`.
    pub fn classical(self) -> Rational {
        int(2)
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Example::Hhhh => "hhhh",
            Example::FourH => "4h",
        })
    }
}

impl FromStr for Example {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hhhh" => Ok(Example::Hhhh),
            "4h" => Ok(Example::FourH),
            other => Err(format!("unknown example {other:?}; expected hhhh or 4h")),
        }
    }
}

/// Standard fan of ℙ³.
pub fn p3_fan() -> Fan {
    let rays = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]];
    let cones = (0..4).map(|skip| (0..4).filter(|&i| i != skip).collect()).collect();
    Fan::standard(rays, cones).expect("ℙ³ fan is valid")
}
