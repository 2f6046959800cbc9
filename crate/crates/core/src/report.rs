//! Serializable verification reports. Field order is fixed by the struct
//! declarations, which keeps serialized output byte-stable for a given
//! configuration.

use serde::Serialize;

use crate::motive::{MotiveParams, ResidualReport};

#[derive(Debug, Clone, Serialize)]
pub struct PrecisionLedger {
    pub t_deg: i64,
    pub prec: i64,
    pub series_terms: u32,
}

impl From<&MotiveParams> for PrecisionLedger {
    fn from(p: &MotiveParams) -> Self {
        PrecisionLedger {
            t_deg: p.tdeg,
            prec: p.prec,
            series_terms: p.h,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }

    pub fn from_residual(name: impl Into<String>, r: &ResidualReport) -> Check {
        let detail = match (r.max_nonzero_exp, r.weakest_prec) {
            (Some(x), _) => format!("nonzero digit at exponent {x}"),
            (None, Some(w)) => format!("clean within window floor -{w}"),
            (None, None) => "exact zero".to_string(),
        };
        Check::new(name, r.is_zero(), detail)
    }
}

/// Per-construction verification report.
#[derive(Debug, Clone, Serialize)]
pub struct ConstructionReport {
    pub object: String,
    pub precision: PrecisionLedger,
    /// Valuation (negated exponent) of the worst nonzero residual digit;
    /// null when the residual vanishes within the certified window.
    pub residual_max_valuation: Option<i64>,
    /// Certified window floor of the residual entries.
    pub certified_window: Option<i64>,
    pub checks: Vec<Check>,
}

impl ConstructionReport {
    pub fn new(
        object: impl Into<String>,
        params: &MotiveParams,
        residual: &ResidualReport,
        checks: Vec<Check>,
    ) -> ConstructionReport {
        ConstructionReport {
            object: object.into(),
            precision: params.into(),
            residual_max_valuation: residual.max_nonzero_exp.map(|x| -x),
            certified_window: residual.weakest_prec,
            checks,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.residual_max_valuation.is_none() && self.checks.iter().all(|c| c.pass)
    }
}

/// Dimension-pipeline report.
#[derive(Debug, Clone, Serialize)]
pub struct GaloisReport {
    pub r: u32,
    pub n: u32,
    pub rank_b: usize,
    pub dim: i64,
    pub s: Option<u64>,
    pub integral_s: bool,
    pub reconstruction_ok: bool,
}
