//! The algorithmic core: scenario-relaxed dual bounds, the inner
//! column-and-constraint loop, outer CCG/Benders loops, and the restart
//! wrapper that verifies the final upper bound ex post and reruns with the
//! extracted optimal multiplier when it was violated.

mod inner;
mod lift;
mod outer;
mod worst_case;

pub use inner::{inner_ccg, InnerOutcome};
pub use outer::{
    benders_master, ccg_master, solve_with_restarts, BendersCut, BendersMasterOutcome, EngineState,
};
pub use worst_case::{
    augmented_h, multiplier_from_indicator_certificate, multiplier_from_restricted_certificate,
    solve_exact_worst_case_indicator, solve_exact_worst_case_restricted,
    solve_relaxed_worst_case, DualBlock, IndicatorCertificate, IndicatorWorstCase,
    RelaxMode, RelaxationCertificate, RestrictedBlock, RestrictedCertificate,
};

use crate::scalar::{format_scalar, ExtValue, Scalar};
use num_traits::Zero;
use std::fmt;
use std::time::Duration;

/// Iteration and restart caps. Exceeding any is an error, never a silent
/// truncation.
#[derive(Clone, Debug)]
pub struct Caps {
    pub inner: usize,
    pub outer: usize,
    pub restarts: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            inner: 10_000,
            outer: 1_000,
            restarts: 10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Ccg,
    Benders,
}

impl std::str::FromStr for Method {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "ccg" => Ok(Method::Ccg),
            "benders" => Ok(Method::Benders),
            other => Err(crate::error::Error::Input(format!(
                "unknown method {other:?}; expected \"ccg\" or \"benders\""
            ))),
        }
    }
}

/// Options for `solve_with_restarts`.
#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub method: Method,
    /// Optimality tolerance; exact comparisons, defaults to zero.
    pub eps: Scalar,
    /// Initial multiplier; defaults to max(1, u - l) at the first
    /// candidate first-stage decision.
    pub lambda0: Option<Scalar>,
    pub caps: Caps,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: Method::Ccg,
            eps: Scalar::zero(),
            lambda0: None,
            caps: Caps::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceKind {
    Outer,
    InnerFeasibility,
    InnerOptimality,
    Verify,
    Restart,
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TraceKind::Outer => "outer",
            TraceKind::InnerFeasibility => "inner-feas",
            TraceKind::InnerOptimality => "inner-opt",
            TraceKind::Verify => "verify",
            TraceKind::Restart => "restart",
        };
        f.write_str(s)
    }
}

/// One line of the per-run trace.
#[derive(Clone, Debug)]
pub struct TraceEvent {
    pub kind: TraceKind,
    pub iteration: usize,
    pub lambda: Scalar,
    pub lower: ExtValue,
    pub upper: ExtValue,
    /// Retained-pool size (discrete decisions for the general problem,
    /// scenarios/cuts for the indicator loops).
    pub pool: usize,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "kind={} it={} lambda={} lb={} ub={} pool={}",
            self.kind,
            self.iteration,
            format_scalar(&self.lambda),
            self.lower,
            self.upper,
            self.pool
        )
    }
}

/// Final record of a solve: value, decision, verification flag, counters,
/// wall time, and the trace. The row shape of the benchmark table.
#[derive(Clone, Debug)]
pub struct Report {
    pub value: ExtValue,
    pub x_star: Option<Vec<Scalar>>,
    /// Witnessing realization when the instance is robust-infeasible.
    pub witness_xi: Option<Vec<bool>>,
    /// True iff the final bound passed ex-post verification.
    pub verified_optimal: bool,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub restarts: usize,
    pub final_lambda: Option<Scalar>,
    pub wall_time: Duration,
    pub trace: Vec<TraceEvent>,
}

impl Report {
    pub fn summary(&self) -> String {
        format!(
            "value={} opt={} outer={} inner={} restarts={} t={:.3}s",
            self.value,
            if self.verified_optimal { 1 } else { 0 },
            self.outer_iterations,
            self.inner_iterations,
            self.restarts,
            self.wall_time.as_secs_f64()
        )
    }
}
