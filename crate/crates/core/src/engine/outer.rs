//! Outer loops: scenario masters, Benders cut masters, and the restart
//! wrapper.
//!
//! Masters minimize over the explicit first-stage list, so their values
//! are exact lower bounds at every iteration. Upper bounds come from the
//! Lagrangian side and are therefore only certified after the final
//! ex-post verification solve; a violated bound triggers a restart with
//! the extracted optimal multiplier and the [`EngineState`] retained.

use super::inner::{inner_ccg, InnerOutcome};
use super::lift::{augment_indicator, augmented_weights};
use super::worst_case::{
    augmented_h, indicator_scenario_dual, multiplier_from_indicator_certificate,
    multiplier_from_restricted_certificate, solve_exact_worst_case_indicator,
    solve_exact_worst_case_restricted, ScenarioDual,
};
use super::{Caps, Method, Report, SolveOptions, TraceEvent, TraceKind};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::lp::{solve_lp, LinearProgram, RowSense, Sense, SolveOutcome};
use crate::model::{eval_q, eval_qi, GeneralInstance, IndicatorInstance, Instance};
use crate::multiplier::{compute_u_l, compute_u_l_indicator};
use crate::scalar::{rat, ExtValue, Scalar};
use num_traits::Zero;
use std::time::Instant;

/// A stored Benders cut. Optimality cuts bound the epigraph variable from
/// below by `c(xi)'x + (h0_aug - T_aug x)' psi`; feasibility cuts exclude
/// decisions whose second stage the stored realization defeats.
#[derive(Clone, Debug)]
pub enum BendersCut {
    Optimality { xi: Vec<bool>, psi: Vec<Scalar> },
    Feasibility { xi: Vec<bool>, psi_ray: Vec<Scalar> },
}

/// Everything the outer loops retain across iterations and restarts: the
/// scenario set, the discrete-decision pool, the Benders cut store, the
/// current multiplier, the incumbent bound, and the counters.
#[derive(Clone, Debug)]
pub struct EngineState {
    pub scenarios: Vec<Vec<bool>>,
    pub pool: Vec<Vec<Scalar>>,
    pub cuts: Vec<BendersCut>,
    pub lambda: Option<Scalar>,
    pub upper: ExtValue,
    pub best_x: Option<Vec<Scalar>>,
    pub eps: Scalar,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub restarts: usize,
}

impl EngineState {
    fn new(opts: &SolveOptions, initial_scenario: Option<Vec<bool>>) -> Result<Self> {
        if let Some(l) = &opts.lambda0 {
            if *l <= Scalar::zero() {
                return Err(Error::Input("lambda0 must be strictly positive".into()));
            }
        }
        Ok(EngineState {
            scenarios: initial_scenario.into_iter().collect(),
            pool: Vec::new(),
            cuts: Vec::new(),
            lambda: opts.lambda0.clone(),
            upper: ExtValue::PosInf,
            best_x: None,
            eps: opts.eps.clone(),
            outer_iterations: 0,
            inner_iterations: 0,
            restarts: 0,
        })
    }

    /// Records a candidate upper bound, keeping the incumbent decision.
    fn note_candidate(&mut self, value: Scalar, x: &[Scalar]) {
        if ExtValue::finite(value.clone()) < self.upper {
            self.upper = ExtValue::finite(value);
            self.best_x = Some(x.to_vec());
        }
    }

    fn retain_scenario(&mut self, xi: Vec<bool>) -> bool {
        if self.scenarios.contains(&xi) {
            return false;
        }
        self.scenarios.push(xi);
        true
    }

    fn gap_closed(&self, lower: &ExtValue) -> bool {
        match (&self.upper, lower) {
            (ExtValue::Finite(u), ExtValue::Finite(l)) => u - l <= self.eps,
            _ => false,
        }
    }

    fn trace_event(&self, kind: TraceKind, lambda: Scalar, lower: ExtValue, upper: ExtValue, pool: usize) -> TraceEvent {
        TraceEvent {
            kind,
            iteration: self.outer_iterations,
            lambda,
            lower,
            upper,
            pool,
        }
    }

    fn finish(
        self,
        value: ExtValue,
        x_star: Option<Vec<Scalar>>,
        witness_xi: Option<Vec<bool>>,
        start: Instant,
        trace: Vec<TraceEvent>,
    ) -> Report {
        Report {
            value,
            x_star,
            witness_xi,
            verified_optimal: true,
            outer_iterations: self.outer_iterations,
            inner_iterations: self.inner_iterations,
            restarts: self.restarts,
            final_lambda: self.lambda,
            wall_time: start.elapsed(),
            trace,
        }
    }

    fn check_caps(&self, caps: &Caps) -> Result<()> {
        if self.outer_iterations > caps.outer {
            return Err(Error::LimitExceeded(format!(
                "outer iteration cap {} (lambda = {}, UB = {}, |R| = {}, |D| = {}, restarts = {})",
                caps.outer,
                self.lambda
                    .as_ref()
                    .map(crate::scalar::format_scalar)
                    .unwrap_or_else(|| "unset".into()),
                self.upper,
                self.scenarios.len(),
                self.pool.len(),
                self.restarts
            )));
        }
        if self.restarts > caps.restarts {
            return Err(Error::LimitExceeded(format!(
                "restart cap {} (lambda = {}, UB = {})",
                caps.restarts,
                self.lambda
                    .as_ref()
                    .map(crate::scalar::format_scalar)
                    .unwrap_or_else(|| "unset".into()),
                self.upper
            )));
        }
        Ok(())
    }
}

/// Scenario master: min over the explicit X list of the worst case over
/// the retained realizations, with first-index tie-breaks. The value is
/// +inf iff every first-stage decision is defeated by a retained
/// realization.
pub fn ccg_master(
    inst: &GeneralInstance,
    scenarios: &[Vec<bool>],
) -> Result<(Vec<Scalar>, ExtValue)> {
    if scenarios.is_empty() {
        return Err(Error::Input("scenario master needs a nonempty set".into()));
    }
    let mut best: Option<(ExtValue, Vec<Scalar>)> = None;
    for x in &inst.x_set {
        let mut worst = ExtValue::NegInf;
        for xi in scenarios {
            worst = worst.max(eval_q(inst, x, xi)?);
        }
        let better = match &best {
            None => true,
            Some((bv, _)) => worst < *bv,
        };
        if better {
            best = Some((worst, x.clone()));
        }
    }
    let (v, x) = best.expect("nonempty first-stage set");
    Ok((x, v))
}

fn ccg_master_indicator(
    inst: &IndicatorInstance,
    scenarios: &[Vec<bool>],
) -> Result<(Vec<Scalar>, ExtValue)> {
    if scenarios.is_empty() {
        return Err(Error::Input("scenario master needs a nonempty set".into()));
    }
    let mut best: Option<(ExtValue, Vec<Scalar>)> = None;
    for x in &inst.x_set {
        let mut worst = ExtValue::NegInf;
        for xi in scenarios {
            worst = worst.max(eval_qi(inst, x, xi)?);
        }
        let better = match &best {
            None => true,
            Some((bv, _)) => worst < *bv,
        };
        if better {
            best = Some((worst, x.clone()));
        }
    }
    let (v, x) = best.expect("nonempty first-stage set");
    Ok((x, v))
}

/// Outcome of the Benders master.
#[derive(Clone, Debug)]
pub enum BendersMasterOutcome {
    /// Chosen decision and its epigraph value (-inf with no optimality
    /// cuts).
    Chosen { x: Vec<Scalar>, theta: ExtValue },
    /// Every decision violates some feasibility cut.
    AllCut { witness_xi: Vec<bool> },
}

/// Benders master by enumeration of the X list over the stored cuts.
pub fn benders_master(
    inst: &IndicatorInstance,
    cuts: &[BendersCut],
) -> Result<BendersMasterOutcome> {
    let aug = augment_indicator(inst);
    let mut best: Option<(ExtValue, Vec<Scalar>)> = None;
    let mut first_cut_witness: Option<Vec<bool>> = None;
    for x in &inst.x_set {
        let tx = aug.t.mul_vec(x)?;
        let r: Vec<Scalar> = (0..aug.m).map(|i| &aug.h0[i] - &tx[i]).collect();
        let mut cut_off = None;
        let mut theta = ExtValue::NegInf;
        for cut in cuts {
            match cut {
                BendersCut::Feasibility { xi, psi_ray } => {
                    if dot(&r, psi_ray) > Scalar::zero() {
                        cut_off = Some(xi.clone());
                        break;
                    }
                }
                BendersCut::Optimality { xi, psi } => {
                    let v = dot(&inst.cost_c(xi), x) + dot(&r, psi);
                    theta = theta.max(ExtValue::finite(v));
                }
            }
        }
        if let Some(xi) = cut_off {
            if first_cut_witness.is_none() {
                first_cut_witness = Some(xi);
            }
            continue;
        }
        let better = match &best {
            None => true,
            Some((bv, _)) => theta < *bv,
        };
        if better {
            best = Some((theta, x.clone()));
        }
    }
    Ok(match best {
        Some((theta, x)) => BendersMasterOutcome::Chosen { x, theta },
        None => BendersMasterOutcome::AllCut {
            witness_xi: first_cut_witness.expect("no decision without a violated cut"),
        },
    })
}

fn default_lambda0_general(inst: &GeneralInstance, x: &[Scalar]) -> Scalar {
    match compute_u_l(inst, x) {
        Ok((u, l)) => rat(1).max(u - l),
        Err(_) => rat(1),
    }
}

fn default_lambda0_indicator(inst: &IndicatorInstance, x: &[Scalar]) -> Scalar {
    match compute_u_l_indicator(inst, x) {
        Ok((u, l)) => rat(1).max(u - l),
        Err(_) => rat(1),
    }
}

/// Solves either problem shape with the requested outer method, verifying
/// the final upper bound ex post and restarting with the extracted
/// multiplier when it was violated. The returned value is exact (up to
/// eps) and `verified_optimal` records the ex-post check.
pub fn solve_with_restarts(instance: &Instance, opts: &SolveOptions) -> Result<Report> {
    match (instance, opts.method) {
        (Instance::General(g), Method::Ccg) => ccg_general(g, opts),
        (Instance::General(_), Method::Benders) => Err(Error::Input(
            "Benders is available for indicator instances only; use ccg".into(),
        )),
        (Instance::Indicator(i), Method::Ccg) => ccg_indicator(i, opts),
        (Instance::Indicator(i), Method::Benders) => benders_indicator(i, opts),
    }
}

fn ccg_general(inst: &GeneralInstance, opts: &SolveOptions) -> Result<Report> {
    let start = Instant::now();
    let mut trace: Vec<TraceEvent> = Vec::new();
    let mut state = EngineState::new(opts, Some(inst.xi_set.lex_min().clone()))?;
    loop {
        state.outer_iterations += 1;
        state.check_caps(&opts.caps)?;
        let (x_hat, lower) = ccg_master(inst, &state.scenarios)?;
        if lower == ExtValue::PosInf {
            let witness = state
                .scenarios
                .iter()
                .find(|xi| matches!(eval_q(inst, &x_hat, xi), Ok(ExtValue::PosInf)))
                .cloned();
            return Ok(state.finish(ExtValue::PosInf, None, witness, start, trace));
        }
        let lam0 = match &state.lambda {
            Some(l) => l.clone(),
            None => default_lambda0_general(inst, &x_hat),
        };
        trace.push(state.trace_event(
            TraceKind::Outer,
            lam0.clone(),
            lower.clone(),
            state.upper.clone(),
            state.pool.len(),
        ));
        let outcome = inner_ccg(
            inst,
            &x_hat,
            &lam0,
            &state.eps,
            std::mem::take(&mut state.pool),
            &opts.caps,
            &mut trace,
        )?;
        state.inner_iterations += outcome.iterations();
        match outcome {
            InnerOutcome::InfeasibleScenario { xi, pool, .. } => {
                state.pool = pool;
                state.lambda = Some(lam0);
                if !state.retain_scenario(xi) {
                    return Err(Error::Internal(
                        "master accepted a decision defeated by a retained scenario".into(),
                    ));
                }
            }
            InnerOutcome::Converged {
                xi,
                lambda: lam_hat,
                upper: val,
                pool,
                ..
            } => {
                state.pool = pool;
                state.lambda = Some(lam_hat);
                state.note_candidate(val, &x_hat);
                state.retain_scenario(xi);
                if state.gap_closed(&lower) {
                    let bx = state.best_x.clone().expect("upper bound implies a candidate");
                    let (z, _, cert) = solve_exact_worst_case_restricted(inst, &bx, &state.pool)?;
                    trace.push(state.trace_event(
                        TraceKind::Verify,
                        state.lambda.clone().unwrap(),
                        lower.clone(),
                        z.clone(),
                        state.pool.len(),
                    ));
                    let z = match z {
                        ExtValue::Finite(z) => z,
                        _ => {
                            return Err(Error::Internal(
                                "verification problem unbounded after a converged inner run"
                                    .into(),
                            ))
                        }
                    };
                    if ExtValue::finite(z.clone()) > state.upper {
                        state.restarts += 1;
                        let cert = cert.expect("finite verification carries a certificate");
                        let lam_new = multiplier_from_restricted_certificate(
                            &cert.blocks,
                            &augmented_h(inst),
                        );
                        state.check_caps(&opts.caps)?;
                        trace.push(state.trace_event(
                            TraceKind::Restart,
                            lam_new.clone(),
                            lower.clone(),
                            ExtValue::finite(z.clone()),
                            state.pool.len(),
                        ));
                        state.upper = ExtValue::finite(z);
                        state.lambda = Some(lam_new);
                        continue;
                    }
                    let value = state.upper.clone();
                    let x_star = state.best_x.clone();
                    return Ok(state.finish(value, x_star, None, start, trace));
                }
            }
        }
    }
}

/// First realization defeating `x`, if any.
fn robust_infeasibility_scan(
    inst: &IndicatorInstance,
    x: &[Scalar],
) -> Result<Option<Vec<bool>>> {
    for xi in inst.xi_set.points() {
        if eval_qi(inst, x, xi)? == ExtValue::PosInf {
            return Ok(Some(xi.clone()));
        }
    }
    Ok(None)
}

/// Lagrangian subproblem of an indicator instance at fixed (x, xi,
/// lambda), solved in primal form over the augmented rows so the row duals
/// assemble the cut vector psi = mu - lambda w(xi).
fn indicator_lagrangian_dual(
    inst: &IndicatorInstance,
    x: &[Scalar],
    xi: &[bool],
    lambda: &Scalar,
) -> Result<(Scalar, Vec<Scalar>)> {
    let aug = augment_indicator(inst);
    let n2 = inst.n2();
    let weights = augmented_weights(inst, xi);
    let mut lp = LinearProgram::new(Sense::Min, n2);
    for j in 0..n2 {
        lp.set_bounds(j, Some(Scalar::zero()), None);
    }
    let tx = aug.t.mul_vec(x)?;
    lp.objective = inst.cost_d(xi);
    let wt_w = aug.w.tr_mul_vec(&weights)?;
    for j in 0..n2 {
        lp.objective[j] += lambda * &wt_w[j];
    }
    let mut offset = dot(&inst.cost_c(xi), x);
    for i in 0..aug.m {
        offset += lambda * &weights[i] * (&tx[i] - &aug.h0[i]);
    }
    lp.offset = offset;
    for i in 0..aug.m {
        let terms: Vec<(usize, Scalar)> = (0..n2).map(|j| (j, aug.w.at(i, j).clone())).collect();
        lp.add_row(RowSense::Ge, &terms, &aug.h0[i] - &tx[i]);
    }
    match solve_lp(&lp)? {
        SolveOutcome::Optimal(sol) => {
            let duals = sol.row_duals.expect("LP solves carry duals");
            let psi: Vec<Scalar> = duals
                .iter()
                .zip(&weights)
                .map(|(mu, w)| mu - lambda * w)
                .collect();
            Ok((sol.objective, psi))
        }
        other => Err(Error::Internal(format!(
            "indicator Lagrangian subproblem not optimal: {other:?}"
        ))),
    }
}

/// Worst realization of the indicator Lagrangian at (x, lambda), with the
/// cut vector of the maximizer.
fn indicator_lagrangian_worst(
    inst: &IndicatorInstance,
    x: &[Scalar],
    lambda: &Scalar,
) -> Result<(Scalar, Vec<bool>, Vec<Scalar>)> {
    let mut best: Option<(Scalar, Vec<bool>, Vec<Scalar>)> = None;
    for xi in inst.xi_set.points() {
        let (v, psi) = indicator_lagrangian_dual(inst, x, xi, lambda)?;
        let better = match &best {
            None => true,
            Some((bv, _, _)) => v > *bv,
        };
        if better {
            best = Some((v, xi.clone(), psi));
        }
    }
    Ok(best.expect("nonempty uncertainty set"))
}

enum VerifyStep {
    Accept,
    Restart { lambda: Scalar, upper: Scalar },
}

/// Ex-post verification at the incumbent: solves the exact indicator
/// worst case and either accepts the bound or extracts the corrected
/// multiplier.
fn verify_indicator(
    inst: &IndicatorInstance,
    state: &EngineState,
    lower: &ExtValue,
    caps: &Caps,
    trace: &mut Vec<TraceEvent>,
) -> Result<VerifyStep> {
    let bx = state.best_x.as_ref().expect("upper bound implies a candidate");
    let lam = state.lambda.clone().expect("candidate fixes the multiplier");
    let wc = solve_exact_worst_case_indicator(inst, bx)?;
    trace.push(state.trace_event(
        TraceKind::Verify,
        lam,
        lower.clone(),
        wc.value.clone(),
        state.cuts.len().max(state.scenarios.len()),
    ));
    let z = match &wc.value {
        ExtValue::Finite(z) => z.clone(),
        _ => {
            return Err(Error::Internal(
                "verification problem unbounded at a scanned decision".into(),
            ))
        }
    };
    if ExtValue::finite(z.clone()) > state.upper {
        let cert = wc.certificate.expect("finite verification carries a certificate");
        let lam_new = multiplier_from_indicator_certificate(&cert.rho, &cert.nu);
        if state.restarts + 1 > caps.restarts {
            return Err(Error::LimitExceeded(format!(
                "restart cap {} (lambda = {})",
                caps.restarts,
                crate::scalar::format_scalar(&lam_new)
            )));
        }
        trace.push(state.trace_event(
            TraceKind::Restart,
            lam_new.clone(),
            lower.clone(),
            ExtValue::finite(z.clone()),
            state.cuts.len().max(state.scenarios.len()),
        ));
        return Ok(VerifyStep::Restart {
            lambda: lam_new,
            upper: z,
        });
    }
    Ok(VerifyStep::Accept)
}

fn require_continuous(inst: &IndicatorInstance) -> Result<()> {
    if inst.nd2 != 0 {
        return Err(Error::Input(
            "indicator solve paths need a continuous second stage (nd2 = 0)".into(),
        ));
    }
    Ok(())
}

fn ccg_indicator(inst: &IndicatorInstance, opts: &SolveOptions) -> Result<Report> {
    require_continuous(inst)?;
    let start = Instant::now();
    let mut trace: Vec<TraceEvent> = Vec::new();
    let mut state = EngineState::new(opts, Some(inst.xi_set.lex_min().clone()))?;
    loop {
        state.outer_iterations += 1;
        state.check_caps(&opts.caps)?;
        let (x_hat, lower) = ccg_master_indicator(inst, &state.scenarios)?;
        if lower == ExtValue::PosInf {
            let witness = state
                .scenarios
                .iter()
                .find(|xi| matches!(eval_qi(inst, &x_hat, xi), Ok(ExtValue::PosInf)))
                .cloned();
            return Ok(state.finish(ExtValue::PosInf, None, witness, start, trace));
        }
        if let Some(bad) = robust_infeasibility_scan(inst, &x_hat)? {
            if !state.retain_scenario(bad) {
                return Err(Error::Internal(
                    "master accepted a decision defeated by a retained scenario".into(),
                ));
            }
            continue;
        }
        let lam = match &state.lambda {
            Some(l) => l.clone(),
            None => default_lambda0_indicator(inst, &x_hat),
        };
        state.lambda = Some(lam.clone());
        let (val, xi_w, _) = indicator_lagrangian_worst(inst, &x_hat, &lam)?;
        trace.push(state.trace_event(
            TraceKind::Outer,
            lam,
            lower.clone(),
            ExtValue::finite(val.clone()),
            state.scenarios.len(),
        ));
        state.note_candidate(val, &x_hat);
        state.retain_scenario(xi_w);
        if state.gap_closed(&lower) {
            match verify_indicator(inst, &state, &lower, &opts.caps, &mut trace)? {
                VerifyStep::Accept => {
                    let value = state.upper.clone();
                    let x_star = state.best_x.clone();
                    return Ok(state.finish(value, x_star, None, start, trace));
                }
                VerifyStep::Restart { lambda, upper } => {
                    state.restarts += 1;
                    state.lambda = Some(lambda);
                    state.upper = ExtValue::finite(upper);
                }
            }
        }
    }
}

fn benders_indicator(inst: &IndicatorInstance, opts: &SolveOptions) -> Result<Report> {
    require_continuous(inst)?;
    let start = Instant::now();
    let mut trace: Vec<TraceEvent> = Vec::new();
    let mut state = EngineState::new(opts, None)?;
    loop {
        state.outer_iterations += 1;
        state.check_caps(&opts.caps)?;
        let (x_hat, lower) = match benders_master(inst, &state.cuts)? {
            BendersMasterOutcome::AllCut { witness_xi } => {
                return Ok(state.finish(ExtValue::PosInf, None, Some(witness_xi), start, trace));
            }
            BendersMasterOutcome::Chosen { x, theta } => (x, theta),
        };
        if let Some(bad) = robust_infeasibility_scan(inst, &x_hat)? {
            match indicator_scenario_dual(inst, &x_hat, &bad)? {
                ScenarioDual::Unbounded { psi_ray } => {
                    state.cuts.push(BendersCut::Feasibility { xi: bad, psi_ray });
                }
                ScenarioDual::Finite { .. } => {
                    return Err(Error::Internal(
                        "scan said infeasible but the dual is bounded".into(),
                    ))
                }
            }
            continue;
        }
        let lam = match &state.lambda {
            Some(l) => l.clone(),
            None => default_lambda0_indicator(inst, &x_hat),
        };
        state.lambda = Some(lam.clone());
        let (val, xi_w, psi) = indicator_lagrangian_worst(inst, &x_hat, &lam)?;
        trace.push(state.trace_event(
            TraceKind::Outer,
            lam,
            lower.clone(),
            ExtValue::finite(val.clone()),
            state.cuts.len(),
        ));
        state.note_candidate(val, &x_hat);
        state.cuts.push(BendersCut::Optimality { xi: xi_w, psi });
        if state.gap_closed(&lower) {
            match verify_indicator(inst, &state, &lower, &opts.caps, &mut trace)? {
                VerifyStep::Accept => {
                    let value = state.upper.clone();
                    let x_star = state.best_x.clone();
                    return Ok(state.finish(value, x_star, None, start, trace));
                }
                VerifyStep::Restart { lambda, upper } => {
                    state.restarts += 1;
                    state.upper = ExtValue::finite(upper);
                    // Lift every stored optimality cut to the new
                    // multiplier by re-solving the subproblem at its
                    // stored realization and the incumbent decision.
                    let bx = state.best_x.clone().expect("upper bound implies a candidate");
                    for cut in state.cuts.iter_mut() {
                        if let BendersCut::Optimality { xi, psi } = cut {
                            let (_, new_psi) =
                                indicator_lagrangian_dual(inst, &bx, xi, &lambda)?;
                            *psi = new_psi;
                        }
                    }
                    state.lambda = Some(lambda);
                }
            }
        }
    }
}
