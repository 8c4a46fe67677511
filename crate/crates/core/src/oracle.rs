//! Brute-force ground truth by enumeration of X, Xi, and the discrete box.
//!
//! Worst cases are exact maxima over the enumerated uncertainty set with
//! first-index tie-breaks; the optimal-multiplier search bisects the
//! nondecreasing map `lambda -> worst_case_l` and certifies its right end
//! by exact equality. Every other module is validated against these.

use crate::error::{Error, Result};
use crate::model::{
    eval_l, eval_li, eval_q, eval_qi, GeneralInstance, IndicatorInstance, Instance,
    ENUMERATION_CAP,
};
use crate::scalar::{frac, rat, ExtValue, Scalar};
use num_traits::Zero;

/// Default target used when certifying `Q = +inf` cases: the Lagrangian
/// must exceed this at the supplied multiplier bound.
pub fn default_infeasibility_target() -> Scalar {
    rat(1_000_000)
}

fn enumeration_guard(x_count: usize, xi_count: usize, yd_count: usize) -> Result<()> {
    let total = x_count
        .checked_mul(xi_count)
        .and_then(|t| t.checked_mul(yd_count))
        .unwrap_or(usize::MAX);
    if total > ENUMERATION_CAP {
        return Err(Error::LimitExceeded(format!(
            "oracle refuses {total} (x, xi, y_d) combinations (cap {ENUMERATION_CAP})"
        )));
    }
    Ok(())
}

fn guard_general(inst: &GeneralInstance) -> Result<()> {
    enumeration_guard(
        inst.x_set.len(),
        inst.xi_set.len(),
        inst.yd_points()?.len(),
    )
}

fn guard_indicator(inst: &IndicatorInstance) -> Result<()> {
    enumeration_guard(
        inst.x_set.len(),
        inst.xi_set.len(),
        inst.yd_points()?.len(),
    )
}

fn arg_max<F>(points: &[Vec<bool>], mut f: F) -> Result<(ExtValue, Vec<bool>)>
where
    F: FnMut(&[bool]) -> Result<ExtValue>,
{
    let mut best: Option<(ExtValue, Vec<bool>)> = None;
    for xi in points {
        let v = f(xi)?;
        let better = match &best {
            None => true,
            Some((bv, _)) => v > *bv,
        };
        if better {
            best = Some((v, xi.clone()));
        }
    }
    best.ok_or_else(|| Error::Internal("empty uncertainty set".into()))
}

/// sup over Xi of Q(x, xi), with the first maximizer in enumeration order.
pub fn worst_case_q(inst: &GeneralInstance, x: &[Scalar]) -> Result<(ExtValue, Vec<bool>)> {
    guard_general(inst)?;
    arg_max(inst.xi_set.points(), |xi| eval_q(inst, x, xi))
}

/// sup over Xi of L(x, xi, lambda).
pub fn worst_case_l(
    inst: &GeneralInstance,
    x: &[Scalar],
    lambda: &Scalar,
) -> Result<(ExtValue, Vec<bool>)> {
    guard_general(inst)?;
    arg_max(inst.xi_set.points(), |xi| eval_l(inst, x, xi, lambda))
}

/// sup over Xi of Q_I(x, xi).
pub fn worst_case_qi(inst: &IndicatorInstance, x: &[Scalar]) -> Result<(ExtValue, Vec<bool>)> {
    guard_indicator(inst)?;
    arg_max(inst.xi_set.points(), |xi| eval_qi(inst, x, xi))
}

/// sup over Xi of L_I(x, xi, lambda).
pub fn worst_case_li(
    inst: &IndicatorInstance,
    x: &[Scalar],
    lambda: &Scalar,
) -> Result<(ExtValue, Vec<bool>)> {
    guard_indicator(inst)?;
    arg_max(inst.xi_set.points(), |xi| eval_li(inst, x, xi, lambda))
}

/// Bisects for the smallest multiplier closing the duality gap at `x`.
/// Returns an interval `(lo, hi)` of width at most `2^-20 * lambda_hi`
/// whose right end satisfies `worst_case_l(x, hi) = worst_case_q(x)`
/// exactly. Errors if the target is infinite or `lambda_hi` is too small.
pub fn min_optimal_multiplier(
    inst: &GeneralInstance,
    x: &[Scalar],
    lambda_hi: &Scalar,
) -> Result<(Scalar, Scalar)> {
    if *lambda_hi < Scalar::zero() {
        return Err(Error::Domain("lambda_hi must be nonnegative".into()));
    }
    let (target, _) = worst_case_q(inst, x)?;
    let target = target.as_finite().cloned().ok_or_else(|| {
        Error::InfeasibleDecision("worst-case value is not finite at this x".into())
    })?;
    let value_at = |lam: &Scalar| -> Result<ExtValue> { Ok(worst_case_l(inst, x, lam)?.0) };
    if value_at(&Scalar::zero())? == ExtValue::finite(target.clone()) {
        return Ok((Scalar::zero(), Scalar::zero()));
    }
    if value_at(lambda_hi)? != ExtValue::finite(target.clone()) {
        return Err(Error::BoundTooSmall(format!(
            "worst_case_l at lambda_hi = {} stays below the worst case",
            crate::scalar::format_scalar(lambda_hi)
        )));
    }
    let width_cap = frac(1, 1 << 20) * lambda_hi;
    let mut lo = Scalar::zero();
    let mut hi = lambda_hi.clone();
    while &hi - &lo > width_cap {
        let mid = (&lo + &hi) * frac(1, 2);
        if value_at(&mid)? == ExtValue::finite(target.clone()) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    debug_assert_eq!(value_at(&hi)?, ExtValue::finite(target));
    Ok((lo, hi))
}

/// True iff the Lagrangian at `lambda_hi` certifies the per-scenario
/// duality relation at (x, xi): equality when Q is finite, or exceeding
/// `target` (default 10^6) when Q = +inf.
pub fn check_strong_duality(
    inst: &GeneralInstance,
    x: &[Scalar],
    xi: &[bool],
    lambda_hi: &Scalar,
    target: Option<&Scalar>,
) -> Result<bool> {
    let q = eval_q(inst, x, xi)?;
    let l = eval_l(inst, x, xi, lambda_hi)?;
    Ok(match q {
        ExtValue::Finite(_) => l == q,
        ExtValue::PosInf => match l {
            ExtValue::PosInf => true,
            ExtValue::Finite(v) => {
                let threshold = target.cloned().unwrap_or_else(default_infeasibility_target);
                v > threshold
            }
            ExtValue::NegInf => false,
        },
        ExtValue::NegInf => false,
    })
}

/// min over X of the worst case, first minimizer in enumeration order.
pub fn solve_two_stage_bruteforce(inst: &GeneralInstance) -> Result<(ExtValue, Vec<Scalar>)> {
    guard_general(inst)?;
    let mut best: Option<(ExtValue, Vec<Scalar>)> = None;
    for x in &inst.x_set {
        let (v, _) = worst_case_q(inst, x)?;
        let better = match &best {
            None => true,
            Some((bv, _)) => v < *bv,
        };
        if better {
            best = Some((v, x.clone()));
        }
    }
    best.ok_or_else(|| Error::Internal("empty first-stage set".into()))
}

pub fn solve_two_stage_bruteforce_indicator(
    inst: &IndicatorInstance,
) -> Result<(ExtValue, Vec<Scalar>)> {
    guard_indicator(inst)?;
    let mut best: Option<(ExtValue, Vec<Scalar>)> = None;
    for x in &inst.x_set {
        let (v, _) = worst_case_qi(inst, x)?;
        let better = match &best {
            None => true,
            Some((bv, _)) => v < *bv,
        };
        if better {
            best = Some((v, x.clone()));
        }
    }
    best.ok_or_else(|| Error::Internal("empty first-stage set".into()))
}

/// Brute force over either instance shape.
pub fn solve_two_stage_bruteforce_any(inst: &Instance) -> Result<(ExtValue, Vec<Scalar>)> {
    match inst {
        Instance::General(g) => solve_two_stage_bruteforce(g),
        Instance::Indicator(i) => solve_two_stage_bruteforce_indicator(i),
    }
}
