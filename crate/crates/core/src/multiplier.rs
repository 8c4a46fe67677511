//! Sufficient-condition checks and closed-form multiplier bounds.
//!
//! `u(x) - l(x)` is an optimal multiplier only under the integrality and
//! total-unimodularity conditions checked here; `polynomial_lambda_bound`
//! produces the always-valid (but astronomically loose) alternative from
//! norm and factorial data. Affine instances are homogenized first by
//! prepending a constant parameter component; the resulting bound transfers
//! to the original instance because the lifted Lagrangian never exceeds the
//! original one.

use crate::error::{Error, Result};
use crate::linalg::{induced_inf_norm, max_abs_norm, vec_max_abs, Matrix};
use crate::model::{GeneralInstance, IndicatorInstance, XiSet};
use crate::oracle::{solve_two_stage_bruteforce, worst_case_q, worst_case_qi};
use crate::scalar::{factorial, format_scalar, rat, Scalar};
use crate::tu::tu_violation;
use num_traits::Zero;

/// One named condition with an optional human-readable witness on failure.
#[derive(Clone, Debug)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Per-condition results; `overall` is their conjunction.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub conditions: Vec<ConditionCheck>,
    pub overall: bool,
}

impl ConditionReport {
    fn from_checks(conditions: Vec<ConditionCheck>) -> Self {
        let overall = conditions.iter().all(|c| c.passed);
        ConditionReport { conditions, overall }
    }
}

impl std::fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.conditions {
            write!(f, "[{}] {}", if c.passed { "pass" } else { "FAIL" }, c.name)?;
            if let Some(w) = &c.witness {
                write!(f, ": {w}")?;
            }
            writeln!(f)?;
        }
        write!(f, "overall: {}", if self.overall { "pass" } else { "FAIL" })
    }
}

fn check_x_integrality(x_set: &[Vec<Scalar>]) -> ConditionCheck {
    let witness = x_set.iter().enumerate().find_map(|(i, x)| {
        x.iter()
            .find(|v| !v.is_integer())
            .map(|v| format!("X[{i}] has non-integer entry {}", format_scalar(v)))
    });
    ConditionCheck {
        name: "first-stage set is integral",
        passed: witness.is_none(),
        witness,
    }
}

fn check_data_integrality(named: &[(&str, &Matrix)], vecs: &[(&str, &[Scalar])]) -> ConditionCheck {
    let mut witness = None;
    for (name, m) in named {
        if let Some((i, j)) = m.non_integer_entry() {
            witness = Some(format!(
                "{name}[{i}][{j}] = {} is not an integer",
                format_scalar(m.at(i, j))
            ));
            break;
        }
    }
    if witness.is_none() {
        for (name, v) in vecs {
            if let Some((i, val)) = v.iter().enumerate().find(|(_, v)| !v.is_integer()) {
                witness = Some(format!(
                    "{name}[{i}] = {} is not an integer",
                    format_scalar(val)
                ));
                break;
            }
        }
    }
    ConditionCheck {
        name: "constraint data is integral",
        passed: witness.is_none(),
        witness,
    }
}

fn check_tu(name: &'static str, m: &Matrix) -> ConditionCheck {
    let witness = tu_violation(m).map(|v| v.to_string());
    ConditionCheck {
        name,
        passed: witness.is_none(),
        witness,
    }
}

/// Conditions under which `u(x) - l(x)` is an optimal multiplier for the
/// general problem: integral X, integral (T, W, h0, H), and total
/// unimodularity of `[W_c  -H]`.
pub fn check_conditions_general(inst: &GeneralInstance) -> ConditionReport {
    let concat = inst
        .wc
        .hstack(&inst.h_xi.neg())
        .expect("validated dimensions");
    ConditionReport::from_checks(vec![
        check_x_integrality(&inst.x_set),
        check_data_integrality(
            &[("T", &inst.t), ("Wc", &inst.wc), ("Wd", &inst.wd), ("H", &inst.h_xi)],
            &[("h0", &inst.h0)],
        ),
        check_tu("[Wc -H] is totally unimodular", &concat),
    ])
}

/// Indicator analog: the third condition applies to `W_c` alone (vacuous
/// when there is no continuous part).
pub fn check_conditions_indicator(inst: &IndicatorInstance) -> ConditionReport {
    ConditionReport::from_checks(vec![
        check_x_integrality(&inst.x_set),
        check_data_integrality(
            &[("T", &inst.t), ("Wc", &inst.wc), ("Wd", &inst.wd)],
            &[("h0", &inst.h0)],
        ),
        check_tu("Wc is totally unimodular", &inst.wc),
    ])
}

/// `u` = exact worst case at x (via the oracle); `l` = exact minimum of the
/// objective over Xi and the second-stage box with all rows dropped.
pub fn compute_u_l(inst: &GeneralInstance, x: &[Scalar]) -> Result<(Scalar, Scalar)> {
    let (u, _) = worst_case_q(inst, x)?;
    let u = u.as_finite().cloned().ok_or_else(|| {
        Error::InfeasibleDecision("worst-case value is +inf at this x".into())
    })?;
    let mut y_lower = vec![Scalar::zero(); inst.nc2];
    y_lower.extend(inst.y_bounds.yd_lower.iter().cloned());
    let mut y_upper = inst.y_bounds.yc_upper.clone();
    y_upper.extend(inst.y_bounds.yd_upper.iter().cloned());
    let l = inst
        .xi_set
        .points()
        .iter()
        .map(|xi| {
            let mut v = crate::linalg::dot(&inst.cost_c(xi), x);
            for (j, dj) in inst.cost_d(xi).iter().enumerate() {
                v += if *dj >= Scalar::zero() {
                    dj * &y_lower[j]
                } else {
                    dj * &y_upper[j]
                };
            }
            v
        })
        .min()
        .expect("nonempty uncertainty set");
    Ok((u, l))
}

/// Indicator analog of `compute_u_l`.
pub fn compute_u_l_indicator(inst: &IndicatorInstance, x: &[Scalar]) -> Result<(Scalar, Scalar)> {
    let (u, _) = worst_case_qi(inst, x)?;
    let u = u.as_finite().cloned().ok_or_else(|| {
        Error::InfeasibleDecision("worst-case value is +inf at this x".into())
    })?;
    let mut y_lower = vec![Scalar::zero(); inst.nc2];
    y_lower.extend(inst.y_bounds.yd_lower.iter().cloned());
    let mut y_upper = inst.y_bounds.yc_upper.clone();
    y_upper.extend(inst.y_bounds.yd_upper.iter().cloned());
    let l = inst
        .xi_set
        .points()
        .iter()
        .map(|xi| {
            let mut v = crate::linalg::dot(&inst.cost_c(xi), x);
            for (j, dj) in inst.cost_d(xi).iter().enumerate() {
                v += if *dj >= Scalar::zero() {
                    dj * &y_lower[j]
                } else {
                    dj * &y_upper[j]
                };
            }
            v
        })
        .min()
        .expect("nonempty uncertainty set");
    Ok((u, l))
}

/// The closed-form candidate multiplier `u - l`.
pub fn closed_form_multiplier(u: &Scalar, l: &Scalar) -> Result<Scalar> {
    if u < l {
        return Err(Error::Input(format!(
            "upper bound {} below lower bound {}",
            format_scalar(u),
            format_scalar(l)
        )));
    }
    Ok(u - l)
}

/// Source of the finite upper bound U on the two-stage optimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpperBoundMode {
    /// Exact brute-force optimum (desk-scale stand-in for a polynomial-time
    /// bound).
    BruteForce,
    /// Looser interval-arithmetic bound from the objective over the boxes.
    IntervalBox,
}

/// Inputs and result of the norm/factorial multiplier bound.
#[derive(Clone, Debug)]
pub struct BoundInputs {
    pub upper_value: Scalar,
    pub u_source: UpperBoundMode,
    /// Whether the constant-component lift was applied to homogenize.
    pub lifted: bool,
    /// Parameter count entering the formulas (np + 1 when lifted).
    pub np_effective: usize,
    pub theta1: Scalar,
    pub theta2: Scalar,
    pub theta3: Scalar,
    pub case1_bound: Scalar,
    pub case2_bound: Scalar,
    pub lambda_bar: Scalar,
}

impl std::fmt::Display for BoundInputs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "U        = {} ({:?})", format_scalar(&self.upper_value), self.u_source)?;
        writeln!(f, "lifted   = {} (np_eff = {})", self.lifted, self.np_effective)?;
        writeln!(f, "theta1   = {}", format_scalar(&self.theta1))?;
        writeln!(f, "theta2   = {}", format_scalar(&self.theta2))?;
        writeln!(f, "theta3   = {}", format_scalar(&self.theta3))?;
        writeln!(f, "case1    = {}", format_scalar(&self.case1_bound))?;
        writeln!(f, "case2    = {}", format_scalar(&self.case2_bound))?;
        write!(f, "lambda   = {}", format_scalar(&self.lambda_bar))
    }
}

/// Homogenizes an affine instance by prepending a constant parameter
/// component fixed to 1 in every uncertainty point; the constant parts of
/// c, d, h move into the first columns of C, D, H. Value-preserving:
/// Q and the two-stage optimum are unchanged.
pub fn homogenize(inst: &GeneralInstance) -> GeneralInstance {
    if inst.is_homogeneous() {
        return inst.clone();
    }
    let prepend = |constant: &[Scalar], coef: &Matrix| -> Matrix {
        let mut col = Matrix::zeros(constant.len(), 1);
        for (i, v) in constant.iter().enumerate() {
            col.set(i, 0, v.clone());
        }
        col.hstack(coef).expect("validated dimensions")
    };
    let points: Vec<Vec<bool>> = inst
        .xi_set
        .points()
        .iter()
        .map(|p| {
            let mut q = Vec::with_capacity(p.len() + 1);
            q.push(true);
            q.extend_from_slice(p);
            q
        })
        .collect();
    let lifted = GeneralInstance {
        np: inst.np + 1,
        c0: vec![Scalar::zero(); inst.n1],
        c_xi: prepend(&inst.c0, &inst.c_xi),
        d0: vec![Scalar::zero(); inst.n2()],
        dc_xi: prepend(&inst.d0[..inst.nc2], &inst.dc_xi),
        dd_xi: prepend(&inst.d0[inst.nc2..], &inst.dd_xi),
        h0: vec![Scalar::zero(); inst.m],
        h_xi: prepend(&inst.h0, &inst.h_xi),
        xi_set: XiSet::from_points(points).expect("nonempty"),
        ..inst.clone()
    };
    lifted.validate().expect("lift preserves validity");
    lifted
}

fn pow(base: &Scalar, exp: usize) -> Scalar {
    let mut acc = rat(1);
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

fn max_of(vals: &[Scalar]) -> Scalar {
    vals.iter().cloned().max().expect("nonempty")
}

/// Interval-arithmetic upper bound on the two-stage optimum: the maximum
/// of the objective over the X list, xi in [0,1]^np, and the second-stage
/// box. Valid whenever some first-stage decision is robust-feasible.
pub fn interval_upper_bound(inst: &GeneralInstance) -> Scalar {
    let mut y_lower = vec![Scalar::zero(); inst.nc2];
    y_lower.extend(inst.y_bounds.yd_lower.iter().cloned());
    let mut y_upper = inst.y_bounds.yc_upper.clone();
    y_upper.extend(inst.y_bounds.yd_upper.iter().cloned());
    // Coefficient ranges over xi in [0,1]^np.
    let coef_range = |base: &Scalar, row: &[Scalar]| {
        let mut lo = base.clone();
        let mut hi = base.clone();
        for v in row {
            if *v >= Scalar::zero() {
                hi += v;
            } else {
                lo += v;
            }
        }
        (lo, hi)
    };
    let mut best: Option<Scalar> = None;
    for x in &inst.x_set {
        let mut total = Scalar::zero();
        for (i, xv) in x.iter().enumerate() {
            let (lo, hi) = coef_range(&inst.c0[i], inst.c_xi.row(i));
            total += max_of(&[&lo * xv, &hi * xv]);
        }
        let d_rows: Vec<&[Scalar]> = (0..inst.nc2)
            .map(|i| inst.dc_xi.row(i))
            .chain((0..inst.nd2).map(|i| inst.dd_xi.row(i)))
            .collect();
        for (j, row) in d_rows.iter().enumerate() {
            let (lo, hi) = coef_range(&inst.d0[j], row);
            total += max_of(&[
                &lo * &y_lower[j],
                &lo * &y_upper[j],
                &hi * &y_lower[j],
                &hi * &y_upper[j],
            ]);
        }
        best = Some(match best {
            None => total,
            Some(b) => b.max(total),
        });
    }
    best.expect("nonempty first-stage set")
}

/// The polynomial-time multiplier bound: checks the five structural
/// conditions (homogenizing affine data first), computes U, the theta
/// terms, both closed-form cases, and returns their maximum.
pub fn polynomial_lambda_bound(
    inst: &GeneralInstance,
    u_mode: UpperBoundMode,
) -> Result<BoundInputs> {
    let lifted = !inst.is_homogeneous();
    let work = homogenize(inst);
    let mut violations: Vec<String> = Vec::new();
    let x_check = check_x_integrality(&inst.x_set);
    if !x_check.passed {
        violations.push(x_check.witness.unwrap());
    }
    for (name, m) in [
        ("C", &work.c_xi),
        ("Dc", &work.dc_xi),
        ("Dd", &work.dd_xi),
        ("T", &work.t),
        ("Wc", &work.wc),
        ("Wd", &work.wd),
        ("H", &work.h_xi),
    ] {
        if let Some((i, j)) = m.non_integer_entry() {
            violations.push(format!(
                "{name}[{i}][{j}] = {} is not an integer",
                format_scalar(m.at(i, j))
            ));
        }
    }
    // Decision boxes: derived from the explicit X list and the Y box when
    // no explicit bounds record is present.
    let (x_lower, x_upper, yd_lower, yd_upper) = match &inst.var_bounds {
        Some(vb) => (
            vb.x_lower.clone(),
            vb.x_upper.clone(),
            vb.y_lower[inst.nc2..].to_vec(),
            vb.y_upper[inst.nc2..].to_vec(),
        ),
        None => (
            (0..inst.n1)
                .map(|j| inst.x_set.iter().map(|x| x[j].clone()).min().unwrap())
                .collect(),
            (0..inst.n1)
                .map(|j| inst.x_set.iter().map(|x| x[j].clone()).max().unwrap())
                .collect(),
            inst.y_bounds.yd_lower.clone(),
            inst.y_bounds.yd_upper.clone(),
        ),
    };
    for x in &inst.x_set {
        for (j, v) in x.iter().enumerate() {
            if v < &x_lower[j] || v > &x_upper[j] {
                violations.push(format!("X point leaves the box at coordinate {j}"));
            }
        }
    }
    let mut feasible = false;
    for x in &inst.x_set {
        if worst_case_q(inst, x)?.0.is_finite() {
            feasible = true;
            break;
        }
    }
    if !feasible {
        violations.push("no first-stage decision has a finite worst case".into());
    }
    if !violations.is_empty() {
        return Err(Error::ConditionViolation(violations.join("; ")));
    }
    let upper_value = match u_mode {
        UpperBoundMode::BruteForce => solve_two_stage_bruteforce(inst)?
            .0
            .expect_finite("two-stage optimum")?,
        UpperBoundMode::IntervalBox => interval_upper_bound(inst),
    };
    let dim = work.nc2 + work.np;
    let norm_wc = max_abs_norm(&work.wc);
    let norm_h = max_abs_norm(&work.h_xi);
    let theta1 = max_of(&[
        vec_max_abs(&x_lower),
        vec_max_abs(&x_upper),
        vec_max_abs(&yd_lower),
        vec_max_abs(&yd_upper),
        rat(1),
    ]);
    let theta2 = max_of(&[
        &upper_value + induced_inf_norm(&work.c_xi) + induced_inf_norm(&work.dd_xi),
        induced_inf_norm(&work.dc_xi),
    ]);
    let theta3 = max_of(&[
        induced_inf_norm(&work.wd) + induced_inf_norm(&work.t),
        norm_wc.clone(),
        norm_h.clone(),
        rat(1),
    ]);
    let case1_bound = Scalar::from_integer(factorial(dim))
        * induced_inf_norm(&work.dc_xi)
        * pow(&max_of(&[norm_wc, norm_h, rat(1)]), dim.saturating_sub(1));
    let case2_bound = Scalar::from_integer(factorial(dim + 2))
        * pow(&theta1, dim + 2)
        * &theta2
        * pow(&theta3, dim + 1);
    let lambda_bar = max_of(&[case1_bound.clone(), case2_bound.clone(), Scalar::zero()]);
    Ok(BoundInputs {
        upper_value,
        u_source: u_mode,
        lifted,
        np_effective: work.np,
        theta1,
        theta2,
        theta3,
        case1_bound,
        case2_bound,
        lambda_bar,
    })
}
