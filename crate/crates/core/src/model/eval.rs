//! Penalty functions and second-stage / Lagrangian evaluators.
//!
//! Q(x, xi) is the second-stage MILP value; L(x, xi, lambda) relaxes the
//! dependence on xi into the objective through the copy variable z and the
//! penalty `phi(z, xi) = e'z + e'xi - 2 z'xi`. Restricted variants fix the
//! discrete second-stage decisions. Infeasible minimization evaluates to
//! +inf, unbounded to -inf.

use super::{GeneralInstance, IndicatorInstance};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::lp::{solve_lp, LinearProgram, RowSense, Sense, SolveOutcome};
use crate::milp::solve_milp;
use crate::scalar::{rat, ExtValue, Scalar};
use num_traits::Zero;

/// phi(z, xi) = sum_j (xi_j = 0 ? z_j : 1 - z_j). Nonnegative on
/// [0,1]^np x {0,1}^np, zero exactly when z = xi.
pub fn penalty_phi(z: &[Scalar], xi: &[bool]) -> Result<Scalar> {
    if z.len() != xi.len() {
        return Err(Error::Dimension(format!(
            "penalty_phi: z has length {}, xi has length {}",
            z.len(),
            xi.len()
        )));
    }
    debug_assert!(z.iter().all(|v| *v >= Scalar::zero() && *v <= rat(1)));
    let mut acc = Scalar::zero();
    for (zj, &on) in z.iter().zip(xi) {
        if on {
            acc += rat(1) - zj;
        } else {
            acc += zj;
        }
    }
    Ok(acc)
}

/// Indicator penalty: sum_j sum_{i in I1_j} xi_j g_i(x,y)
/// + sum_j sum_{i in I0_j} (1 - xi_j) g_i(x,y).
pub fn penalty_phi_indicator(
    inst: &IndicatorInstance,
    x: &[Scalar],
    y: &[Scalar],
    xi: &[bool],
) -> Result<Scalar> {
    check_len("x", x.len(), inst.n1)?;
    check_len("y", y.len(), inst.n2())?;
    check_len("xi", xi.len(), inst.np)?;
    let g = g_value(inst, x, y)?;
    let w = inst.row_weights(xi);
    Ok(dot(&w, &g))
}

/// g(x, y) = T x + W y - h0.
pub fn g_value(inst: &IndicatorInstance, x: &[Scalar], y: &[Scalar]) -> Result<Vec<Scalar>> {
    let tx = inst.t.mul_vec(x)?;
    let wy = inst.w_full().mul_vec(y)?;
    Ok((0..inst.m)
        .map(|i| &tx[i] + &wy[i] - &inst.h0[i])
        .collect())
}

fn check_len(name: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Dimension(format!(
            "{name}: expected length {want}, got {got}"
        )));
    }
    Ok(())
}

fn check_lambda(lambda: &Scalar) -> Result<()> {
    if *lambda < Scalar::zero() {
        return Err(Error::Domain(format!(
            "multiplier must be nonnegative, got {}",
            crate::scalar::format_scalar(lambda)
        )));
    }
    Ok(())
}

fn check_yd(inst_lower: &[Scalar], inst_upper: &[Scalar], yd: &[Scalar]) -> Result<()> {
    check_len("y_d", yd.len(), inst_lower.len())?;
    for (j, v) in yd.iter().enumerate() {
        if !v.is_integer() || v < &inst_lower[j] || v > &inst_upper[j] {
            return Err(Error::Input(format!(
                "y_d[{j}] = {} outside the integer box",
                crate::scalar::format_scalar(v)
            )));
        }
    }
    Ok(())
}

fn min_outcome_value(out: SolveOutcome) -> ExtValue {
    match out {
        SolveOutcome::Optimal(sol) => ExtValue::Finite(sol.objective),
        SolveOutcome::Infeasible => ExtValue::PosInf,
        SolveOutcome::Unbounded { .. } => ExtValue::NegInf,
    }
}

/// Variable layout for second-stage programs: `[y_c | y_d]`, then `z`
/// and slack blocks where present.
fn add_y_vars(lp: &mut LinearProgram, inst_yc_upper: &[Scalar], yd_lo: &[Scalar], yd_hi: &[Scalar]) {
    for (j, u) in inst_yc_upper.iter().enumerate() {
        lp.set_bounds(j, Some(Scalar::zero()), Some(u.clone()));
    }
    let nc2 = inst_yc_upper.len();
    for j in 0..yd_lo.len() {
        lp.set_bounds(nc2 + j, Some(yd_lo[j].clone()), Some(yd_hi[j].clone()));
        lp.mark_integer(nc2 + j);
    }
}

/// Second-stage MILP for Q(x, xi): vars [y_c | y_d].
pub(crate) fn second_stage_milp(
    inst: &GeneralInstance,
    x: &[Scalar],
    xi: &[bool],
) -> Result<LinearProgram> {
    check_len("x", x.len(), inst.n1)?;
    check_len("xi", xi.len(), inst.np)?;
    let n2 = inst.n2();
    let mut lp = LinearProgram::new(Sense::Min, n2);
    add_y_vars(&mut lp, &inst.y_bounds.yc_upper, &inst.y_bounds.yd_lower, &inst.y_bounds.yd_upper);
    lp.objective = inst.cost_d(xi);
    lp.offset = dot(&inst.cost_c(xi), x);
    let tx = inst.t.mul_vec(x)?;
    let h = inst.rhs_h(xi);
    for i in 0..inst.m {
        let mut terms: Vec<(usize, Scalar)> = Vec::new();
        for j in 0..inst.nc2 {
            terms.push((j, inst.wc.at(i, j).clone()));
        }
        for j in 0..inst.nd2 {
            terms.push((inst.nc2 + j, inst.wd.at(i, j).clone()));
        }
        lp.add_row(RowSense::Ge, &terms, &h[i] - &tx[i]);
    }
    Ok(lp)
}

/// Q(x, xi): optimal second-stage value including first-stage costs.
pub fn eval_q(inst: &GeneralInstance, x: &[Scalar], xi: &[bool]) -> Result<ExtValue> {
    Ok(min_outcome_value(solve_milp(&second_stage_milp(inst, x, xi)?)?))
}

/// Q(x, xi; y_d): LP over y_c with the discrete decisions fixed.
pub fn eval_q_restricted(
    inst: &GeneralInstance,
    x: &[Scalar],
    xi: &[bool],
    yd: &[Scalar],
) -> Result<ExtValue> {
    check_len("x", x.len(), inst.n1)?;
    check_len("xi", xi.len(), inst.np)?;
    check_yd(&inst.y_bounds.yd_lower, &inst.y_bounds.yd_upper, yd)?;
    let mut lp = LinearProgram::new(Sense::Min, inst.nc2);
    for (j, u) in inst.y_bounds.yc_upper.iter().enumerate() {
        lp.set_bounds(j, Some(Scalar::zero()), Some(u.clone()));
    }
    lp.objective = inst.cost_dc(xi);
    lp.offset = dot(&inst.cost_c(xi), x) + dot(&inst.cost_dd(xi), yd);
    let tx = inst.t.mul_vec(x)?;
    let wdyd = inst.wd.mul_vec(yd)?;
    let h = inst.rhs_h(xi);
    for i in 0..inst.m {
        let terms: Vec<(usize, Scalar)> =
            (0..inst.nc2).map(|j| (j, inst.wc.at(i, j).clone())).collect();
        lp.add_row(RowSense::Ge, &terms, &h[i] - &tx[i] - &wdyd[i]);
    }
    Ok(min_outcome_value(solve_lp(&lp)?))
}

/// Lagrangian MILP for L(x, xi, lambda): vars [y_c | y_d | z].
pub(crate) fn lagrangian_milp(
    inst: &GeneralInstance,
    x: &[Scalar],
    xi: &[bool],
    lambda: &Scalar,
) -> Result<LinearProgram> {
    check_len("x", x.len(), inst.n1)?;
    check_len("xi", xi.len(), inst.np)?;
    check_lambda(lambda)?;
    let n2 = inst.n2();
    let mut lp = LinearProgram::new(Sense::Min, n2 + inst.np);
    add_y_vars(&mut lp, &inst.y_bounds.yc_upper, &inst.y_bounds.yd_lower, &inst.y_bounds.yd_upper);
    for j in 0..inst.np {
        lp.set_bounds(n2 + j, Some(Scalar::zero()), Some(rat(1)));
    }
    let d = inst.cost_d(xi);
    let mut ones = Scalar::zero();
    for (j, &on) in xi.iter().enumerate() {
        let sign = if on {
            ones += rat(1);
            rat(-1)
        } else {
            rat(1)
        };
        lp.objective[n2 + j] = lambda * sign;
    }
    lp.objective[..n2].clone_from_slice(&d);
    lp.offset = dot(&inst.cost_c(xi), x) + lambda * ones;
    let tx = inst.t.mul_vec(x)?;
    for i in 0..inst.m {
        let mut terms: Vec<(usize, Scalar)> = Vec::new();
        for j in 0..inst.nc2 {
            terms.push((j, inst.wc.at(i, j).clone()));
        }
        for j in 0..inst.nd2 {
            terms.push((inst.nc2 + j, inst.wd.at(i, j).clone()));
        }
        for j in 0..inst.np {
            terms.push((n2 + j, -inst.h_xi.at(i, j).clone()));
        }
        lp.add_row(RowSense::Ge, &terms, &inst.h0[i] - &tx[i]);
    }
    Ok(lp)
}

/// L(x, xi, lambda): Lagrangian MILP value over (y, z).
pub fn eval_l(
    inst: &GeneralInstance,
    x: &[Scalar],
    xi: &[bool],
    lambda: &Scalar,
) -> Result<ExtValue> {
    Ok(min_outcome_value(solve_milp(&lagrangian_milp(inst, x, xi, lambda)?)?))
}

/// L(x, xi, lambda; y_d): LP over (y_c, z) with discrete decisions fixed.
pub fn eval_l_restricted(
    inst: &GeneralInstance,
    x: &[Scalar],
    xi: &[bool],
    lambda: &Scalar,
    yd: &[Scalar],
) -> Result<ExtValue> {
    Ok(min_outcome_value(solve_lp(&lagrangian_restricted_lp(
        inst, x, xi, lambda, yd,
    )?)?))
}

/// LP behind `eval_l_restricted`: vars [y_c | z].
pub(crate) fn lagrangian_restricted_lp(
    inst: &GeneralInstance,
    x: &[Scalar],
    xi: &[bool],
    lambda: &Scalar,
    yd: &[Scalar],
) -> Result<LinearProgram> {
    check_len("x", x.len(), inst.n1)?;
    check_len("xi", xi.len(), inst.np)?;
    check_lambda(lambda)?;
    check_yd(&inst.y_bounds.yd_lower, &inst.y_bounds.yd_upper, yd)?;
    let mut lp = LinearProgram::new(Sense::Min, inst.nc2 + inst.np);
    for (j, u) in inst.y_bounds.yc_upper.iter().enumerate() {
        lp.set_bounds(j, Some(Scalar::zero()), Some(u.clone()));
    }
    for j in 0..inst.np {
        lp.set_bounds(inst.nc2 + j, Some(Scalar::zero()), Some(rat(1)));
    }
    lp.objective[..inst.nc2].clone_from_slice(&inst.cost_dc(xi));
    let mut ones = Scalar::zero();
    for (j, &on) in xi.iter().enumerate() {
        let sign = if on {
            ones += rat(1);
            rat(-1)
        } else {
            rat(1)
        };
        lp.objective[inst.nc2 + j] = lambda * sign;
    }
    lp.offset = dot(&inst.cost_c(xi), x) + dot(&inst.cost_dd(xi), yd) + lambda * ones;
    let tx = inst.t.mul_vec(x)?;
    let wdyd = inst.wd.mul_vec(yd)?;
    for i in 0..inst.m {
        let mut terms: Vec<(usize, Scalar)> = Vec::new();
        for j in 0..inst.nc2 {
            terms.push((j, inst.wc.at(i, j).clone()));
        }
        for j in 0..inst.np {
            terms.push((inst.nc2 + j, -inst.h_xi.at(i, j).clone()));
        }
        lp.add_row(RowSense::Ge, &terms, &inst.h0[i] - &tx[i] - &wdyd[i]);
    }
    Ok(lp)
}

/// Constraint-violation MILP: min e'sigma + phi(z, xi) over
/// (y, z, sigma), rows T x + W y + sigma >= h(z). Zero exactly when
/// Q(x, xi) is feasible. Vars [y_c | y_d | z | sigma].
pub(crate) fn slack_milp(
    inst: &GeneralInstance,
    x: &[Scalar],
    xi: &[bool],
) -> Result<LinearProgram> {
    check_len("x", x.len(), inst.n1)?;
    check_len("xi", xi.len(), inst.np)?;
    let n2 = inst.n2();
    let mut lp = LinearProgram::new(Sense::Min, n2 + inst.np + inst.m);
    add_y_vars(&mut lp, &inst.y_bounds.yc_upper, &inst.y_bounds.yd_lower, &inst.y_bounds.yd_upper);
    let mut ones = Scalar::zero();
    for (j, &on) in xi.iter().enumerate() {
        lp.set_bounds(n2 + j, Some(Scalar::zero()), Some(rat(1)));
        let sign = if on {
            ones += rat(1);
            rat(-1)
        } else {
            rat(1)
        };
        lp.objective[n2 + j] = sign;
    }
    for i in 0..inst.m {
        lp.set_bounds(n2 + inst.np + i, Some(Scalar::zero()), None);
        lp.objective[n2 + inst.np + i] = rat(1);
    }
    lp.offset = ones;
    let tx = inst.t.mul_vec(x)?;
    for i in 0..inst.m {
        let mut terms: Vec<(usize, Scalar)> = Vec::new();
        for j in 0..inst.nc2 {
            terms.push((j, inst.wc.at(i, j).clone()));
        }
        for j in 0..inst.nd2 {
            terms.push((inst.nc2 + j, inst.wd.at(i, j).clone()));
        }
        for j in 0..inst.np {
            terms.push((n2 + j, -inst.h_xi.at(i, j).clone()));
        }
        terms.push((n2 + inst.np + i, rat(1)));
        lp.add_row(RowSense::Ge, &terms, &inst.h0[i] - &tx[i]);
    }
    Ok(lp)
}

/// Q_I(x, xi): second stage with indicator rows resolved to equalities.
pub(crate) fn indicator_second_stage_milp(
    inst: &IndicatorInstance,
    x: &[Scalar],
    xi: &[bool],
) -> Result<LinearProgram> {
    check_len("x", x.len(), inst.n1)?;
    check_len("xi", xi.len(), inst.np)?;
    let n2 = inst.n2();
    let mut lp = LinearProgram::new(Sense::Min, n2);
    add_y_vars(&mut lp, &inst.y_bounds.yc_upper, &inst.y_bounds.yd_lower, &inst.y_bounds.yd_upper);
    lp.objective = inst.cost_d(xi);
    lp.offset = dot(&inst.cost_c(xi), x);
    let tx = inst.t.mul_vec(x)?;
    let w = inst.w_full();
    let eq = inst.active_equalities(xi);
    for i in 0..inst.m {
        let terms: Vec<(usize, Scalar)> = (0..n2).map(|j| (j, w.at(i, j).clone())).collect();
        let sense = if eq[i] { RowSense::Eq } else { RowSense::Ge };
        lp.add_row(sense, &terms, &inst.h0[i] - &tx[i]);
    }
    Ok(lp)
}

pub fn eval_qi(inst: &IndicatorInstance, x: &[Scalar], xi: &[bool]) -> Result<ExtValue> {
    Ok(min_outcome_value(solve_milp(&indicator_second_stage_milp(inst, x, xi)?)?))
}

/// L_I(x, xi, lambda): penalty in the objective, rows g >= 0 only.
pub(crate) fn indicator_lagrangian_milp(
    inst: &IndicatorInstance,
    x: &[Scalar],
    xi: &[bool],
    lambda: &Scalar,
) -> Result<LinearProgram> {
    check_len("x", x.len(), inst.n1)?;
    check_len("xi", xi.len(), inst.np)?;
    check_lambda(lambda)?;
    let n2 = inst.n2();
    let mut lp = LinearProgram::new(Sense::Min, n2);
    add_y_vars(&mut lp, &inst.y_bounds.yc_upper, &inst.y_bounds.yd_lower, &inst.y_bounds.yd_upper);
    let weights = inst.row_weights(xi);
    let tx = inst.t.mul_vec(x)?;
    let w = inst.w_full();
    // d(xi)'y + lambda * w'(T x + W y - h0)
    lp.objective = inst.cost_d(xi);
    let wt_w = w.tr_mul_vec(&weights)?;
    for j in 0..n2 {
        lp.objective[j] += lambda * &wt_w[j];
    }
    let mut offset = dot(&inst.cost_c(xi), x);
    for i in 0..inst.m {
        offset += lambda * &weights[i] * (&tx[i] - &inst.h0[i]);
    }
    lp.offset = offset;
    for i in 0..inst.m {
        let terms: Vec<(usize, Scalar)> = (0..n2).map(|j| (j, w.at(i, j).clone())).collect();
        lp.add_row(RowSense::Ge, &terms, &inst.h0[i] - &tx[i]);
    }
    Ok(lp)
}

pub fn eval_li(
    inst: &IndicatorInstance,
    x: &[Scalar],
    xi: &[bool],
    lambda: &Scalar,
) -> Result<ExtValue> {
    Ok(min_outcome_value(solve_milp(&indicator_lagrangian_milp(inst, x, xi, lambda)?)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_counterexample, gen_network_design_small, gen_random_general, RandomSpec};
    use crate::linalg::{ivec, Matrix};
    use crate::scalar::frac;

    fn ce() -> GeneralInstance {
        gen_counterexample(rat(1))
    }

    #[test]
    fn phi_zero_iff_equal() {
        for bits in 0..8u8 {
            let xi: Vec<bool> = (0..3).map(|j| bits >> j & 1 == 1).collect();
            let z: Vec<Scalar> = xi.iter().map(|&b| rat(b as i64)).collect();
            assert_eq!(penalty_phi(&z, &xi).unwrap(), rat(0));
        }
    }

    #[test]
    fn phi_at_half() {
        assert_eq!(penalty_phi(&[frac(1, 2)], &[true]).unwrap(), frac(1, 2));
    }

    #[test]
    fn phi_opposite_corners() {
        assert_eq!(
            penalty_phi(&[rat(1), rat(0)], &[false, true]).unwrap(),
            rat(2)
        );
    }

    #[test]
    fn phi_dimension_mismatch() {
        assert!(penalty_phi(&[rat(0)], &[true, false]).is_err());
    }

    #[test]
    fn phi_nonnegative_on_grid() {
        // Rational grid over [0,1]^2 against every binary xi.
        let grid = [rat(0), frac(1, 4), frac(1, 2), frac(3, 4), rat(1)];
        for z0 in &grid {
            for z1 in &grid {
                let z = vec![z0.clone(), z1.clone()];
                for bits in 0..4u8 {
                    let xi: Vec<bool> = (0..2).map(|j| bits >> j & 1 == 1).collect();
                    let v = penalty_phi(&z, &xi).unwrap();
                    assert!(v >= rat(0));
                    let z_is_xi = z
                        .iter()
                        .zip(&xi)
                        .all(|(zj, &b)| *zj == rat(b as i64));
                    assert_eq!(v == rat(0), z_is_xi);
                }
            }
        }
    }

    #[test]
    fn q_on_refutation_instance() {
        let inst = ce();
        let x = ivec(&[0]);
        assert_eq!(eval_q(&inst, &x, &[false]).unwrap(), ExtValue::finite(rat(-1)));
        assert_eq!(eval_q(&inst, &x, &[true]).unwrap(), ExtValue::finite(rat(0)));
    }

    #[test]
    fn q_infeasible_row_gives_pos_inf() {
        // Embed 0 >= 1: row with no variable support and positive rhs.
        let mut inst = ce();
        inst.m = 2;
        inst.t = Matrix::from_rows(vec![vec![rat(0)], vec![rat(0)]]).unwrap();
        inst.wd = Matrix::from_rows(vec![vec![rat(-1)], vec![rat(0)]]).unwrap();
        inst.wc = Matrix::zeros(2, 0);
        inst.h0 = vec![frac(-3, 2), rat(1)];
        inst.h_xi = Matrix::from_rows(vec![vec![rat(1)], vec![rat(0)]]).unwrap();
        inst.validate().unwrap();
        assert_eq!(
            eval_q(&inst, &ivec(&[0]), &[false]).unwrap(),
            ExtValue::PosInf
        );
    }

    #[test]
    fn q_restricted_on_refutation_instance() {
        let inst = ce();
        let x = ivec(&[0]);
        // y_d = 1 at xi = 1: the row 1 <= 1/2 fails and there are no
        // continuous variables.
        assert_eq!(
            eval_q_restricted(&inst, &x, &[true], &ivec(&[1])).unwrap(),
            ExtValue::PosInf
        );
        assert_eq!(
            eval_q_restricted(&inst, &x, &[true], &ivec(&[0])).unwrap(),
            ExtValue::finite(rat(0))
        );
    }

    #[test]
    fn q_equals_min_over_restrictions_on_random_instances() {
        for seed in 0..20u64 {
            let inst = gen_random_general(&RandomSpec::default(), seed).unwrap();
            let yds = inst.yd_points().unwrap();
            for x in &inst.x_set {
                for xi in inst.xi_set.points() {
                    let direct = eval_q(&inst, x, xi).unwrap();
                    let via_restriction = yds
                        .iter()
                        .map(|yd| eval_q_restricted(&inst, x, xi, yd).unwrap())
                        .min()
                        .unwrap();
                    assert_eq!(direct, via_restriction, "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn lagrangian_on_refutation_instance() {
        let inst = ce();
        let x = ivec(&[0]);
        for lam in [rat(0), frac(1, 2), rat(1), rat(2), rat(4)] {
            assert_eq!(
                eval_l(&inst, &x, &[false], &lam).unwrap(),
                ExtValue::finite(rat(-1)),
                "xi=0, lambda={lam}"
            );
        }
        assert_eq!(
            eval_l(&inst, &x, &[true], &rat(1)).unwrap(),
            ExtValue::finite(frac(-1, 2))
        );
        assert_eq!(
            eval_l(&inst, &x, &[true], &rat(4)).unwrap(),
            ExtValue::finite(rat(0))
        );
    }

    #[test]
    fn lagrangian_rejects_negative_multiplier() {
        let inst = ce();
        assert!(matches!(
            eval_l(&inst, &ivec(&[0]), &[true], &rat(-1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn l_equals_min_over_restrictions_on_random_instances() {
        for seed in 0..10u64 {
            let inst = gen_random_general(&RandomSpec::default(), seed).unwrap();
            let yds = inst.yd_points().unwrap();
            let lam = frac(seed as i64 % 3 + 1, 2);
            for x in &inst.x_set {
                for xi in inst.xi_set.points() {
                    let direct = eval_l(&inst, x, xi, &lam).unwrap();
                    let via_restriction = yds
                        .iter()
                        .map(|yd| eval_l_restricted(&inst, x, xi, &lam, yd).unwrap())
                        .min()
                        .unwrap();
                    assert_eq!(direct, via_restriction, "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn weak_duality_and_monotonicity_on_random_instances() {
        let ladder = [rat(0), frac(1, 2), rat(1), rat(2), rat(4), rat(8)];
        for seed in 0..10u64 {
            let inst = gen_random_general(&RandomSpec::default(), seed).unwrap();
            for x in &inst.x_set {
                for xi in inst.xi_set.points() {
                    let q = eval_q(&inst, x, xi).unwrap();
                    let mut prev: Option<ExtValue> = None;
                    for lam in &ladder {
                        let l = eval_l(&inst, x, xi, lam).unwrap();
                        assert!(l <= q, "weak duality failed at seed {seed}");
                        if let Some(p) = prev {
                            assert!(p <= l, "monotonicity failed at seed {seed}");
                        }
                        prev = Some(l);
                    }
                }
            }
        }
    }

    #[test]
    fn indicator_penalty_examples() {
        let inst = gen_network_design_small(2, 1);
        let x = ivec(&[1, 1]);
        // g = 0 componentwise is unreachable here; use y matching builds.
        let y = vec![frac(1, 2), frac(1, 2)];
        let g = g_value(&inst, &x, &y).unwrap();
        // Hand formula: sum over j with xi_j = 1 of g at the flow row.
        let xi = vec![true, false];
        let expected = g[0].clone();
        assert_eq!(penalty_phi_indicator(&inst, &x, &y, &xi).unwrap(), expected);
        // Empty indicator sets: penalty identically zero.
        let mut empty = inst.clone();
        empty.i0 = vec![vec![]; empty.np];
        empty.i1 = vec![vec![]; empty.np];
        assert_eq!(
            penalty_phi_indicator(&empty, &x, &y, &xi).unwrap(),
            rat(0)
        );
    }

    #[test]
    fn indicator_penalty_single_row() {
        // One parameter, I1 = {row 0}, xi = 1, g_0 = 3.
        let mut inst = gen_network_design_small(2, 1);
        inst.i1 = vec![vec![0], vec![]];
        inst.i0 = vec![vec![], vec![]];
        let x = ivec(&[0, 0]);
        // Row 0 is the flow row of route 0, so g_0 = y_0.
        let y = vec![rat(2), rat(0)];
        let g = g_value(&inst, &x, &y).unwrap();
        assert_eq!(g[0], rat(2));
        assert_eq!(
            penalty_phi_indicator(&inst, &x, &y, &[true, false]).unwrap(),
            rat(2)
        );
    }

    #[test]
    fn indicator_q_and_l_agree_when_sets_empty() {
        let mut inst = gen_network_design_small(3, 1);
        inst.i0 = vec![vec![]; inst.np];
        inst.i1 = vec![vec![]; inst.np];
        let x = ivec(&[1, 1, 0]);
        for xi in inst.xi_set.points().to_vec() {
            let q = eval_qi(&inst, &x, &xi).unwrap();
            for lam in [rat(0), rat(1), rat(5)] {
                assert_eq!(eval_li(&inst, &x, &xi, &lam).unwrap(), q);
            }
        }
    }

    #[test]
    fn indicator_lagrangian_at_zero_ignores_indicators() {
        let inst = gen_network_design_small(3, 1);
        let x = ivec(&[1, 1, 0]);
        let mut stripped = inst.clone();
        stripped.i0 = vec![vec![]; stripped.np];
        stripped.i1 = vec![vec![]; stripped.np];
        for xi in inst.xi_set.points().to_vec() {
            assert_eq!(
                eval_li(&inst, &x, &xi, &rat(0)).unwrap(),
                eval_qi(&stripped, &x, &xi).unwrap()
            );
        }
    }

    #[test]
    fn indicator_lambda_sweep_bounded_by_q() {
        let inst = gen_network_design_small(2, 1);
        let x = ivec(&[1, 1]);
        for xi in inst.xi_set.points().to_vec() {
            let q = eval_qi(&inst, &x, &xi).unwrap();
            let mut best = ExtValue::NegInf;
            for lam in [rat(0), rat(1), rat(2), rat(4), rat(8), rat(16)] {
                let l = eval_li(&inst, &x, &xi, &lam).unwrap();
                assert!(l <= q);
                best = best.max(l);
            }
            assert_eq!(best, q, "sup over the ladder should reach Q_I at xi {xi:?}");
        }
    }
}
