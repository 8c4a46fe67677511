//! Dualized worst-case problems and multiplier extraction.
//!
//! Three LP families, all solved exactly by enumerating the uncertainty
//! set and solving one LP per realization over the bound-augmented rows:
//!
//! * `solve_relaxed_worst_case` - the scenario-relaxed worst-case
//!   Lagrangian dual over a pool of discrete decisions; in violation mode
//!   it bounds the worst-case constraint violation instead of cost.
//! * `solve_exact_worst_case_indicator` - the exact worst case of an
//!   indicator instance at a fixed first stage; its optimal (rho, nu)
//!   yield an optimal multiplier.
//! * `solve_exact_worst_case_restricted` - the exact worst case of
//!   `min over the pool` of the restricted second stage; its optimal
//!   (mu, rho) blocks yield an optimal multiplier for the pool relaxation.

use super::lift::{augment_general, augment_indicator, AugGeneral};
use crate::error::{Error, Result};
use crate::linalg::{dot, vec_max_abs, Matrix};
use crate::lp::{solve_lp, LinearProgram, RowSense, Sense, SolveOutcome};
use crate::model::{GeneralInstance, IndicatorInstance};
use crate::scalar::{rat, ExtValue, Scalar};
use num_traits::Zero;

/// Objective mode of the scenario-relaxed dual.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelaxMode {
    /// Bound the worst-case constraint violation (costs off, duals boxed).
    Violation,
    /// Bound the worst-case Lagrangian cost.
    Cost,
}

/// Per-pool-member dual block of the scenario-relaxed problem.
#[derive(Clone, Debug)]
pub struct DualBlock {
    pub mu: Vec<Scalar>,
    pub beta: Vec<Scalar>,
}

/// Optimal certificate of the scenario-relaxed dual at its worst xi.
#[derive(Clone, Debug)]
pub struct RelaxationCertificate {
    pub xi: Vec<bool>,
    pub eta: Scalar,
    pub blocks: Vec<DualBlock>,
}

/// The scenario-relaxed LP for one fixed realization. Variables:
/// eta (free), then per pool member k: mu^k in R_+^m_aug and
/// beta^k in R_+^np.
pub(crate) fn relaxed_worst_case_lp(
    inst: &GeneralInstance,
    aug: &AugGeneral,
    x: &[Scalar],
    pool: &[Vec<Scalar>],
    mode: RelaxMode,
    lambda: &Scalar,
    xi: &[bool],
) -> Result<LinearProgram> {
    let k_count = pool.len();
    let block = aug.m + inst.np;
    let mut lp = LinearProgram::new(Sense::Max, 1 + k_count * block);
    lp.objective[0] = rat(1);
    let tx = aug.t.mul_vec(x)?;
    let cost_c = inst.cost_c(xi);
    let cost_dc = inst.cost_dc(xi);
    let cost_dd = inst.cost_dd(xi);
    let lam_ones: Scalar = rat(xi.iter().filter(|&&b| b).count() as i64) * lambda;
    for (k, yd) in pool.iter().enumerate() {
        let mu0 = 1 + k * block;
        let beta0 = mu0 + aug.m;
        for i in 0..aug.m {
            let upper = match mode {
                RelaxMode::Violation => Some(rat(1)),
                RelaxMode::Cost => None,
            };
            lp.set_bounds(mu0 + i, Some(Scalar::zero()), upper);
        }
        for j in 0..inst.np {
            lp.set_bounds(beta0 + j, Some(Scalar::zero()), None);
        }
        let wdyd = aug.wd.mul_vec(yd)?;
        // eta + e'beta - (h0 - Tx - Wd yd)'mu <= tau (c'x + d_d'yd) + lambda e'xi
        let mut terms: Vec<(usize, Scalar)> = vec![(0, rat(1))];
        for j in 0..inst.np {
            terms.push((beta0 + j, rat(1)));
        }
        for i in 0..aug.m {
            let coef = -(&aug.h0[i] - &tx[i] - &wdyd[i]);
            terms.push((mu0 + i, coef));
        }
        let tau_part = match mode {
            RelaxMode::Violation => Scalar::zero(),
            RelaxMode::Cost => dot(&cost_c, x) + dot(&cost_dd, yd),
        };
        lp.add_row(RowSense::Le, &terms, tau_part + &lam_ones);
        // Wc' mu <= tau d_c
        for j in 0..inst.nc2 {
            let terms: Vec<(usize, Scalar)> = (0..aug.m)
                .map(|i| (mu0 + i, aug.wc.at(i, j).clone()))
                .collect();
            let rhs = match mode {
                RelaxMode::Violation => Scalar::zero(),
                RelaxMode::Cost => cost_dc[j].clone(),
            };
            lp.add_row(RowSense::Le, &terms, rhs);
        }
        // 2 lambda xi - H'mu - beta <= lambda e
        for j in 0..inst.np {
            let mut terms: Vec<(usize, Scalar)> = (0..aug.m)
                .map(|i| (mu0 + i, -aug.h_xi.at(i, j).clone()))
                .collect();
            terms.push((beta0 + j, rat(-1)));
            let rhs = if xi[j] { -lambda.clone() } else { lambda.clone() };
            lp.add_row(RowSense::Le, &terms, rhs);
        }
    }
    Ok(lp)
}

/// Exact optimum of the scenario-relaxed dual: enumerates the uncertainty
/// set and maximizes. An empty pool or an all-blocks-unbounded realization
/// yields +inf with the witnessing realization (the Lagrangian side sees
/// every pooled second stage as infeasible there).
pub fn solve_relaxed_worst_case(
    inst: &GeneralInstance,
    x: &[Scalar],
    pool: &[Vec<Scalar>],
    mode: RelaxMode,
    lambda: &Scalar,
) -> Result<(ExtValue, Vec<bool>, Option<RelaxationCertificate>)> {
    if *lambda < Scalar::zero() {
        return Err(Error::Domain("multiplier must be nonnegative".into()));
    }
    let aug = augment_general(inst);
    let mut best: Option<(Scalar, Vec<bool>, RelaxationCertificate)> = None;
    for xi in inst.xi_set.points() {
        let lp = relaxed_worst_case_lp(inst, &aug, x, pool, mode, lambda, xi)?;
        match solve_lp(&lp)? {
            SolveOutcome::Unbounded { .. } => {
                return Ok((ExtValue::PosInf, xi.clone(), None));
            }
            SolveOutcome::Infeasible => {
                return Err(Error::Internal(
                    "scenario-relaxed dual infeasible despite bound augmentation".into(),
                ));
            }
            SolveOutcome::Optimal(sol) => {
                let better = match &best {
                    None => true,
                    Some((bv, _, _)) => sol.objective > *bv,
                };
                if better {
                    let block = aug.m + inst.np;
                    let blocks = (0..pool.len())
                        .map(|k| {
                            let mu0 = 1 + k * block;
                            DualBlock {
                                mu: sol.primal[mu0..mu0 + aug.m].to_vec(),
                                beta: sol.primal[mu0 + aug.m..mu0 + block].to_vec(),
                            }
                        })
                        .collect();
                    best = Some((
                        sol.objective.clone(),
                        xi.clone(),
                        RelaxationCertificate {
                            xi: xi.clone(),
                            eta: sol.objective,
                            blocks,
                        },
                    ));
                }
            }
        }
    }
    let (v, xi, cert) = best.expect("nonempty uncertainty set");
    Ok((ExtValue::Finite(v), xi, Some(cert)))
}

/// Outcome of the single-realization exact worst-case dual of an indicator
/// instance.
pub(crate) enum ScenarioDual {
    Finite {
        value: Scalar,
        mu: Vec<Scalar>,
        rho: Vec<Scalar>,
        nu: Vec<Scalar>,
    },
    /// The realization makes the second stage infeasible; the dual ray is
    /// returned as a psi vector over the augmented rows.
    Unbounded { psi_ray: Vec<Scalar> },
}

fn psi_vector(
    inst: &IndicatorInstance,
    m_aug: usize,
    mu: &[Scalar],
    rho: &[Scalar],
    nu: &[Scalar],
) -> Vec<Scalar> {
    let mut psi = mu.to_vec();
    for j in 0..inst.np {
        for &i in &inst.i1[j] {
            psi[i] -= &rho[j];
        }
        for &i in &inst.i0[j] {
            psi[i] -= &nu[j];
        }
    }
    debug_assert_eq!(psi.len(), m_aug);
    psi
}

/// Single-realization dual of the exact worst case: variables mu (rows),
/// rho, nu with the realization's indicator pattern fixing rho_j = 0 when
/// xi_j = 0 and nu_j = 0 when xi_j = 1.
pub(crate) fn indicator_scenario_dual(
    inst: &IndicatorInstance,
    x: &[Scalar],
    xi: &[bool],
) -> Result<ScenarioDual> {
    if inst.nd2 != 0 {
        return Err(Error::Input(
            "exact worst-case dual needs a continuous second stage".into(),
        ));
    }
    let aug = augment_indicator(inst);
    let n2 = inst.n2();
    let mut lp = LinearProgram::new(Sense::Max, aug.m + 2 * inst.np);
    let rho0 = aug.m;
    let nu0 = aug.m + inst.np;
    for i in 0..aug.m {
        lp.set_bounds(i, Some(Scalar::zero()), None);
    }
    for j in 0..inst.np {
        let rho_upper = if xi[j] { None } else { Some(Scalar::zero()) };
        let nu_upper = if xi[j] { Some(Scalar::zero()) } else { None };
        lp.set_bounds(rho0 + j, Some(Scalar::zero()), rho_upper);
        lp.set_bounds(nu0 + j, Some(Scalar::zero()), nu_upper);
    }
    // Objective: c(xi)'x + (h0 - Tx)' psi(mu, rho, nu).
    let tx = aug.t.mul_vec(x)?;
    let r: Vec<Scalar> = (0..aug.m).map(|i| &aug.h0[i] - &tx[i]).collect();
    lp.offset = dot(&inst.cost_c(xi), x);
    for i in 0..aug.m {
        lp.objective[i] = r[i].clone();
    }
    for j in 0..inst.np {
        lp.objective[rho0 + j] = -inst.i1[j].iter().map(|&i| r[i].clone()).sum::<Scalar>();
        lp.objective[nu0 + j] = -inst.i0[j].iter().map(|&i| r[i].clone()).sum::<Scalar>();
    }
    // Rows: W' psi <= d(xi).
    let d = inst.cost_d(xi);
    for col in 0..n2 {
        let mut terms: Vec<(usize, Scalar)> = (0..aug.m)
            .map(|i| (i, aug.w.at(i, col).clone()))
            .collect();
        for j in 0..inst.np {
            let rho_coef: Scalar = -inst.i1[j]
                .iter()
                .map(|&i| aug.w.at(i, col).clone())
                .sum::<Scalar>();
            let nu_coef: Scalar = -inst.i0[j]
                .iter()
                .map(|&i| aug.w.at(i, col).clone())
                .sum::<Scalar>();
            terms.push((rho0 + j, rho_coef));
            terms.push((nu0 + j, nu_coef));
        }
        lp.add_row(RowSense::Le, &terms, d[col].clone());
    }
    match solve_lp(&lp)? {
        SolveOutcome::Optimal(sol) => Ok(ScenarioDual::Finite {
            value: sol.objective.clone(),
            mu: sol.primal[..aug.m].to_vec(),
            rho: sol.primal[rho0..rho0 + inst.np].to_vec(),
            nu: sol.primal[nu0..nu0 + inst.np].to_vec(),
        }),
        SolveOutcome::Unbounded { ray } => {
            let ray = ray.ok_or_else(|| Error::Internal("missing unbounded ray".into()))?;
            Ok(ScenarioDual::Unbounded {
                psi_ray: psi_vector(
                    inst,
                    aug.m,
                    &ray[..aug.m],
                    &ray[rho0..rho0 + inst.np],
                    &ray[nu0..nu0 + inst.np],
                ),
            })
        }
        SolveOutcome::Infeasible => Err(Error::Internal(
            "indicator worst-case dual infeasible despite bound augmentation".into(),
        )),
    }
}

/// Optimal certificate of the exact indicator worst case.
#[derive(Clone, Debug)]
pub struct IndicatorCertificate {
    pub xi: Vec<bool>,
    pub value: Scalar,
    pub mu: Vec<Scalar>,
    pub rho: Vec<Scalar>,
    pub nu: Vec<Scalar>,
}

/// Result of the exact indicator worst case at a fixed first stage.
#[derive(Clone, Debug)]
pub struct IndicatorWorstCase {
    pub value: ExtValue,
    pub xi: Vec<bool>,
    pub certificate: Option<IndicatorCertificate>,
    /// Present when `value = +inf`: dual ray certifying infeasibility of
    /// the witnessing realization.
    pub infeasibility_ray: Option<Vec<Scalar>>,
}

/// Exact worst case of an indicator instance at `x` by enumerating the
/// uncertainty set over the single-realization duals. Equals
/// `sup over Xi of Q_I(x, .)`; +inf means `x` is robust-infeasible.
pub fn solve_exact_worst_case_indicator(
    inst: &IndicatorInstance,
    x: &[Scalar],
) -> Result<IndicatorWorstCase> {
    let mut best: Option<IndicatorCertificate> = None;
    for xi in inst.xi_set.points() {
        match indicator_scenario_dual(inst, x, xi)? {
            ScenarioDual::Unbounded { psi_ray } => {
                return Ok(IndicatorWorstCase {
                    value: ExtValue::PosInf,
                    xi: xi.clone(),
                    certificate: None,
                    infeasibility_ray: Some(psi_ray),
                });
            }
            ScenarioDual::Finite { value, mu, rho, nu } => {
                let better = match &best {
                    None => true,
                    Some(b) => value > b.value,
                };
                if better {
                    best = Some(IndicatorCertificate {
                        xi: xi.clone(),
                        value,
                        mu,
                        rho,
                        nu,
                    });
                }
            }
        }
    }
    let cert = best.expect("nonempty uncertainty set");
    Ok(IndicatorWorstCase {
        value: ExtValue::Finite(cert.value.clone()),
        xi: cert.xi.clone(),
        certificate: Some(cert),
        infeasibility_ray: None,
    })
}

/// `max(||rho||_inf, ||nu||_inf)`: an optimal multiplier extracted from an
/// optimal solution of the exact indicator worst case.
pub fn multiplier_from_indicator_certificate(rho: &[Scalar], nu: &[Scalar]) -> Scalar {
    vec_max_abs(rho).max(vec_max_abs(nu))
}

/// Per-pool-member dual block of the restricted exact worst case.
#[derive(Clone, Debug)]
pub struct RestrictedBlock {
    pub mu: Vec<Scalar>,
    pub rho: Vec<Scalar>,
}

/// Optimal certificate of the restricted exact worst case.
#[derive(Clone, Debug)]
pub struct RestrictedCertificate {
    pub xi: Vec<bool>,
    pub eta: Scalar,
    pub blocks: Vec<RestrictedBlock>,
}

/// Exact optimum of `sup over Xi of min over the pool of Q(x, .; y_d)` by
/// realization enumeration with indicator-resolved rho bounds. +inf means
/// some realization defeats every pooled discrete decision.
pub fn solve_exact_worst_case_restricted(
    inst: &GeneralInstance,
    x: &[Scalar],
    pool: &[Vec<Scalar>],
) -> Result<(ExtValue, Vec<bool>, Option<RestrictedCertificate>)> {
    if pool.is_empty() {
        return Err(Error::Input("restricted worst case needs a nonempty pool".into()));
    }
    let aug = augment_general(inst);
    let block = aug.m + inst.np;
    let mut best: Option<RestrictedCertificate> = None;
    for xi in inst.xi_set.points() {
        let mut lp = LinearProgram::new(Sense::Max, 1 + pool.len() * block);
        lp.objective[0] = rat(1);
        let tx = aug.t.mul_vec(x)?;
        let cost_c = inst.cost_c(xi);
        let cost_dc = inst.cost_dc(xi);
        let cost_dd = inst.cost_dd(xi);
        for (k, yd) in pool.iter().enumerate() {
            let mu0 = 1 + k * block;
            let rho0 = mu0 + aug.m;
            for i in 0..aug.m {
                lp.set_bounds(mu0 + i, Some(Scalar::zero()), None);
            }
            for j in 0..inst.np {
                let upper = if xi[j] { None } else { Some(Scalar::zero()) };
                lp.set_bounds(rho0 + j, Some(Scalar::zero()), upper);
            }
            let wdyd = aug.wd.mul_vec(yd)?;
            // eta - e'rho - (h0 - Tx - Wd yd)'mu <= c'x + d_d'yd
            let mut terms: Vec<(usize, Scalar)> = vec![(0, rat(1))];
            for j in 0..inst.np {
                terms.push((rho0 + j, rat(-1)));
            }
            for i in 0..aug.m {
                terms.push((mu0 + i, -(&aug.h0[i] - &tx[i] - &wdyd[i])));
            }
            lp.add_row(RowSense::Le, &terms, dot(&cost_c, x) + dot(&cost_dd, yd));
            // Wc' mu <= d_c
            for j in 0..inst.nc2 {
                let terms: Vec<(usize, Scalar)> = (0..aug.m)
                    .map(|i| (mu0 + i, aug.wc.at(i, j).clone()))
                    .collect();
                lp.add_row(RowSense::Le, &terms, cost_dc[j].clone());
            }
            // xi_j = 1: rho_j <= e_j' H' mu (xi_j = 0 handled by bounds)
            for j in 0..inst.np {
                if xi[j] {
                    let mut terms: Vec<(usize, Scalar)> = (0..aug.m)
                        .map(|i| (mu0 + i, -aug.h_xi.at(i, j).clone()))
                        .collect();
                    terms.push((rho0 + j, rat(1)));
                    lp.add_row(RowSense::Le, &terms, Scalar::zero());
                }
            }
        }
        match solve_lp(&lp)? {
            SolveOutcome::Unbounded { .. } => {
                return Ok((ExtValue::PosInf, xi.clone(), None));
            }
            SolveOutcome::Infeasible => {
                return Err(Error::Internal(
                    "restricted worst-case dual infeasible despite bound augmentation".into(),
                ));
            }
            SolveOutcome::Optimal(sol) => {
                let better = match &best {
                    None => true,
                    Some(b) => sol.objective > b.eta,
                };
                if better {
                    let blocks = (0..pool.len())
                        .map(|k| {
                            let mu0 = 1 + k * block;
                            RestrictedBlock {
                                mu: sol.primal[mu0..mu0 + aug.m].to_vec(),
                                rho: sol.primal[mu0 + aug.m..mu0 + block].to_vec(),
                            }
                        })
                        .collect();
                    best = Some(RestrictedCertificate {
                        xi: xi.clone(),
                        eta: sol.objective,
                        blocks,
                    });
                }
            }
        }
    }
    let cert = best.expect("nonempty uncertainty set");
    Ok((
        ExtValue::Finite(cert.eta.clone()),
        cert.xi.clone(),
        Some(cert),
    ))
}

/// `max over blocks of max(||rho^k||_inf, ||H' mu^k||_inf)`: an optimal
/// multiplier extracted from the restricted exact worst case. `h_aug` must
/// be the (augmented) uncertainty rhs matrix matching the mu length.
pub fn multiplier_from_restricted_certificate(
    blocks: &[RestrictedBlock],
    h_aug: &Matrix,
) -> Scalar {
    let mut best = Scalar::zero();
    for b in blocks {
        let h_mu = h_aug.tr_mul_vec(&b.mu).expect("dimension-checked");
        best = best.max(vec_max_abs(&b.rho)).max(vec_max_abs(&h_mu));
    }
    best
}

/// The augmented uncertainty rhs matrix paired with restricted
/// certificates of this instance.
pub fn augmented_h(inst: &GeneralInstance) -> Matrix {
    augment_general(inst).h_xi
}
