//! Instance generators: the refutation example, interdiction and network
//! families, and seeded random desk-scale instances.
//!
//! Random generators use ChaCha8 keyed by a 64-bit seed, so instances are
//! reproducible bit-for-bit across platforms.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{
    eval_q, eval_qi, GeneralInstance, IndicatorInstance, VarBounds, XiSet, YBounds,
};
use crate::scalar::{frac, rat, Scalar};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The single-variable instance on which the closed-form multiplier
/// u(x) - l(x) fails: X = {0}, Xi = {0,1}, y in {0,1}, objective
/// -gamma * y, constraint -y >= -3/2 + xi. Its worst-case value is 0 while
/// the Lagrangian at lambda = gamma * (u - l) = gamma evaluates to
/// -gamma/2.
pub fn gen_counterexample(gamma: Scalar) -> GeneralInstance {
    let inst = GeneralInstance {
        n1: 1,
        nc2: 0,
        nd2: 1,
        np: 1,
        m: 1,
        c0: vec![Scalar::zero()],
        c_xi: Matrix::zeros(1, 1),
        d0: vec![-gamma],
        dc_xi: Matrix::zeros(0, 1),
        dd_xi: Matrix::zeros(1, 1),
        t: Matrix::zeros(1, 1),
        wc: Matrix::zeros(1, 0),
        wd: Matrix::from_rows(vec![vec![rat(-1)]]).unwrap(),
        h0: vec![frac(-3, 2)],
        h_xi: Matrix::from_rows(vec![vec![rat(1)]]).unwrap(),
        x_set: vec![vec![Scalar::zero()]],
        xi_set: XiSet::from_points(vec![vec![false], vec![true]]).unwrap(),
        y_bounds: YBounds {
            yc_upper: vec![],
            yd_lower: vec![Scalar::zero()],
            yd_upper: vec![rat(1)],
        },
        var_bounds: None,
    };
    inst.validate().expect("generator produced an invalid instance");
    inst
}

/// Interdicted combinatorial instance: binary second stage y in {0,1}^n
/// with interdiction rows y <= e - xi, integer data, and base rows that
/// stay feasible at y = 0 for every first-stage choice. Satisfies the
/// sufficient conditions for the closed-form multiplier by construction.
pub fn gen_interdiction(n: usize, seed: u64) -> GeneralInstance {
    assert!(n >= 1, "interdiction instance needs at least one resource");
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x1d7e));
    let n1 = 2;
    let m_base = 2;
    let m = m_base + n;
    // Distinct first-stage points in {0,1}^2.
    let mut x_set: Vec<Vec<Scalar>> = Vec::new();
    while x_set.len() < 3 {
        let cand: Vec<Scalar> = (0..n1).map(|_| rat(rng.gen_range(0..=1))).collect();
        if !x_set.contains(&cand) {
            x_set.push(cand);
        }
    }
    let t_rows: Vec<Vec<Scalar>> = (0..m_base)
        .map(|_| (0..n1).map(|_| rat(rng.gen_range(-2..=2))).collect())
        .chain((0..n).map(|_| vec![Scalar::zero(); n1]))
        .collect();
    let t = Matrix::from_rows(t_rows).unwrap();
    let mut wd_rows: Vec<Vec<Scalar>> = (0..m_base)
        .map(|_| (0..n).map(|_| rat(rng.gen_range(0..=2))).collect())
        .collect();
    for i in 0..n {
        let mut row = vec![Scalar::zero(); n];
        row[i] = rat(-1);
        wd_rows.push(row);
    }
    let wd = Matrix::from_rows(wd_rows).unwrap();
    // Base rows hold at y = 0 for every x in X; interdiction rows read
    // -y_i >= -1 + xi_i.
    let mut h0 = Vec::with_capacity(m);
    for i in 0..m_base {
        let min_tx = x_set
            .iter()
            .map(|x| crate::linalg::dot(t.row(i), x))
            .min()
            .unwrap();
        h0.push(min_tx - rat(rng.gen_range(0..=1)));
    }
    h0.extend(std::iter::repeat(rat(-1)).take(n));
    let mut h_rows = vec![vec![Scalar::zero(); n]; m_base];
    for i in 0..n {
        let mut row = vec![Scalar::zero(); n];
        row[i] = rat(1);
        h_rows.push(row);
    }
    let h_xi = Matrix::from_rows(h_rows).unwrap();
    let inst = GeneralInstance {
        n1,
        nc2: 0,
        nd2: n,
        np: n,
        m,
        c0: (0..n1).map(|_| rat(rng.gen_range(-2..=2))).collect(),
        c_xi: Matrix::from_rows(
            (0..n1)
                .map(|_| (0..n).map(|_| rat(rng.gen_range(-1..=1))).collect())
                .collect(),
        )
        .unwrap(),
        d0: (0..n).map(|_| rat(rng.gen_range(-3..=-1))).collect(),
        dc_xi: Matrix::zeros(0, n),
        dd_xi: Matrix::from_rows(
            (0..n)
                .map(|_| (0..n).map(|_| rat(rng.gen_range(-1..=1))).collect())
                .collect(),
        )
        .unwrap(),
        t,
        wc: Matrix::zeros(m, 0),
        wd,
        h0,
        h_xi,
        x_set,
        xi_set: XiSet::budget(n, n).unwrap(),
        y_bounds: YBounds {
            yc_upper: vec![],
            yd_lower: vec![Scalar::zero(); n],
            yd_upper: vec![rat(1); n],
        },
        var_bounds: None,
    };
    inst.validate().expect("generator produced an invalid instance");
    inst
}

/// Shape parameters for the seeded random families.
#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub n1: usize,
    pub nc2: usize,
    pub nd2: usize,
    pub np: usize,
    pub m: usize,
    pub x_count: usize,
    /// Zero constant parts in all cost/rhs maps.
    pub homogeneous: bool,
    /// None = all of {0,1}^np; Some(k) = budget set.
    pub budget: Option<usize>,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            n1: 1,
            nc2: 1,
            nd2: 1,
            np: 2,
            m: 2,
            x_count: 2,
            homogeneous: false,
            budget: None,
        }
    }
}

const REJECTION_CAP: usize = 500;

/// Random general instance with integer data, rejection-sampled until some
/// first-stage decision has a finite worst case.
pub fn gen_random_general(spec: &RandomSpec, seed: u64) -> Result<GeneralInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..REJECTION_CAP {
        let inst = sample_general(spec, &mut rng)?;
        if has_feasible_x(&inst)? {
            return Ok(inst);
        }
    }
    Err(Error::LimitExceeded(format!(
        "no robust-feasible instance found in {REJECTION_CAP} draws for seed {seed}"
    )))
}

fn sample_general(spec: &RandomSpec, rng: &mut ChaCha8Rng) -> Result<GeneralInstance> {
    let int_mat = |rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: i64, hi: i64| {
        if rows == 0 {
            return Matrix::zeros(0, cols);
        }
        Matrix::from_rows(
            (0..rows)
                .map(|_| (0..cols).map(|_| rat(rng.gen_range(lo..=hi))).collect())
                .collect(),
        )
        .unwrap()
    };
    let n2 = spec.nc2 + spec.nd2;
    let mut x_set: Vec<Vec<Scalar>> = Vec::new();
    let mut guard = 0;
    while x_set.len() < spec.x_count && guard < 200 {
        guard += 1;
        let cand: Vec<Scalar> = (0..spec.n1).map(|_| rat(rng.gen_range(0..=1))).collect();
        if !x_set.contains(&cand) {
            x_set.push(cand);
        }
    }
    let xi_set = match spec.budget {
        Some(k) => XiSet::budget(spec.np, k)?,
        None => XiSet::budget(spec.np, spec.np)?,
    };
    let zeros = |n: usize| vec![Scalar::zero(); n];
    let yd_lower = zeros(spec.nd2);
    let yd_upper = vec![rat(1); spec.nd2];
    let yc_upper = vec![rat(2); spec.nc2];
    let mut y_lower = zeros(spec.nc2);
    y_lower.extend(yd_lower.clone());
    let mut y_upper = yc_upper.clone();
    y_upper.extend(yd_upper.clone());
    let x_lower = (0..spec.n1)
        .map(|j| x_set.iter().map(|x| x[j].clone()).min().unwrap())
        .collect();
    let x_upper = (0..spec.n1)
        .map(|j| x_set.iter().map(|x| x[j].clone()).max().unwrap())
        .collect();
    let inst = GeneralInstance {
        n1: spec.n1,
        nc2: spec.nc2,
        nd2: spec.nd2,
        np: spec.np,
        m: spec.m,
        c0: if spec.homogeneous {
            zeros(spec.n1)
        } else {
            (0..spec.n1).map(|_| rat(rng.gen_range(-2..=2))).collect()
        },
        c_xi: int_mat(rng, spec.n1, spec.np, -2, 2),
        d0: if spec.homogeneous {
            zeros(n2)
        } else {
            (0..n2).map(|_| rat(rng.gen_range(-3..=3))).collect()
        },
        dc_xi: int_mat(rng, spec.nc2, spec.np, -2, 2),
        dd_xi: int_mat(rng, spec.nd2, spec.np, -2, 2),
        t: int_mat(rng, spec.m, spec.n1, -2, 2),
        wc: int_mat(rng, spec.m, spec.nc2, -2, 2),
        wd: int_mat(rng, spec.m, spec.nd2, -2, 2),
        h0: if spec.homogeneous {
            zeros(spec.m)
        } else {
            (0..spec.m).map(|_| rat(rng.gen_range(-3..=0))).collect()
        },
        h_xi: int_mat(rng, spec.m, spec.np, -1, 1),
        x_set,
        xi_set,
        y_bounds: YBounds {
            yc_upper,
            yd_lower,
            yd_upper,
        },
        var_bounds: Some(VarBounds {
            x_lower,
            x_upper,
            y_lower,
            y_upper,
        }),
    };
    inst.validate()?;
    Ok(inst)
}

fn has_feasible_x(inst: &GeneralInstance) -> Result<bool> {
    for x in &inst.x_set {
        let mut all_finite = true;
        for xi in inst.xi_set.points() {
            if !eval_q(inst, x, xi)?.is_finite() {
                all_finite = false;
                break;
            }
        }
        if all_finite {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Random indicator instance with a continuous second stage and nonempty
/// indicator sets, rejection-sampled for robust feasibility of some x.
pub fn gen_random_indicator(spec: &RandomSpec, seed: u64) -> Result<IndicatorInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0xa11ce));
    for _ in 0..REJECTION_CAP {
        let inst = sample_indicator(spec, &mut rng)?;
        let feasible = inst.x_set.iter().any(|x| {
            inst.xi_set
                .points()
                .iter()
                .all(|xi| matches!(eval_qi(&inst, x, xi), Ok(v) if v.is_finite()))
        });
        if feasible {
            return Ok(inst);
        }
    }
    Err(Error::LimitExceeded(format!(
        "no robust-feasible indicator instance found in {REJECTION_CAP} draws for seed {seed}"
    )))
}

fn sample_indicator(spec: &RandomSpec, rng: &mut ChaCha8Rng) -> Result<IndicatorInstance> {
    let n2 = spec.nc2;
    let int_mat = |rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: i64, hi: i64| {
        if rows == 0 {
            return Matrix::zeros(0, cols);
        }
        Matrix::from_rows(
            (0..rows)
                .map(|_| (0..cols).map(|_| rat(rng.gen_range(lo..=hi))).collect())
                .collect(),
        )
        .unwrap()
    };
    let mut x_set: Vec<Vec<Scalar>> = Vec::new();
    let mut guard = 0;
    while x_set.len() < spec.x_count && guard < 200 {
        guard += 1;
        let cand: Vec<Scalar> = (0..spec.n1).map(|_| rat(rng.gen_range(0..=1))).collect();
        if !x_set.contains(&cand) {
            x_set.push(cand);
        }
    }
    // Indicator sets: small random row subsets, at least one nonempty.
    let mut i0: Vec<Vec<usize>> = Vec::new();
    let mut i1: Vec<Vec<usize>> = Vec::new();
    loop {
        i0.clear();
        i1.clear();
        for _ in 0..spec.np {
            i0.push(random_rows(rng, spec.m));
            i1.push(random_rows(rng, spec.m));
        }
        if i0.iter().chain(&i1).any(|s| !s.is_empty()) {
            break;
        }
    }
    let inst = IndicatorInstance {
        n1: spec.n1,
        nc2: n2,
        nd2: 0,
        np: spec.np,
        m: spec.m,
        c0: (0..spec.n1).map(|_| rat(rng.gen_range(-2..=2))).collect(),
        c_xi: int_mat(rng, spec.n1, spec.np, -1, 1),
        d0: (0..n2).map(|_| rat(rng.gen_range(-3..=3))).collect(),
        dc_xi: int_mat(rng, n2, spec.np, -1, 1),
        dd_xi: Matrix::zeros(0, spec.np),
        t: int_mat(rng, spec.m, spec.n1, -2, 2),
        wc: int_mat(rng, spec.m, n2, -2, 2),
        wd: Matrix::zeros(spec.m, 0),
        h0: (0..spec.m).map(|_| rat(rng.gen_range(-2..=1))).collect(),
        i0,
        i1,
        x_set,
        xi_set: XiSet::budget(spec.np, spec.np)?,
        y_bounds: YBounds {
            yc_upper: vec![rat(2); n2],
            yd_lower: vec![],
            yd_upper: vec![],
        },
        var_bounds: None,
    };
    inst.validate()?;
    Ok(inst)
}

fn random_rows(rng: &mut ChaCha8Rng, m: usize) -> Vec<usize> {
    let size = rng.gen_range(0..=2.min(m));
    let mut rows: Vec<usize> = Vec::new();
    while rows.len() < size {
        let r = rng.gen_range(0..m);
        if !rows.contains(&r) {
            rows.push(r);
        }
    }
    rows.sort_unstable();
    rows
}

/// Miniature network-design instance: `routes` parallel routes carry one
/// unit of demand; building route j grants capacity 1; failure parameter
/// xi_j switches the flow row of route j to zero. Continuous second stage,
/// budget-k uncertainty. Deterministic in its parameters.
pub fn gen_network_design_small(routes: usize, k: usize) -> IndicatorInstance {
    assert!(routes >= 2, "need at least two routes");
    assert!(k <= routes, "budget exceeds route count");
    let r = routes;
    // Rows: flow rows g = y_j (indicator targets), capacity rows
    // g = x_j - y_j, demand row g = sum y - 1.
    let m = 2 * r + 1;
    let mut wc_rows: Vec<Vec<Scalar>> = Vec::new();
    let mut t_rows: Vec<Vec<Scalar>> = Vec::new();
    let mut h0 = Vec::new();
    for j in 0..r {
        let mut row = vec![Scalar::zero(); r];
        row[j] = rat(1);
        wc_rows.push(row);
        t_rows.push(vec![Scalar::zero(); r]);
        h0.push(Scalar::zero());
    }
    for j in 0..r {
        let mut row = vec![Scalar::zero(); r];
        row[j] = rat(-1);
        wc_rows.push(row);
        let mut t_row = vec![Scalar::zero(); r];
        t_row[j] = rat(1);
        t_rows.push(t_row);
        h0.push(Scalar::zero());
    }
    wc_rows.push(vec![rat(1); r]);
    t_rows.push(vec![Scalar::zero(); r]);
    h0.push(rat(1));
    let i1: Vec<Vec<usize>> = (0..r).map(|j| vec![j]).collect();
    let i0: Vec<Vec<usize>> = (0..r).map(|_| vec![]).collect();
    // Build costs rise with j, flow costs fall, so failures of cheap-flow
    // routes genuinely hurt and small multipliers underestimate the worst
    // case.
    let c0: Vec<Scalar> = (0..r).map(|j| rat(1 + j as i64 % 2)).collect();
    let d0: Vec<Scalar> = (0..r).map(|j| rat(1 + 2 * (j as i64))).collect();
    let inst = IndicatorInstance {
        n1: r,
        nc2: r,
        nd2: 0,
        np: r,
        m,
        c0,
        c_xi: Matrix::zeros(r, r),
        d0,
        dc_xi: Matrix::zeros(r, r),
        dd_xi: Matrix::zeros(0, r),
        t: Matrix::from_rows(t_rows).unwrap(),
        wc: Matrix::from_rows(wc_rows).unwrap(),
        wd: Matrix::zeros(m, 0),
        h0,
        i0,
        i1,
        x_set: crate::model::integer_box_points(
            &vec![Scalar::zero(); r],
            &vec![rat(1); r],
        )
        .unwrap(),
        xi_set: XiSet::budget(r, k).unwrap(),
        y_bounds: YBounds {
            yc_upper: vec![rat(2); r],
            yd_lower: vec![],
            yd_upper: vec![],
        },
        var_bounds: None,
    };
    inst.validate().expect("generator produced an invalid instance");
    inst
}
