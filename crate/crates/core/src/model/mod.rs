//! Data model for the two problem shapes and their evaluators.
//!
//! A general instance carries affine cost maps `c(xi) = c0 + C xi`,
//! `d(xi) = d0 + D xi`, `h(xi) = h0 + H xi` and second-stage rows
//! `T x + W_c y_c + W_d y_d >= h(xi)`. An indicator instance fixes
//! `g(x, y) = T x + W y - h0 >= 0` and lets the binary parameters switch
//! individual rows to equalities. First-stage decisions live in an explicit
//! finite list `X`; second-stage decisions in a finite box (continuous part
//! `[0, u_c]`, integer part `[l_d, u_d]`), which keeps every subproblem
//! bounded and makes exhaustive verification possible.

mod eval;

pub use eval::*;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{rat, Scalar};
use num_traits::Zero;

/// Hard cap on expanded enumeration sizes (uncertainty sets, integer boxes).
pub const ENUMERATION_CAP: usize = 1 << 16;

/// How the uncertainty set was specified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XiForm {
    Points,
    /// All binary vectors with at most `k` ones.
    Budget(usize),
}

/// Uncertainty set: binary points of length `np`, kept in enumeration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiSet {
    form: XiForm,
    points: Vec<Vec<bool>>,
}

impl XiSet {
    pub fn from_points(points: Vec<Vec<bool>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Input("uncertainty set is empty".into()));
        }
        let np = points[0].len();
        if points.iter().any(|p| p.len() != np) {
            return Err(Error::Dimension("uncertainty points of mixed length".into()));
        }
        Ok(XiSet {
            form: XiForm::Points,
            points,
        })
    }

    /// Expands `{xi in {0,1}^np : sum xi_j <= k}` in lexicographic order.
    pub fn budget(np: usize, k: usize) -> Result<Self> {
        if np > 16 {
            return Err(Error::LimitExceeded(format!(
                "budget uncertainty set over {np} parameters exceeds the {ENUMERATION_CAP} cap"
            )));
        }
        let mut points = Vec::new();
        for code in 0..(1usize << np) {
            let point: Vec<bool> = (0..np).map(|j| code >> (np - 1 - j) & 1 == 1).collect();
            if point.iter().filter(|&&b| b).count() <= k {
                points.push(point);
            }
        }
        Ok(XiSet {
            form: XiForm::Budget(k),
            points,
        })
    }

    pub fn form(&self) -> &XiForm {
        &self.form
    }

    pub fn points(&self) -> &[Vec<bool>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn np(&self) -> usize {
        self.points[0].len()
    }

    pub fn lex_min(&self) -> &Vec<bool> {
        self.points.iter().min().expect("nonempty by construction")
    }
}

/// Second-stage box: `y_c in [0, yc_upper]`, `y_d` integer in
/// `[yd_lower, yd_upper]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YBounds {
    pub yc_upper: Vec<Scalar>,
    pub yd_lower: Vec<Scalar>,
    pub yd_upper: Vec<Scalar>,
}

/// Optional explicit box records used by the polynomial-time multiplier
/// bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarBounds {
    pub x_lower: Vec<Scalar>,
    pub x_upper: Vec<Scalar>,
    pub y_lower: Vec<Scalar>,
    pub y_upper: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralInstance {
    pub n1: usize,
    pub nc2: usize,
    pub nd2: usize,
    pub np: usize,
    pub m: usize,
    pub c0: Vec<Scalar>,
    /// n1 x np coefficient of xi in c(xi).
    pub c_xi: Matrix,
    pub d0: Vec<Scalar>,
    /// nc2 x np coefficient of xi in d_c(xi).
    pub dc_xi: Matrix,
    /// nd2 x np coefficient of xi in d_d(xi).
    pub dd_xi: Matrix,
    pub t: Matrix,
    pub wc: Matrix,
    pub wd: Matrix,
    pub h0: Vec<Scalar>,
    /// m x np coefficient of xi in h(xi).
    pub h_xi: Matrix,
    pub x_set: Vec<Vec<Scalar>>,
    pub xi_set: XiSet,
    pub y_bounds: YBounds,
    pub var_bounds: Option<VarBounds>,
}

impl GeneralInstance {
    pub fn n2(&self) -> usize {
        self.nc2 + self.nd2
    }

    pub fn validate(&self) -> Result<()> {
        let check_vec = |name: &str, v: &[Scalar], len: usize| {
            if v.len() != len {
                return Err(Error::Dimension(format!(
                    "{name}: expected length {len}, got {}",
                    v.len()
                )));
            }
            Ok(())
        };
        let check_mat = |name: &str, m: &Matrix, rows: usize, cols: usize| {
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::Dimension(format!(
                    "{name}: expected {rows}x{cols}, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
            Ok(())
        };
        check_vec("c0", &self.c0, self.n1)?;
        check_mat("C", &self.c_xi, self.n1, self.np)?;
        check_vec("d0", &self.d0, self.n2())?;
        check_mat("Dc", &self.dc_xi, self.nc2, self.np)?;
        check_mat("Dd", &self.dd_xi, self.nd2, self.np)?;
        check_mat("T", &self.t, self.m, self.n1)?;
        check_mat("Wc", &self.wc, self.m, self.nc2)?;
        check_mat("Wd", &self.wd, self.m, self.nd2)?;
        check_vec("h0", &self.h0, self.m)?;
        check_mat("H", &self.h_xi, self.m, self.np)?;
        if self.x_set.is_empty() {
            return Err(Error::Input("X is empty".into()));
        }
        for (i, x) in self.x_set.iter().enumerate() {
            check_vec(&format!("X[{i}]"), x, self.n1)?;
        }
        if self.xi_set.is_empty() {
            return Err(Error::Input("Xi is empty".into()));
        }
        if self.xi_set.np() != self.np {
            return Err(Error::Dimension(format!(
                "Xi points have length {}, expected np = {}",
                self.xi_set.np(),
                self.np
            )));
        }
        validate_y_bounds(&self.y_bounds, self.nc2, self.nd2)?;
        if let Some(vb) = &self.var_bounds {
            check_vec("bounds.x_lower", &vb.x_lower, self.n1)?;
            check_vec("bounds.x_upper", &vb.x_upper, self.n1)?;
            check_vec("bounds.y_lower", &vb.y_lower, self.n2())?;
            check_vec("bounds.y_upper", &vb.y_upper, self.n2())?;
        }
        Ok(())
    }

    pub fn dc0(&self) -> &[Scalar] {
        &self.d0[..self.nc2]
    }

    pub fn dd0(&self) -> &[Scalar] {
        &self.d0[self.nc2..]
    }

    pub fn cost_c(&self, xi: &[bool]) -> Vec<Scalar> {
        affine(&self.c0, &self.c_xi, xi)
    }

    pub fn cost_dc(&self, xi: &[bool]) -> Vec<Scalar> {
        affine(self.dc0(), &self.dc_xi, xi)
    }

    pub fn cost_dd(&self, xi: &[bool]) -> Vec<Scalar> {
        affine(self.dd0(), &self.dd_xi, xi)
    }

    pub fn cost_d(&self, xi: &[bool]) -> Vec<Scalar> {
        let mut d = self.cost_dc(xi);
        d.extend(self.cost_dd(xi));
        d
    }

    pub fn rhs_h(&self, xi: &[bool]) -> Vec<Scalar> {
        affine(&self.h0, &self.h_xi, xi)
    }

    /// All cost and rhs maps are linear in xi (no constant part).
    pub fn is_homogeneous(&self) -> bool {
        self.c0.iter().all(Scalar::is_zero)
            && self.d0.iter().all(Scalar::is_zero)
            && self.h0.iter().all(Scalar::is_zero)
    }

    /// Integer points of the discrete box in lexicographic order.
    pub fn yd_points(&self) -> Result<Vec<Vec<Scalar>>> {
        integer_box_points(&self.y_bounds.yd_lower, &self.y_bounds.yd_upper)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicatorInstance {
    pub n1: usize,
    pub nc2: usize,
    pub nd2: usize,
    pub np: usize,
    pub m: usize,
    pub c0: Vec<Scalar>,
    pub c_xi: Matrix,
    pub d0: Vec<Scalar>,
    pub dc_xi: Matrix,
    pub dd_xi: Matrix,
    pub t: Matrix,
    pub wc: Matrix,
    pub wd: Matrix,
    pub h0: Vec<Scalar>,
    /// Per parameter j: rows forced to equality when xi_j = 0.
    pub i0: Vec<Vec<usize>>,
    /// Per parameter j: rows forced to equality when xi_j = 1.
    pub i1: Vec<Vec<usize>>,
    pub x_set: Vec<Vec<Scalar>>,
    pub xi_set: XiSet,
    pub y_bounds: YBounds,
    pub var_bounds: Option<VarBounds>,
}

impl IndicatorInstance {
    pub fn n2(&self) -> usize {
        self.nc2 + self.nd2
    }

    pub fn validate(&self) -> Result<()> {
        // Reuse the general checks through a structural copy with H = C = 0
        // where absent.
        if self.i0.len() != self.np || self.i1.len() != self.np {
            return Err(Error::Dimension(format!(
                "I0/I1: expected {} index sets, got {}/{}",
                self.np,
                self.i0.len(),
                self.i1.len()
            )));
        }
        for (j, set) in self.i0.iter().chain(self.i1.iter()).enumerate() {
            if let Some(&i) = set.iter().find(|&&i| i >= self.m) {
                return Err(Error::Input(format!(
                    "indicator set {} references row {i} out of {} rows",
                    j % self.np,
                    self.m
                )));
            }
        }
        self.as_general_shape().validate()
    }

    /// Structural twin used to share dimension validation.
    fn as_general_shape(&self) -> GeneralInstance {
        GeneralInstance {
            n1: self.n1,
            nc2: self.nc2,
            nd2: self.nd2,
            np: self.np,
            m: self.m,
            c0: self.c0.clone(),
            c_xi: self.c_xi.clone(),
            d0: self.d0.clone(),
            dc_xi: self.dc_xi.clone(),
            dd_xi: self.dd_xi.clone(),
            t: self.t.clone(),
            wc: self.wc.clone(),
            wd: self.wd.clone(),
            h0: self.h0.clone(),
            h_xi: Matrix::zeros(self.m, self.np),
            x_set: self.x_set.clone(),
            xi_set: self.xi_set.clone(),
            y_bounds: self.y_bounds.clone(),
            var_bounds: self.var_bounds.clone(),
        }
    }

    pub fn w_full(&self) -> Matrix {
        self.wc.hstack(&self.wd).expect("validated dimensions")
    }

    pub fn dd0(&self) -> &[Scalar] {
        &self.d0[self.nc2..]
    }

    pub fn cost_c(&self, xi: &[bool]) -> Vec<Scalar> {
        affine(&self.c0, &self.c_xi, xi)
    }

    pub fn cost_d(&self, xi: &[bool]) -> Vec<Scalar> {
        let mut d = affine(&self.d0[..self.nc2], &self.dc_xi, xi);
        d.extend(affine(&self.d0[self.nc2..], &self.dd_xi, xi));
        d
    }

    /// Penalty weight per row: w_i(xi) = sum_{j: i in I1_j} xi_j
    /// + sum_{j: i in I0_j} (1 - xi_j).
    pub fn row_weights(&self, xi: &[bool]) -> Vec<Scalar> {
        let mut w = vec![Scalar::zero(); self.m];
        for j in 0..self.np {
            if xi[j] {
                for &i in &self.i1[j] {
                    w[i] += rat(1);
                }
            } else {
                for &i in &self.i0[j] {
                    w[i] += rat(1);
                }
            }
        }
        w
    }

    /// Rows forced to equality under `xi`.
    pub fn active_equalities(&self, xi: &[bool]) -> Vec<bool> {
        let mut eq = vec![false; self.m];
        for j in 0..self.np {
            let set = if xi[j] { &self.i1[j] } else { &self.i0[j] };
            for &i in set {
                eq[i] = true;
            }
        }
        eq
    }

    pub fn yd_points(&self) -> Result<Vec<Vec<Scalar>>> {
        integer_box_points(&self.y_bounds.yd_lower, &self.y_bounds.yd_upper)
    }
}

/// Either problem shape, as loaded from an instance file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    General(GeneralInstance),
    Indicator(IndicatorInstance),
}

impl Instance {
    pub fn validate(&self) -> Result<()> {
        match self {
            Instance::General(g) => g.validate(),
            Instance::Indicator(i) => i.validate(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::General(_) => "general",
            Instance::Indicator(_) => "indicator",
        }
    }

    pub fn x_set(&self) -> &[Vec<Scalar>] {
        match self {
            Instance::General(g) => &g.x_set,
            Instance::Indicator(i) => &i.x_set,
        }
    }

    pub fn xi_set(&self) -> &XiSet {
        match self {
            Instance::General(g) => &g.xi_set,
            Instance::Indicator(i) => &i.xi_set,
        }
    }
}

fn validate_y_bounds(y: &YBounds, nc2: usize, nd2: usize) -> Result<()> {
    if y.yc_upper.len() != nc2 {
        return Err(Error::Dimension(format!(
            "Y.yc_upper: expected length {nc2}, got {}",
            y.yc_upper.len()
        )));
    }
    if y.yd_lower.len() != nd2 || y.yd_upper.len() != nd2 {
        return Err(Error::Dimension(format!(
            "Y.yd bounds: expected length {nd2}, got {}/{}",
            y.yd_lower.len(),
            y.yd_upper.len()
        )));
    }
    if let Some(u) = y.yc_upper.iter().find(|u| **u < Scalar::zero()) {
        return Err(Error::Input(format!(
            "Y.yc_upper must be nonnegative, found {}",
            crate::scalar::format_scalar(u)
        )));
    }
    for (l, u) in y.yd_lower.iter().zip(&y.yd_upper) {
        if !l.is_integer() || !u.is_integer() {
            return Err(Error::Input("Y.yd bounds must be integers".into()));
        }
        if l > u {
            return Err(Error::Input("Y.yd lower bound exceeds upper bound".into()));
        }
    }
    Ok(())
}

pub(crate) fn affine(base: &[Scalar], coef: &Matrix, xi: &[bool]) -> Vec<Scalar> {
    let mut out = base.to_vec();
    for (j, &on) in xi.iter().enumerate() {
        if on {
            for i in 0..out.len() {
                out[i] += coef.at(i, j);
            }
        }
    }
    out
}

pub fn xi_scalars(xi: &[bool]) -> Vec<Scalar> {
    xi.iter().map(|&b| rat(b as i64)).collect()
}

/// Lexicographically ordered integer points of `[lower, upper]`.
pub(crate) fn integer_box_points(
    lower: &[Scalar],
    upper: &[Scalar],
) -> Result<Vec<Vec<Scalar>>> {
    let n = lower.len();
    let mut count: usize = 1;
    for (l, u) in lower.iter().zip(upper) {
        let span = (u - l + rat(1)).to_integer();
        let span: usize = span
            .try_into()
            .map_err(|_| Error::LimitExceeded("integer box too large".into()))?;
        count = count
            .checked_mul(span)
            .filter(|&c| c <= ENUMERATION_CAP)
            .ok_or_else(|| Error::LimitExceeded("integer box too large".into()))?;
    }
    let mut out = Vec::with_capacity(count);
    let mut point: Vec<Scalar> = lower.to_vec();
    loop {
        out.push(point.clone());
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if point[k] < upper[k] {
                point[k] += rat(1);
                for kk in k + 1..n {
                    point[kk] = lower[kk].clone();
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_expansion_lex_order() {
        let xi = XiSet::budget(3, 1).unwrap();
        let pts: Vec<Vec<bool>> = xi.points().to_vec();
        assert_eq!(
            pts,
            vec![
                vec![false, false, false],
                vec![false, false, true],
                vec![false, true, false],
                vec![true, false, false],
            ]
        );
        assert_eq!(xi.lex_min(), &vec![false, false, false]);
    }

    #[test]
    fn budget_cap_enforced() {
        assert!(XiSet::budget(17, 3).is_err());
    }

    #[test]
    fn integer_box_enumeration() {
        let pts = integer_box_points(&crate::linalg::ivec(&[0, -1]), &crate::linalg::ivec(&[1, 0]))
            .unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0], crate::linalg::ivec(&[0, -1]));
        assert_eq!(pts[3], crate::linalg::ivec(&[1, 0]));
    }

    #[test]
    fn empty_box_is_single_point() {
        let pts = integer_box_points(&[], &[]).unwrap();
        assert_eq!(pts, vec![Vec::<Scalar>::new()]);
    }
}
