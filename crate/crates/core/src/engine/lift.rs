//! Bound-augmented row systems used by the dualized worst-case problems.
//!
//! The model keeps finite upper bounds on continuous second-stage variables
//! as box bounds; the hand-dualized problems assume y_c >= 0 only. Both
//! views agree once the upper bounds are appended as explicit rows
//! `-y_c >= -u_c` with zero first-stage and uncertainty blocks. On
//! instances without continuous variables the augmentation is empty and
//! the row systems match the plain instance data.

use crate::linalg::Matrix;
use crate::model::{GeneralInstance, IndicatorInstance};
use crate::scalar::{rat, Scalar};

pub(crate) struct AugGeneral {
    pub t: Matrix,
    pub wc: Matrix,
    pub wd: Matrix,
    pub h0: Vec<Scalar>,
    pub h_xi: Matrix,
    pub m: usize,
}

pub(crate) fn augment_general(inst: &GeneralInstance) -> AugGeneral {
    let extra = inst.nc2;
    let mut neg_eye = Matrix::zeros(extra, inst.nc2);
    for j in 0..extra {
        neg_eye.set(j, j, rat(-1));
    }
    let mut h0 = inst.h0.clone();
    h0.extend(inst.y_bounds.yc_upper.iter().map(|u| -u.clone()));
    AugGeneral {
        t: inst.t.vstack(&Matrix::zeros(extra, inst.n1)).unwrap(),
        wc: inst.wc.vstack(&neg_eye).unwrap(),
        wd: inst.wd.vstack(&Matrix::zeros(extra, inst.nd2)).unwrap(),
        h0,
        h_xi: inst.h_xi.vstack(&Matrix::zeros(extra, inst.np)).unwrap(),
        m: inst.m + extra,
    }
}

pub(crate) struct AugIndicator {
    pub t: Matrix,
    pub w: Matrix,
    pub h0: Vec<Scalar>,
    pub m: usize,
}

pub(crate) fn augment_indicator(inst: &IndicatorInstance) -> AugIndicator {
    debug_assert_eq!(inst.nd2, 0, "dualized indicator problems need a continuous second stage");
    let n2 = inst.n2();
    let mut neg_eye = Matrix::zeros(n2, n2);
    for j in 0..n2 {
        neg_eye.set(j, j, rat(-1));
    }
    let mut h0 = inst.h0.clone();
    h0.extend(inst.y_bounds.yc_upper.iter().map(|u| -u.clone()));
    AugIndicator {
        t: inst.t.vstack(&Matrix::zeros(n2, inst.n1)).unwrap(),
        w: inst.w_full().vstack(&neg_eye).unwrap(),
        h0,
        m: inst.m + n2,
    }
}

/// Row penalty weights extended with zeros on the augmentation rows.
pub(crate) fn augmented_weights(inst: &IndicatorInstance, xi: &[bool]) -> Vec<Scalar> {
    let mut w = inst.row_weights(xi);
    w.extend(std::iter::repeat(Scalar::from_integer(0.into())).take(inst.n2()));
    w
}
