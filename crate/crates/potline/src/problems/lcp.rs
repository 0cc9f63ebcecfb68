//! Linear complementarity problems `w = My + q`.

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{serde_rat_vec, RatMatrix, RatVector, Rational};
use crate::error::PotlineError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcpInstance {
    #[serde(rename = "M")]
    pub m: RatMatrix,
    #[serde(with = "serde_rat_vec")]
    pub q: RatVector,
}

impl LcpInstance {
    pub fn new(m: RatMatrix, q: RatVector) -> Result<Self, PotlineError> {
        if !m.is_square() || m.rows() != q.len() {
            return Err(PotlineError::Dimension(format!(
                "M is {}x{}, q has length {}",
                m.rows(),
                m.cols(),
                q.len()
            )));
        }
        Ok(LcpInstance { m, q })
    }

    pub fn d(&self) -> usize {
        self.q.len()
    }

    pub fn w(&self, y: &[Rational]) -> RatVector {
        self.m.mul_vec(y).into_iter().zip(&self.q).map(|(a, b)| a + b).collect()
    }

    /// First violated condition of `y >= 0, w >= 0, y_i w_i = 0`, if any.
    pub fn solution_defect(&self, y: &[Rational]) -> Option<String> {
        if y.len() != self.d() {
            return Some(format!("y has length {} but d = {}", y.len(), self.d()));
        }
        let w = self.w(y);
        let mut defects = Vec::new();
        for i in 0..self.d() {
            if y[i].is_negative() {
                defects.push(format!("y{} = {} < 0", i + 1, y[i]));
            }
            if w[i].is_negative() {
                defects.push(format!("w{} = {} < 0", i + 1, w[i]));
            }
            if !(&y[i] * &w[i]).is_zero() {
                defects.push(format!("complementarity y{0}w{0} != 0 (y = {1}, w = {2})", i + 1, y[i], w[i]));
            }
        }
        (!defects.is_empty()).then(|| defects.join("; "))
    }

    pub fn is_solution(&self, y: &[Rational]) -> bool {
        self.solution_defect(y).is_none()
    }
}
