//! Single-factor identities: pseudospin pieces, the closed Euler form and the
//! two disentangled orderings of one unitary factor.
//!
//! Everything is kept in real form. For `T` a pure excitation, `T T† = P+` and
//! `T† T = P-` with `P+` projecting onto "excited" occupations of the factor's
//! orbitals and `P-` onto "reference" occupations.

use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::opalg::{adjoint, make_excitation, projector, AOperator, OperatorSum, OrbitalSpace};
use crate::symcoef::{AngleId, ScalarExpr};

/// One factor `exp(theta (T - T†))` of a factorized unitary ansatz.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct UCCFactor {
    pub angle: AngleId,
    excitation: AOperator,
}

impl UCCFactor {
    pub fn new(space: &OrbitalSpace, angle: AngleId, occ: &[usize], virt: &[usize]) -> Result<Self> {
        Ok(UCCFactor {
            angle,
            excitation: make_excitation(space, occ, virt)?,
        })
    }

    /// Wraps an existing string. It must be a projector-free excitation.
    pub fn from_excitation(angle: AngleId, excitation: AOperator) -> Result<Self> {
        if excitation.rank() == 0 || excitation.has_projectors() {
            return Err(Error::NonCanonicalInput(format!(
                "{} is not a pure excitation",
                excitation
            )));
        }
        Ok(UCCFactor { angle, excitation })
    }

    pub fn excitation(&self) -> &AOperator {
        &self.excitation
    }

    pub fn occ(&self) -> &[usize] {
        self.excitation.annihilate()
    }

    pub fn virt(&self) -> &[usize] {
        self.excitation.create()
    }

    pub fn rank(&self) -> usize {
        self.excitation.rank()
    }

    pub fn with_angle(&self, angle: AngleId) -> Self {
        UCCFactor {
            angle,
            excitation: self.excitation.clone(),
        }
    }

    /// `T` as a one-term sum.
    pub fn t(&self) -> OperatorSum {
        OperatorSum::term(ScalarExpr::one(), self.excitation.clone())
    }

    /// `T†` as a one-term sum, sign absorbed into the coefficient.
    pub fn t_dagger(&self) -> OperatorSum {
        let (s, op) = adjoint(&self.excitation);
        OperatorSum::term(ScalarExpr::int(s as i64), op)
    }

    /// `prod n_virt prod (1 - n_occ)` over the factor's orbitals.
    pub fn p_plus(&self) -> AOperator {
        projector(self.virt(), self.occ()).expect("occ and virt are disjoint")
    }

    /// `prod n_occ prod (1 - n_virt)` over the factor's orbitals.
    pub fn p_minus(&self) -> AOperator {
        projector(self.occ(), self.virt()).expect("occ and virt are disjoint")
    }
}

impl fmt::Display for UCCFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({} ({} - h.c.))", self.angle, self.excitation)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    Identity,
    Excitation,
    DeExcitation,
    Projection,
    Mixed,
}

/// `exp(exponent)` with a canonical operator-sum exponent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpFactor {
    pub exponent: OperatorSum,
}

impl ExpFactor {
    pub fn new(exponent: OperatorSum) -> Self {
        ExpFactor { exponent }
    }

    pub fn single(coeff: ScalarExpr, op: AOperator) -> Self {
        ExpFactor::new(OperatorSum::term(coeff, op))
    }

    pub fn is_identity(&self) -> bool {
        self.exponent.is_empty()
    }

    /// Excitation and de-excitation allow projector dressing on each term.
    pub fn kind(&self, space: &OrbitalSpace) -> FactorKind {
        if self.exponent.is_empty() {
            return FactorKind::Identity;
        }
        let ops: Vec<&AOperator> = self.exponent.terms().map(|(op, _)| op).collect();
        if ops.iter().all(|op| op.is_projection()) {
            FactorKind::Projection
        } else if ops.iter().all(|op| op.is_excitation_type(space)) {
            FactorKind::Excitation
        } else if ops.iter().all(|op| {
            op.rank() > 0
                && op.create().iter().all(|&p| space.is_occupied(p))
                && op.annihilate().iter().all(|&p| !space.is_occupied(p))
        }) {
            FactorKind::DeExcitation
        } else {
            FactorKind::Mixed
        }
    }
}

impl fmt::Display for ExpFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.exponent)
    }
}

/// `(P+ - P-) / 2`.
pub fn sz_of(f: &UCCFactor) -> OperatorSum {
    let mut s = OperatorSum::zero();
    s.add_term(ScalarExpr::ratio(1, 2), f.p_plus());
    s.add_term(ScalarExpr::ratio(-1, 2), f.p_minus());
    s
}

/// `1 + sin(theta) (T - T†) + (cos(theta) - 1)(T T† + T† T)`.
pub fn euler_form(f: &UCCFactor) -> OperatorSum {
    let sin = ScalarExpr::sin(&f.angle);
    let cos_m1 = &ScalarExpr::cos(&f.angle) - &ScalarExpr::one();
    let mut s = OperatorSum::identity();
    s = s.add(&f.t().sub(&f.t_dagger()).scale(&sin));
    s.add_term(cos_m1.clone(), f.p_plus());
    s.add_term(cos_m1, f.p_minus());
    s
}

fn projection_factor(f: &UCCFactor, sign: i64) -> ExpFactor {
    let l = ScalarExpr::lncos(&f.angle).scale_int(sign);
    let mut s = OperatorSum::zero();
    s.add_term(l.scale_int(-1), f.p_plus());
    s.add_term(l, f.p_minus());
    ExpFactor::new(s)
}

/// `[exp(tan T), exp(-lncos (P+ - P-)), exp(-tan T†)]`, leftmost applied last.
pub fn disentangle(f: &UCCFactor) -> [ExpFactor; 3] {
    let tan = ScalarExpr::tan(&f.angle);
    [
        ExpFactor::new(f.t().scale(&tan)),
        projection_factor(f, 1),
        ExpFactor::new(f.t_dagger().scale(&tan.scale_int(-1))),
    ]
}

/// `[exp(-tan T†), exp(+lncos (P+ - P-)), exp(tan T)]`.
pub fn disentangle_reversed(f: &UCCFactor) -> [ExpFactor; 3] {
    let tan = ScalarExpr::tan(&f.angle);
    [
        ExpFactor::new(f.t_dagger().scale(&tan.scale_int(-1))),
        projection_factor(f, -1),
        ExpFactor::new(f.t().scale(&tan)),
    ]
}

/// Two-level disentangling in the raising/lowering convention
/// `s+ = [[0,2],[0,0]]`, `s- = [[0,0],[2,0]]`, `sz = diag(1,-1)`.
pub mod su2 {
    use super::*;

    pub fn s_plus() -> Matrix2<Complex64> {
        Matrix2::new(0.0, 2.0, 0.0, 0.0).map(Complex64::from)
    }

    pub fn s_minus() -> Matrix2<Complex64> {
        Matrix2::new(0.0, 0.0, 2.0, 0.0).map(Complex64::from)
    }

    pub fn s_z() -> Matrix2<Complex64> {
        Matrix2::new(1.0, 0.0, 0.0, -1.0).map(Complex64::from)
    }

    /// `exp(-i theta (s+ + s-) / 2) = [[cos, -i sin], [-i sin, cos]]`.
    pub fn rotation(theta: f64) -> Matrix2<Complex64> {
        let (s, c) = theta.sin_cos();
        let ms = Complex64::new(0.0, -s);
        Matrix2::new(Complex64::from(c), ms, ms, Complex64::from(c))
    }

    /// Exponential of a nilpotent or diagonal 2x2 generator, in closed form.
    fn exp_of(m: Matrix2<Complex64>) -> Matrix2<Complex64> {
        if m[(0, 1)] == Complex64::from(0.0) && m[(1, 0)] == Complex64::from(0.0) {
            Matrix2::new(m[(0, 0)].exp(), 0.0.into(), 0.0.into(), m[(1, 1)].exp())
        } else {
            Matrix2::identity() + m
        }
    }

    /// Coefficients `(a, b, c)` as in `exp(a s+) exp(b sz) exp(c s-) = m`.
    pub fn solve_forward(m: &Matrix2<Complex64>) -> Option<(Complex64, Complex64, Complex64)> {
        let m11 = m[(1, 1)];
        if m11.norm() == 0.0 {
            return None;
        }
        let b = -m11.ln();
        let a = m[(0, 1)] / (m11 * 2.0);
        let c = m[(1, 0)] / (m11 * 2.0);
        let check = b.exp() + a * c * 4.0 * (-b).exp();
        ((check - m[(0, 0)]).norm() < 1e-12 * (1.0 + m[(0, 0)].norm())).then_some((a, b, c))
    }

    /// Coefficients `(a, b, c)` as in `exp(c s-) exp(b sz) exp(a s+) = m`.
    pub fn solve_reversed(m: &Matrix2<Complex64>) -> Option<(Complex64, Complex64, Complex64)> {
        let m00 = m[(0, 0)];
        if m00.norm() == 0.0 {
            return None;
        }
        let b = m00.ln();
        let a = m[(0, 1)] / (m00 * 2.0);
        let c = m[(1, 0)] / (m00 * 2.0);
        let check = a * c * 4.0 * b.exp() + (-b).exp();
        ((check - m[(1, 1)]).norm() < 1e-12 * (1.0 + m[(1, 1)].norm())).then_some((a, b, c))
    }

    pub fn forward_product(a: Complex64, b: Complex64, c: Complex64) -> Matrix2<Complex64> {
        exp_of(s_plus() * a) * exp_of(s_z() * b) * exp_of(s_minus() * c)
    }

    pub fn reversed_product(a: Complex64, b: Complex64, c: Complex64) -> Matrix2<Complex64> {
        exp_of(s_minus() * c) * exp_of(s_z() * b) * exp_of(s_plus() * a)
    }
}
