//! Determinant-basis simulator used as ground truth.
//!
//! Determinants are occupation bitmasks; bit `p` set means orbital `p` is
//! occupied. The sign of every elementary operator on orbital `p` is
//! `(-1)^(occupied orbitals below p)`. Nothing here goes through
//! canonicalization, so it checks the algebra independently.

use std::collections::BTreeMap;
use std::fmt::Debug;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identities::{ExpFactor, UCCFactor};
use crate::opalg::{AOperator, NumericSum, OperatorSum, OrbitalSpace};
use crate::symcoef::{check_domain, Assignment, ScalarExpr};

pub type Det = u64;

pub const PRUNE: f64 = 1e-15;
pub const DEFAULT_TOL: f64 = 1e-11;
pub const MAX_SERIES_TERMS: usize = 1000;
pub const MAX_DENSE_ORBITALS: usize = 14;
pub const MAX_SYMBOLIC_DETS: usize = 16;

pub fn reference_det(space: &OrbitalSpace) -> Det {
    if space.n_electrons == 64 {
        u64::MAX
    } else {
        (1u64 << space.n_electrons) - 1
    }
}

pub fn occupied(det: Det) -> Vec<usize> {
    (0..64).filter(|p| det >> p & 1 == 1).collect()
}

pub fn det_from_occ(occ: &[usize]) -> Det {
    occ.iter().fold(0, |d, &p| d | 1 << p)
}

fn parity_below(det: Det, p: usize) -> i8 {
    if (det & ((1u64 << p) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Action of one canonical string on one determinant.
pub fn apply_aop(op: &AOperator, det: Det) -> Option<(i8, Det)> {
    if op.number().iter().any(|&p| det >> p & 1 == 0) || op.hole().iter().any(|&p| det >> p & 1 == 1) {
        return None;
    }
    let mut d = det;
    let mut sign = 1i8;
    // a_{b_n} .. a_{b_1}: a_{b_1} acts first
    for &p in op.annihilate() {
        if d >> p & 1 == 0 {
            return None;
        }
        sign *= parity_below(d, p);
        d &= !(1u64 << p);
    }
    // a†_{a_1} .. a†_{a_n}: a†_{a_n} acts first
    for &p in op.create().iter().rev() {
        if d >> p & 1 == 1 {
            return None;
        }
        sign *= parity_below(d, p);
        d |= 1u64 << p;
    }
    Some((sign, d))
}

/// Ring of state-vector coefficients.
pub trait Coefficient: Clone + Debug {
    fn zero() -> Self;
    fn from_sign(s: i8) -> Self;
    fn is_negligible(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_sign(s: i8) -> Self {
        s as f64
    }
    fn is_negligible(&self) -> bool {
        self.abs() < PRUNE
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
}

impl Coefficient for ScalarExpr {
    fn zero() -> Self {
        ScalarExpr::zero()
    }
    fn from_sign(s: i8) -> Self {
        ScalarExpr::int(s as i64)
    }
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
}

/// Sparse state; negligible amplitudes are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<C> {
    pub space: OrbitalSpace,
    amps: BTreeMap<Det, C>,
}

impl<C: Coefficient> StateVector<C> {
    pub fn zero(space: OrbitalSpace) -> Self {
        StateVector {
            space,
            amps: BTreeMap::new(),
        }
    }

    pub fn basis(space: OrbitalSpace, det: Det) -> Self {
        let mut s = StateVector::zero(space);
        s.add(det, C::from_sign(1));
        s
    }

    pub fn reference(space: OrbitalSpace) -> Self {
        StateVector::basis(space, reference_det(&space))
    }

    pub fn add(&mut self, det: Det, c: C) {
        let merged = match self.amps.remove(&det) {
            Some(old) => old.plus(&c),
            None => c,
        };
        if !merged.is_negligible() {
            self.amps.insert(det, merged);
        }
    }

    pub fn get(&self, det: Det) -> Option<&C> {
        self.amps.get(&det)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Det, &C)> {
        self.amps.iter().map(|(d, c)| (*d, c))
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn scaled(&self, k: &C) -> Self {
        let mut out = StateVector::zero(self.space);
        for (d, c) in &self.amps {
            out.add(*d, c.times(k));
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, c) in &other.amps {
            out.add(*d, c.clone());
        }
        out
    }

    /// `sum_k c_k op_k |s>`.
    pub fn apply_terms<'a>(&self, terms: impl IntoIterator<Item = (C, &'a AOperator)>) -> Self {
        let mut out = StateVector::zero(self.space);
        for (k, op) in terms {
            for (d, c) in &self.amps {
                if let Some((sign, d2)) = apply_aop(op, *d) {
                    out.add(d2, c.times(&k).times(&C::from_sign(sign)));
                }
            }
        }
        out
    }
}

impl StateVector<f64> {
    pub fn norm(&self) -> f64 {
        self.amps.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.amps.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn amplitude(&self, det: Det) -> f64 {
        self.amps.get(&det).copied().unwrap_or(0.0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(StateJson {
            n_orbitals: self.space.n_orbitals,
            n_electrons: self.space.n_electrons,
            amplitudes: self
                .amps
                .iter()
                .map(|(d, c)| AmplitudeJson {
                    occ: occupied(*d),
                    coeff: *c,
                })
                .collect(),
        })
        .expect("state serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let js: StateJson = serde_json::from_value(v.clone())
            .map_err(|e| Error::NonCanonicalInput(format!("state vector json: {}", e)))?;
        let space = OrbitalSpace::new(js.n_orbitals, js.n_electrons)?;
        let mut s = StateVector::zero(space);
        for a in js.amplitudes {
            if let Some(&p) = a.occ.iter().find(|&&p| p >= space.n_orbitals) {
                return Err(Error::NonCanonicalInput(format!("orbital {} out of range", p)));
            }
            s.add(det_from_occ(&a.occ), a.coeff);
        }
        Ok(s)
    }
}

impl StateVector<ScalarExpr> {
    pub fn evaluate(&self, assign: &Assignment) -> Result<StateVector<f64>> {
        let mut out = StateVector::zero(self.space);
        for (d, c) in &self.amps {
            out.add(*d, c.eval(assign)?);
        }
        Ok(out)
    }

    fn guard(self) -> Result<Self> {
        if self.len() > MAX_SYMBOLIC_DETS {
            Err(Error::SymbolicTooLarge(self.len()))
        } else {
            Ok(self)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    n_orbitals: usize,
    n_electrons: usize,
    amplitudes: Vec<AmplitudeJson>,
}

#[derive(Serialize, Deserialize)]
struct AmplitudeJson {
    occ: Vec<usize>,
    coeff: f64,
}

pub fn apply_sum(sum: &NumericSum, s: &StateVector<f64>) -> StateVector<f64> {
    s.apply_terms(sum.iter().map(|(c, op)| (*c, op)))
}

pub fn apply_sum_symbolic(sum: &OperatorSum, s: &StateVector<ScalarExpr>) -> Result<StateVector<ScalarExpr>> {
    s.apply_terms(sum.terms().map(|(op, c)| (c.clone(), op))).guard()
}

/// `exp(theta (T - T†))` applied through its closed form.
pub fn apply_euler(f: &UCCFactor, theta: f64, s: &StateVector<f64>) -> Result<StateVector<f64>> {
    check_domain(&f.angle, theta)?;
    let (sin, cos) = theta.sin_cos();
    let none = Assignment::new();
    let mut terms: NumericSum = f.t().sub(&f.t_dagger()).evaluate(&none)?;
    for t in terms.iter_mut() {
        t.0 *= sin;
    }
    terms.push((cos - 1.0, f.p_plus()));
    terms.push((cos - 1.0, f.p_minus()));
    Ok(s.plus(&apply_sum(&terms, s)))
}

pub fn apply_euler_assigned(f: &UCCFactor, assign: &Assignment, s: &StateVector<f64>) -> Result<StateVector<f64>> {
    let theta = *assign
        .get(&f.angle)
        .ok_or_else(|| Error::UnassignedAngle(f.angle.to_string()))?;
    apply_euler(f, theta, s)
}

pub fn apply_euler_symbolic(f: &UCCFactor, s: &StateVector<ScalarExpr>) -> Result<StateVector<ScalarExpr>> {
    let form = crate::identities::euler_form(f);
    apply_sum_symbolic(&form, s)
}

/// Applies a factorized product, rightmost factor first.
pub fn apply_ucc_product(factors: &[UCCFactor], assign: &Assignment, s: &StateVector<f64>) -> Result<StateVector<f64>> {
    let mut cur = s.clone();
    for f in factors.iter().rev() {
        cur = apply_euler_assigned(f, assign, &cur)?;
    }
    Ok(cur)
}

/// `exp(G) |s>` by power series, stopping once a term's max-norm drops below
/// the pruning threshold.
pub fn apply_exp_series(generator: &NumericSum, s: &StateVector<f64>) -> Result<StateVector<f64>> {
    let mut acc = s.clone();
    let mut term = s.clone();
    for k in 1..=MAX_SERIES_TERMS {
        term = apply_sum(generator, &term).scaled(&(1.0 / k as f64));
        if term.is_empty() || term.max_abs() < PRUNE {
            return Ok(acc);
        }
        acc = acc.plus(&term);
    }
    Err(Error::SeriesDivergence(MAX_SERIES_TERMS))
}

/// Exact series for an exponent that is nilpotent on `s`.
pub fn apply_exp_series_symbolic(generator: &OperatorSum, s: &StateVector<ScalarExpr>) -> Result<StateVector<ScalarExpr>> {
    let mut acc = s.clone();
    let mut term = s.clone();
    for k in 1..=MAX_SERIES_TERMS {
        term = apply_sum_symbolic(generator, &term)?.scaled(&ScalarExpr::ratio(1, k as i64));
        if term.is_empty() {
            return acc.guard();
        }
        acc = acc.plus(&term).guard()?;
    }
    Err(Error::SeriesDivergence(MAX_SERIES_TERMS))
}

pub fn apply_exp_factor(f: &ExpFactor, assign: &Assignment, s: &StateVector<f64>) -> Result<StateVector<f64>> {
    apply_exp_series(&f.exponent.evaluate(assign)?, s)
}

/// Product of exponentials, rightmost applied first.
pub fn apply_exp_factors(factors: &[ExpFactor], assign: &Assignment, s: &StateVector<f64>) -> Result<StateVector<f64>> {
    let mut cur = s.clone();
    for f in factors.iter().rev() {
        cur = apply_exp_factor(f, assign, &cur)?;
    }
    Ok(cur)
}

fn dense_guard(n: usize) -> Result<usize> {
    if n > MAX_DENSE_ORBITALS {
        Err(Error::DimensionTooLarge(n))
    } else {
        Ok(1usize << n)
    }
}

/// Matrix over the whole Fock space, indexed by occupation bitmask.
pub fn dense_matrix_aop(op: &AOperator, n: usize) -> Result<DMatrix<i64>> {
    let dim = dense_guard(n)?;
    let mut m = DMatrix::zeros(dim, dim);
    if op.support().last().is_some_and(|&p| p >= n) {
        return Ok(m);
    }
    for col in 0..dim {
        if let Some((s, row)) = apply_aop(op, col as Det) {
            m[(row as usize, col)] += s as i64;
        }
    }
    Ok(m)
}

/// Integer matrix of a sum whose coefficients are all integers.
pub fn dense_matrix_exact(sum: &OperatorSum, n: usize) -> Result<DMatrix<i64>> {
    let dim = dense_guard(n)?;
    let mut m = DMatrix::zeros(dim, dim);
    for (op, c) in sum.terms() {
        let q = c
            .as_rational()
            .filter(|q| q.is_integer())
            .ok_or_else(|| Error::NonCanonicalInput(format!("coefficient {} is not an integer", c)))?;
        let k: i64 = q.to_integer().try_into().map_err(|_| Error::NonCanonicalInput("coefficient overflow".into()))?;
        m += dense_matrix_aop(op, n)? * k;
    }
    Ok(m)
}

pub fn dense_matrix_sum(sum: &NumericSum, n: usize) -> Result<DMatrix<f64>> {
    let dim = dense_guard(n)?;
    let mut m = DMatrix::zeros(dim, dim);
    for (c, op) in sum {
        m += dense_matrix_aop(op, n)?.map(|x| x as f64) * *c;
    }
    Ok(m)
}

/// Matrix of `exp(exponent)`, column by column through the series.
pub fn dense_matrix_exp(f: &ExpFactor, assign: &Assignment, n: usize) -> Result<DMatrix<f64>> {
    let dim = dense_guard(n)?;
    let generator = f.exponent.evaluate(assign)?;
    let space = OrbitalSpace::new(n, 0)?;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let out = apply_exp_series(&generator, &StateVector::basis(space, col as Det))?;
        for (d, c) in out.iter() {
            m[(d as usize, col)] = *c;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub max_abs_diff: f64,
    pub matched: bool,
}

/// Infinity-norm difference over the union of supports.
pub fn compare(a: &StateVector<f64>, b: &StateVector<f64>, tol: f64) -> Comparison {
    let mut diff: f64 = 0.0;
    for (d, c) in a.iter() {
        diff = diff.max((c - b.amplitude(d)).abs());
    }
    for (d, c) in b.iter() {
        if a.get(d).is_none() {
            diff = diff.max(c.abs());
        }
    }
    Comparison {
        max_abs_diff: diff,
        matched: diff <= tol,
    }
}
