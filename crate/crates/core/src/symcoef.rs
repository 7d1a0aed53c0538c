//! Exact symbolic coefficients.
//!
//! A [`ScalarExpr`] is a rational-weighted sum of monomials in the atoms
//! `sin(t)`, `cos(t)` and `lncos(t)` of named angles. `tan` and `sec` are not
//! atoms: they are normalized on construction to `sin * cos^-1` and `cos^-1`.
//! The representation is a closed normal form, so structural equality is
//! semantic equality within the ring (no trigonometric identities are applied).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};

/// Name of one UCC amplitude.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AngleId(Arc<str>);

impl AngleId {
    pub fn new(label: impl AsRef<str>) -> Self {
        AngleId(Arc::from(label.as_ref()))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for AngleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for AngleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AngleId {
    fn from(s: &str) -> Self {
        AngleId::new(s)
    }
}

/// Numeric values for angles.
pub type Assignment = BTreeMap<AngleId, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    LnCos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::LnCos => "lncos",
        }
    }
}

/// Product of atoms raised to integer powers. Zero exponents never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(BTreeMap<(AngleId, Func), i32>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial::default()
    }

    pub fn atom(angle: &AngleId, func: Func, exp: i32) -> Self {
        let mut m = Monomial::default();
        if exp != 0 {
            m.0.insert((angle.clone(), func), exp);
        }
        m
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&AngleId, Func, i32)> {
        self.0.iter().map(|((a, f), e)| (a, *f, *e))
    }

    pub fn exponent(&self, angle: &AngleId, func: Func) -> i32 {
        self.0.get(&(angle.clone(), func)).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (k, e) in &other.0 {
            let slot = out.entry(k.clone()).or_insert(0);
            *slot += e;
            if *slot == 0 {
                out.remove(k);
            }
        }
        Monomial(out)
    }

    pub fn pow(&self, k: i32) -> Monomial {
        if k == 0 {
            return Monomial::unit();
        }
        Monomial(self.0.iter().map(|(a, e)| (a.clone(), e * k)).collect())
    }

    fn eval(&self, cache: &AtomCache) -> f64 {
        self.0
            .iter()
            .map(|((a, f), e)| cache.value(a, *f).powi(*e))
            .product()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((a, func), e) in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{}({})", func.name(), a)?;
            if *e != 1 {
                write!(f, "^{}", e)?;
            }
        }
        Ok(())
    }
}

struct AtomCache(BTreeMap<AngleId, (f64, f64, f64)>);

impl AtomCache {
    fn build<'a>(angles: impl Iterator<Item = &'a AngleId>, assign: &Assignment) -> Result<Self> {
        let mut map = BTreeMap::new();
        for a in angles {
            if map.contains_key(a) {
                continue;
            }
            let theta = *assign
                .get(a)
                .ok_or_else(|| Error::UnassignedAngle(a.label().to_string()))?;
            check_domain(a, theta)?;
            let (s, c) = theta.sin_cos();
            map.insert(a.clone(), (s, c, c.ln()));
        }
        Ok(AtomCache(map))
    }

    fn value(&self, a: &AngleId, f: Func) -> f64 {
        let (s, c, l) = self.0[a];
        match f {
            Func::Sin => s,
            Func::Cos => c,
            Func::LnCos => l,
        }
    }
}

/// Rejects angles with |theta| >= pi/2, where the disentangled form diverges.
pub fn check_domain(angle: &AngleId, theta: f64) -> Result<()> {
    if !theta.is_finite() || theta.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::AngleOutOfDomain {
            label: angle.label().to_string(),
            value: theta,
        });
    }
    Ok(())
}

/// Exact symbolic scalar: sum of rational multiples of monomials.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ScalarExpr {
    terms: BTreeMap<Monomial, BigRational>,
}

impl ScalarExpr {
    pub fn zero() -> Self {
        ScalarExpr::default()
    }

    pub fn one() -> Self {
        ScalarExpr::int(1)
    }

    pub fn int(v: i64) -> Self {
        ScalarExpr::rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        ScalarExpr::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn rational(q: BigRational) -> Self {
        ScalarExpr::from_monomial(q, Monomial::unit())
    }

    pub fn from_monomial(q: BigRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(m, q);
        }
        ScalarExpr { terms }
    }

    fn atom(angle: &AngleId, func: Func, exp: i32) -> Self {
        ScalarExpr::from_monomial(BigRational::one(), Monomial::atom(angle, func, exp))
    }

    pub fn sin(angle: &AngleId) -> Self {
        ScalarExpr::atom(angle, Func::Sin, 1)
    }

    pub fn cos(angle: &AngleId) -> Self {
        ScalarExpr::atom(angle, Func::Cos, 1)
    }

    /// `cos(angle)^k`, with negative `k` giving secant powers.
    pub fn cos_pow(angle: &AngleId, k: i32) -> Self {
        ScalarExpr::atom(angle, Func::Cos, k)
    }

    pub fn tan(angle: &AngleId) -> Self {
        &ScalarExpr::sin(angle) * &ScalarExpr::cos_pow(angle, -1)
    }

    pub fn sec(angle: &AngleId) -> Self {
        ScalarExpr::cos_pow(angle, -1)
    }

    pub fn lncos(angle: &AngleId) -> Self {
        ScalarExpr::atom(angle, Func::LnCos, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, q)| m.is_unit() && q.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// The single monomial of this expression, if it has exactly one.
    pub fn as_monomial(&self) -> Option<(&BigRational, &Monomial)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, q)| (q, m))
        } else {
            None
        }
    }

    /// Plain rational value, when the expression has no atoms.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        match self.as_monomial() {
            Some((q, m)) if m.is_unit() => Some(q.clone()),
            _ => None,
        }
    }

    pub fn angles(&self) -> Vec<AngleId> {
        let mut out: Vec<AngleId> = self
            .terms
            .keys()
            .flat_map(|m| m.0.keys().map(|(a, _)| a.clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return ScalarExpr::zero();
        }
        ScalarExpr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    /// Integer power of a single monomial (negative powers allowed when the
    /// monomial has no `lncos` atom).
    pub fn monomial_pow(&self, k: i32) -> Option<Self> {
        let (q, m) = self.as_monomial()?;
        if k < 0 && m.0.keys().any(|(_, f)| *f == Func::LnCos) {
            return None;
        }
        let coeff = if k >= 0 {
            num_traits::pow(q.clone(), k as usize)
        } else {
            num_traits::pow(q.recip(), (-k) as usize)
        };
        Some(ScalarExpr::from_monomial(coeff, m.pow(k)))
    }

    pub fn powu(&self, k: u32) -> Self {
        let mut acc = ScalarExpr::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `exp(self)` when `self` is an integer combination of `lncos` atoms,
    /// i.e. `sum_k r_k lncos(t_k)`; the result is `prod_k cos(t_k)^r_k`.
    pub fn exp_of_lncos_combo(&self) -> Option<ScalarExpr> {
        let mut out = ScalarExpr::one();
        for (m, q) in &self.terms {
            if !q.is_integer() || m.0.len() != 1 {
                return None;
            }
            let ((angle, func), e) = m.0.iter().next()?;
            if *func != Func::LnCos || *e != 1 {
                return None;
            }
            let r = q.to_integer().to_i32()?;
            out = &out * &ScalarExpr::cos_pow(angle, r);
        }
        Some(out)
    }

    pub fn eval(&self, assign: &Assignment) -> Result<f64> {
        let angles = self.angles();
        let cache = AtomCache::build(angles.iter(), assign)?;
        Ok(self
            .terms
            .iter()
            .map(|(m, q)| rational_to_f64(q) * m.eval(&cache))
            .sum())
    }

    /// Structural equality, cross-checked numerically at eight random angle
    /// assignments in (-1.2, 1.2).
    pub fn equal(&self, other: &ScalarExpr) -> bool {
        let structural = self == other;
        let mut angles = self.angles();
        angles.extend(other.angles());
        angles.sort();
        angles.dedup();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0ef);
        let numeric = (0..8).all(|_| {
            let assign: Assignment = angles
                .iter()
                .map(|a| (a.clone(), rng.gen_range(-1.2..1.2)))
                .collect();
            let x = self.eval(&assign).unwrap_or(f64::NAN);
            let y = other.eval(&assign).unwrap_or(f64::NAN);
            (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs()))
        });
        debug_assert!(
            !structural || numeric,
            "structurally equal expressions disagree numerically"
        );
        structural && numeric
    }

    pub fn to_json(&self) -> serde_json::Value {
        let list: Vec<_> = self
            .terms
            .iter()
            .map(|(m, q)| {
                let atoms: Vec<_> = m
                    .atoms()
                    .map(|(a, f, e)| json!({"angle": a.label(), "func": f.name(), "exp": e}))
                    .collect();
                json!({"coeff": q.to_string(), "atoms": atoms})
            })
            .collect();
        serde_json::Value::Array(list)
    }

    fn merge_term(&mut self, m: Monomial, q: BigRational) {
        if q.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *slot += q;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
    })
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, q) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let sign = if q.is_negative() { "-" } else { "+" };
            write!(f, "({}{})", sign, q.abs())?;
            if !m.is_unit() {
                write!(f, " {}", m)?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &'a ScalarExpr) -> ScalarExpr {
        let mut out = self.clone();
        for (m, q) in &rhs.terms {
            out.merge_term(m.clone(), q.clone());
        }
        out
    }
}

impl<'a> Sub<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &'a ScalarExpr) -> ScalarExpr {
        let mut out = self.clone();
        for (m, q) in &rhs.terms {
            out.merge_term(m.clone(), -q.clone());
        }
        out
    }
}

impl<'a> Mul<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &'a ScalarExpr) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for (m1, q1) in &self.terms {
            for (m2, q2) in &rhs.terms {
                out.merge_term(m1.mul(m2), q1 * q2);
            }
        }
        out
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr {
            terms: self.terms.iter().map(|(m, q)| (m.clone(), -q.clone())).collect(),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $f(self, rhs: ScalarExpr) -> ScalarExpr {
                (&self).$f(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        -&self
    }
}
