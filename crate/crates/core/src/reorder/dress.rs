//! Sector arithmetic: projection exponentials acting by similarity on a single
//! string, and the grouping of projector-dressed terms into amplitudes.

use std::fmt;

use serde_json::json;

use crate::error::{Error, Result};
use crate::opalg::{projector, AOperator};
use crate::symcoef::ScalarExpr;

/// Amplitude of one excitation core, possibly resolved by occupation sectors.
/// The effective coefficient in sector `s` is `base * weight_s`; the sector
/// projectors are mutually orthogonal and sum to the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DressedAmplitude {
    pub base: ScalarExpr,
    pub sectors: Vec<(AOperator, ScalarExpr)>,
}

impl DressedAmplitude {
    pub fn plain(base: ScalarExpr) -> Self {
        DressedAmplitude {
            base,
            sectors: vec![],
        }
    }

    pub fn is_plain(&self) -> bool {
        self.sectors.is_empty()
    }

    /// Expanded `(coefficient, core * sector)` terms; zero sectors omitted.
    pub fn to_terms(&self, core: &AOperator) -> Vec<(ScalarExpr, AOperator)> {
        if self.is_plain() {
            return vec![(self.base.clone(), core.clone())];
        }
        self.sectors
            .iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(p, w)| (&self.base * w, core.with_projectors(p.number().to_vec(), p.hole().to_vec())))
            .collect()
    }

    /// Builds the sector table of `sum_t c_t core Q_t`, where each `Q_t` is a
    /// projector on orbitals outside the core.
    pub fn from_terms(terms: &[(ScalarExpr, AOperator)]) -> Self {
        let mut orbitals: Vec<usize> = terms
            .iter()
            .flat_map(|(_, op)| op.number().iter().chain(op.hole()).copied())
            .collect();
        orbitals.sort_unstable();
        orbitals.dedup();
        if orbitals.is_empty() {
            let total = terms.iter().fold(ScalarExpr::zero(), |acc, (c, _)| &acc + c);
            return DressedAmplitude::plain(total);
        }
        let mut sectors = Vec::with_capacity(1 << orbitals.len());
        for mask in 0..(1usize << orbitals.len()) {
            let occ: Vec<usize> = orbitals.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &p)| p).collect();
            let emp: Vec<usize> = orbitals.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 0).map(|(_, &p)| p).collect();
            let w = terms
                .iter()
                .filter(|(_, op)| op.number().iter().all(|p| occ.contains(p)) && op.hole().iter().all(|p| emp.contains(p)))
                .fold(ScalarExpr::zero(), |acc, (c, _)| &acc + c);
            sectors.push((projector(&occ, &emp).expect("disjoint sets"), w));
        }
        normalize_sectors(sectors)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "base": self.base.to_string(),
            "sectors": self.sectors.iter().map(|(p, w)| json!({"projector": p.to_string(), "weight": w.to_string()})).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for DressedAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.base)?;
        if !self.is_plain() {
            let parts: Vec<String> = self.sectors.iter().map(|(p, w)| format!("{}: {}", p, w)).collect();
            write!(f, " {{{}}}", parts.join(", "))?;
        }
        Ok(())
    }
}

/// Merges sectors that differ in one orbital and carry equal weight, then
/// pulls the common monomial factor into the base.
pub(crate) fn normalize_sectors(mut sectors: Vec<(AOperator, ScalarExpr)>) -> DressedAmplitude {
    loop {
        let mut hit = None;
        'outer: for i in 0..sectors.len() {
            for j in 0..sectors.len() {
                if i != j && sectors[i].1 == sectors[j].1 {
                    if let Some(joined) = merge_projectors(&sectors[i].0, &sectors[j].0) {
                        hit = Some((i, j, joined));
                        break 'outer;
                    }
                }
            }
        }
        match hit {
            Some((i, j, joined)) => {
                let w = sectors[i].1.clone();
                let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                sectors.remove(hi);
                sectors.remove(lo);
                sectors.push((joined, w));
            }
            None => break,
        }
    }
    sectors.sort_by(|a, b| a.0.cmp(&b.0));
    if sectors.len() == 1 {
        return DressedAmplitude::plain(sectors.pop().unwrap().1);
    }
    let base = common_factor(sectors.iter().map(|(_, w)| w));
    if let Some(inv) = base.monomial_pow(-1) {
        for s in sectors.iter_mut() {
            s.1 = &s.1 * &inv;
        }
    }
    DressedAmplitude { base, sectors }
}

/// `X n_p` and `X (1-n_p)` join to `X`.
fn merge_projectors(a: &AOperator, b: &AOperator) -> Option<AOperator> {
    for &p in a.number() {
        if b.hole().contains(&p) {
            let mut an: Vec<usize> = a.number().to_vec();
            an.retain(|&q| q != p);
            let mut bh: Vec<usize> = b.hole().to_vec();
            bh.retain(|&q| q != p);
            if an == b.number() && a.hole() == bh.as_slice() {
                return projector(&an, a.hole());
            }
        }
    }
    None
}

/// Largest monomial dividing every nonzero weight, with a shared rational.
fn common_factor<'a>(weights: impl Iterator<Item = &'a ScalarExpr>) -> ScalarExpr {
    let nonzero: Vec<&ScalarExpr> = weights.filter(|w| !w.is_zero()).collect();
    let Some(first) = nonzero.first() else {
        return ScalarExpr::one();
    };
    let Some((q0, m0)) = first.as_monomial() else {
        return ScalarExpr::one();
    };
    let mut shared_q = true;
    let mut atoms: Vec<_> = m0.atoms().map(|(a, f, e)| (a.clone(), f, e)).collect();
    for w in &nonzero[1..] {
        let Some((qw, mw)) = w.as_monomial() else {
            return ScalarExpr::one();
        };
        shared_q &= qw == q0;
        atoms.retain(|(a, f, e)| mw.exponent(a, *f) == *e);
    }
    let mut m = crate::symcoef::Monomial::unit();
    for (a, f, e) in atoms {
        m = m.mul(&crate::symcoef::Monomial::atom(&a, f, e));
    }
    let q = if shared_q { q0.clone() } else { num_rational::BigRational::from_integer(1.into()) };
    ScalarExpr::from_monomial(q, m)
}

/// Similarity transform `exp(Z) B exp(-Z)` for `Z = sum_k zeta_k P_k` with
/// commuting projectors `P_k`, resolved on the orbitals of `Z` that `B` does
/// not touch. Each `zeta_k` must be an integer combination of `lncos` atoms.
pub(crate) fn conjugate_by_projection(
    proj: &[(ScalarExpr, AOperator)],
    coeff: &ScalarExpr,
    op: &AOperator,
) -> Result<Vec<(ScalarExpr, AOperator)>> {
    let b_support = op.support();
    let mut free: Vec<usize> = proj
        .iter()
        .flat_map(|(_, p)| p.support())
        .filter(|q| !b_support.contains(q))
        .collect();
    free.sort_unstable();
    free.dedup();
    let mut sectors = Vec::with_capacity(1 << free.len());
    for mask in 0..(1usize << free.len()) {
        let occ_free = |q: usize| free.iter().position(|&f| f == q).map(|k| mask >> k & 1 == 1);
        let before = |q: usize| occ_free(q).or_else(|| op.required_before(q)).unwrap();
        let after = |q: usize| occ_free(q).or_else(|| op.occupation_after(q)).unwrap();
        let value = |p: &AOperator, occ: &dyn Fn(usize) -> bool| -> i64 {
            let on = p.number().iter().all(|&q| occ(q)) && p.hole().iter().all(|&q| !occ(q));
            on as i64
        };
        let mut exponent = ScalarExpr::zero();
        for (zeta, p) in proj {
            let shift = value(p, &after) - value(p, &before);
            if shift != 0 {
                exponent = &exponent + &zeta.scale_int(shift);
            }
        }
        let weight = if exponent.is_zero() {
            ScalarExpr::one()
        } else {
            exponent.exp_of_lncos_combo().ok_or_else(|| {
                Error::NormalizationStuck(format!("projection exponent {} is not a sum of log-cosines", exponent))
            })?
        };
        let occ: Vec<usize> = free.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &q)| q).collect();
        let emp: Vec<usize> = free.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 0).map(|(_, &q)| q).collect();
        sectors.push((projector(&occ, &emp).expect("disjoint sets"), weight));
    }
    let dressed = normalize_sectors(sectors);
    let mut out = Vec::new();
    for (c, sector) in DressedAmplitude::from_sectors_of(&dressed) {
        let mut number = op.number().to_vec();
        number.extend_from_slice(sector.number());
        let mut hole = op.hole().to_vec();
        hole.extend_from_slice(sector.hole());
        out.push((coeff * &c, op.with_projectors(number, hole)));
    }
    Ok(out)
}

impl DressedAmplitude {
    /// `(base * weight, projector)` pairs, or the identity projector when plain.
    fn from_sectors_of(d: &DressedAmplitude) -> Vec<(ScalarExpr, AOperator)> {
        if d.is_plain() {
            vec![(d.base.clone(), AOperator::identity())]
        } else {
            d.sectors.iter().filter(|(_, w)| !w.is_zero()).map(|(p, w)| (&d.base * w, p.clone())).collect()
        }
    }
}
