//! The normalization loop. The working list holds single-term exponentials and
//! projection exponentials; the rightmost factor acts first on the reference.

use serde::Serialize;

use super::dress::{conjugate_by_projection, DressedAmplitude};
use crate::error::{Error, Result};
use crate::fockoracle::{reference_det, Det};
use crate::opalg::{commutator, product, AOperator, OperatorSum, OrbitalSpace, Site};
use crate::symcoef::ScalarExpr;

pub(crate) const STEP_BUDGET: usize = 100_000;
pub(crate) const ITEM_BUDGET: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Item {
    /// `exp(c op)` with `op` of rank at least one.
    Term(ScalarExpr, AOperator),
    /// `exp(sum zeta_k P_k)` over commuting pure projectors.
    Proj(OperatorSum),
}

impl Item {
    fn moved(&self) -> u64 {
        match self {
            Item::Term(_, op) => op.moved().fold(0, |m, p| m | 1 << p),
            Item::Proj(_) => 0,
        }
    }

    fn describe(&self) -> String {
        match self {
            Item::Term(c, op) => format!("exp([{}] {})", c, op),
            Item::Proj(z) => format!("exp({})", z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    DropAnnihilating,
    StripProjector,
    ScalarFromProjection,
    Commute,
    Exchange,
    DressByProjection,
    Merge,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub rule: Rule,
    pub detail: String,
}

/// Structured record of a conversion.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub steps: Vec<Step>,
    pub exchanges: usize,
    pub dropped: usize,
    pub edge_cases: Vec<String>,
    pub notes: Vec<String>,
}

impl Diagnostics {
    fn record(&mut self, rule: Rule, detail: String) {
        match rule {
            Rule::Exchange | Rule::DressByProjection | Rule::Commute => self.exchanges += 1,
            Rule::DropAnnihilating => self.dropped += 1,
            _ => {}
        }
        self.steps.push(Step { rule, detail });
    }
}

pub(crate) struct Engine {
    space: OrbitalSpace,
    reference: Det,
    pub items: Vec<Item>,
    pub prefactor: ScalarExpr,
    pub diag: Diagnostics,
}

/// Reduction of one string given which orbitals still sit at their reference
/// occupation: `None` if it annihilates the state, else the string with those
/// projectors removed.
fn reduce_op(op: &AOperator, touched: u64, reference: Det) -> Option<AOperator> {
    let mut number = Vec::new();
    let mut hole = Vec::new();
    for p in op.support() {
        let site = op.site(p).unwrap();
        if touched >> p & 1 == 1 {
            match site {
                Site::Number => number.push(p),
                Site::Hole => hole.push(p),
                _ => {}
            }
            continue;
        }
        let occ = reference >> p & 1 == 1;
        let alive = match site {
            Site::Create | Site::Hole => !occ,
            Site::Annihilate | Site::Number => occ,
        };
        if !alive {
            return None;
        }
    }
    Some(op.with_projectors(number, hole))
}

impl Engine {
    pub fn new(space: OrbitalSpace, items: Vec<Item>) -> Self {
        Engine {
            space,
            reference: reference_det(&space),
            items,
            prefactor: ScalarExpr::one(),
            diag: Diagnostics::default(),
        }
    }

    /// Evaluates every projector on orbitals that no factor to its right can
    /// have moved, dropping factors that annihilate the incoming state.
    fn reduce(&mut self) -> Result<()> {
        let mut touched = 0u64;
        let mut kept = Vec::with_capacity(self.items.len());
        for item in std::mem::take(&mut self.items).into_iter().rev() {
            match item {
                Item::Term(c, op) => match reduce_op(&op, touched, self.reference) {
                    None => self.diag.record(Rule::DropAnnihilating, format!("exp([{}] {})", c, op)),
                    Some(r) => {
                        if r != op {
                            self.diag.record(Rule::StripProjector, format!("{} -> {}", op, r));
                        }
                        let it = Item::Term(c, r);
                        touched |= it.moved();
                        kept.push(it);
                    }
                },
                Item::Proj(z) => {
                    let mut rest = OperatorSum::zero();
                    let mut scalar = ScalarExpr::zero();
                    for (p, zeta) in z.terms() {
                        match reduce_op(p, touched, self.reference) {
                            None => {}
                            Some(r) if r.is_identity() => scalar = &scalar + zeta,
                            Some(r) => rest.add_term(zeta.clone(), r),
                        }
                    }
                    if !scalar.is_zero() {
                        let factor = scalar.exp_of_lncos_combo().ok_or_else(|| {
                            Error::NormalizationStuck(format!("scalar exponent {} is not a sum of log-cosines", scalar))
                        })?;
                        self.diag.record(Rule::ScalarFromProjection, format!("{}", factor));
                        self.prefactor = &self.prefactor * &factor;
                    }
                    if !rest.is_empty() {
                        kept.push(Item::Proj(rest));
                    }
                }
            }
        }
        kept.reverse();
        self.items = kept;
        Ok(())
    }

    fn is_settled(&self, item: &Item) -> bool {
        matches!(item, Item::Term(_, op) if op.is_excitation_type(&self.space))
    }

    /// Moves every non-excitation factor to the right until it acts on the
    /// reference and disappears.
    pub fn run(&mut self) -> Result<()> {
        let mut steps = 0usize;
        loop {
            self.reduce()?;
            let Some(j) = self.items.iter().rposition(|it| !self.is_settled(it)) else {
                return Ok(());
            };
            steps += 1;
            if steps > STEP_BUDGET || self.items.len() > ITEM_BUDGET {
                return Err(Error::NormalizationStuck(format!(
                    "budget exhausted after {} exchanges with {} factors",
                    steps,
                    self.items.len()
                )));
            }
            let Some(Item::Term(beta, b)) = self.items.get(j + 1).cloned() else {
                return Err(Error::NormalizationStuck(format!(
                    "factor {} is not followed by an excitation",
                    self.items[j].describe()
                )));
            };
            let left = self.items[j].clone();
            let moved: Vec<(ScalarExpr, AOperator)> = match &left {
                Item::Term(alpha, a) => {
                    let out = push_term(&self.space, alpha, a, &beta, &b).map_err(|e| match e {
                        Error::EdgeCaseMutualMatch { left, right } => {
                            self.diag.edge_cases.push(format!("{} / {}", left, right));
                            Error::NormalizationStuck(format!("mutual match between {} and {}", left, right))
                        }
                        other => other,
                    })?;
                    let rule = if out.len() == 1 && out[0] == (beta.clone(), b.clone()) {
                        Rule::Commute
                    } else {
                        Rule::Exchange
                    };
                    self.diag.record(rule, format!("{} past exp([{}] {})", left.describe(), beta, b));
                    out
                }
                Item::Proj(z) => {
                    let zs: Vec<(ScalarExpr, AOperator)> = z.terms().map(|(p, c)| (c.clone(), p.clone())).collect();
                    let out = conjugate_by_projection(&zs, &beta, &b)?;
                    self.diag.record(Rule::DressByProjection, format!("{} past exp([{}] {})", left.describe(), beta, b));
                    out
                }
            };
            let mut replacement: Vec<Item> = moved.into_iter().map(|(c, op)| Item::Term(c, op)).collect();
            replacement.push(left);
            self.items.splice(j..=j + 1, replacement);
        }
    }

    /// Groups adjacent mutually commuting factors into single exponentials and
    /// resolves projector-dressed terms into sector amplitudes.
    pub fn finalize(&mut self) -> Vec<Vec<(AOperator, DressedAmplitude)>> {
        let mut groups: Vec<Vec<(ScalarExpr, AOperator)>> = Vec::new();
        for item in &self.items {
            let Item::Term(c, op) = item else { unreachable!("run leaves only excitation terms") };
            let fits = groups
                .last()
                .is_some_and(|g| g.iter().all(|(_, o)| commutator(o, op).is_empty()));
            if fits {
                groups.last_mut().unwrap().push((c.clone(), op.clone()));
            } else {
                groups.push(vec![(c.clone(), op.clone())]);
            }
        }
        let mut out = Vec::new();
        for g in groups {
            if g.len() > 1 {
                self.diag.record(Rule::Merge, format!("{} commuting terms", g.len()));
            }
            let mut by_core: std::collections::BTreeMap<AOperator, Vec<(ScalarExpr, AOperator)>> = Default::default();
            for (c, op) in g {
                by_core.entry(op.core()).or_default().push((c, op));
            }
            let factor: Vec<(AOperator, DressedAmplitude)> = by_core
                .into_iter()
                .map(|(core, terms)| (core, DressedAmplitude::from_terms(&terms)))
                .filter(|(_, d)| !(d.is_plain() && d.base.is_zero()))
                .collect();
            if !factor.is_empty() {
                out.push(factor);
            }
        }
        out
    }
}

/// `exp(alpha A) exp(beta B) = [exp(x_1) .. exp(x_m)] exp(alpha A)`, returning
/// the `x_k`. Uses `A^2 = B^2 = 0`, so the conjugated exponent is
/// `B + alpha [A, B] - alpha^2 A B A` and its exponential is linear.
pub(crate) fn push_term(
    space: &OrbitalSpace,
    alpha: &ScalarExpr,
    a: &AOperator,
    beta: &ScalarExpr,
    b: &AOperator,
) -> Result<Vec<(ScalarExpr, AOperator)>> {
    if commutator(a, b).is_empty() {
        return Ok(vec![(beta.clone(), b.clone())]);
    }
    let mut conj = OperatorSum::term(beta.clone(), b.clone());
    conj = conj.add(&commutator(a, b).scale(&(alpha * beta)));
    if let Some((s1, ab)) = product(a, b) {
        if let Some((s2, aba)) = product(&ab, a) {
            let k = (alpha * alpha) * beta.clone();
            conj.add_term(k.scale_int(-(s1 as i64) * (s2 as i64)), aba);
        }
    }
    let conj = conj.coalesce_sectors();
    let terms: Vec<(ScalarExpr, AOperator)> = conj.terms().map(|(op, c)| (c.clone(), op.clone())).collect();
    let mutual = || Error::EdgeCaseMutualMatch {
        left: a.to_string(),
        right: b.to_string(),
    };
    if terms.iter().any(|(_, op)| op.rank() == 0) {
        return Err(mutual());
    }
    order_nilpotent(space, terms).ok_or_else(mutual)
}

/// Orders terms so that every left-right pair multiplies to zero; then the
/// product of the single exponentials equals `1 + sum`. Falls back to any order
/// when all terms commute.
fn order_nilpotent(
    space: &OrbitalSpace,
    mut terms: Vec<(ScalarExpr, AOperator)>,
) -> Option<Vec<(ScalarExpr, AOperator)>> {
    let mut out = Vec::with_capacity(terms.len());
    let snapshot = terms.clone();
    while !terms.is_empty() {
        let ok = |k: usize| {
            terms
                .iter()
                .enumerate()
                .all(|(l, (_, op))| l == k || product(&terms[k].1, op).is_none())
        };
        let candidates: Vec<usize> = (0..terms.len()).filter(|&k| ok(k)).collect();
        let Some(&k) = candidates
            .iter()
            .find(|&&k| terms[k].1.is_excitation_type(space))
            .or(candidates.first())
        else {
            let all_commute = snapshot
                .iter()
                .enumerate()
                .all(|(k, (_, x))| snapshot[k + 1..].iter().all(|(_, y)| commutator(x, y).is_empty()));
            return all_commute.then_some(snapshot);
        };
        out.push(terms.remove(k));
    }
    Some(out)
}
