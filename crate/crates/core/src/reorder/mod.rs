//! Exponential reordering: exchange of adjacent factors, similarity by
//! projection exponentials, and the drive of a disentangled product into
//! excitation-only form against the reference.

mod dress;
mod engine;

use std::fmt;

use serde_json::json;

pub use dress::DressedAmplitude;
pub use engine::{Diagnostics, Rule, Step};

use crate::error::{Error, Result};
use crate::fockoracle::{apply_exp_factors, StateVector};
use crate::identities::{disentangle, ExpFactor, FactorKind, UCCFactor};
use crate::opalg::{commutator, AOperator, OperatorSum, OrbitalSpace};
use crate::symcoef::{AngleId, Assignment, ScalarExpr};
use engine::{Engine, Item};

/// Ordered product of exponentials; the leftmost factor acts last.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactorProduct {
    pub factors: Vec<ExpFactor>,
}

impl FactorProduct {
    /// Disentangles every factor of a factorized ansatz.
    pub fn from_ucc(factors: &[UCCFactor]) -> Self {
        FactorProduct {
            factors: factors.iter().flat_map(disentangle).collect(),
        }
    }

    pub fn apply(&self, assign: &Assignment, s: &StateVector<f64>) -> Result<StateVector<f64>> {
        apply_exp_factors(&self.factors, assign, s)
    }
}

impl fmt::Display for FactorProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// One exponential of the converted form: `exp(sum_core amplitude * core)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CCFactor {
    pub terms: Vec<(AOperator, DressedAmplitude)>,
}

impl CCFactor {
    pub fn to_exp(&self) -> ExpFactor {
        ExpFactor::new(
            self.terms
                .iter()
                .flat_map(|(core, d)| d.to_terms(core))
                .collect::<OperatorSum>(),
        )
    }
}

impl fmt::Display for CCFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(core, d)| format!("{} {}", d, core)).collect();
        write!(f, "exp({})", parts.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CCResult {
    pub space: OrbitalSpace,
    pub prefactor: ScalarExpr,
    pub factors: Vec<CCFactor>,
    pub excitation_factors: Vec<ExpFactor>,
    pub diagnostics: Diagnostics,
}

impl CCResult {
    /// `prefactor * prod exp(...) |ref>`.
    pub fn apply_to_reference(&self, assign: &Assignment) -> Result<StateVector<f64>> {
        let p = self.prefactor.eval(assign)?;
        Ok(apply_exp_factors(&self.excitation_factors, assign, &StateVector::reference(self.space))?.scaled(&p))
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "prefactor": self.prefactor.to_string(),
            "factors": self.factors.iter().map(|f| {
                f.terms.iter().map(|(core, d)| json!({"operator": core.to_string(), "amplitude": d.to_json()})).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
            "rendered": self.to_string(),
            "diagnostics": serde_json::to_value(&self.diagnostics).expect("diagnostics serialize"),
        })
    }
}

impl fmt::Display for CCResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "prefactor: {}", self.prefactor)?;
        for x in &self.factors {
            writeln!(f, "{}", x)?;
        }
        Ok(())
    }
}

fn single_term(f: &ExpFactor) -> Option<(ScalarExpr, AOperator)> {
    let mut it = f.exponent.terms();
    let (op, c) = it.next()?;
    it.next().is_none().then(|| (c.clone(), op.clone()))
}

fn pairwise_commuting(f: &ExpFactor) -> bool {
    let ops: Vec<&AOperator> = f.exponent.terms().map(|(op, _)| op).collect();
    ops.iter()
        .enumerate()
        .all(|(k, a)| ops[k + 1..].iter().all(|b| commutator(a, b).is_empty()))
}

fn to_items(space: &OrbitalSpace, f: &ExpFactor) -> Result<Vec<Item>> {
    match f.kind(space) {
        FactorKind::Identity => Ok(vec![]),
        FactorKind::Projection => Ok(vec![Item::Proj(f.exponent.clone())]),
        _ if pairwise_commuting(f) => {
            let mut items = Vec::new();
            for (op, c) in f.exponent.terms() {
                if op.rank() == 0 {
                    return Err(Error::NonCanonicalInput(format!("{} mixes projections with other terms", f)));
                }
                items.push(Item::Term(c.clone(), op.clone()));
            }
            Ok(items)
        }
        _ => Err(Error::NonCanonicalInput(format!("{} has non-commuting terms", f))),
    }
}

/// Exchanges `exp(left) exp(right)` into an equivalent product ending in
/// `exp(left)`. `left` must be a single nilpotent term or a projection sum;
/// `right` must consist of commuting nilpotent terms.
pub fn reorder_pair(left: &ExpFactor, right: &ExpFactor) -> Result<Vec<ExpFactor>> {
    let rights: Vec<(ScalarExpr, AOperator)> = right.exponent.terms().map(|(op, c)| (c.clone(), op.clone())).collect();
    if rights.iter().any(|(_, op)| op.rank() == 0) || !pairwise_commuting(right) {
        return Err(Error::NonCanonicalInput(format!("{} is not a product of commuting nilpotent terms", right)));
    }
    let all_commute = left
        .exponent
        .terms()
        .all(|(a, _)| rights.iter().all(|(_, b)| commutator(a, b).is_empty()));
    if all_commute {
        return Ok(vec![right.clone(), left.clone()]);
    }
    let is_projection = !left.is_identity() && left.exponent.terms().all(|(op, _)| op.rank() == 0);
    let mut out = Vec::new();
    for (beta, b) in &rights {
        let moved = if is_projection {
            let zs: Vec<(ScalarExpr, AOperator)> = left.exponent.terms().map(|(p, c)| (c.clone(), p.clone())).collect();
            dress::conjugate_by_projection(&zs, beta, b)?
        } else {
            let (alpha, a) = single_term(left).ok_or_else(|| {
                Error::NonCanonicalInput(format!("{} must be a single term or a projection", left))
            })?;
            if a.rank() == 0 {
                return Err(Error::NonCanonicalInput(format!("{} must be a single term or a projection", left)));
            }
            // rank is irrelevant to the exchange; any space works for ordering preferences
            let n = a.support().iter().chain(b.support().iter()).max().map_or(0, |m| m + 1);
            let space = OrbitalSpace::new(n, 0)?;
            engine::push_term(&space, &alpha, &a, beta, b)?
        };
        out.extend(moved.into_iter().map(|(c, op)| ExpFactor::single(c, op)));
    }
    out.push(left.clone());
    Ok(out)
}

/// `exp(Z) exp(right) = exp(right') exp(Z)` for a projection factor `Z`,
/// with `right'` carrying sector-resolved dressing.
pub fn push_projection(proj: &ExpFactor, right: &ExpFactor) -> Result<Vec<ExpFactor>> {
    if proj.exponent.terms().any(|(op, _)| op.rank() > 0) {
        return Err(Error::NonCanonicalInput(format!("{} is not a projection factor", proj)));
    }
    let zs: Vec<(ScalarExpr, AOperator)> = proj.exponent.terms().map(|(p, c)| (c.clone(), p.clone())).collect();
    let mut dressed = OperatorSum::zero();
    for (op, c) in right.exponent.terms() {
        for (w, o) in dress::conjugate_by_projection(&zs, c, op)? {
            dressed.add_term(w, o);
        }
    }
    Ok(vec![ExpFactor::new(dressed), proj.clone()])
}

/// A failed conversion with the diagnostics gathered up to the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct Stuck {
    pub error: Error,
    pub diagnostics: Box<Diagnostics>,
}

/// Drives a disentangled product into `prefactor * prod exp(excitations) |ref>`.
pub fn normalize_to_cc(p: &FactorProduct, space: &OrbitalSpace) -> Result<CCResult> {
    normalize_with_diagnostics(p, space).map_err(|s| s.error)
}

pub fn normalize_with_diagnostics(p: &FactorProduct, space: &OrbitalSpace) -> std::result::Result<CCResult, Stuck> {
    let mut items = Vec::new();
    for f in &p.factors {
        items.extend(to_items(space, f).map_err(|error| Stuck {
            error,
            diagnostics: Box::default(),
        })?);
    }
    let mut engine = Engine::new(*space, items);
    if let Err(error) = engine.run() {
        return Err(Stuck {
            error,
            diagnostics: Box::new(engine.diag),
        });
    }
    let groups = engine.finalize();
    let factors: Vec<CCFactor> = groups.into_iter().map(|terms| CCFactor { terms }).collect();
    let excitation_factors = factors.iter().map(CCFactor::to_exp).collect();
    Ok(CCResult {
        space: *space,
        prefactor: engine.prefactor,
        factors,
        excitation_factors,
        diagnostics: engine.diag,
    })
}

/// Disentangles and converts a factorized ansatz (rightmost factor acts first).
pub fn convert_ucc(factors: &[UCCFactor], space: &OrbitalSpace) -> Result<CCResult> {
    convert_with_diagnostics(factors, space).map_err(|s| s.error)
}

pub fn convert_with_diagnostics(factors: &[UCCFactor], space: &OrbitalSpace) -> std::result::Result<CCResult, Stuck> {
    let mut notes = Vec::new();
    for (k, a) in factors.iter().enumerate() {
        for b in &factors[k + 1..] {
            if a.rank() == 1 && b.rank() == 1 && a.excitation() != b.excitation() {
                let shared = (a.occ() == b.occ()) as u8 + (a.virt() == b.virt()) as u8;
                if shared == 1 {
                    notes.push(format!(
                        "singles {} and {} share an index: amplitudes use the sector-exact secant dressing, not a first-order log-cosine form",
                        a.angle, b.angle
                    ));
                }
            }
        }
    }
    match normalize_with_diagnostics(&FactorProduct::from_ucc(factors), space) {
        Ok(mut out) => {
            out.diagnostics.notes.extend(notes);
            Ok(out)
        }
        Err(mut stuck) => {
            stuck.diagnostics.notes.extend(notes);
            Err(stuck)
        }
    }
}

/// Angle label of the `M`-fold split of `angle`.
pub fn trotter_label(angle: &AngleId, m: usize) -> AngleId {
    if m == 1 {
        angle.clone()
    } else {
        AngleId::new(format!("{}/{}", angle, m))
    }
}

/// `M` repetitions of the sequence, each angle divided by `M`.
pub fn trotterize(t: &[UCCFactor], m: usize) -> Result<Vec<UCCFactor>> {
    if m == 0 {
        return Err(Error::NonCanonicalInput("Trotter step count must be positive".into()));
    }
    let one: Vec<UCCFactor> = t.iter().map(|f| f.with_angle(trotter_label(&f.angle, m))).collect();
    Ok(std::iter::repeat_n(one, m).flatten().collect())
}

/// Assignment for the labels produced by [`trotterize`].
pub fn trotter_assignment(t: &[UCCFactor], assign: &Assignment, m: usize) -> Result<Assignment> {
    let mut out = Assignment::new();
    for f in t {
        let theta = assign
            .get(&f.angle)
            .ok_or_else(|| Error::UnassignedAngle(f.angle.to_string()))?;
        out.insert(trotter_label(&f.angle, m), theta / m as f64);
    }
    Ok(out)
}
