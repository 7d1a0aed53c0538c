//! Generalized fermionic operator strings.
//!
//! An [`AOperator`] is the product
//!
//! ```text
//! A(a_1..a_n; b_1..b_n | c_1..c_m; d_1..d_m')
//!   = a†_{a_1} .. a†_{a_n} a_{b_n} .. a_{b_1} n_{c_1} .. n_{c_m} (1-n_{d_1}) .. (1-n_{d_m'})
//! ```
//!
//! kept in canonical form: the four index groups are pairwise disjoint and
//! strictly increasing. Every product of two canonical strings is again a
//! single canonical string (up to sign) or zero, because each orbital carries
//! one of the five single-site operators `1, a†, a, n, 1-n` and those are
//! closed under multiplication.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::symcoef::{Assignment, ScalarExpr};

/// Split of the spin orbitals into the reference-occupied block `0..n_electrons`
/// and the virtual block `n_electrons..n_orbitals`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OrbitalSpace {
    pub n_orbitals: usize,
    pub n_electrons: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitalKind {
    Occupied,
    Virtual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SpinOrbital {
    pub index: usize,
    pub kind: OrbitalKind,
}

impl OrbitalSpace {
    pub fn new(n_orbitals: usize, n_electrons: usize) -> Result<Self> {
        if n_electrons > n_orbitals || n_orbitals > 64 {
            return Err(Error::NonCanonicalInput(format!(
                "invalid orbital space: {} electrons in {} orbitals",
                n_electrons, n_orbitals
            )));
        }
        Ok(OrbitalSpace {
            n_orbitals,
            n_electrons,
        })
    }

    pub fn is_occupied(&self, p: usize) -> bool {
        p < self.n_electrons
    }

    pub fn orbital(&self, index: usize) -> Option<SpinOrbital> {
        (index < self.n_orbitals).then(|| SpinOrbital {
            index,
            kind: if self.is_occupied(index) {
                OrbitalKind::Occupied
            } else {
                OrbitalKind::Virtual
            },
        })
    }

    pub fn n_virtual(&self) -> usize {
        self.n_orbitals - self.n_electrons
    }

    /// Highest excitation rank reachable from the reference.
    pub fn max_rank(&self) -> usize {
        self.n_electrons.min(self.n_virtual())
    }
}

/// Single-site content of a canonical string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    Create,
    Annihilate,
    Number,
    Hole,
}

/// One elementary fermionic operator: `(orbital, is_creator)`.
pub(crate) type Elem = (usize, bool);

/// Unchecked index lists, in the same layout as [`AOperator`] but in any order
/// and with arbitrary coincidences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawOperator {
    pub create: Vec<usize>,
    pub annihilate: Vec<usize>,
    pub number: Vec<usize>,
    pub hole: Vec<usize>,
}

impl RawOperator {
    fn word(&self) -> Vec<Elem> {
        let mut w = Vec::new();
        w.extend(self.create.iter().map(|&p| (p, true)));
        w.extend(self.annihilate.iter().rev().map(|&p| (p, false)));
        for &p in &self.number {
            w.push((p, true));
            w.push((p, false));
        }
        for &p in &self.hole {
            w.push((p, false));
            w.push((p, true));
        }
        w
    }
}

/// Canonical operator string. Only constructible through canonicalization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AOperator {
    create: Vec<usize>,
    annihilate: Vec<usize>,
    number: Vec<usize>,
    hole: Vec<usize>,
}

impl AOperator {
    pub fn identity() -> Self {
        AOperator {
            create: vec![],
            annihilate: vec![],
            number: vec![],
            hole: vec![],
        }
    }

    pub fn create(&self) -> &[usize] {
        &self.create
    }
    pub fn annihilate(&self) -> &[usize] {
        &self.annihilate
    }
    pub fn number(&self) -> &[usize] {
        &self.number
    }
    pub fn hole(&self) -> &[usize] {
        &self.hole
    }

    /// Number of creators (equal to the number of annihilators).
    pub fn rank(&self) -> usize {
        self.create.len()
    }

    pub fn is_identity(&self) -> bool {
        *self == AOperator::identity()
    }

    /// No unpaired creators or annihilators.
    pub fn is_projection(&self) -> bool {
        self.create.is_empty()
    }

    pub fn has_projectors(&self) -> bool {
        !self.number.is_empty() || !self.hole.is_empty()
    }

    /// Every orbital the string acts on.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .create
            .iter()
            .chain(&self.annihilate)
            .chain(&self.number)
            .chain(&self.hole)
            .copied()
            .collect();
        s.sort_unstable();
        s
    }

    /// Orbitals whose occupation the string changes.
    pub fn moved(&self) -> impl Iterator<Item = usize> + '_ {
        self.create.iter().chain(&self.annihilate).copied()
    }

    pub fn site(&self, p: usize) -> Option<Site> {
        if self.create.binary_search(&p).is_ok() {
            Some(Site::Create)
        } else if self.annihilate.binary_search(&p).is_ok() {
            Some(Site::Annihilate)
        } else if self.number.binary_search(&p).is_ok() {
            Some(Site::Number)
        } else if self.hole.binary_search(&p).is_ok() {
            Some(Site::Hole)
        } else {
            None
        }
    }

    /// Occupation an orbital must have for the string not to vanish, if constrained.
    pub fn required_before(&self, p: usize) -> Option<bool> {
        self.site(p).map(|s| matches!(s, Site::Annihilate | Site::Number))
    }

    /// Occupation an orbital has after the string acts, if it is in the support.
    pub fn occupation_after(&self, p: usize) -> Option<bool> {
        self.site(p).map(|s| matches!(s, Site::Create | Site::Number))
    }

    /// Elementary operators in left-to-right order, projectors expanded as
    /// `n = a†a` and `1-n = a a†`.
    pub(crate) fn word(&self) -> Vec<Elem> {
        RawOperator {
            create: self.create.clone(),
            annihilate: self.annihilate.clone(),
            number: self.number.clone(),
            hole: self.hole.clone(),
        }
        .word()
    }

    pub fn to_raw(&self) -> RawOperator {
        RawOperator {
            create: self.create.clone(),
            annihilate: self.annihilate.clone(),
            number: self.number.clone(),
            hole: self.hole.clone(),
        }
    }

    /// Pure excitation: creators virtual, annihilators occupied, no projectors.
    pub fn is_pure_excitation(&self, space: &OrbitalSpace) -> bool {
        self.rank() > 0 && !self.has_projectors() && self.is_excitation_type(space)
    }

    pub fn is_pure_deexcitation(&self, space: &OrbitalSpace) -> bool {
        self.rank() > 0
            && !self.has_projectors()
            && self.create.iter().all(|&p| space.is_occupied(p))
            && self.annihilate.iter().all(|&p| !space.is_occupied(p))
    }

    /// Excitation, optionally with projection: the kind of term allowed in a
    /// coupled cluster exponent.
    pub fn is_excitation_type(&self, space: &OrbitalSpace) -> bool {
        self.rank() > 0
            && self.create.iter().all(|&p| !space.is_occupied(p))
            && self.annihilate.iter().all(|&p| space.is_occupied(p))
    }

    /// Same creators and annihilators with every projector removed.
    pub fn core(&self) -> AOperator {
        AOperator {
            create: self.create.clone(),
            annihilate: self.annihilate.clone(),
            number: vec![],
            hole: vec![],
        }
    }

    /// Replaces the projectors. The caller guarantees disjointness from the core.
    pub(crate) fn with_projectors(&self, number: Vec<usize>, hole: Vec<usize>) -> AOperator {
        let mut out = self.core();
        out.number = number;
        out.hole = hole;
        out.number.sort_unstable();
        out.hole.sort_unstable();
        out
    }

    fn sort_key(&self) -> (usize, &[usize], &[usize], &[usize], &[usize]) {
        (
            self.rank(),
            &self.create,
            &self.annihilate,
            &self.number,
            &self.hole,
        )
    }
}

impl PartialOrd for AOperator {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AOperator {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for AOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |prefix: char, xs: &[usize]| {
            xs.iter()
                .map(|p| format!("{}{}", prefix, p))
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "A({};{}|{};{})",
            join('a', &self.create),
            join('i', &self.annihilate),
            join('n', &self.number),
            join('h', &self.hole)
        )
    }
}

/// Builds the pure excitation `a†_{virt_1} .. a†_{virt_n} a_{occ_n} .. a_{occ_1}`.
pub fn make_excitation(space: &OrbitalSpace, occ: &[usize], virt: &[usize]) -> Result<AOperator> {
    let increasing = |xs: &[usize]| xs.windows(2).all(|w| w[0] < w[1]);
    if occ.is_empty() || occ.len() != virt.len() {
        return Err(Error::NonCanonicalInput(format!(
            "excitation needs equal nonzero counts, got {} occupied and {} virtual",
            occ.len(),
            virt.len()
        )));
    }
    if !increasing(occ) || !increasing(virt) {
        return Err(Error::NonCanonicalInput(
            "excitation indices must be strictly increasing".into(),
        ));
    }
    if let Some(&p) = occ.iter().find(|&&p| !space.is_occupied(p)) {
        return Err(Error::NonCanonicalInput(format!("orbital {} is not occupied", p)));
    }
    if let Some(&p) = virt
        .iter()
        .find(|&&p| space.is_occupied(p) || p >= space.n_orbitals)
    {
        return Err(Error::NonCanonicalInput(format!("orbital {} is not virtual", p)));
    }
    Ok(AOperator {
        create: virt.to_vec(),
        annihilate: occ.to_vec(),
        number: vec![],
        hole: vec![],
    })
}

/// Pure projector `prod n_c prod (1-n_d)`, or `None` when it vanishes.
pub fn projector(number: &[usize], hole: &[usize]) -> Option<AOperator> {
    let raw = RawOperator {
        number: number.to_vec(),
        hole: hole.to_vec(),
        ..RawOperator::default()
    };
    canonicalize(&raw, 1).map(|(_, op)| op)
}

/// Applies the contraction rules and sorts every index group, tracking the
/// fermionic sign. Returns `None` when the string vanishes.
pub fn canonicalize(raw: &RawOperator, sign: i8) -> Option<(i8, AOperator)> {
    if raw.create.len() != raw.annihilate.len() {
        return None;
    }
    canonicalize_word(&raw.word()).map(|(s, op)| (s * sign, op))
}

/// Reduces an arbitrary word of elementary operators with equal creator and
/// annihilator counts to a canonical string.
pub(crate) fn canonicalize_word(word: &[Elem]) -> Option<(i8, AOperator)> {
    // Stable sort by orbital: every swap of operators on distinct orbitals is
    // one anticommutation.
    let mut swaps = 0usize;
    for i in 0..word.len() {
        for j in (i + 1)..word.len() {
            if word[i].0 > word[j].0 {
                swaps += 1;
            }
        }
    }
    let mut sorted: Vec<Elem> = word.to_vec();
    sorted.sort_by_key(|e| e.0);

    // Per-orbital reduction; alternating sequences collapse to one site operator.
    let mut sites: Vec<(usize, Site)> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let p = sorted[i].0;
        let mut j = i;
        while j < sorted.len() && sorted[j].0 == p {
            if j > i && sorted[j].1 == sorted[j - 1].1 {
                return None;
            }
            j += 1;
        }
        let starts_creator = sorted[i].1;
        let odd = (j - i) % 2 == 1;
        let site = match (starts_creator, odd) {
            (true, true) => Site::Create,
            (true, false) => Site::Number,
            (false, true) => Site::Annihilate,
            (false, false) => Site::Hole,
        };
        sites.push((p, site));
        i = j;
    }

    // Projector blocks are even and move freely. The unpaired operators, now in
    // ascending orbital order, are permuted into creators-ascending followed by
    // annihilators-descending.
    let mut create = Vec::new();
    let mut annihilate = Vec::new();
    let mut number = Vec::new();
    let mut hole = Vec::new();
    let mut singles: Vec<(usize, bool)> = Vec::new();
    for (p, s) in sites {
        match s {
            Site::Create => {
                create.push(p);
                singles.push((p, true));
            }
            Site::Annihilate => {
                annihilate.push(p);
                singles.push((p, false));
            }
            Site::Number => number.push(p),
            Site::Hole => hole.push(p),
        }
    }
    if create.len() != annihilate.len() {
        return None;
    }
    let target_pos = |e: &(usize, bool)| -> usize {
        if e.1 {
            create.binary_search(&e.0).unwrap()
        } else {
            create.len() + (annihilate.len() - 1 - annihilate.binary_search(&e.0).unwrap())
        }
    };
    let positions: Vec<usize> = singles.iter().map(target_pos).collect();
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            if positions[i] > positions[j] {
                swaps += 1;
            }
        }
    }
    let sign = if swaps.is_multiple_of(2) { 1 } else { -1 };
    Some((
        sign,
        AOperator {
            create,
            annihilate,
            number,
            hole,
        },
    ))
}

/// Product `A B` as a signed canonical string, or `None` when it vanishes.
pub fn product(a: &AOperator, b: &AOperator) -> Option<(i8, AOperator)> {
    let mut w = a.word();
    w.extend(b.word());
    canonicalize_word(&w)
}

pub fn adjoint(op: &AOperator) -> (i8, AOperator) {
    let raw = RawOperator {
        create: op.annihilate.clone(),
        annihilate: op.create.clone(),
        number: op.number.clone(),
        hole: op.hole.clone(),
    };
    canonicalize(&raw, 1).expect("adjoint of a canonical string cannot vanish")
}

/// `A` matches `B` when A's creators lie among B's annihilators and A's
/// annihilators among B's creators.
pub fn matches(a: &AOperator, b: &AOperator) -> bool {
    a.create.iter().all(|p| b.annihilate.contains(p))
        && a.annihilate.iter().all(|p| b.create.contains(p))
}

fn shares(x: &[usize], y: &[usize]) -> bool {
    x.iter().any(|p| y.contains(p))
}

/// Cheap sufficient test for `[A, B] = 0`: a shared creator or annihilator
/// kills both orderings, and strings on disjoint orbitals commute.
pub fn commutes_trivially(a: &AOperator, b: &AOperator) -> bool {
    if shares(&a.create, &b.create) || shares(&a.annihilate, &b.annihilate) {
        return true;
    }
    let (sa, sb) = (a.support(), b.support());
    !shares(&sa, &sb)
}

/// Necessary condition for a nonzero commutator, as an index case analysis.
pub fn commutator_may_be_nonzero(a: &AOperator, b: &AOperator) -> bool {
    if commutes_trivially(a, b) {
        return false;
    }
    let in_b_any = |p: &usize| b.annihilate.contains(p) || b.number.contains(p) || b.hole.contains(p);
    let case1 = a.create.iter().any(in_b_any);
    let case2 = a
        .annihilate
        .iter()
        .any(|p| b.create.contains(p) || b.number.contains(p) || b.hole.contains(p));
    let in_b_moved = |p: &usize| b.create.contains(p) || b.annihilate.contains(p);
    let case3 = a.number.iter().any(in_b_moved);
    let case4 = a.hole.iter().any(in_b_moved);
    case1 || case2 || case3 || case4
}

/// Exact commutator `AB - BA`.
pub fn commutator(a: &AOperator, b: &AOperator) -> OperatorSum {
    let mut out = OperatorSum::zero();
    if commutes_trivially(a, b) {
        return out;
    }
    if let Some((s, op)) = product(a, b) {
        out.add_term(ScalarExpr::int(s as i64), op);
    }
    if let Some((s, op)) = product(b, a) {
        out.add_term(ScalarExpr::int(-(s as i64)), op);
    }
    out
}

/// Linear combination of canonical strings with symbolic coefficients.
/// Like terms are merged and zero terms dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OperatorSum {
    terms: BTreeMap<AOperator, ScalarExpr>,
}

impl OperatorSum {
    pub fn zero() -> Self {
        OperatorSum::default()
    }

    pub fn identity() -> Self {
        OperatorSum::term(ScalarExpr::one(), AOperator::identity())
    }

    pub fn term(coeff: ScalarExpr, op: AOperator) -> Self {
        let mut s = OperatorSum::zero();
        s.add_term(coeff, op);
        s
    }

    pub fn add_term(&mut self, coeff: ScalarExpr, op: AOperator) {
        if coeff.is_zero() {
            return;
        }
        let merged = match self.terms.get(&op) {
            Some(c) => c + &coeff,
            None => coeff,
        };
        if merged.is_zero() {
            self.terms.remove(&op);
        } else {
            self.terms.insert(op, merged);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Terms in deterministic (rank, a, b, c, d) order.
    pub fn terms(&self) -> impl Iterator<Item = (&AOperator, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, op: &AOperator) -> ScalarExpr {
        self.terms.get(op).cloned().unwrap_or_default()
    }

    pub fn scale(&self, k: &ScalarExpr) -> Self {
        let mut out = OperatorSum::zero();
        for (op, c) in &self.terms {
            out.add_term(c * k, op.clone());
        }
        out
    }

    pub fn add(&self, other: &OperatorSum) -> Self {
        let mut out = self.clone();
        for (op, c) in &other.terms {
            out.add_term(c.clone(), op.clone());
        }
        out
    }

    pub fn sub(&self, other: &OperatorSum) -> Self {
        self.add(&other.scale(&ScalarExpr::int(-1)))
    }

    pub fn mul(&self, other: &OperatorSum) -> Self {
        let mut out = OperatorSum::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((s, op)) = product(a, b) {
                    out.add_term((ca * cb).scale_int(s as i64), op);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &OperatorSum) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Merges `X n_p` and `X (1-n_p)` terms with equal coefficients into `X`.
    pub fn coalesce_sectors(&self) -> Self {
        let mut current = self.clone();
        loop {
            let mut merged = None;
            'search: for (op, c) in &current.terms {
                for (idx, &p) in op.number.iter().enumerate() {
                    let mut number = op.number.clone();
                    number.remove(idx);
                    let mut hole = op.hole.clone();
                    hole.push(p);
                    let partner = op.with_projectors(number.clone(), hole);
                    if current.terms.get(&partner) == Some(c) {
                        let joined = op.with_projectors(number, op.hole.clone());
                        merged = Some((op.clone(), partner, joined, c.clone()));
                        break 'search;
                    }
                }
            }
            match merged {
                Some((a, b, joined, c)) => {
                    current.terms.remove(&a);
                    current.terms.remove(&b);
                    current.add_term(c, joined);
                }
                None => return current,
            }
        }
    }

    pub fn evaluate(&self, assign: &Assignment) -> Result<NumericSum> {
        self.terms
            .iter()
            .map(|(op, c)| Ok((c.eval(assign)?, op.clone())))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(op, c)| serde_json::json!({"op": op.to_string(), "coeff": c.to_string()}))
                .collect(),
        )
    }
}

impl FromIterator<(ScalarExpr, AOperator)> for OperatorSum {
    fn from_iter<I: IntoIterator<Item = (ScalarExpr, AOperator)>>(iter: I) -> Self {
        let mut s = OperatorSum::zero();
        for (c, op) in iter {
            s.add_term(c, op);
        }
        s
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(op, c)| format!("[{}] {}", c, op))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Operator sum with evaluated coefficients.
pub type NumericSum = Vec<(f64, AOperator)>;
