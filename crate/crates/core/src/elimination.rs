//! Rank-by-rank extraction of cluster amplitudes reproducing a target state
//! as `exp(T) |ref>`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockoracle::{apply_aop, apply_exp_series, occupied, reference_det, Det, StateVector};
use crate::opalg::{make_excitation, NumericSum, OrbitalSpace};

pub const DEPLETION_THRESHOLD: f64 = 1e-12;

/// `(occ, virt)` index tuples of one excitation.
pub type ExcitationKey = (Vec<usize>, Vec<usize>);

/// Cluster amplitudes by rank; the reference amplitude is implicitly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CCAmplitudes {
    pub space: OrbitalSpace,
    pub per_rank: BTreeMap<usize, BTreeMap<ExcitationKey, f64>>,
}

#[derive(Serialize, Deserialize)]
struct AmplitudeRecord {
    rank: usize,
    occ: Vec<usize>,
    virt: Vec<usize>,
    value: f64,
}

impl CCAmplitudes {
    pub fn new(space: OrbitalSpace) -> Self {
        CCAmplitudes {
            space,
            per_rank: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, occ: Vec<usize>, virt: Vec<usize>, value: f64) -> Result<()> {
        make_excitation(&self.space, &occ, &virt)?;
        self.per_rank.entry(occ.len()).or_default().insert((occ, virt), value);
        Ok(())
    }

    pub fn get(&self, occ: &[usize], virt: &[usize]) -> f64 {
        self.per_rank
            .get(&occ.len())
            .and_then(|m| m.get(&(occ.to_vec(), virt.to_vec())))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &ExcitationKey, f64)> {
        self.per_rank
            .iter()
            .flat_map(|(r, m)| m.iter().map(move |(k, v)| (*r, k, *v)))
    }

    pub fn len(&self) -> usize {
        self.per_rank.values().map(|m| m.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Highest rank carrying an amplitude above `tol` in magnitude.
    pub fn highest_rank(&self, tol: f64) -> usize {
        self.iter().filter(|(_, _, v)| v.abs() > tol).map(|(r, _, _)| r).max().unwrap_or(0)
    }

    /// Cluster operator `T = sum t * excitation`.
    pub fn cluster_operator(&self) -> NumericSum {
        self.iter()
            .map(|(_, (o, v), t)| (t, make_excitation(&self.space, o, v).expect("validated on insert")))
            .collect()
    }

    /// Largest absolute amplitude difference over the union of keys.
    pub fn max_abs_diff(&self, other: &CCAmplitudes) -> f64 {
        let mut d: f64 = 0.0;
        for (_, (o, v), t) in self.iter() {
            d = d.max((t - other.get(o, v)).abs());
        }
        for (_, (o, v), t) in other.iter() {
            d = d.max((t - self.get(o, v)).abs());
        }
        d
    }

    pub fn to_json(&self) -> serde_json::Value {
        let recs: Vec<AmplitudeRecord> = self
            .iter()
            .map(|(rank, (occ, virt), value)| AmplitudeRecord {
                rank,
                occ: occ.clone(),
                virt: virt.clone(),
                value,
            })
            .collect();
        serde_json::to_value(recs).expect("amplitudes serialize")
    }

    pub fn from_json(space: OrbitalSpace, v: &serde_json::Value) -> Result<Self> {
        let recs: Vec<AmplitudeRecord> = serde_json::from_value(v.clone())
            .map_err(|e| Error::NonCanonicalInput(format!("amplitude json: {}", e)))?;
        let mut t = CCAmplitudes::new(space);
        for r in recs {
            if r.rank != r.occ.len() {
                return Err(Error::NonCanonicalInput(format!("rank {} does not match {:?}", r.rank, r.occ)));
            }
            t.insert(r.occ, r.virt, r.value)?;
        }
        Ok(t)
    }
}

/// Holes and particles of `det` relative to the reference.
pub fn excitation_of(space: &OrbitalSpace, det: Det) -> ExcitationKey {
    let r = reference_det(space);
    (occupied(r & !det), occupied(det & !r))
}

pub fn intermediate_normalize(s: &StateVector<f64>) -> Result<StateVector<f64>> {
    let c0 = s.amplitude(reference_det(&s.space));
    if c0.abs() < DEPLETION_THRESHOLD {
        return Err(Error::ReferenceDepleted(c0));
    }
    Ok(s.scaled(&(1.0 / c0)))
}

/// `exp(T) |ref>`.
pub fn reconstruct(t: &CCAmplitudes) -> Result<StateVector<f64>> {
    apply_exp_series(&t.cluster_operator(), &StateVector::reference(t.space))
}

/// Outcome of an elimination limited to `max_rank`.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated {
    pub amplitudes: CCAmplitudes,
    /// Infinity norm of the normalized state above `max_rank`.
    pub residual: f64,
    pub residual_determinants: usize,
}

fn validate(s: &StateVector<f64>) -> Result<()> {
    let ne = s.space.n_electrons as u32;
    for (d, _) in s.iter() {
        if d.count_ones() != ne || (s.space.n_orbitals < 64 && d >> s.space.n_orbitals != 0) {
            return Err(Error::NonCanonicalInput(format!(
                "determinant {:?} is outside the {}-electron space",
                occupied(d),
                ne
            )));
        }
    }
    Ok(())
}

/// Amplitudes up to `max_rank`; content above it is reported as residual.
pub fn eliminate_truncated(s: &StateVector<f64>, max_rank: usize) -> Result<Truncated> {
    validate(s)?;
    let s = intermediate_normalize(s)?;
    let space = s.space;
    let reference = reference_det(&space);
    let mut t = CCAmplitudes::new(space);
    for n in 1..=max_rank.min(space.max_rank()) {
        let generated = reconstruct(&t)?;
        let mut dets: Vec<Det> = s
            .iter()
            .chain(generated.iter())
            .map(|(d, _)| d)
            .filter(|&d| (d & !reference).count_ones() as usize == n)
            .collect();
        dets.sort_unstable();
        dets.dedup();
        for d in dets {
            let (occ, virt) = excitation_of(&space, d);
            let op = make_excitation(&space, &occ, &virt)?;
            let (sign, target) = apply_aop(&op, reference).expect("excitation of the reference");
            debug_assert_eq!(target, d);
            let value = (s.amplitude(d) - generated.amplitude(d)) * sign as f64;
            if value != 0.0 {
                t.insert(occ, virt, value)?;
            }
        }
    }
    let mut residual: f64 = 0.0;
    let mut count = 0;
    for (d, c) in s.iter() {
        if (d & !reference).count_ones() as usize > max_rank {
            residual = residual.max(c.abs());
            count += 1;
        }
    }
    Ok(Truncated {
        amplitudes: t,
        residual,
        residual_determinants: count,
    })
}

/// Full elimination; the state must not reach beyond `max_rank`.
pub fn eliminate(s: &StateVector<f64>, max_rank: usize) -> Result<CCAmplitudes> {
    let reference = reference_det(&s.space);
    if let Some(found) = s
        .iter()
        .map(|(d, _)| (d & !reference).count_ones() as usize)
        .filter(|&r| r > max_rank)
        .max()
    {
        return Err(Error::RankOverflow { found, max: max_rank });
    }
    Ok(eliminate_truncated(s, max_rank)?.amplitudes)
}
