#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use ucc_core::fockoracle::{apply_exp_series, Det, StateVector};
use ucc_core::identities::{ExpFactor, UCCFactor};
use ucc_core::opalg::{NumericSum, OrbitalSpace, RawOperator};
use ucc_core::symcoef::{AngleId, Assignment};

pub fn random_space<R: Rng>(rng: &mut R, max_n: usize, rank: usize) -> OrbitalSpace {
    let n = rng.gen_range((2 * rank).max(2)..=max_n);
    let ne = rng.gen_range(rank..=n - rank);
    OrbitalSpace::new(n, ne).unwrap()
}

pub fn random_factor<R: Rng>(rng: &mut R, space: &OrbitalSpace, rank: usize, label: &str) -> UCCFactor {
    let occ_pool: Vec<usize> = (0..space.n_electrons).collect();
    let virt_pool: Vec<usize> = (space.n_electrons..space.n_orbitals).collect();
    let mut occ: Vec<usize> = occ_pool.choose_multiple(rng, rank).copied().collect();
    let mut virt: Vec<usize> = virt_pool.choose_multiple(rng, rank).copied().collect();
    occ.sort_unstable();
    virt.sort_unstable();
    UCCFactor::new(space, AngleId::new(label), &occ, &virt).unwrap()
}

/// Random ansatz with up to `max_factors` factors of rank at most `max_rank`.
pub fn random_ansatz<R: Rng>(rng: &mut R, max_n: usize, max_factors: usize, max_rank: usize) -> (OrbitalSpace, Vec<UCCFactor>) {
    let n = rng.gen_range(4..=max_n);
    let ne = rng.gen_range(2..=n - 2);
    let space = OrbitalSpace::new(n, ne).unwrap();
    let k = rng.gen_range(1..=max_factors);
    let factors = (0..k)
        .map(|j| {
            let r = rng.gen_range(1..=max_rank.min(ne).min(n - ne));
            random_factor(rng, &space, r, &format!("t{}", j))
        })
        .collect();
    (space, factors)
}

pub fn assign_random<R: Rng>(rng: &mut R, factors: &[UCCFactor], bound: f64) -> Assignment {
    factors
        .iter()
        .map(|f| (f.angle.clone(), rng.gen_range(-bound..bound)))
        .collect()
}

/// Random string whose four index groups are drawn with possible overlaps.
pub fn random_raw<R: Rng>(rng: &mut R, n: usize) -> RawOperator {
    let rank = rng.gen_range(0..=2usize);
    let pick = |rng: &mut R, k: usize| (0..k).map(|_| rng.gen_range(0..n)).collect::<Vec<_>>();
    RawOperator {
        create: pick(rng, rank),
        annihilate: pick(rng, rank),
        number: {
            let k = rng.gen_range(0..=2);
            pick(rng, k)
        },
        hole: {
            let k = rng.gen_range(0..=2);
            pick(rng, k)
        },
    }
}

/// Matrix of the raw word computed elementary operator by elementary operator.
pub fn raw_matrix(raw: &RawOperator, n: usize) -> DMatrix<i64> {
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    // rightmost first: (1-n_d)..., n_c..., a_{b_1}..a_{b_n}, then creators
    for col in 0..dim {
        let mut d = col as Det;
        let mut sign = 1i64;
        let mut alive = true;
        let mut elems: Vec<(usize, bool)> = Vec::new();
        elems.extend(raw.create.iter().map(|&p| (p, true)));
        elems.extend(raw.annihilate.iter().rev().map(|&p| (p, false)));
        for &p in &raw.number {
            elems.push((p, true));
            elems.push((p, false));
        }
        for &p in &raw.hole {
            elems.push((p, false));
            elems.push((p, true));
        }
        for &(p, dag) in elems.iter().rev() {
            let occ = d >> p & 1 == 1;
            if occ == dag {
                alive = false;
                break;
            }
            if (d & ((1u64 << p) - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            d ^= 1u64 << p;
        }
        if alive {
            m[(d as usize, col)] += sign;
        }
    }
    m
}

/// Applies a product of exponentials (rightmost first) to one basis column.
pub fn apply_factors_numeric(factors: &[ExpFactor], assign: &Assignment, s: &StateVector<f64>) -> StateVector<f64> {
    let mut cur = s.clone();
    for f in factors.iter().rev() {
        let g: NumericSum = f.exponent.evaluate(assign).unwrap();
        cur = apply_exp_series(&g, &cur).unwrap();
    }
    cur
}

/// Largest column-wise deviation between two factor products over all
/// determinants of the Fock space.
pub fn product_gap(a: &[ExpFactor], b: &[ExpFactor], assign: &Assignment, n: usize) -> f64 {
    let space = OrbitalSpace::new(n, 0).unwrap();
    let mut gap: f64 = 0.0;
    for col in 0..(1u64 << n) {
        let basis = StateVector::basis(space, col);
        let x = apply_factors_numeric(a, assign, &basis);
        let y = apply_factors_numeric(b, assign, &basis);
        gap = gap.max(ucc_core::fockoracle::compare(&x, &y, 0.0).max_abs_diff);
    }
    gap
}
