//! Conversions of small ansatzes whose converted form is known in closed form.
//! Indices: occupied i < j < k < l, virtual a < b < c < d.

use ucc_core::fockoracle::{apply_ucc_product, compare, StateVector};
use ucc_core::identities::UCCFactor;
use ucc_core::opalg::{make_excitation, AOperator, OrbitalSpace};
use ucc_core::reorder::{convert_ucc, CCResult, DressedAmplitude};
use ucc_core::symcoef::{AngleId, Assignment, ScalarExpr};

fn factor(space: &OrbitalSpace, label: &str, occ: &[usize], virt: &[usize]) -> UCCFactor {
    UCCFactor::new(space, AngleId::new(label), occ, virt).unwrap()
}

fn tan(l: &str) -> ScalarExpr {
    ScalarExpr::tan(&AngleId::new(l))
}

fn sec(l: &str) -> ScalarExpr {
    ScalarExpr::sec(&AngleId::new(l))
}

fn cos(l: &str) -> ScalarExpr {
    ScalarExpr::cos(&AngleId::new(l))
}

fn product(xs: &[ScalarExpr]) -> ScalarExpr {
    xs.iter().fold(ScalarExpr::one(), |a, x| &a * x)
}

/// Amplitude attached to `core` anywhere in the converted form.
fn amplitude(cc: &CCResult, core: &AOperator) -> Option<DressedAmplitude> {
    cc.factors
        .iter()
        .flat_map(|f| f.terms.iter())
        .find(|(c, _)| c == core)
        .map(|(_, d)| d.clone())
}

fn check_oracle(cc: &CCResult, factors: &[UCCFactor], space: OrbitalSpace) {
    for (k, base) in [0.31, -0.52, 0.77, 0.12].iter().enumerate() {
        let assign: Assignment = factors
            .iter()
            .enumerate()
            .map(|(j, f)| (f.angle.clone(), base + 0.09 * (j + k) as f64))
            .collect();
        let u = apply_ucc_product(factors, &assign, &StateVector::reference(space)).unwrap();
        let c = cc.apply_to_reference(&assign).unwrap();
        assert!(compare(&u, &c, 1e-12).matched, "{}", cc);
    }
}

#[test]
fn two_disjoint_singles() {
    let s = OrbitalSpace::new(4, 2).unwrap();
    let fs = vec![factor(&s, "jb", &[1], &[3]), factor(&s, "ia", &[0], &[2])];
    let cc = convert_ucc(&fs, &s).unwrap();
    assert_eq!(cc.prefactor, product(&[cos("jb"), cos("ia")]));
    assert_eq!(cc.factors.len(), 1);
    let ia = make_excitation(&s, &[0], &[2]).unwrap();
    let jb = make_excitation(&s, &[1], &[3]).unwrap();
    assert_eq!(amplitude(&cc, &ia), Some(DressedAmplitude::plain(tan("ia"))));
    assert_eq!(amplitude(&cc, &jb), Some(DressedAmplitude::plain(tan("jb"))));
    assert!(cc.diagnostics.notes.is_empty());
    check_oracle(&cc, &fs, s);
}

#[test]
fn two_singles_sharing_an_occupied_index_use_secant() {
    let s = OrbitalSpace::new(4, 2).unwrap();
    let fs = vec![factor(&s, "ib", &[0], &[3]), factor(&s, "ia", &[0], &[2])];
    let cc = convert_ucc(&fs, &s).unwrap();
    let ia = make_excitation(&s, &[0], &[2]).unwrap();
    assert_eq!(amplitude(&cc, &ia), Some(DressedAmplitude::plain(&tan("ia") * &sec("ib"))));
    assert_eq!(cc.diagnostics.notes.len(), 1);
    check_oracle(&cc, &fs, s);
}

#[test]
fn three_singles() {
    let s = OrbitalSpace::new(4, 2).unwrap();
    let fs = vec![factor(&s, "ja", &[1], &[2]), factor(&s, "jb", &[1], &[3]), factor(&s, "ia", &[0], &[2])];
    let cc = convert_ucc(&fs, &s).unwrap();
    assert_eq!(cc.prefactor, product(&[cos("jb"), cos("ja"), cos("ia")]));
    let ex = |o: usize, v: usize| make_excitation(&s, &[o], &[v]).unwrap();
    let plain = |x: ScalarExpr| Some(DressedAmplitude::plain(x));
    assert_eq!(amplitude(&cc, &ex(1, 2)), plain(tan("ja")));
    assert_eq!(amplitude(&cc, &ex(1, 3)), plain(&tan("jb") * &sec("ja")));
    assert_eq!(amplitude(&cc, &ex(0, 2)), plain(&tan("ia") * &sec("ja")));
    assert_eq!(amplitude(&cc, &ex(0, 3)), plain(product(&[tan("ja"), tan("jb"), tan("ia")])));
    check_oracle(&cc, &fs, s);
}

#[test]
fn doubles_sharing_an_occupied_index() {
    // i, j, l = 0, 1, 2; a, b, c, d = 3, 4, 5, 6
    let s = OrbitalSpace::new(7, 3).unwrap();
    let fs = vec![factor(&s, "ilcd", &[0, 2], &[5, 6]), factor(&s, "ijab", &[0, 1], &[3, 4])];
    let cc = convert_ucc(&fs, &s).unwrap();
    assert_eq!(cc.prefactor, product(&[cos("ijab"), cos("ilcd")]));
    let ilcd = make_excitation(&s, &[0, 2], &[5, 6]).unwrap();
    let ijab = make_excitation(&s, &[0, 1], &[3, 4]).unwrap();
    assert_eq!(amplitude(&cc, &ilcd), Some(DressedAmplitude::plain(tan("ilcd"))));
    assert_eq!(amplitude(&cc, &ijab), Some(DressedAmplitude::plain(&tan("ijab") * &sec("ilcd"))));
    check_oracle(&cc, &fs, s);
}

#[test]
fn three_doubles_with_sector_dressing() {
    // i, j, k, l = 0..4; a, b, c, d = 4..8
    let s = OrbitalSpace::new(8, 4).unwrap();
    let fs = vec![
        factor(&s, "ikac", &[0, 2], &[4, 6]),
        factor(&s, "klcd", &[2, 3], &[6, 7]),
        factor(&s, "ijab", &[0, 1], &[4, 5]),
    ];
    let cc = convert_ucc(&fs, &s).unwrap();
    assert_eq!(cc.prefactor, product(&[cos("ikac"), cos("klcd"), cos("ijab")]));
    let ex = |o: &[usize], v: &[usize]| make_excitation(&s, o, v).unwrap();
    assert_eq!(amplitude(&cc, &ex(&[0, 2], &[4, 6])), Some(DressedAmplitude::plain(tan("ikac"))));
    assert_eq!(amplitude(&cc, &ex(&[0, 1], &[4, 5])), Some(DressedAmplitude::plain(&tan("ijab") * &sec("ikac"))));
    let quad = ex(&[1, 3], &[5, 7]);
    let t3 = product(&[tan("ikac"), tan("klcd"), tan("ijab")]);
    assert_eq!(amplitude(&cc, &quad), Some(DressedAmplitude::plain(t3.scale_int(-1))));
    // secant exactly where orbital a and orbital i disagree
    let kl = amplitude(&cc, &ex(&[2, 3], &[6, 7])).unwrap();
    assert_eq!(kl.base, tan("klcd"));
    for (p, w) in &kl.sectors {
        let a_occ = p.number().contains(&4);
        let i_occ = p.number().contains(&0);
        let expected = if a_occ != i_occ { sec("ikac") } else { ScalarExpr::one() };
        assert_eq!(w, &expected, "sector {}", p);
    }
    assert_eq!(kl.sectors.len(), 4);
    check_oracle(&cc, &fs, s);
}

#[test]
fn empty_ansatz_is_the_reference() {
    let s = OrbitalSpace::new(4, 2).unwrap();
    let cc = convert_ucc(&[], &s).unwrap();
    assert!(cc.prefactor.is_one());
    assert!(cc.factors.is_empty());
}
