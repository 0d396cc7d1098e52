use std::collections::BTreeSet;

use homotransfer::ainf::{check_stasheff, AInfinityStructure, DgAlgebra};
use homotransfer::coalgebra::{dualize_algebra, dualize_coalgebra, DgCoalgebra};
use homotransfer::complex::{homology_contraction, ChainComplex, Contraction};
use homotransfer::corpus::{massey_algebra, random_coalgebra, random_monomial_algebra, AlgebraShape};
use homotransfer::dense::Dense;
use homotransfer::transfer::{
    check_cotwisting, check_twisting_cochain, enumerate_trees, epsilon1, epsilon2, transfer_all, transfer_coalgebra,
    transfer_hpt, transfer_recursive, CobarMode, Method, Tree, TwistingCochain,
};
use homotransfer::words::{word, Table, Word};
use homotransfer::{Field, GradedMap, Lin};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn flatten(alg: &DgAlgebra) -> DgAlgebra {
    let b = alg.carrier.clone();
    DgAlgebra::new(b.clone(), GradedMap::zero(b.clone(), b, -1), alg.mu.clone()).unwrap()
}

fn class_of(c: &Contraction, x: &Lin<usize>) -> usize {
    (0..c.small.dim()).find(|&i| c.nabla.column(i) == x).expect("representative is a chosen cycle")
}

fn rank(table: &Table, rows: &[Word], cols: usize, field: Field) -> usize {
    let mut m = Dense::zeros(field, cols, rows.len());
    for (j, w) in rows.iter().enumerate() {
        if let Some(v) = table.get(w) {
            for (&i, c) in v {
                m.set(i, j, c.clone());
            }
        }
    }
    m.rank()
}

#[test]
fn trivial_contraction_degenerates() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..10 {
        let shape = AlgebraShape { commutative: i % 2 == 0, ..Default::default() };
        let alg = flatten(&random_monomial_algebra(&mut rng, Field::Prime(5), shape).unwrap());
        let a = alg.to_ainf(5);
        let c = Contraction::trivial(alg.complex());
        let (out, tau) = transfer_recursive(&a, &c, 5).unwrap();
        assert_eq!(out.structure.op(2), a.op(2));
        assert!(out.structure.ops.range(3..).all(|(_, t)| t.is_empty()));
        assert!(tau.components.range(2..).all(|(_, t)| t.is_empty()));
        let all = transfer_all(&a, &c, 5, &Method::ALL).unwrap();
        assert_eq!(all[0].structure, out.structure);
    }
}

#[test]
fn zero_multiplication_transfers_to_zero() {
    let alg = massey_algebra(Field::Rational);
    let alg = DgAlgebra::new(alg.carrier.clone(), alg.d.clone(), Table::new()).unwrap();
    let c = homology_contraction(&alg.complex());
    let a = alg.to_ainf(4);
    for t in transfer_all(&a, &c, 4, &Method::ALL).unwrap() {
        assert!(t.structure.ops.values().all(|t| t.is_empty()), "{}", t.method);
    }
    let (out, tau) = transfer_recursive(&a, &c, 4).unwrap();
    assert!(check_twisting_cochain(&alg, &out.structure, &tau, 4).passed());
}

#[test]
fn massey_product_matches_direct_composition() {
    for field in [Field::Rational, Field::Prime(5)] {
        let alg = massey_algebra(field);
        let c = homology_contraction(&alg.complex());
        let (out, tau) = transfer_recursive(&alg.to_ainf(3), &c, 3).unwrap();
        let unit = |name: &str| Lin::single(alg.carrier.index_of(name).unwrap(), field.one());
        let (a, b, cc) = (class_of(&c, &unit("a")), class_of(&c, &unit("b")), class_of(&c, &unit("c")));
        let m3 = out.structure.apply_op(3, &[a as u32, b as u32, cc as u32]);
        assert!(!m3.is_zero());
        // πμ(hμ ⊗ 1) − πμ(1 ⊗ hμ) on ∇a ⊗ ∇b ⊗ ∇c, with h passing a
        let nab = |i: usize| c.nabla.column(i).clone();
        let left = c.pi.apply(&alg.mul(&c.h.apply(&alg.mul(&nab(a), &nab(b))), &nab(cc)));
        let right = c.pi.apply(&alg.mul(&nab(a), &c.h.apply(&alg.mul(&nab(b), &nab(cc)))));
        let a_odd = alg.carrier.degree(alg.carrier.index_of("a").unwrap()) % 2 != 0;
        let mut expected = left;
        expected.add_assign(&right.signed(!a_odd));
        assert_eq!(m3, expected);
        // class of the chain-level representative x·c ± a·y
        let xc = alg.mul(&unit("x"), &unit("c"));
        let ay = alg.mul(&unit("a"), &unit("y"));
        let witness = [false, true].iter().any(|&t| {
            let mut r = xc.clone();
            r.add_assign(&ay.clone().signed(t));
            let r = c.pi.apply(&r);
            r == m3
        });
        assert!(witness);
        assert!(check_twisting_cochain(&alg, &out.structure, &tau, 3).passed());
    }
}

#[test]
fn dropping_second_twisting_component_fails_at_arity_two() {
    let alg = massey_algebra(Field::Rational);
    let c = homology_contraction(&alg.complex());
    let (out, tau) = transfer_recursive(&alg.to_ainf(4), &c, 4).unwrap();
    assert!(check_twisting_cochain(&alg, &out.structure, &tau, 4).passed());
    let mut tampered = TwistingCochain { components: tau.components.clone() };
    tampered.components.remove(&2);
    let report = check_twisting_cochain(&alg, &out.structure, &tampered, 4);
    assert!(!report.passed());
    let lowest = report.cells.iter().find(|(_, &(_, bad))| bad > 0).map(|(&(n, _), _)| n);
    assert_eq!(lowest, Some(2));
}

#[test]
fn binary_product_is_the_induced_product() {
    let alg = massey_algebra(Field::Rational);
    let c = homology_contraction(&alg.complex());
    let out = transfer_hpt(&alg.to_ainf(3), &c, 3).unwrap();
    assert!(out.structure.is_minimal());
    for i in 0..c.small.dim() {
        for j in 0..c.small.dim() {
            let direct = c.pi.apply(&alg.mul(c.nabla.column(i), c.nabla.column(j)));
            assert_eq!(out.structure.apply_op(2, &[i as u32, j as u32]), direct);
        }
    }
    let f = out.morphism.unwrap();
    for i in 0..c.small.dim() {
        assert_eq!(f.apply(1, &[i as u32]), *c.nabla.column(i));
    }
}

#[test]
fn kadeishvili_sign_examples() {
    assert_eq!(epsilon1(3, 1, 1), 4);
    assert_eq!(epsilon2(3, 0, 2, 0), 2);
}

#[test]
fn low_arity_trees() {
    let binary: BTreeSet<usize> = [2].into();
    assert_eq!(enumerate_trees(2, &binary, 10).unwrap().len(), 1);
    let three = enumerate_trees(3, &binary, 10).unwrap();
    assert_eq!(three.len(), 2);
    let mirror = |t: &Tree| match t {
        Tree::Node(ch) => Tree::Node(ch.iter().rev().cloned().collect()),
        Tree::Leaf => Tree::Leaf,
    };
    assert_eq!(mirror(&three[0]), three[1]);
    let four = enumerate_trees(4, &binary, 10).unwrap();
    assert_eq!(four.len(), 5);
    let splits: BTreeSet<usize> = four
        .iter()
        .map(|t| match t {
            Tree::Node(ch) => ch[0].leaves(),
            Tree::Leaf => 0,
        })
        .collect();
    assert_eq!(splits.len(), 3);
}

#[test]
fn massey_dual_has_matching_rank() {
    let alg = massey_algebra(Field::Rational);
    let c = homology_contraction(&alg.complex());
    let m = transfer_hpt(&alg.to_ainf(3), &c, 3).unwrap().structure;
    let dual = dualize_algebra(&m);
    assert_eq!(dualize_coalgebra(&dual), m);
    let n = m.carrier.len();
    let words: Vec<Word> = (0..n * n * n).map(|k| word(&[(k / (n * n)) as u32, (k / n % n) as u32, (k % n) as u32])).collect();
    let delta3 = dual.op(3).unwrap();
    let mut transposed = Table::new();
    for (x, v) in delta3.iter().enumerate() {
        for (w, c) in v {
            transposed.entry(w.clone()).or_insert_with(Lin::zero).add_term(x, c.clone());
        }
    }
    let r = rank(m.op(3).unwrap(), &words, n, Field::Rational);
    assert!(r > 0);
    assert_eq!(rank(&transposed, &words, n, Field::Rational), r);
}

#[test]
fn coalgebra_without_diagonal_transfers_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let shape = AlgebraShape { generators: 4, ..Default::default() };
    let full = random_coalgebra(&mut rng, Field::Rational, shape).unwrap();
    let bare = DgCoalgebra::new(full.carrier.clone(), full.d.clone(), vec![Lin::zero(); full.carrier.len()]).unwrap();
    let c = homology_contraction(&ChainComplex::new(bare.d.clone()).unwrap());
    let out = transfer_coalgebra(&bare.to_ainf(4), &c, 4, CobarMode::Connected).unwrap();
    assert!(out.structure.ops.range(2..).all(|(_, t)| t.iter().all(Lin::is_zero)));
    for (x, t) in out.tau.iter().enumerate() {
        assert!(t.keys().all(|w| w.len() == 1));
        assert_eq!(t.map_keys(|w| w[0] as usize), *c.pi.column(x));
    }
    assert!(check_cotwisting(&bare, &out.structure, &out.tau, 4).passed());
}

#[test]
fn strict_algebra_passes_stasheff() {
    let a: AInfinityStructure = massey_algebra(Field::Prime(5)).to_ainf(4);
    assert!(check_stasheff(&a, 4).passed());
}
