use std::sync::Arc;

use homotransfer::complex::{homology_contraction, ChainComplex};
use homotransfer::corpus::{random_dgla, random_monomial_algebra, tensor_dgla, AlgebraShape, LieKind};
use homotransfer::linfty::{check_cce_square_zero, check_master, transfer_linf, DgLieAlgebra};
use homotransfer::words::{word, Table};
use homotransfer::{Field, GradedBasis, GradedMap, Lin};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_dglas_transfer_to_linf_structures() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut nontrivial = 0;
    for _ in 0..50 {
        let g = random_dgla(&mut rng, Field::Rational, 6, 12).unwrap();
        let c = homology_contraction(&ChainComplex::new(g.d.clone()).unwrap());
        let out = transfer_linf(&g, &c, 4).unwrap();
        assert!(out.structure.check_square_zero(4).passed());
        assert!(check_master(&g, &out.structure, &out.tau, 4).passed());
        assert!(out.perturbed.contraction.verify().all_passed());
        assert!(out.agrees_with_perturbation);
        if out.structure.coderivation.from_arity(2).components.values().any(|t| !t.is_empty()) && g.d.columns().iter().any(|c| !c.is_zero()) {
            nontrivial += 1;
        }
    }
    assert!(nontrivial > 0);
}

#[test]
fn abelian_inputs_transfer_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..20 {
        let shape = AlgebraShape { generators: 3, max_basis: 6, commutative: true, ..Default::default() };
        let a = random_monomial_algebra(&mut rng, Field::Rational, shape).unwrap();
        let g = tensor_dgla(LieKind::Abelian2, &a, i % 2 == 0).unwrap();
        assert!(g.is_abelian());
        let c = homology_contraction(&ChainComplex::new(g.d.clone()).unwrap());
        let out = transfer_linf(&g, &c, 4).unwrap();
        assert!(out.structure.coderivation.from_arity(2).is_zero());
        assert!(out.tau.components.range(2..).all(|(_, t)| t.is_empty()));
    }
}

fn random_skew(rng: &mut impl Rng, degrees: &[i64]) -> DgLieAlgebra {
    let field = Field::Rational;
    let n = degrees.len();
    let b = Arc::new(GradedBasis::new(field, degrees.iter().enumerate().map(|(i, &d)| (format!("e{i}"), d))).unwrap());
    let mut t = Table::new();
    for i in 0..n {
        for j in i..n {
            let symmetric = (degrees[i] * degrees[j]).rem_euclid(2) == 1;
            if i == j && !symmetric {
                continue;
            }
            for k in 0..n {
                if degrees[k] != degrees[i] + degrees[j] || !rng.gen_bool(0.4) {
                    continue;
                }
                let c = rng.gen_range(-1i64..=1);
                t.entry(word(&[i as u32, j as u32])).or_insert_with(Lin::zero).add_term(k, field.from_i64(c));
                if i != j {
                    let back = if symmetric { c } else { -c };
                    t.entry(word(&[j as u32, i as u32])).or_insert_with(Lin::zero).add_term(k, field.from_i64(back));
                }
            }
        }
    }
    DgLieAlgebra::new(b.clone(), GradedMap::zero(b.clone(), b, -1), t).unwrap()
}

#[test]
fn jacobi_iff_cce_squares_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut lie, mut not_lie) = (0, 0);
    for i in 0..200 {
        let degrees: &[i64] = if i % 2 == 0 { &[0, 0, 0] } else { &[0, 0, 1, 1] };
        let g = random_skew(&mut rng, degrees);
        g.validate().unwrap();
        let jacobi = g.jacobi_failure().is_none();
        assert_eq!(jacobi, check_cce_square_zero(&g, 3).passed(), "{:?}", g.bracket);
        if jacobi {
            lie += 1;
        } else {
            not_lie += 1;
        }
    }
    assert!(lie > 10 && not_lie > 10);
}
