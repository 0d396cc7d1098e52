use homotransfer::ainf::{check_morphism, check_stasheff};
use homotransfer::complex::homology_contraction;
use homotransfer::corpus::{massey_algebra, random_monomial_algebra, AlgebraShape};
use homotransfer::transfer::{transfer_all, Method};
use homotransfer::Field;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn massey_methods_agree() {
    for field in [Field::Rational, Field::Prime(5)] {
        let alg = massey_algebra(field);
        let a = alg.to_ainf(4);
        let c = homology_contraction(&alg.complex());
        let out = transfer_all(&a, &c, 4, &Method::ALL).unwrap();
        let m = &out[0].structure;
        assert!(m.op(3).is_some_and(|t| !t.is_empty()));
        assert!(check_stasheff(m, 4).passed());
        for t in &out {
            let f = t.morphism.as_ref().unwrap();
            let r = check_morphism(f, 4);
            assert!(r.passed(), "{}: {r}", t.method);
        }
    }
}

#[test]
fn random_algebras_methods_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..12 {
        let field = if i % 2 == 0 { Field::Rational } else { Field::Prime(5) };
        let shape = AlgebraShape { commutative: i % 3 == 0, ..Default::default() };
        let alg = random_monomial_algebra(&mut rng, field, shape).unwrap();
        let a = alg.to_ainf(4);
        let c = homology_contraction(&alg.complex());
        let out = transfer_all(&a, &c, 4, &Method::ALL).unwrap();
        let r = check_stasheff(&out[0].structure, 4);
        assert!(r.passed(), "{r}");
        let r = check_morphism(out[0].morphism.as_ref().unwrap(), 4);
        assert!(r.passed(), "{r}");
    }
}
