use homotransfer::coalgebra::{dualize_coalgebra, dualize_contraction};
use homotransfer::complex::homology_contraction;
use homotransfer::corpus::{random_coalgebra, AlgebraShape};
use homotransfer::transfer::{
    check_cotwisting, transfer_coalgebra, transfer_coalgebra_recursive, transfer_hpt, CobarMode, CobarPerturbation,
};
use homotransfer::Field;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn coalgebra_transfer_is_dual_to_algebra_transfer() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut nontrivial = 0;
    for i in 0..16 {
        let field = if i % 2 == 0 { Field::Rational } else { Field::Prime(5) };
        let shape = AlgebraShape { generators: 6, commutative: i % 3 == 0, ..Default::default() };
        let coalg = random_coalgebra(&mut rng, field, shape).unwrap();
        let input = coalg.to_ainf(4);
        let c = homology_contraction(&coalg.complex());
        let out = transfer_coalgebra(&input, &c, 4, CobarMode::Connected).unwrap();
        let rec = transfer_coalgebra_recursive(&coalg, &c, 4, CobarMode::Connected).unwrap();
        assert_eq!(out.structure, rec.structure);
        assert_eq!(out.tau, rec.tau);
        assert!(check_cotwisting(&coalg, &out.structure, &out.tau, 4).passed());
        let dual = transfer_hpt(&dualize_coalgebra(&input), &dualize_contraction(&c).unwrap(), 4).unwrap();
        assert_eq!(dualize_coalgebra(&out.structure), dual.structure);
        if out.structure.ops.keys().any(|&n| n >= 3) {
            nontrivial += 1;
        }
        let p = CobarPerturbation::new(&input, &c, 4, CobarMode::Connected).unwrap();
        assert!(p.verify(p.verify_length(3000)).unwrap().all_passed());
    }
    assert!(nontrivial > 0);
}
