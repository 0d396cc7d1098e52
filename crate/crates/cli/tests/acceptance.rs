use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use homotransfer::ainf::{check_morphism, check_stasheff, DgAlgebra};
use homotransfer::bar::check_cinfinity;
use homotransfer::coalgebra::{dualize_coalgebra, dualize_contraction};
use homotransfer::complex::{homology_contraction, normalize_weak_system, ChainComplex, Contraction};
use homotransfer::corpus::{
    massey_algebra, nilpotent_dgla, random_coalgebra, random_dgla, random_monomial_algebra, random_weak_system,
    tensor_dgla, triangular_algebra, truncated_polynomial, AlgebraShape, LieKind,
};
use homotransfer::linfty::{check_cce_square_zero, check_master, transfer_linf, DgLieAlgebra};
use homotransfer::transfer::{
    check_cotwisting, transfer_all, transfer_coalgebra, transfer_hpt, transfer_recursive, BarPerturbation, CobarMode,
    CobarPerturbation, Method,
};
use homotransfer::words::{word, Table};
use homotransfer::{Field, GradedBasis, GradedMap, Lin};
use homotransfer_cli::io::{emit, emit_string, load, parse_str, Loaded};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Member {
    alg: DgAlgebra,
    c: Contraction,
}

fn dga_corpus() -> Vec<Member> {
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    (0..200)
        .map(|i| {
            let field = if i % 2 == 0 { Field::Prime(5) } else { Field::Rational };
            let shape = AlgebraShape {
                generators: rng.gen_range(2..=8),
                min_degree: 0,
                max_degree: 6,
                max_basis: 12,
                max_word: 3,
                commutative: i % 3 == 0,
                negative: false,
            };
            let alg = random_monomial_algebra(&mut rng, field, shape).unwrap();
            let c = homology_contraction(&alg.complex());
            Member { alg, c }
        })
        .collect()
}

fn stasheff_suite(corpus: &[Member]) -> Outcome {
    let start = Instant::now();
    let mut higher = 0;
    for (i, m) in corpus.iter().enumerate() {
        let t = transfer_hpt(&m.alg.to_ainf(6), &m.c, 6).map_err(|e| format!("member {i}: {e}"))?;
        let st = check_stasheff(&t.structure, 6);
        ensure(st.passed(), || format!("member {i}: {:?}", st.first_failure))?;
        let mo = check_morphism(t.morphism.as_ref().unwrap(), 6);
        ensure(mo.passed(), || format!("member {i}: morphism {:?}", mo.first_failure))?;
        if t.structure.ops.range(3..).any(|(_, t)| !t.is_empty()) {
            higher += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 300.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{} algebras to arity 6, {higher} with higher operations, {secs:.1}s", corpus.len()))
}

fn four_methods(corpus: &[Member]) -> Outcome {
    for (i, m) in corpus.iter().enumerate() {
        let all = transfer_all(&m.alg.to_ainf(5), &m.c, 5, &Method::ALL).map_err(|e| format!("member {i}: {e}"))?;
        ensure(all.len() == 4, || format!("member {i}: {} methods ran", all.len()))?;
        let with_f = all.iter().filter(|t| t.morphism.is_some()).count();
        ensure(with_f >= 3, || format!("member {i}: only {with_f} morphisms"))?;
    }
    Ok(format!("{} algebras, m_n and f_n identical up to arity 5", corpus.len()))
}

fn flatten(alg: &DgAlgebra) -> DgAlgebra {
    let b = alg.carrier.clone();
    DgAlgebra::new(b.clone(), GradedMap::zero(b.clone(), b, -1), alg.mu.clone()).unwrap()
}

fn trivial_contraction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut algebras = vec![truncated_polynomial(Field::Prime(5)), flatten(&massey_algebra(Field::Rational))];
    for i in 0..20 {
        let field = if i % 2 == 0 { Field::Prime(5) } else { Field::Rational };
        let shape = AlgebraShape { commutative: i % 3 == 0, ..Default::default() };
        algebras.push(flatten(&random_monomial_algebra(&mut rng, field, shape).unwrap()));
    }
    for (i, alg) in algebras.iter().enumerate() {
        let c = Contraction::trivial(alg.complex());
        let a = alg.to_ainf(5);
        let (out, tau) = transfer_recursive(&a, &c, 5).map_err(|e| e.to_string())?;
        ensure(out.structure.op(2) == a.op(2), || format!("algebra {i}: m2 changed"))?;
        ensure(out.structure.ops.range(3..).all(|(_, t)| t.is_empty()), || format!("algebra {i}: higher m_n"))?;
        ensure(tau.components.range(2..).all(|(_, t)| t.is_empty()), || format!("algebra {i}: higher tau"))?;
        let all = transfer_all(&a, &c, 5, &Method::ALL).map_err(|e| e.to_string())?;
        ensure(all.iter().all(|t| t.structure == out.structure), || format!("algebra {i}: methods differ"))?;
    }
    Ok(format!("{} zero-differential algebras", algebras.len()))
}

fn massey_witness() -> Outcome {
    for field in [Field::Rational, Field::Prime(5)] {
        let alg = massey_algebra(field);
        let c = homology_contraction(&alg.complex());
        let out = transfer_hpt(&alg.to_ainf(3), &c, 3).map_err(|e| e.to_string())?;
        let unit = |name: &str| Lin::single(alg.carrier.index_of(name).unwrap(), field.one());
        let class = |x: &Lin<usize>| (0..c.small.dim()).find(|&i| c.nabla.column(i) == x).unwrap() as u32;
        let (a, b, cc) = (class(&unit("a")), class(&unit("b")), class(&unit("c")));
        let m3 = out.structure.apply_op(3, &[a, b, cc]);
        ensure(!m3.is_zero(), || "m3 vanishes".into())?;
        let xc = alg.mul(&unit("x"), &unit("c"));
        let ay = alg.mul(&unit("a"), &unit("y"));
        let matches = [false, true].iter().any(|&t| {
            let mut r = xc.clone();
            r.add_assign(&ay.clone().signed(t));
            c.pi.apply(&r) == m3
        });
        ensure(matches, || format!("m3 is not the class of x c ± a y over {field}"))?;
    }
    Ok("m3([a],[b],[c]) = [x c ± a y] over Q and F5".into())
}

fn perturbation_contract(corpus: &[Member]) -> Outcome {
    let mut calls = 0;
    for (i, m) in corpus.iter().enumerate() {
        let a = m.alg.to_ainf(5);
        let p = BarPerturbation::new(&a, &m.c, 5).map_err(|e| e.to_string())?;
        let r = p.verify(p.verify_length(3000)).map_err(|e| format!("member {i}: {e}"))?;
        ensure(r.all_passed(), || format!("member {i}: {:?}", r))?;
        p.transfer().map_err(|e| format!("member {i}: {e}"))?;
        calls += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in 0..20 {
        let field = if i % 2 == 0 { Field::Rational } else { Field::Prime(5) };
        let shape = AlgebraShape { generators: rng.gen_range(2..=6), commutative: i % 3 == 0, ..Default::default() };
        let coalg = random_coalgebra(&mut rng, field, shape).unwrap();
        let input = coalg.to_ainf(4);
        let c = homology_contraction(&coalg.complex());
        let p = CobarPerturbation::new(&input, &c, 4, CobarMode::Connected).map_err(|e| e.to_string())?;
        let r = p.verify(p.verify_length(3000)).map_err(|e| format!("coalgebra {i}: {e}"))?;
        ensure(r.all_passed(), || format!("coalgebra {i}: {:?}", r))?;
        p.transfer().map_err(|e| format!("coalgebra {i}: {e}"))?;
        calls += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for i in 0..20 {
        let g = random_dgla(&mut rng, Field::Rational, 6, 12).unwrap();
        let c = homology_contraction(&ChainComplex::new(g.d.clone()).unwrap());
        let out = transfer_linf(&g, &c, 4).map_err(|e| format!("dgla {i}: {e}"))?;
        let r = out.perturbed.contraction.verify();
        ensure(r.all_passed(), || format!("dgla {i}: {:?}", r.failures()))?;
        calls += 1;
    }
    Ok(format!("{calls} perturbations: axioms, square zero and both transferred forms agree"))
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

fn linf_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut nontrivial = 0;
    let mut algebras: Vec<DgLieAlgebra> = vec![nilpotent_dgla(Field::Rational)];
    algebras.extend((0..50).map(|_| random_dgla(&mut rng, Field::Rational, 6, 12).unwrap()));
    for (i, g) in algebras.iter().enumerate() {
        let c = homology_contraction(&ChainComplex::new(g.d.clone()).unwrap());
        let out = transfer_linf(g, &c, 4).map_err(|e| format!("dgla {i}: {e}"))?;
        let sq = out.structure.check_square_zero(4);
        ensure(sq.passed(), || format!("dgla {i}: {:?}", sq.first_failure))?;
        let ma = check_master(g, &out.structure, &out.tau, 4);
        ensure(ma.passed(), || format!("dgla {i}: master {:?}", ma.first_failure))?;
        ensure(out.agrees_with_perturbation, || format!("dgla {i}: recursion and perturbation differ"))?;
        if out.structure.coderivation.from_arity(2).components.values().any(|t| !t.is_empty()) {
            nontrivial += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..20 {
        let shape = AlgebraShape { generators: 3, max_basis: 6, commutative: true, ..Default::default() };
        let a = random_monomial_algebra(&mut rng, Field::Rational, shape).unwrap();
        let g = tensor_dgla(LieKind::Abelian2, &a, i % 2 == 0).unwrap();
        let c = homology_contraction(&ChainComplex::new(g.d.clone()).unwrap());
        let out = transfer_linf(&g, &c, 4).map_err(|e| format!("abelian {i}: {e}"))?;
        ensure(out.structure.coderivation.from_arity(2).is_zero(), || format!("abelian {i}: nonzero brackets"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut lie, mut not_lie) = (0, 0);
    for i in 0..200 {
        let degrees: &[i64] = if i % 2 == 0 { &[0, 0, 0] } else { &[0, 0, 1, 1] };
        let g = random_skew(&mut rng, degrees);
        let jacobi = g.jacobi_failure().is_none();
        ensure(jacobi == check_cce_square_zero(&g, 3).passed(), || format!("bracket {i} disagrees"))?;
        if jacobi {
            lie += 1;
        } else {
            not_lie += 1;
        }
    }
    ensure(lie > 0 && not_lie > 0, || "one direction untested".into())?;
    Ok(format!(
        "{} DGLAs ({nontrivial} with higher brackets), 20 abelian, Jacobi iff square zero on {lie} Lie and {not_lie} non-Lie brackets",
        algebras.len()
    ))
}

fn duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut nontrivial = 0;
    for i in 0..30 {
        let field = if i % 2 == 0 { Field::Rational } else { Field::Prime(5) };
        let shape = AlgebraShape { generators: rng.gen_range(2..=6), commutative: i % 3 == 0, ..Default::default() };
        let coalg = random_coalgebra(&mut rng, field, shape).unwrap();
        let input = coalg.to_ainf(4);
        let c = homology_contraction(&coalg.complex());
        let out = transfer_coalgebra(&input, &c, 4, CobarMode::Connected).map_err(|e| format!("dgc {i}: {e}"))?;
        ensure(check_cotwisting(&coalg, &out.structure, &out.tau, 4).passed(), || format!("dgc {i}: cotwisting"))?;
        let dual_c = dualize_contraction(&c).map_err(|e| e.to_string())?;
        let dual = transfer_hpt(&dualize_coalgebra(&input), &dual_c, 4).map_err(|e| format!("dgc {i}: {e}"))?;
        ensure(dualize_coalgebra(&out.structure) == dual.structure, || format!("dgc {i}: duals differ"))?;
        if out.structure.ops.keys().any(|&n| n >= 3) {
            nontrivial += 1;
        }
    }
    ensure(nontrivial > 0, || "no higher cooperations".into())?;
    Ok(format!("30 coalgebras to arity 4, {nontrivial} with higher cooperations"))
}

fn weak_systems() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut weak = 0;
    for i in 0..25 {
        let field = if i % 2 == 0 { Field::Rational } else { Field::Prime(5) };
        let w = random_weak_system(&mut rng, field).unwrap();
        if !w.0.verify().all_passed() {
            weak += 1;
        }
        let n = normalize_weak_system(&w).map_err(|e| format!("system {i}: {e}"))?;
        ensure(n.blocks.projector_idempotent, || format!("system {i}: pi nabla not idempotent"))?;
        ensure(n.blocks.holds(), || format!("system {i}: {:?}", n.blocks))?;
        let r = n.contraction.verify();
        ensure(r.all_passed(), || format!("system {i}: {:?}", r.failures()))?;
    }
    ensure(weak >= 20, || format!("only {weak} systems were not already contractions"))?;
    Ok(format!("25 systems ({weak} not contractions) normalized"))
}

fn cinfinity(corpus: &[Member]) -> Outcome {
    let mut checked = 0;
    for (i, m) in corpus.iter().enumerate().filter(|(_, m)| m.alg.is_graded_commutative()) {
        let t = transfer_hpt(&m.alg.to_ainf(5), &m.c, 5).map_err(|e| e.to_string())?;
        let r = check_cinfinity(&t.structure, 5);
        ensure(r.passed(), || format!("member {i}: {:?}", r.first_failure))?;
        checked += 1;
    }
    ensure(checked > 0, || "no commutative members".into())?;
    let tri = triangular_algebra(Field::Rational);
    ensure(!check_cinfinity(&tri.to_ainf(2), 3).passed(), || "check accepts a noncommutative product".into())?;
    let massey = massey_algebra(Field::Rational);
    let c = homology_contraction(&massey.complex());
    let t = transfer_hpt(&massey.to_ainf(4), &c, 4).map_err(|e| e.to_string())?;
    let massey_ok = check_cinfinity(&t.structure, 4).passed();
    Ok(format!(
        "{checked} commutative members pass; triangular product fails; noncommutative Massey transfer {}",
        if massey_ok { "passes" } else { "fails" }
    ))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/fixtures").join(name)
}

fn cli(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_homotransfer")).args(args).output().unwrap().status.code().unwrap()
}

fn cli_round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let identical = |text: &str| -> Result<(), String> {
        let doc = parse_str(text).map_err(|e| e.to_string())?;
        let again = emit_string(&emit(&load(&doc).map_err(|e| e.to_string())?));
        ensure(again == text, || "emit(parse(x)) differs from x".into())
    };
    let f = Field::Rational;
    let mut files = 0;
    for (name, x) in [
        ("trivial.json", Loaded::Dga(truncated_polynomial(f))),
        ("massey.json", Loaded::Dga(massey_algebra(f))),
        ("nilpotent_dgla.json", Loaded::Dgla(nilpotent_dgla(f))),
    ] {
        let text = fs::read_to_string(fixture(name)).map_err(|e| e.to_string())?;
        ensure(text == emit_string(&emit(&x)), || format!("{name} is stale"))?;
        identical(&text).map_err(|e| format!("{name}: {e}"))?;
        for cmd in ["transfer", "homology"] {
            let out = dir.path().join(format!("{cmd}-{name}"));
            let code = cli(&[cmd, fixture(name).to_str().unwrap(), "--max-arity", "4", "--out", out.to_str().unwrap()]);
            ensure(code == 0, || format!("{cmd} {name} exited {code}"))?;
            identical(&fs::read_to_string(&out).unwrap()).map_err(|e| format!("{cmd} {name}: {e}"))?;
            files += 1;
        }
    }
    let bad_json = dir.path().join("bad.json");
    fs::write(&bad_json, "{").unwrap();
    let non_assoc = dir.path().join("nonassoc.json");
    fs::write(
        &non_assoc,
        r#"{"kind":"dga","field":"Q","generators":[{"name":"x","degree":0},{"name":"y","degree":0}],
        "product":[{"inputs":["x","x"],"output":"y","coefficient":"1"},{"inputs":["x","y"],"output":"x","coefficient":"1"}]}"#,
    )
    .unwrap();
    let massey = fixture("massey.json");
    let massey = massey.to_str().unwrap();
    let mut codes = BTreeMap::new();
    codes.insert(0, cli(&["transfer", massey, "--method", "all", "--max-arity", "4"]));
    codes.insert(2, cli(&["transfer", bad_json.to_str().unwrap()]));
    codes.insert(3, cli(&["transfer", non_assoc.to_str().unwrap()]));
    codes.insert(4, homotransfer_cli::exit_code(&homotransfer::Error::MethodDivergence(String::new())));
    codes.insert(5, cli(&["transfer", massey, "--method", "trees", "--tree-budget", "1"]));
    for (&want, &got) in &codes {
        ensure(want == got, || format!("expected exit code {want}, got {got}"))?;
    }
    Ok(format!("3 fixtures and {files} outputs byte-identical, exit codes 0 2 3 4 5"))
}

fn main() -> ExitCode {
    let corpus = dga_corpus();
    let criteria: Vec<Criterion> = vec![
        ("stasheff suite", Box::new(|| stasheff_suite(&corpus))),
        ("four-method agreement", Box::new(|| four_methods(&corpus))),
        ("trivial contraction", Box::new(trivial_contraction)),
        ("massey witness", Box::new(massey_witness)),
        ("perturbation contract", Box::new(|| perturbation_contract(&corpus))),
        ("l-infinity suite", Box::new(linf_suite)),
        ("duality", Box::new(duality)),
        ("weak systems", Box::new(weak_systems)),
        ("c-infinity check", Box::new(|| cinfinity(&corpus))),
        ("cli round trip", Box::new(cli_round_trip)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name}: {detail} [{:.1}s]", i + 1, start.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
