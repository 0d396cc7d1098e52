//! JSON structure files.
//!
//! Coefficients are written as decimal integers or `p/q` strings. Emission
//! is canonical: generators in carrier order, entries sorted by input word
//! and then by output, so that emit, parse, emit is byte-identical.

use std::collections::BTreeMap;
use std::sync::Arc;

use homotransfer::ainf::{check_table_degrees, AInfinityMorphism, AInfinityStructure, DgAlgebra};
use homotransfer::coalgebra::{AInfinityCoalgebra, CoTable, DgCoalgebra};
use homotransfer::complex::{ChainComplex, Contraction};
use homotransfer::linfty::{sym_sort, DgLieAlgebra, LInfinityStructure, LieTwistingCochain, SymCoderivation};
use homotransfer::words::{Table, Word};
use homotransfer::{Error, Field, GradedBasis, GradedMap, Lin, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Dga,
    Dgc,
    Dgla,
    Ainf,
    AinfCoalgebra,
    Linf,
    Contraction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

/// `coefficient · output` as the value of a map on `inputs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub inputs: Vec<String>,
    pub output: String,
    pub coefficient: String,
}

/// `coefficient · outputs` as a term in the value of a cooperation on `input`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoEntry {
    pub input: String,
    pub outputs: Vec<String>,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSection {
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub differential: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionSection {
    pub small: ComplexSection,
    pub pi: Vec<Entry>,
    pub nabla: Vec<Entry>,
    pub h: Vec<Entry>,
}

/// Components of an A∞-morphism from the file's structure to `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSection {
    pub target: Box<Document>,
    pub components: Vec<Entry>,
}

/// A Lie twisting cochain from the file's L∞-structure to `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistingSection {
    pub target: Box<Document>,
    pub components: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Document {
    pub kind: Kind,
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_arity: Option<usize>,
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub differential: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub product: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagonal: Vec<CoEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bracket: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ops: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cooperations: Vec<CoEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contraction: Option<ContractionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morphism: Option<MorphismSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twisting: Option<TwistingSection>,
}

/// A loaded and validated structure file.
#[derive(Clone, Debug)]
pub enum Loaded {
    Dga(DgAlgebra),
    Dgc(DgCoalgebra),
    Dgla(DgLieAlgebra),
    Ainf { structure: AInfinityStructure, morphism: Option<AInfinityMorphism> },
    AinfCoalgebra(AInfinityCoalgebra),
    Linf { structure: LInfinityStructure, twisting: Option<(DgLieAlgebra, LieTwistingCochain)> },
    Contraction(Contraction),
}

impl Loaded {
    pub fn kind(&self) -> Kind {
        match self {
            Loaded::Dga(_) => Kind::Dga,
            Loaded::Dgc(_) => Kind::Dgc,
            Loaded::Dgla(_) => Kind::Dgla,
            Loaded::Ainf { .. } => Kind::Ainf,
            Loaded::AinfCoalgebra(_) => Kind::AinfCoalgebra,
            Loaded::Linf { .. } => Kind::Linf,
            Loaded::Contraction(_) => Kind::Contraction,
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Loaded::Dga(a) => a.field(),
            Loaded::Dgc(c) => c.field(),
            Loaded::Dgla(g) => g.field(),
            Loaded::Ainf { structure, .. } => structure.field(),
            Loaded::AinfCoalgebra(c) => c.field(),
            Loaded::Linf { structure, .. } => structure.carrier.field(),
            Loaded::Contraction(c) => c.field(),
        }
    }
}

pub fn parse_str(text: &str) -> Result<Document> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn emit_string(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

struct Names<'a> {
    basis: &'a GradedBasis,
}

impl Names<'_> {
    fn index(&self, name: &str) -> Result<u32> {
        self.basis
            .index_of(name)
            .map(|i| i as u32)
            .ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))
    }

    fn word(&self, names: &[String]) -> Result<Word> {
        names.iter().map(|n| self.index(n)).collect()
    }
}

fn basis_of(field: Field, generators: &[Generator]) -> Result<Arc<GradedBasis>> {
    let b = GradedBasis::new(field, generators.iter().map(|g| (g.name.clone(), g.degree)))
        .map_err(|e| Error::Parse(e.to_string()))?;
    Ok(Arc::new(b))
}

fn table(field: Field, src: &GradedBasis, tgt: &GradedBasis, entries: &[Entry]) -> Result<Table> {
    let (s, t) = (Names { basis: src }, Names { basis: tgt });
    let mut out = Table::new();
    for e in entries {
        let w = s.word(&e.inputs)?;
        let y = t.index(&e.output)? as usize;
        out.entry(w).or_insert_with(Lin::zero).add_term(y, field.parse(&e.coefficient)?);
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

fn by_arity(t: Table) -> BTreeMap<usize, Table> {
    let mut out: BTreeMap<usize, Table> = BTreeMap::new();
    for (w, v) in t {
        out.entry(w.len()).or_default().insert(w, v);
    }
    out
}

fn linear(field: Field, src: &Arc<GradedBasis>, tgt: &Arc<GradedBasis>, degree: i64, entries: &[Entry]) -> Result<GradedMap> {
    let t = table(field, src, tgt, entries)?;
    if t.keys().any(|w| w.len() != 1) {
        return Err(Error::Parse("linear maps take exactly one input".into()));
    }
    let mut cols = vec![Lin::zero(); src.len()];
    for (w, v) in t {
        cols[w[0] as usize] = v;
    }
    GradedMap::new(src.clone(), tgt.clone(), degree, cols)
}

fn cotable(field: Field, basis: &GradedBasis, entries: &[CoEntry]) -> Result<BTreeMap<usize, CoTable>> {
    let names = Names { basis };
    let mut out: BTreeMap<usize, CoTable> = BTreeMap::new();
    for e in entries {
        let x = names.index(&e.input)? as usize;
        let w = names.word(&e.outputs)?;
        let col = out.entry(w.len()).or_insert_with(|| vec![Lin::zero(); basis.len()]);
        col[x].add_term(w, field.parse(&e.coefficient)?);
    }
    Ok(out)
}

fn max_arity(doc: &Document, found: usize) -> usize {
    doc.max_arity.unwrap_or(5).max(found)
}

/// Normal form of symmetric entries with the Koszul sign of sorting the
/// suspended letters.
fn symmetric(t: Table, carrier: &GradedBasis) -> Table {
    let letters = carrier.shifted(1);
    let mut out = Table::new();
    for (w, v) in t {
        if let Some((u, negate)) = sym_sort(&w, &letters) {
            out.entry(u).or_insert_with(Lin::zero).add_assign(&v.signed(negate));
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

pub fn load(doc: &Document) -> Result<Loaded> {
    let field: Field = doc.field.parse()?;
    let basis = basis_of(field, &doc.generators)?;
    let d = || linear(field, &basis, &basis, -1, &doc.differential);
    let loaded = match doc.kind {
        Kind::Dga => {
            let a = DgAlgebra::new(basis.clone(), d()?, table(field, &basis, &basis, &doc.product)?)?;
            a.validate()?;
            Loaded::Dga(a)
        }
        Kind::Dgc => {
            let mut co = cotable(field, &basis, &doc.diagonal)?;
            if co.keys().any(|&n| n != 2) {
                return Err(Error::Parse("diagonal terms have exactly two outputs".into()));
            }
            let delta = co.remove(&2).unwrap_or_else(|| vec![Lin::zero(); basis.len()]);
            let c = DgCoalgebra::new(basis.clone(), d()?, delta)?;
            c.validate()?;
            Loaded::Dgc(c)
        }
        Kind::Dgla => {
            let g = DgLieAlgebra::new(basis.clone(), d()?, table(field, &basis, &basis, &doc.bracket)?)?;
            g.validate()?;
            Loaded::Dgla(g)
        }
        Kind::Ainf => {
            let mut ops = by_arity(table(field, &basis, &basis, &doc.ops)?);
            if ops.contains_key(&1) {
                return Err(Error::Parse("m1 belongs in the differential section".into()));
            }
            let m1 = d()?;
            ops.insert(1, (0..basis.len()).map(|x| (Word::from_slice(&[x as u32]), m1.column(x).clone())).collect());
            let top = max_arity(doc, ops.keys().copied().max().unwrap_or(1));
            let structure = AInfinityStructure::new(basis.clone(), ops, top)?;
            let morphism = match &doc.morphism {
                None => None,
                Some(m) => {
                    let target = match load(&m.target)? {
                        Loaded::Ainf { structure, .. } => structure,
                        Loaded::Dga(a) => a.to_ainf(top),
                        _ => return Err(Error::Parse("morphism target must be an algebra".into())),
                    };
                    let comps = by_arity(table(field, &basis, &target.carrier, &m.components)?);
                    Some(AInfinityMorphism::new(Arc::new(structure.clone()), Arc::new(target), comps)?)
                }
            };
            Loaded::Ainf { structure, morphism }
        }
        Kind::AinfCoalgebra => {
            let mut ops = cotable(field, &basis, &doc.cooperations)?;
            if ops.contains_key(&1) {
                return Err(Error::Parse("Δ1 belongs in the differential section".into()));
            }
            let m1 = d()?;
            ops.insert(1, (0..basis.len()).map(|x| m1.column(x).map_keys(|&y| Word::from_slice(&[y as u32]))).collect());
            let top = max_arity(doc, ops.keys().copied().max().unwrap_or(1));
            Loaded::AinfCoalgebra(AInfinityCoalgebra::new(basis.clone(), ops, top)?)
        }
        Kind::Linf => {
            let mut components = by_arity(symmetric(table(field, &basis, &basis, &doc.ops)?, &basis));
            if components.contains_key(&1) {
                return Err(Error::Parse("the linear part belongs in the differential section".into()));
            }
            for (&j, t) in &components {
                check_table_degrees(t, &basis, &basis, j as i64 - 2, &format!("l{j}"))?;
            }
            let m1 = d()?;
            ChainComplex::new(m1.clone())?;
            let q1: Table = (0..basis.len())
                .map(|x| (Word::from_slice(&[x as u32]), m1.column(x).neg()))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            if !q1.is_empty() {
                components.insert(1, q1);
            }
            let top = max_arity(doc, components.keys().copied().max().unwrap_or(1));
            let structure =
                LInfinityStructure { carrier: basis.clone(), coderivation: SymCoderivation { components }, max_arity: top };
            let twisting = match &doc.twisting {
                None => None,
                Some(t) => {
                    let Loaded::Dgla(g) = load(&t.target)? else {
                        return Err(Error::Parse("twisting cochain target must be a dgla".into()));
                    };
                    let comps = by_arity(symmetric(table(field, &basis, &g.carrier, &t.components)?, &basis));
                    for (&j, c) in &comps {
                        check_table_degrees(c, &basis, &g.carrier, j as i64 - 1, &format!("tau{j}"))?;
                    }
                    Some((g, LieTwistingCochain { components: comps }))
                }
            };
            Loaded::Linf { structure, twisting }
        }
        Kind::Contraction => {
            let section = doc
                .contraction
                .as_ref()
                .ok_or_else(|| Error::Parse("contraction section missing".into()))?;
            let small = basis_of(field, &section.small.generators)?;
            let small_d = linear(field, &small, &small, -1, &section.small.differential)?;
            let c = Contraction::new(
                ChainComplex::new(d()?)?,
                ChainComplex::new(small_d)?,
                linear(field, &basis, &small, 0, &section.pi)?,
                linear(field, &small, &basis, 0, &section.nabla)?,
                linear(field, &basis, &basis, 1, &section.h)?,
            )?;
            Loaded::Contraction(c)
        }
    };
    Ok(loaded)
}

fn generators(basis: &GradedBasis) -> Vec<Generator> {
    (0..basis.len()).map(|i| Generator { name: basis.name(i).to_string(), degree: basis.degree(i) }).collect()
}

fn entries(t: &Table, src: &GradedBasis, tgt: &GradedBasis) -> Vec<Entry> {
    let mut out = Vec::new();
    for (w, v) in t {
        for (&y, c) in v {
            if c.is_zero() {
                continue;
            }
            out.push(Entry {
                inputs: w.iter().map(|&l| src.name(l as usize).to_string()).collect(),
                output: tgt.name(y).to_string(),
                coefficient: c.to_string(),
            });
        }
    }
    out
}

fn map_entries(m: &GradedMap) -> Vec<Entry> {
    let t: Table = (0..m.source().len())
        .map(|x| (Word::from_slice(&[x as u32]), m.column(x).clone()))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    entries(&t, m.source(), m.target())
}

fn co_entries(tables: &BTreeMap<usize, CoTable>, basis: &GradedBasis, skip_linear: bool) -> Vec<CoEntry> {
    let mut out = Vec::new();
    for x in 0..basis.len() {
        for (&n, t) in tables {
            if skip_linear && n == 1 {
                continue;
            }
            for (w, c) in &t[x] {
                if c.is_zero() {
                    continue;
                }
                out.push(CoEntry {
                    input: basis.name(x).to_string(),
                    outputs: w.iter().map(|&l| basis.name(l as usize).to_string()).collect(),
                    coefficient: c.to_string(),
                });
            }
        }
    }
    out
}

fn ops_entries(ops: &BTreeMap<usize, Table>, src: &GradedBasis, tgt: &GradedBasis, from: usize) -> Vec<Entry> {
    ops.range(from..).flat_map(|(_, t)| entries(t, src, tgt)).collect()
}

fn document(kind: Kind, basis: &GradedBasis) -> Document {
    Document {
        kind,
        field: basis.field().to_string(),
        max_arity: None,
        generators: generators(basis),
        differential: vec![],
        product: vec![],
        diagonal: vec![],
        bracket: vec![],
        ops: vec![],
        cooperations: vec![],
        contraction: None,
        morphism: None,
        twisting: None,
    }
}

fn differential_of(ops: &BTreeMap<usize, Table>, basis: &GradedBasis) -> Vec<Entry> {
    ops.get(&1).map(|t| entries(t, basis, basis)).unwrap_or_default()
}

pub fn emit(x: &Loaded) -> Document {
    match x {
        Loaded::Dga(a) => Document {
            differential: map_entries(&a.d),
            product: entries(&a.mu, &a.carrier, &a.carrier),
            ..document(Kind::Dga, &a.carrier)
        },
        Loaded::Dgc(c) => Document {
            differential: map_entries(&c.d),
            diagonal: co_entries(&[(2, c.delta.clone())].into(), &c.carrier, false),
            ..document(Kind::Dgc, &c.carrier)
        },
        Loaded::Dgla(g) => Document {
            differential: map_entries(&g.d),
            bracket: entries(&g.bracket, &g.carrier, &g.carrier),
            ..document(Kind::Dgla, &g.carrier)
        },
        Loaded::Ainf { structure, morphism } => Document {
            max_arity: Some(structure.max_arity),
            differential: differential_of(&structure.ops, &structure.carrier),
            ops: ops_entries(&structure.ops, &structure.carrier, &structure.carrier, 2),
            morphism: morphism.as_ref().map(|f| MorphismSection {
                target: Box::new(emit(&Loaded::Ainf { structure: (*f.target).clone(), morphism: None })),
                components: ops_entries(&f.comps, &f.source.carrier, &f.target.carrier, 1),
            }),
            ..document(Kind::Ainf, &structure.carrier)
        },
        Loaded::AinfCoalgebra(c) => Document {
            max_arity: Some(c.max_arity),
            differential: c
                .ops
                .get(&1)
                .map(|t| {
                    let lin: Table = t
                        .iter()
                        .enumerate()
                        .map(|(x, v)| (Word::from_slice(&[x as u32]), v.map_keys(|w| w[0] as usize)))
                        .filter(|(_, v)| !v.is_zero())
                        .collect();
                    entries(&lin, &c.carrier, &c.carrier)
                })
                .unwrap_or_default(),
            cooperations: co_entries(&c.ops, &c.carrier, true),
            ..document(Kind::AinfCoalgebra, &c.carrier)
        },
        Loaded::Linf { structure, twisting } => {
            let q = &structure.coderivation.components;
            let d: Table = q.get(&1).map(|t| t.iter().map(|(w, v)| (w.clone(), v.neg())).collect()).unwrap_or_default();
            Document {
                max_arity: Some(structure.max_arity),
                differential: entries(&d, &structure.carrier, &structure.carrier),
                ops: ops_entries(q, &structure.carrier, &structure.carrier, 2),
                twisting: twisting.as_ref().map(|(g, tau)| TwistingSection {
                    target: Box::new(emit(&Loaded::Dgla(g.clone()))),
                    components: ops_entries(&tau.components, &structure.carrier, &g.carrier, 1),
                }),
                ..document(Kind::Linf, &structure.carrier)
            }
        }
        Loaded::Contraction(c) => Document {
            differential: map_entries(c.big.d()),
            contraction: Some(ContractionSection {
                small: ComplexSection { generators: generators(c.small.basis()), differential: map_entries(c.small.d()) },
                pi: map_entries(&c.pi),
                nabla: map_entries(&c.nabla),
                h: map_entries(&c.h),
            }),
            ..document(Kind::Contraction, c.big.basis())
        },
    }
}
