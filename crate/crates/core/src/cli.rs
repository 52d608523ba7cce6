//! Command dispatch behind the `tropabel` binary.

use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bundle::{
    direct_sum, equivalent_bundles, is_homogeneous, is_semi_homogeneous, moduli_point, pullback,
    pushforward, slope, sym_point, tensor, translate, ModuliPoint, SymPoint, TropLineBundle,
    TropVectorBundle,
};
use crate::error::{Error, Result};
use crate::lattice::{RationalLattice, Sublattice, DEFAULT_ENUMERATION_BOUND};
use crate::na::{tropicalize_line_bundle, tropicalize_simple, trop_rep, verify_commuting_square, SquareReport};
use crate::random;
use crate::rational::RationalMatrix;
use crate::scenario::Scenario;
use crate::trop_char::{
    canonical_form, decompose_rep, eta_trop, stratum, IndecomposablePiece, OrbitComponent,
    TropRepresentation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BundleOp {
    Sum,
    Tensor,
    Pullback,
    Pushforward,
    Translate,
    Slope,
    Equiv,
    ModuliPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RepOp {
    Decompose,
    Canonical,
    Eta,
    Stratum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NaOp {
    TropLine,
    TropSimple,
    TropRep,
    VerifySquare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    NsAnalyze,
    Bundle(BundleOp),
    Rep(RepOp),
    Na(NaOp),
}

impl Command {
    /// Parses the words after the program name, e.g. `["bundle", "tensor"]`.
    pub fn parse(words: &[&str]) -> Result<Command> {
        let bad = || Error::Parse(format!("unknown command {:?}", words.join(" ")));
        match words {
            ["ns-analyze"] => Ok(Command::NsAnalyze),
            ["bundle", o] => BundleOp::from_str(o, false).map(Command::Bundle).map_err(|_| bad()),
            ["rep", o] => RepOp::from_str(o, false).map(Command::Rep).map_err(|_| bad()),
            ["na", o] => NaOp::from_str(o, false).map(Command::Na).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub seed: Option<u64>,
    pub bound: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NsReport {
    #[serde(rename = "H")]
    pub h: RationalMatrix,
    pub r_symmetric: bool,
    pub gm_symmetric: bool,
    pub large_lattice: Sublattice,
    pub small_lattice: Sublattice,
    pub m_large: RationalLattice,
    pub m_large_index: u64,
    pub n_large: Sublattice,
    pub n_large_index: u64,
    pub quotient_invariants: Vec<i64>,
    pub quotient_generators: Vec<Vec<i64>>,
    /// Phase of `B(g_i, g_j)` on the quotient generators.
    pub pairing_phases: RationalMatrix,
    pub admissible_lattices: Vec<Sublattice>,
    pub rank: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleReport {
    pub bundle: TropVectorBundle,
    pub rank: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub slope: RationalMatrix,
    pub homogeneous: bool,
    pub semi_homogeneous: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivReport {
    pub equivalent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuliReport {
    pub points: Vec<ModuliPoint>,
    pub symmetric: SymPoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub components: Vec<OrbitComponent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalReport {
    pub canonical_form: Vec<IndecomposablePiece>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumReport {
    pub stratum: Vec<Sublattice>,
    pub diagonal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareSuite {
    pub seed: Option<u64>,
    pub reports: Vec<SquareReport>,
    pub all_commute: bool,
}

/// Serializes and checks that the text parses back to the same value.
fn emit<T: Serialize + DeserializeOwned + PartialEq>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Inconsistent(format!("serialization failed: {e}")))?;
    let back: T = serde_json::from_str(&text)
        .map_err(|e| Error::Inconsistent(format!("output does not re-parse: {e}")))?;
    if &back != value {
        return Err(Error::Inconsistent("output does not round-trip".into()));
    }
    text.push('\n');
    Ok(text)
}

pub fn run(command: Command, scenario: &Scenario, options: Options) -> Result<String> {
    let bound = options
        .bound
        .or(scenario.parameters.bound)
        .unwrap_or(DEFAULT_ENUMERATION_BOUND);
    match command {
        Command::NsAnalyze => emit(&ns_analyze(scenario, bound)?),
        Command::Bundle(op) => run_bundle(op, scenario),
        Command::Rep(op) => run_rep(op, scenario),
        Command::Na(op) => run_na(op, scenario, options, bound),
    }
}

pub fn ns_analyze(scenario: &Scenario, bound: u64) -> Result<NsReport> {
    let t = scenario.require_na_torus()?;
    let h = scenario.require_class()?;
    let cg = t.commutator_group(h)?;
    let admissible = cg.admissible_lattices(bound)?;
    let rank = t.rank_of_class(h, bound)?;
    let m_large = h.m_large()?;
    let m = crate::ns::NsClass::zero(t.rank()).m_large()?;
    let n_large = h.n_large()?;
    Ok(NsReport {
        h: h.matrix().clone(),
        r_symmetric: t.trop().is_r_symmetric(h.matrix())?,
        gm_symmetric: t.is_gm_symmetric(h).unwrap_or(false),
        large_lattice: cg.large.clone(),
        small_lattice: cg.small.clone(),
        m_large_index: m_large.index_of(&m)?,
        m_large,
        n_large_index: n_large.index(),
        n_large,
        quotient_invariants: cg.group.invariant_factors().to_vec(),
        quotient_generators: cg.group.generator_lifts().to_vec(),
        pairing_phases: cg.phases.clone(),
        admissible_lattices: admissible,
        rank,
    })
}

fn bundle_report(e: TropVectorBundle) -> Result<String> {
    let rank = e.rank();
    emit(&BundleReport { bundle: e, rank })
}

fn missing(path: &str) -> Error {
    Error::Validation {
        path: path.into(),
        message: "missing".into(),
    }
}

fn run_bundle(op: BundleOp, s: &Scenario) -> Result<String> {
    let t = &s.torus;
    let p = &s.parameters;
    match op {
        BundleOp::Sum | BundleOp::Tensor => {
            let es = s.selected_bundles(2)?;
            let mut acc = es[0].clone();
            for e in &es[1..] {
                acc = if op == BundleOp::Sum {
                    direct_sum(&acc, e)?
                } else {
                    tensor(t, &acc, e)?
                };
            }
            bundle_report(acc)
        }
        BundleOp::Pullback => {
            let sub = p.sublattice.as_ref().ok_or_else(|| missing("parameters.sublattice"))?;
            bundle_report(pullback(t, s.selected_bundle()?, sub)?)
        }
        BundleOp::Pushforward => {
            let full = Sublattice::full(t.rank());
            let target = p.target.as_ref().unwrap_or(&full);
            bundle_report(pushforward(s.selected_bundle()?, target)?)
        }
        BundleOp::Translate => {
            let x = p.point.as_ref().ok_or_else(|| missing("parameters.point"))?;
            bundle_report(translate(t, s.selected_bundle()?, x)?)
        }
        BundleOp::Slope => {
            let e = s.selected_bundle()?;
            emit(&SlopeReport {
                slope: slope(e)?,
                homogeneous: is_homogeneous(e),
                semi_homogeneous: is_semi_homogeneous(e),
            })
        }
        BundleOp::Equiv => {
            let es = s.selected_bundles(2)?;
            let mut equivalent = true;
            for e in &es[1..] {
                equivalent &= equivalent_bundles(t, es[0], e)?;
            }
            emit(&EquivReport { equivalent })
        }
        BundleOp::ModuliPoint => {
            let e = s.selected_bundle()?;
            let gamma = match &p.gamma {
                Some(g) => g.clone(),
                None => common_cover(e)?,
            };
            let points = e
                .summands()
                .iter()
                .map(|x| moduli_point(t, e.base(), x, &gamma, x.class()))
                .collect::<Result<Vec<_>>>()?;
            let symmetric = sym_point(&points)?;
            emit(&ModuliReport { points, symmetric })
        }
    }
}

fn common_cover(e: &TropVectorBundle) -> Result<Sublattice> {
    let mut it = e.summands().iter().map(TropLineBundle::lattice);
    let first = it.next().ok_or(Error::EmptyBundle)?.clone();
    it.try_fold(first, |acc, l| acc.intersect(l))
}

fn run_rep(op: RepOp, s: &Scenario) -> Result<String> {
    let name = s
        .parameters
        .rep
        .as_deref()
        .ok_or_else(|| missing("parameters.rep"))?;
    let rho: &TropRepresentation = s.representation(name)?;
    match op {
        RepOp::Decompose => emit(&DecomposeReport {
            components: decompose_rep(rho)?,
        }),
        RepOp::Canonical => emit(&CanonicalReport {
            canonical_form: canonical_form(rho)?,
        }),
        RepOp::Eta => bundle_report(eta_trop(rho)?),
        RepOp::Stratum => {
            let st = stratum(rho)?;
            let diagonal = st.iter().all(Sublattice::is_full);
            emit(&StratumReport {
                stratum: st,
                diagonal,
            })
        }
    }
}

fn run_na(op: NaOp, s: &Scenario, options: Options, bound: u64) -> Result<String> {
    let t = s.require_na_torus()?;
    let p = &s.parameters;
    match op {
        NaOp::TropLine => {
            let name = p.na_bundle.as_deref().ok_or_else(|| missing("parameters.na_bundle"))?;
            emit(&tropicalize_line_bundle(t, s.na_bundle(name)?)?)
        }
        NaOp::TropSimple => {
            let name = p.na_bundle.as_deref().ok_or_else(|| missing("parameters.na_bundle"))?;
            let b = s.na_bundle(name)?;
            let h = s.require_class()?;
            emit(&tropicalize_simple(t, h, b.lattice(), b, bound)?)
        }
        NaOp::TropRep => {
            let name = p.na_rep.as_deref().ok_or_else(|| missing("parameters.na_rep"))?;
            emit(&trop_rep(s.na_rep(name)?)?)
        }
        NaOp::VerifySquare => {
            let mut reports = Vec::new();
            if let Some(name) = p.na_rep.as_deref() {
                reports.push(verify_commuting_square(t, s.na_rep(name)?)?);
            }
            let seed = options.seed.or(p.seed);
            if let Some(seed) = seed {
                let mut rng = random::seeded(seed);
                for _ in 0..p.samples.unwrap_or(20) {
                    let r = rand::Rng::gen_range(&mut rng, 1..=4);
                    let rho = random::semisimple_rep(&mut rng, t.rank(), r);
                    reports.push(verify_commuting_square(t, &rho)?);
                }
            }
            if reports.is_empty() {
                return Err(Error::Validation {
                    path: "parameters.na_rep".into(),
                    message: "give a representation or a seed".into(),
                });
            }
            let all_commute = reports.iter().all(|r| r.commutes);
            emit(&SquareSuite {
                seed,
                reports,
                all_commute,
            })
        }
    }
}
