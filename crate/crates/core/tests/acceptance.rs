//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command as Process;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use tropabel::bundle::{
    equivalent, equivalent_bundles, equivalent_on, moduli_point, pullback, pushforward, slope,
    tensor, ModuliPoint, TropLineBundle, TropVectorBundle,
};
use tropabel::cli::{
    BundleReport, CanonicalReport, DecomposeReport, EquivReport, ModuliReport, NsReport,
    SlopeReport, SquareSuite, StratumReport,
};
use tropabel::lattice::{rational_to_int, IntMatrix};
use tropabel::monomial::{MultiplicativePoint, ValuedMonomial};
use tropabel::na::{
    character_of, extend_r, tropicalize_line_bundle, verify_commuting_square, NaLineBundle,
};
use tropabel::ns::{NaTorus, NsClass, TropTorus};
use tropabel::random;
use tropabel::trop_char::{
    canonical_form, decompose_rep, eta_trop, representation_of_bundle, TropRepresentation,
};
use tropabel::{Rational, RationalMatrix, Sublattice};

type Check = Result<String, String>;

const MAX_QUOTIENT: u64 = 64;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e:?}"))
}

fn tp(n: i64, d: i64) -> ValuedMonomial {
    ValuedMonomial::t_power(q(n, d))
}

fn example_torus() -> NaTorus {
    NaTorus::new(vec![
        MultiplicativePoint::new(vec![tp(1, 1), ValuedMonomial::one()]),
        MultiplicativePoint::new(vec![ValuedMonomial::minus_one(), tp(1, 1)]),
    ])
    .expect("example torus")
}

fn lattice(rows: &[Vec<i64>]) -> Sublattice {
    Sublattice::from_basis(&IntMatrix::from_rows(rows).unwrap()).unwrap()
}

/// A random analytic torus with a random rational class whose commutator
/// group has order at most `MAX_QUOTIENT`.
fn random_instance(rng: &mut ChaCha8Rng, max_g: usize) -> (NaTorus, NsClass, u64) {
    loop {
        let g = rng.gen_range(1..=max_g);
        let t = random::na_torus(rng, g, 4);
        let h = random::ns_class(rng, t.trop(), 3, 2);
        let Ok(cg) = t.commutator_group(&h) else { continue };
        let order = cg.group.order();
        if order <= MAX_QUOTIENT {
            return (t, h, order);
        }
    }
}

fn random_lattice_vector(rng: &mut ChaCha8Rng, lat: &Sublattice) -> Vec<i64> {
    let basis = lat.basis_vectors();
    let mut v = vec![0i64; lat.rank()];
    for b in &basis {
        let c = rng.gen_range(-3..=3);
        for (x, y) in v.iter_mut().zip(b) {
            *x += c * y;
        }
    }
    v
}

fn criterion_1() -> Check {
    let t = example_torus();
    let h = NsClass::unchecked(RationalMatrix::identity(2));
    let h2 = h.scale(2);
    let (e1, e2) = ([1, 0], [0, 1]);
    ensure(ok(t.gm_pairing(&h, &e1, &e2), "pairing")? == ValuedMonomial::one(), || {
        "[λ1, λ2]_H ≠ 1".into()
    })?;
    ensure(ok(t.gm_pairing(&h, &e2, &e1), "pairing")? == ValuedMonomial::minus_one(), || {
        "[λ2, λ1]_H ≠ −1".into()
    })?;
    ensure(!ok(t.is_gm_symmetric(&h), "symmetry")?, || "H is Gm-symmetric".into())?;
    ensure(ok(t.is_gm_symmetric(&h2), "symmetry")?, || "2H is not Gm-symmetric".into())?;
    ensure(ok(t.trop().is_r_symmetric(h.matrix()), "symmetry")?, || {
        "H is not R-symmetric".into()
    })?;
    ensure(ok(h.large_lattice(), "large")?.is_full(), || "Λ_H ≠ Λ".into())?;
    ensure(ok(t.small_lattice(&h), "small")? == Sublattice::scaled(2, 2), || "Γ_H ≠ 2Λ".into())?;
    let mut expected = vec![
        lattice(&[vec![2, 0], vec![0, 1]]),
        lattice(&[vec![1, 0], vec![0, 2]]),
        lattice(&[vec![1, 0], vec![1, 2]]),
    ];
    expected.sort();
    let adm = ok(t.admissible_lattices(&h, 10_000), "admissible")?;
    ensure(adm == expected, || format!("admissible lattices {adm:?}"))?;
    let n = ok(t.rank_of_class(&h, 10_000), "rank")?;
    ensure(n == 2, || format!("n(H) = {n}"))?;
    Ok("pairings, symmetry, Λ_H = Λ, Γ_H = 2Λ, 3 admissible lattices, n(H) = 2".into())
}

fn criterion_2_and_4() -> (Check, Check) {
    let mut rng = random::seeded(2024);
    let mut nontrivial = 0;
    let mut c2: Result<(), String> = Ok(());
    let mut c4: Result<(), String> = Ok(());
    let total = 60;
    for i in 0..total {
        let (t, h, order) = random_instance(&mut rng, 3);
        if order > 1 {
            nontrivial += 1;
        }
        let run2 = || -> Result<(), String> {
            let cg = ok(t.commutator_group(&h), "commutator group")?;
            let adm = ok(cg.admissible_lattices(MAX_QUOTIENT), "admissible")?;
            ensure(!adm.is_empty(), || "no admissible lattice".into())?;
            let mut meet = adm[0].clone();
            for l in &adm[1..] {
                meet = ok(meet.intersect(l), "intersect")?;
            }
            ensure(meet == cg.small, || format!("⋂ admissible = {meet:?}, Γ_H = {:?}", cg.small))
        };
        let run4 = || -> Result<(), String> {
            let large = ok(h.large_lattice(), "large")?;
            let small = ok(t.small_lattice(&h), "small")?;
            let lb = large.basis_vectors();
            // Torsion of B on a basis of Λ_H and triviality on Γ_H × Λ_H.
            for x in &lb {
                for y in &lb {
                    let b = ok(t.b_pairing(&h, x, y), "B")?;
                    ensure(b.torsion_order().is_some(), || format!("B({x:?},{y:?}) = {b} not torsion"))?;
                }
            }
            for x in &small.basis_vectors() {
                for y in &lb {
                    ensure(ok(t.b_pairing(&h, x, y), "B")?.is_one(), || {
                        format!("B({x:?},{y:?}) ≠ 1 on Γ_H")
                    })?;
                }
            }
            let cg = ok(t.commutator_group(&h), "commutator group")?;
            ensure(cg.radical().is_empty(), || format!("degenerate: radical {:?}", cg.radical()))?;
            for x in cg.group.elements() {
                ensure(cg.pairing_phase(&x, &x).is_zero(), || "B not alternating".into())?;
            }
            Ok(())
        };
        if c2.is_ok() {
            c2 = run2().map_err(|e| format!("instance {i}: {e}"));
        }
        if c4.is_ok() {
            c4 = run4().map_err(|e| format!("instance {i}: {e}"));
        }
    }
    let summary = format!("{total} instances, {nontrivial} with nontrivial Λ_H/Γ_H");
    let c2 = c2.and_then(|_| {
        ensure(nontrivial >= 10, || format!("only {nontrivial} nontrivial instances"))?;
        Ok(summary.clone())
    });
    (c2, c4.map(|_| summary))
}

fn criterion_3() -> Check {
    let mut rng = random::seeded(3);
    let mut nontrivial = 0;
    for i in 0..120 {
        let g = rng.gen_range(1..=4);
        let t = random::trop_torus(&mut rng, g);
        let h = random::ns_class(&mut rng, &t, 4, 3);
        let m_large = ok(h.m_large(), "M_H")?;
        let m = ok(NsClass::zero(g).m_large(), "M")?;
        let lhs = ok(m_large.index_of(&m), "index")?;
        let n_large = ok(h.n_large(), "N_H")?;
        let rhs = n_large.index();
        ensure(lhs == rhs, || format!("instance {i}: |M_H/M| = {lhs}, |N/N_H| = {rhs}"))?;
        if lhs > 1 {
            nontrivial += 1;
        }
    }
    Ok(format!("120 classes, {nontrivial} with nontrivial quotients"))
}

fn criterion_5() -> Check {
    let mut rng = random::seeded(5);
    let mut instances = 0;
    let mut pairs = 0;
    while instances < 100 {
        let (t, h, _) = random_instance(&mut rng, 3);
        let adm = ok(t.admissible_lattices(&h, MAX_QUOTIENT), "admissible")?;
        let lat = adm[rng.gen_range(0..adm.len())].clone();
        let r: Vec<ValuedMonomial> = (0..t.rank()).map(|_| random::monomial(&mut rng)).collect();
        let b = ok(NaLineBundle::new(&t, lat.clone(), h.matrix().clone(), r), "bundle")?;
        let s = ok(tropicalize_line_bundle(&t, &b), "tropicalize")?;
        let class = b.class();
        for _ in 0..10 {
            let x = random_lattice_vector(&mut rng, &lat);
            let y = random_lattice_vector(&mut rng, &lat);
            let sum: Vec<i64> = x.iter().zip(&y).map(|(a, c)| a + c).collect();
            let lhs = ok(extend_r(&t, &b, &sum), "extend")?;
            let rhs = ok(extend_r(&t, &b, &x), "extend")?
                .mul(&ok(extend_r(&t, &b, &y), "extend")?)
                .mul(&ok(t.gm_pairing(&class, &x, &y), "pairing")?);
            ensure(lhs == rhs, || format!("cocycle fails at {x:?}, {y:?}"))?;
            let lx = ok(s.eval_l(&x), "l")?;
            let ly = ok(s.eval_l(&y), "l")?;
            let lsum = ok(s.eval_l(&sum), "l")?;
            ensure(lsum == &lx + &ly, || format!("l not additive at {x:?}, {y:?}"))?;
            let direct = ok(extend_r(&t, &b, &x), "extend")?.valuation()
                - ok(t.trop().real_pairing(h.matrix(), &x, &x), "pairing")? * Rational::half();
            ensure(lx == direct, || format!("l({x:?}) ≠ ν(r) − ½[λ,λ]"))?;
            pairs += 1;
        }
        instances += 1;
    }
    Ok(format!("{instances} bundles, {pairs} pairs"))
}

/// All lattices between `small` and `large` of index at most 4 in `Λ`.
fn intermediate_lattices(small: &Sublattice, large: &Sublattice) -> Result<Vec<Sublattice>, String> {
    let group = ok(large.quotient(small), "quotient")?;
    let mut out = Vec::new();
    for s in ok(group.enumerate_subgroups(10_000), "subgroups")? {
        let mut gens = small.basis_vectors();
        gens.extend(s.generators.iter().map(|c| group.lift(c)));
        let l = ok(Sublattice::from_generators(small.rank(), &gens), "span")?;
        if l.index() <= 4 {
            out.push(l);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn criterion_6() -> Check {
    let t = example_torus();
    let trop = t.trop();
    let full = Sublattice::full(2);
    let grid = [q(0, 1), q(1, 2), q(1, 1), q(3, 2)];
    let classes = [
        RationalMatrix::identity(2),
        RationalMatrix::from_int_rows(&[vec![1, 1], vec![1, 3]]),
        RationalMatrix::from_int_rows(&[vec![2, 1], vec![1, 0]]),
    ];
    let (mut eq_pairs, mut neq_pairs, mut families) = (0u64, 0u64, 0usize);
    for hm in classes {
        let h = NsClass::unchecked(hm.clone());
        let gamma = ok(t.small_lattice(&h), "Γ_H")?;
        if gamma.index() > 4 {
            continue;
        }
        let large = ok(h.large_lattice(), "Λ_H")?;
        let covers = intermediate_lattices(&gamma, &large)?;
        let mut family = Vec::new();
        for c in &covers {
            for a in &grid {
                for b in &grid {
                    family.push(ok(TropLineBundle::new(c.clone(), hm.clone(), vec![a.clone(), b.clone()]), "bundle")?);
                }
            }
        }
        let points: Vec<ModuliPoint> = family
            .iter()
            .map(|s| ok(moduli_point(trop, &full, s, &gamma, &hm), "moduli point"))
            .collect::<Result<_, _>>()?;
        for i in 0..family.len() {
            for j in i..family.len() {
                let e = ok(equivalent(trop, &full, &family[i], &family[j]), "equivalent")?;
                ensure(e == (points[i] == points[j]), || {
                    format!("{:?} vs {:?}: equivalent = {e}", family[i], family[j])
                })?;
                if e {
                    eq_pairs += 1;
                } else {
                    neq_pairs += 1;
                }
                if (i + j) % 7 == 0 {
                    for cover in [gamma.clone(), ok(gamma.intersect(&Sublattice::scaled(2, 4)), "meet")?] {
                        let f = ok(equivalent_on(trop, &full, &family[i], &family[j], &cover), "equivalent")?;
                        ensure(f == e, || "equivalence depends on the common cover".into())?;
                    }
                }
            }
        }
        families += 1;
    }
    ensure(families >= 2 && eq_pairs > 0 && neq_pairs > 0, || "degenerate families".into())?;
    Ok(format!("{families} families, {eq_pairs} equivalent and {neq_pairs} inequivalent pairs"))
}

fn small_index_lattices(max_index: i64) -> Vec<Sublattice> {
    let mut out = Vec::new();
    for a in 1..=max_index {
        for c in 1..=max_index / a {
            for b in 0..c {
                out.push(lattice(&[vec![a, 0], vec![b, c]]));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn criterion_7() -> Check {
    let torus = TropTorus::standard(2);
    let zero = RationalMatrix::zeros(2, 2);
    let lats = small_index_lattices(3);
    let ls = [vec![q(0, 1), q(0, 1)], vec![q(1, 3), q(-1, 2)], vec![q(5, 2), q(2, 3)]];
    let mut lines = Vec::new();
    for lat in &lats {
        for l in &ls {
            lines.push(ok(TropLineBundle::new(lat.clone(), zero.clone(), l.clone()), "bundle")?);
        }
    }
    let mut bundles: Vec<TropVectorBundle> = lines.iter().cloned().map(TropVectorBundle::line).collect();
    for i in 0..lines.len() {
        let j = (i * 7 + 3) % lines.len();
        bundles.push(ok(TropVectorBundle::over_full(2, vec![lines[i].clone(), lines[j].clone()]), "sum")?);
    }
    let mut rng = random::seeded(7);
    for e in &bundles {
        let rho = ok(representation_of_bundle(e), "representation")?;
        ensure(rho.check_commuting(), || "images do not commute".into())?;
        let back = ok(eta_trop(&rho), "eta")?;
        ensure(ok(equivalent_bundles(&torus, &back, e), "equivalence")?, || {
            format!("eta_trop(ρ) not equivalent to {e:?}")
        })?;
        let mut lats_in: Vec<Sublattice> = e.summands().iter().map(|s| s.lattice().clone()).collect();
        let mut lats_out: Vec<Sublattice> = ok(decompose_rep(&rho), "decompose")?
            .into_iter()
            .map(|c| c.lattice)
            .collect();
        lats_in.sort();
        lats_out.sort();
        ensure(lats_in == lats_out, || "orbit lattices differ from the covers".into())?;
        let canon = ok(canonical_form(&rho), "canonical form")?;
        for _ in 0..100 {
            let c = random::trop_gl(&mut rng, rho.r());
            let conj = ok(rho.conjugate(&c), "conjugate")?;
            ensure(ok(canonical_form(&conj), "canonical form")? == canon, || {
                "canonical form changes under conjugation".into()
            })?;
        }
    }
    Ok(format!("{} homogeneous bundles, 100 conjugations each", bundles.len()))
}

fn criterion_8() -> Check {
    let mut rng = random::seeded(8);
    for i in 0..100 {
        let g = rng.gen_range(1..=3);
        let r = rng.gen_range(1..=4);
        let t = random::na_torus(&mut rng, g, 6);
        let rho = random::semisimple_rep(&mut rng, g, r);
        let report = ok(verify_commuting_square(&t, &rho), "square")?;
        ensure(report.commutes, || format!("instance {i}: square does not commute"))?;
        let twists = (0..r)
            .map(|_| character_of(&t, &random::int_vector(&mut rng, g, 3)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("{e:?}"))?;
        let twisted = ok(rho.twist(&twists), "twist")?;
        let report2 = ok(verify_commuting_square(&t, &twisted), "square")?;
        ensure(report2.commutes, || format!("instance {i}: twisted square does not commute"))?;
        ensure(report2.algebraic == report.algebraic, || {
            format!("instance {i}: twisting by M moves the moduli point")
        })?;
    }
    Ok("100 representations, each also twisted by characters of M".into())
}

/// An integral class `det(V)·V^{-T}·S` for a random symmetric integer `S`.
fn integral_class(rng: &mut ChaCha8Rng, torus: &TropTorus) -> RationalMatrix {
    let g = torus.rank();
    let upper: Vec<i64> = (0..g * g).map(|_| rng.gen_range(-2..=2)).collect();
    let s: Vec<Vec<i64>> = (0..g)
        .map(|i| (0..g).map(|j| upper[i.min(j) * g + i.max(j)]).collect())
        .collect();
    let v = torus.valuation_matrix();
    let v_inv_t = v.transpose().inverse().unwrap().unwrap();
    let det = rational_to_int(v).unwrap().determinant().unwrap();
    v_inv_t
        .mul(&RationalMatrix::from_int_rows(&s))
        .unwrap()
        .scale(&Rational::from_int(det))
}

fn criterion_9() -> Check {
    let mut rng = random::seeded(9);
    let mut translate_cases = 0;
    for i in 0..60 {
        let g = rng.gen_range(1..=3);
        let torus = random::trop_torus(&mut rng, g);
        let full = Sublattice::full(g);
        let random_bundle = |rng: &mut ChaCha8Rng| -> Result<TropVectorBundle, String> {
            let k = rng.gen_range(1..=2);
            let summands = (0..k)
                .map(|_| {
                    let lat = random::sublattice(rng, g, 4).unwrap();
                    let h = integral_class(rng, &torus);
                    TropLineBundle::new(lat, h, random::rationals(rng, g, 5, 4))
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| format!("{e:?}"))?;
            ok(TropVectorBundle::over_full(g, summands), "bundle")
        };
        let e1 = random_bundle(&mut rng)?;
        let e2 = random_bundle(&mut rng)?;
        let prod = ok(tensor(&torus, &e1, &e2), "tensor")?;
        ensure(prod.rank() == e1.rank() * e2.rank(), || {
            format!("instance {i}: rank {} ≠ {}·{}", prod.rank(), e1.rank(), e2.rank())
        })?;

        let h1 = integral_class(&mut rng, &torus);
        let h2 = integral_class(&mut rng, &torus);
        let l1 = ok(TropLineBundle::on_base(h1.clone(), random::rationals(&mut rng, g, 5, 4)), "line")?;
        let l2 = ok(TropLineBundle::on_base(h2.clone(), random::rationals(&mut rng, g, 5, 4)), "line")?;
        let lt = ok(
            tensor(&torus, &TropVectorBundle::line(l1), &TropVectorBundle::line(l2)),
            "tensor",
        )?;
        ensure(ok(slope(&lt), "slope")? == h1.add(&h2).unwrap(), || {
            format!("instance {i}: slope not additive")
        })?;

        let sub = random::sublattice(&mut rng, g, 4).map_err(|e| format!("{e:?}"))?;
        let h = integral_class(&mut rng, &torus);
        let l = ok(TropLineBundle::new(sub.clone(), h, random::rationals(&mut rng, g, 5, 4)), "line")?;
        let on_cover = ok(TropVectorBundle::new(sub.clone(), vec![l.clone()]), "bundle")?;
        let down = ok(pushforward(&on_cover, &full), "pushforward")?;
        let back = ok(pullback(&torus, &down, &sub), "pullback")?;
        let translates = ok(full.coset_representatives(&sub), "cosets")?
            .iter()
            .map(|delta| {
                let x: Vec<Rational> = delta.iter().map(|&d| Rational::from_int(d)).collect();
                let x = torus.valuation_matrix().mul_vec(&x).unwrap();
                l.translate(&torus, &x)
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("{e:?}"))?;
        let expected = ok(TropVectorBundle::new(sub.clone(), translates), "bundle")?;
        ensure(back.rank() == expected.rank(), || format!("instance {i}: rank of f^*f_*L"))?;
        ensure(ok(equivalent_bundles(&torus, &back, &expected), "equivalence")?, || {
            format!("instance {i}: f^*f_*L is not the sum of translates")
        })?;
        translate_cases += 1;
    }
    Ok(format!("60 instances, {translate_cases} covers for f^*f_*L"))
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run_cli(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = Process::new(env!("CARGO_BIN_EXE_tropabel"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot run binary: {e}"))?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn round_trips<T: Serialize + DeserializeOwned + PartialEq>(bytes: &[u8]) -> Result<(), String> {
    let text = std::str::from_utf8(bytes).map_err(|e| e.to_string())?;
    let value: T = serde_json::from_str(text).map_err(|e| format!("re-parse: {e}"))?;
    let again = serde_json::to_string_pretty(&value).map_err(|e| e.to_string())? + "\n";
    ensure(again == text, || "re-serialized output differs".into())
}

fn check_round_trip(command: &str, bytes: &[u8]) -> Result<(), String> {
    match command {
        "ns-analyze" => round_trips::<NsReport>(bytes),
        "bundle slope" => round_trips::<SlopeReport>(bytes),
        "bundle equiv" => round_trips::<EquivReport>(bytes),
        "bundle moduli-point" => round_trips::<ModuliReport>(bytes),
        c if c.starts_with("bundle ") || c == "rep eta" => round_trips::<BundleReport>(bytes),
        "rep decompose" => round_trips::<DecomposeReport>(bytes),
        "rep canonical" => round_trips::<CanonicalReport>(bytes),
        "rep stratum" => round_trips::<StratumReport>(bytes),
        "na trop-line" => round_trips::<TropLineBundle>(bytes),
        "na trop-simple" => round_trips::<ModuliPoint>(bytes),
        "na trop-rep" => round_trips::<TropRepresentation>(bytes),
        "na verify-square" => round_trips::<SquareSuite>(bytes),
        other => Err(format!("no output type for {other:?}")),
    }
}

fn criterion_10() -> Check {
    let mut files: Vec<PathBuf> = std::fs::read_dir(scenario_dir())
        .map_err(|e| format!("scenario directory: {e}"))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    ensure(!files.is_empty(), || "no scenarios".into())?;
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    let mut commands_seen = BTreeSet::new();
    for file in &files {
        let text = std::fs::read_to_string(file).map_err(|e| e.to_string())?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let commands: Vec<String> = serde_json::from_value(value["commands"].clone())
            .map_err(|e| format!("{}: commands: {e}", file.display()))?;
        let path = file.to_str().unwrap();
        for command in &commands {
            let mut args: Vec<&str> = command.split(' ').collect();
            args.extend(["--scenario", path, "--seed", "11"]);
            let (code1, out1) = run_cli(&args)?;
            let (code2, out2) = run_cli(&args)?;
            let name = format!("{} {command}", file.file_name().unwrap().to_string_lossy());
            ensure(code1 == 0 && code2 == 0, || format!("{name}: exit codes {code1}, {code2}"))?;
            ensure(out1 == out2, || format!("{name}: outputs differ between runs"))?;
            check_round_trip(command, &out1).map_err(|e| format!("{name}: {e}"))?;
            let out_file = tmp.path().join("out.json");
            let mut with_out = args.clone();
            let out_path = out_file.to_str().unwrap().to_string();
            with_out.extend(["--out", &out_path]);
            let (code3, stdout3) = run_cli(&with_out)?;
            let written = std::fs::read(&out_file).map_err(|e| e.to_string())?;
            ensure(code3 == 0 && stdout3.is_empty() && written == out1, || {
                format!("{name}: --out differs from stdout")
            })?;
            commands_seen.insert(command.clone());
            runs += 1;
        }
    }

    let example = scenario_dir().join("example_ns.json");
    let example = example.to_str().unwrap();
    let (code, _) = run_cli(&["ns-analyze", "--scenario", example, "--bound", "2"])?;
    ensure(code == 3, || format!("bound exceeded gave exit {code}"))?;
    let bad = tmp.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"torus":{"g":1,"V":[["1"]]},"bundles":{"E":{"summands":[{"lattice":[[1]],"H":[["1/2"]],"l":["0"]}]}}}"#,
    )
    .map_err(|e| e.to_string())?;
    let (code, _) = run_cli(&["bundle", "slope", "--scenario", bad.to_str().unwrap()])?;
    ensure(code == 2, || format!("invalid scenario gave exit {code}"))?;
    Ok(format!(
        "{} scenarios, {runs} commands ({} distinct) run twice byte-identically",
        files.len(),
        commands_seen.len()
    ))
}

fn main() {
    let start = Instant::now();
    let (c2, c4) = criterion_2_and_4();
    let results: Vec<(u32, &str, Check)> = vec![
        (1, "example regression", criterion_1()),
        (2, "small lattice is the meet of admissible lattices", c2),
        (3, "|M_H/M| = |N/N_H|", criterion_3()),
        (4, "B is torsion, alternating and nondegenerate", c4),
        (5, "cocycle identity and linearity of l", criterion_5()),
        (6, "moduli points are complete invariants", criterion_6()),
        (7, "representations and homogeneous bundles", criterion_7()),
        (8, "commuting square", criterion_8()),
        (9, "ranks, slopes and f^*f_*L", criterion_9()),
        (10, "CLI determinism and round-trip", criterion_10()),
    ];
    let mut failed = 0;
    for (n, name, result) in &results {
        match result {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(e) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {e}");
            }
        }
    }
    println!("{} of {} criteria passed in {:.1?}", results.len() - failed, results.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
