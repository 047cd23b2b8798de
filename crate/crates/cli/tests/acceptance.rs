//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Every check is exact and every instance is seeded.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use common::engine::check_against_enumeration;
use common::*;
use isokit::apps::{graph_iso_bounded_degree, Graph};
use isokit::certs::{
    affected_points, aggregate_certificates, find_structure, find_symmetry, local_certificates, symmetry_defect, Aggregate, CertOutcome,
    GiantRep,
};
use isokit::luks::{Solver, SolverConfig, Symbol};
use isokit::oracle::{brute_graph_aut, brute_graph_iso, brute_string_iso, OracleConfig};
use isokit::partition::{restrict_sequence, validate_almost_d_ary, PartitionSequence};
use isokit::perm::{Giant, StabChain};
use isokit::reduction::{build_unfold_graph, level_kinds, maximal_branches, reduce_step_one, reduce_step_two, LevelKind, ReductionConfig};
use isokit::suites::{gi_suite, si_suite};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn engine_sweep() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let count = 500;
    for i in 0..count {
        let n = 1 + i % 8;
        let g = random_group(&mut rng, n);
        check_against_enumeration(&g, &mut rng).map_err(|e| format!("group {i} on {n} points {:?}: {e}", g.generators()))?;
    }
    Ok(format!("{count} groups, n <= 8"))
}

fn string_iso_sweep() -> Outcome {
    let cases = si_suite(2, 1000);
    let plain = Solver::default();
    let deep = Solver::new(SolverConfig { brute_cap: 4, ..Default::default() });
    let results = isokit::par::map(&cases, |c| {
        si_agrees(&plain, &c.group, &c.x, &c.y)?;
        si_agrees(&deep, &c.group, &c.x, &c.y).map_err(|e| format!("recursive: {e}"))
    });
    for (c, r) in cases.iter().zip(results) {
        r.map_err(|e| format!("instance {}: {e}", c.id))?;
    }
    let transitive = cases.iter().filter(|c| c.group.is_transitive()).count();
    Ok(format!(
        "{} instances x 2 solvers ({transitive} transitive), {} recursive calls",
        cases.len(),
        deep.stats().calls
    ))
}

fn restriction_preserved() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..200 {
        let n = rng.gen_range(1..=10);
        let g = random_group(&mut rng, n);
        let seq = PartitionSequence::auto(g.clone()).map_err(err)?;
        ensure(validate_almost_d_ary(&seq).map_err(err)?.valid, || format!("instance {i}: base sequence invalid"))?;
        let (h, set) = subgroup_and_set(&mut rng, &g);
        let r = restrict_sequence(&seq, &h, &set).map_err(err)?;
        ensure(r.validate().map_err(err)?.valid, || format!("instance {i}: restriction to {set:?} invalid"))?;
    }
    Ok("200 instances, n <= 10".into())
}

/// Step one, then step two on its output; both equivalent, final sequence almost d-ary.
fn reduce_both(seq: &PartitionSequence, x: &[Symbol], y: &[Symbol], cfg: &ReductionConfig) -> Result<bool, String> {
    let one = reduce_step_one(seq, x, y, cfg).map_err(err)?;
    check_equivalent(seq, x, y, &one).map_err(|e| format!("step one: {e}"))?;
    let two = reduce_step_two(&one.seq, &one.x, &one.y).map_err(err)?;
    check_equivalent(&one.seq, &one.x, &one.y, &two).map_err(|e| format!("step two: {e}"))?;
    ensure(validate_almost_d_ary(&two.seq).map_err(err)?.valid, || "step two output is not almost d-ary".into())?;
    Ok(one.degree() > seq.degree() || two.degree() > one.degree())
}

fn reduction_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut total, mut grown) = (0, 0);
    for i in 0..100 {
        let n = rng.gen_range(2..=8);
        let g = transitive_group(&mut rng, n);
        let seq = PartitionSequence::two_level(g.clone(), 2);
        let x = random_string(&mut rng, n, 2);
        let y = related_string(&mut rng, &g, &x, 2);
        grown += reduce_both(&seq, &x, &y, &ReductionConfig::default()).map_err(|e| format!("instance {i}: {e}"))? as usize;
        total += 1;
    }
    let eager = eager_reduction();
    for g in giant_sectioned() {
        let n = g.degree();
        let seq = PartitionSequence::two_level(g.clone(), n);
        for _ in 0..3 {
            let x = random_string(&mut rng, n, 2);
            let y = related_string(&mut rng, &g, &x, 2);
            let one = reduce_step_one(&seq, &x, &y, &eager).map_err(err)?;
            let kinds = level_kinds(&one.seq).map_err(err)?;
            ensure(kinds.iter().all(|k| *k != LevelKind::Other), || format!("unreduced level after step one on {:?}", g.generators()))?;
            grown += reduce_both(&seq, &x, &y, &eager).map_err(|e| format!("eager on {:?}: {e}", g.generators()))? as usize;
            total += 1;
        }
    }
    Ok(format!("{total} transitive instances, {grown} with a changed action"))
}

fn figure_reconstruction() -> Outcome {
    let (chain, levels) = figure_one();
    let g = build_unfold_graph(&chain, &levels).map_err(err)?;
    let (want_v, want_e) = figure_one_drawn();
    let got_v: BTreeSet<_> = g.vertices.iter().cloned().collect();
    let got_e: BTreeSet<_> = g.edges().into_iter().map(|(u, v)| (g.vertices[u].clone(), g.vertices[v].clone())).collect();
    ensure(got_v == want_v, || format!("vertex sets differ ({} vs {})", got_v.len(), want_v.len()))?;
    ensure(got_e == want_e, || format!("edge sets differ ({} vs {})", got_e.len(), want_e.len()))?;
    let branches = maximal_branches(&g).len();
    ensure(branches == 36, || format!("{branches} maximal branches"))?;
    Ok(format!("{} vertices, {} edges, {branches} branches", got_v.len(), got_e.len()))
}

/// Groups with giant representations of degree 9 for the stabilizer checks.
fn giant_family() -> Vec<(&'static str, GiantRep)> {
    let a9 = StabChain::alternating(9);
    let fixed = alt_with_fixed(9, 3);
    let parity = parity_wreath(9);
    vec![
        ("A9 natural", natural_rep(&a9)),
        ("A9 + 3 fixed points", leading_rep(&fixed, 9)),
        ("C2 wr A9 + parity orbit", wreath_top(&parity, 2, 9)),
    ]
}

fn unaffected_stabilizers() -> Outcome {
    let mut notes = Vec::new();
    for (name, rep) in giant_family() {
        let g = rep.group();
        let aff = affected_points(g, &rep).map_err(err)?;
        let d: Vec<usize> = (0..g.degree()).filter(|p| !aff.contains(p)).collect();
        let img = rep_image(&rep, &g.pointwise_stabilizer(&d));
        let kind = img.is_giant();
        ensure(kind != Giant::Neither, || format!("{name}: image of the pointwise stabilizer of D is not a giant"))?;
        notes.push(format!("{name}: |D| = {}, {kind:?}", d.len()));
    }
    Ok(notes.join("; "))
}

fn affected_orbits() -> Outcome {
    let mut checked = 0;
    for k in 5..=9 {
        let groups = [
            (StabChain::wreath(&StabChain::cyclic(2), &StabChain::alternating(k)), 2),
            (StabChain::wreath(&StabChain::symmetric(3), &StabChain::alternating(k)), 3),
            (parity_wreath(k), 2),
        ];
        for (g, m) in groups {
            let rep = wreath_top(&g, m, k);
            let aff = affected_points(&g, &rep).map_err(err)?;
            let kernel = rep.hom.kernel();
            for delta in g.orbits().blocks().iter().filter(|o| aff.contains(&o[0])) {
                for o in kernel.orbits().blocks().iter().filter(|o| delta.contains(&o[0])) {
                    ensure(o.len() * k <= delta.len(), || format!("k = {k}: kernel orbit of size {} in affected orbit of size {}", o.len(), delta.len()))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} kernel orbits over k = 5..9"))
}

/// Strings on nine points for the certificate checks.
fn a9_strings() -> Vec<Vec<Symbol>> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut out = vec![vec![0; 9], (0..9).collect()];
    out.extend((0..4).map(|_| random_string(&mut rng, 9, 3)));
    out
}

fn local_certificate_checks() -> Outcome {
    let g = StabChain::alternating(9);
    let seq = PartitionSequence::two_level(g.clone(), 9);
    let rep = natural_rep(&g);
    let solver = Solver::default();
    let all: Vec<usize> = (0..9).collect();
    let (mut full, mut nonfull) = (0, 0);
    for (i, x) in a9_strings().iter().enumerate() {
        let cert = local_certificates(&solver, &seq, &rep, x, &all).map_err(err)?;
        let aut = brute_string_iso(9, g.generators(), x, x, &all, &OracleConfig::default()).map_err(err)?;
        let constant = x.iter().all(|&s| s == x[0]);
        match &cert.outcome {
            CertOutcome::Full(k) => {
                ensure(constant, || format!("string {i} is not constant but certified full"))?;
                ensure(k.generators().iter().all(|p| (0..9).all(|a| x[a] == x[p.apply(a)])), || format!("string {i}: K not inside Aut"))?;
                ensure(rep_image(&rep, k).is_giant() != Giant::Neither, || format!("string {i}: K is not giant on T"))?;
                full += 1;
            }
            CertOutcome::NonFull(m) => {
                ensure(!constant, || format!("constant string {i} certified non-full"))?;
                ensure(!m.is_giant_at_least_alt(), || format!("string {i}: M is a giant"))?;
                ensure(aut.iter().all(|a| m.contains(a)), || format!("string {i}: M misses an automorphism"))?;
                nonfull += 1;
            }
        }
    }
    Ok(format!("{full} full, {nonfull} non-full, containments re-checked by brute-force Aut"))
}

fn index_bounds() -> Outcome {
    let g = StabChain::alternating(9);
    let seq = PartitionSequence::two_level(g.clone(), 9);
    let rep = natural_rep(&g);
    let solver = Solver::default();
    let img = rep.hom.image_group();
    let mut checked = 0;
    for x in a9_strings() {
        match aggregate_certificates(&solver, &seq, &rep, &x, &x, 9).map_err(err)? {
            Aggregate::Symmetry { first, second } => {
                if let Some(split) = find_symmetry(&solver, &seq, &rep, &first.0, &second.0, &first.1).map_err(err)? {
                    ensure(index_bound(img, &rep_image(&rep, &split.h), 9), || "symmetry index below (4/3)^k".into())?;
                    checked += 1;
                }
            }
            Aggregate::Structures { first, second } => {
                for (h, _) in find_structure(&solver, &seq, &rep, &first, &second).map_err(err)? {
                    ensure(index_bound(img, &rep_image(&rep, &h), 9), || "structure index below (4/3)^k".into())?;
                    checked += 1;
                }
            }
            _ => {}
        }
    }
    ensure(checked > 0, || "no outputs to check".into())?;
    Ok(format!("{checked} subgroups, all of index >= (4/3)^9"))
}

fn graph_corpus() -> Outcome {
    let corpus = connected_graph_classes(8, 3);
    let cfg = OracleConfig::default();
    let solver = Solver::default();
    let auts = isokit::par::map(&corpus, |a| -> Result<(), String> {
        let ours = graph_iso_bounded_degree(a, a, &solver).map_err(err)?.ok_or("no automorphism coset")?;
        let want = brute_graph_aut(a, &cfg).map_err(err)?.len() as u64;
        ensure(ours.subgroup.order_u64() == Some(want), || format!("Aut order {} vs {want} on {:?}", ours.subgroup.order(), a.edges()))
    });
    auts.into_iter().collect::<Result<Vec<_>, _>>()?;
    let cases = gi_suite(10, 8, 3);
    let checks = isokit::par::map(&cases, |c| -> Result<bool, String> {
        let ours = graph_iso_bounded_degree(&c.first, &c.second, &solver).map_err(err)?;
        let want = !brute_graph_iso(&c.first, &c.second, &cfg).map_err(err)?.is_empty();
        ensure(ours.is_some() == want, || format!("pair {:?}: ours {}, brute {want}", c.classes, ours.is_some()))?;
        if let Some(r) = &ours {
            ensure(c.first.is_isomorphism(&c.second, &r.rep), || format!("pair {:?}: rep is not an isomorphism", c.classes))?;
        }
        Ok(want)
    });
    let iso = checks.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().filter(|&b| b).count();
    Ok(format!("{} graphs, {} pairs ({iso} isomorphic), zero discrepancies", corpus.len(), cases.len()))
}

fn numeric_lemmas() -> Outcome {
    let solver = Solver::new(SolverConfig { brute_cap: 4, ..Default::default() });
    for c in si_suite(11, 200) {
        let seq = PartitionSequence::auto(c.group.clone()).map_err(err)?;
        solver.string_iso_main(&seq, &c.x, &c.y).map_err(err)?;
    }
    let trace = solver.stats().trace;
    let checked: Vec<bool> = trace.iter().filter_map(recursion_step_holds).collect();
    ensure(!checked.is_empty(), || "no trace entry within the hypothesis".into())?;
    ensure(checked.iter().all(|&b| b), || "inductive-step inequality fails on a trace".into())?;
    let mut pairs = 0;
    for m in 2..=64 {
        for k in 1..=m / 2 {
            ensure(approx_binom_holds(m, k), || format!("binomial bound fails at m = {m}, k = {k}"))?;
            pairs += 1;
        }
    }
    for (name, gr) in [("C6", Graph::cycle(6)), ("Petersen", Graph::petersen()), ("K33", Graph::complete_bipartite(3, 3))] {
        let els = brute_graph_aut(&gr, &OracleConfig::default()).map_err(err)?;
        let g = StabChain::new(gr.order(), els).map_err(err)?;
        let defect = symmetry_defect(&g);
        ensure(2 * defect >= gr.order(), || format!("{name}: defect {defect}"))?;
    }
    Ok(format!("{} of {} trace steps in range, {pairs} binomial pairs, 3 defect checks", checked.len(), trace.len()))
}

/// Exit code and stdout; 1 is a verdict (NONISO), anything else nonzero an error.
fn cli_output(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_isokit")).args(args).output().map_err(err)?;
    let code = out.status.code().filter(|c| *c <= 1);
    let code = code.ok_or_else(|| format!("{args:?} exited with {:?}: {}", out.status, String::from_utf8_lossy(&out.stderr)))?;
    ensure(!out.stdout.is_empty(), || format!("{args:?} printed nothing"))?;
    Ok((code, out.stdout))
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("isokit-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(err)?;
    let inst = dir.join("instance.json");
    let text = r#"{"group": {"n": 10, "gens": ["(1 2)(3 4)", "(1 3 5 7 9)(2 4 6 8 10)"]}, "x": "aabbcabcab", "y": "bbaaccabba"}"#;
    std::fs::write(&inst, text).map_err(err)?;
    let inst = inst.to_string_lossy().into_owned();
    let runs: [&[&str]; 4] = [
        &["--json", "--seed", "7", "bench", "--suite", "si"],
        &["--json", "--seed", "7", "--brute-cap", "4", "bench", "--suite", "si"],
        &["--json", "--seed", "7", "bench", "--suite", "gi"],
        &["--json", "--brute-cap", "4", "si", &inst],
    ];
    let mut bytes = 0;
    for args in runs {
        let first = cli_output(args)?;
        for _ in 0..2 {
            ensure(cli_output(args)? == first, || format!("{args:?} output differs between runs"))?;
        }
        bytes += first.1.len();
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("4 commands x 3 runs byte-identical ({bytes} bytes each round)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("permutation engine vs enumeration", engine_sweep),
        ("string isomorphism vs enumeration", string_iso_sweep),
        ("restriction keeps sequences almost d-ary", restriction_preserved),
        ("reductions preserve isomorphism", reduction_equivalence),
        ("unfolding graph of the nine-point configuration", figure_reconstruction),
        ("unaffected stabilizers stay giant", unaffected_stabilizers),
        ("kernel orbits in affected orbits", affected_orbits),
        ("local certificates on A9", local_certificate_checks),
        ("index bounds of structures and symmetries", index_bounds),
        ("bounded-degree graph corpus", graph_corpus),
        ("numeric lemmas", numeric_lemmas),
        ("CLI determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {e} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
