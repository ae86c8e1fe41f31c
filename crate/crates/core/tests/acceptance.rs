//! Desk-scale acceptance run: one line per criterion.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use homcount::enumerate::{random_structure, RandomParams};
use homcount::harness::{negative_demo, verify_theorem, Bounds, TheoremId, TheoremReport};
use homcount::hom::span::bool_tree_profiles;
use homcount::hom::{compare_profiles, ProfileBound};
use homcount::logic::{check, equivalent, eval_fo, standard_translation, Assignment, FoAssignment, FormulaGen, Language};
use homcount::semiring::Semiring;
use homcount::transform::{make_figure3_pair, unravel};
use homcount::{ClassKind, ClassTag, PointedStructure, Signature};

const SEED: u64 = 0;

type Outcome = Result<String, String>;

fn theorem(id: TheoremId, bounds: &Bounds) -> Result<TheoremReport, String> {
    let r = verify_theorem(id, bounds, SEED).map_err(|e| format!("{id}: {e}"))?;
    if r.passed() && r.pairs_tested > 0 {
        Ok(r)
    } else {
        Err(format!("{id}: {} / {} agree, {} disagreements\n{r}", r.agreements, r.pairs_tested, r.disagreements.len()))
    }
}

fn summary(reports: &[TheoremReport]) -> String {
    reports.iter().map(|r| format!("{} {}/{}", r.id, r.agreements, r.pairs_tested)).collect::<Vec<_>>().join(", ")
}

fn suites(ids: &[TheoremId]) -> Outcome {
    let b = Bounds::default();
    let reports = ids.iter().map(|&id| theorem(id, &b)).collect::<Result<Vec<_>, _>>()?;
    Ok(summary(&reports))
}

fn lovasz() -> Outcome {
    suites(&[TheoremId::Lovasz])
}

fn graded_trees() -> Outcome {
    suites(&[TheoremId::TreeNat, TheoremId::Unraveling])
}

fn positive_trees() -> Outcome {
    let detail = suites(&[TheoremId::TreeBool])?;
    let (m, n) = make_figure3_pair();
    for k in 1..=3 {
        let profiles = bool_tree_profiles(&m, &n, Some(k)).map_err(|e| e.to_string())?.is_equal();
        let oracle = equivalent(&m, &n, Language::MlPlusDiamond, Some(k)).map_err(|e| e.to_string())?;
        if !profiles || !oracle {
            return Err(format!("figure pair at k={k}: profiles equal {profiles}, bounded simulation {oracle}"));
        }
    }
    let tag = ClassTag::unbounded(ClassKind::Tree);
    let bounded = compare_profiles(&m, &n, tag, &Semiring::Boolean, ProfileBound::new(5, None)).map_err(|e| e.to_string())?;
    if !bounded.is_equal() {
        return Err("figure pair: enumerated bool tree profiles differ".into());
    }
    let ml = equivalent(&m, &n, Language::Ml, None).map_err(|e| e.to_string())?;
    let ml_plus = equivalent(&m, &n, Language::MlPlus, None).map_err(|e| e.to_string())?;
    if ml || ml_plus {
        return Err(format!("figure pair: ML equivalent {ml}, ML+ equivalent {ml_plus}"));
    }
    Ok(format!("{detail}; figure pair equivalent for k=1..3, not ML/ML+ equivalent"))
}

fn point_generated() -> Outcome {
    suites(&[TheoremId::PointGenerated, TheoremId::GeneratedSubmodel])
}

fn reductions() -> Outcome {
    let r = theorem(TheoremId::Reductions, &Bounds::default())?;
    let parts: Vec<String> = r.parts.iter().map(|p| format!("{} {}/{}", p.name, p.agreements, p.tested)).collect();
    Ok(parts.join(", "))
}

fn expansions() -> Outcome {
    suites(&[
        TheoremId::TreeNatBackward,
        TheoremId::TreeNatGlobal,
        TheoremId::PointGeneratedBackward,
        TheoremId::TreeBoolBackward,
        TheoremId::TreeBoolGlobal,
    ])
}

fn canonical_instances() -> Outcome {
    let r = theorem(TheoremId::CanonicalInstance, &Bounds::default())?;
    // exhaustive corpora hold every structure twice
    let queries = r.pairs_tested * 2 / r.corpus.structures.max(1) as u64;
    if queries < 50 {
        return Err(format!("only {queries} queries"));
    }
    Ok(format!("{queries} queries, {}/{}", r.agreements, r.pairs_tested))
}

fn negative() -> Outcome {
    let b = negative_demo(&Semiring::Boolean).map_err(|e| e.to_string())?;
    if !b.holds || (b.periodicity.l, b.periodicity.p) != (1, 1) {
        return Err(format!("bool demo:\n{b}"));
    }
    for p in [2u64, 3, 5, 7] {
        let r = Semiring::ModP(p).analyze_periodicity(64);
        if (r.l, r.p) != (0, p as usize) {
            return Err(format!("mod {p}: L={} P={}", r.l, r.p));
        }
    }
    let m = negative_demo(&Semiring::ModP(3)).map_err(|e| e.to_string())?;
    let s = &m.separating;
    let right_states = s.right["states"].as_u64();
    let tree_states = s.tree.as_ref().and_then(|t| t["states"].as_u64());
    if !m.holds
        || s.left_count.as_deref() != Some("1")
        || s.right_count.as_deref() != Some("0")
        || right_states != Some(3)
        || tree_states != Some(4)
    {
        return Err(format!("mod 3 demo:\n{m}"));
    }
    let n = negative_demo(&Semiring::Natural).map_err(|e| e.to_string())?;
    if !n.holds {
        return Err(format!("nat demo:\n{n}"));
    }
    Ok(format!(
        "clique powers {}/{}, cliques bisimilar, bool (1,1), mod p (0,p), mod 3: K^1 -> 1 vs K^3 -> 0",
        m.clique_powers.agreements, m.clique_powers.tested
    ))
}

fn random_target(sig: &Arc<Signature>, rng: &mut ChaCha8Rng) -> PointedStructure {
    let states = rng.gen_range(1..=4);
    let density = rng.gen_range(0.1..0.7);
    random_structure(ClassTag::unbounded(ClassKind::Any), sig, RandomParams::new(states, density), rng.gen())
        .expect("random structures of any shape")
}

fn model_checking() -> Outcome {
    let sig = Arc::new(Signature::new(["p", "q"], ["R", "S"]).map_err(|e| e.to_string())?);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let ml = FormulaGen::new(Language::Ml, &sig, 3);
    let graded = FormulaGen::new(Language::Graded, &sig, 3);
    let empty = Assignment::new();
    let (mut st, mut unr) = (0, 0);
    for i in 0..1000 {
        let m = random_target(&sig, &mut rng);
        let phi = ml.sample(&mut rng);
        let direct = check(&m, &empty, &phi).map_err(|e| e.to_string())?;
        let psi = standard_translation(&phi).map_err(|e| e.to_string())?;
        let fo = eval_fo(&m, &psi, &FoAssignment::from([("x".to_string(), m.distinguished())])).map_err(|e| e.to_string())?;
        if direct != fo {
            return Err(format!("pair {i}: check {direct} vs FO {fo} for {phi}"));
        }
        st += 1;
        let chi = graded.sample(&mut rng);
        for f in [&phi, &chi] {
            let k = f.modal_depth();
            let u = unravel(&m, k);
            let (a, b) = (check(&m, &empty, f).map_err(|e| e.to_string())?, check(&u, &empty, f).map_err(|e| e.to_string())?);
            if a != b {
                return Err(format!("pair {i}: {f} is {a} on M but {b} on its depth-{k} unraveling"));
            }
            unr += 1;
        }
    }
    Ok(format!("{st} standard-translation pairs, {unr} unraveling checks"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Lovász: profiles over structures <= 3 states decide isomorphism", lovasz),
        ("graded: nat tree profiles vs unr^k isomorphism, unraveling identity", graded_trees),
        ("positive: bool tree profiles vs bounded simulation, figure pair", positive_trees),
        ("hybrid: PG profiles vs gsub isomorphism, generated submodel identity", point_generated),
        ("reductions: down, flip, PG-augmentation, round trips", reductions),
        ("backward and global suites", expansions),
        ("canonical instances of conjunctive queries", canonical_instances),
        ("negative-result ingredients", negative),
        ("model checker vs first-order translation, unraveling invariance", model_checking),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} / {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
