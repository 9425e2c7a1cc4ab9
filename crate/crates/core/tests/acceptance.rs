//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use common::{consistent_instance, corpus_translation, load_corpus, mutate, random_distribution, rng, CONSISTENT_CORPORA};
use xlate_core::oracle::{brute_adjoint, brute_states, state_as_node_set, OracleBudget};
use xlate_core::{
    classify_awareness, common_language, fixed_points, joint_embeddings, perfect_translations, verify_agreement,
    CrossImplication, Error, JointStateSpace, Mode, Node, Prop, SemanticTranslation, Side, StarProp, Translation,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn oil_reproduction() -> Outcome {
    let t = corpus_translation("oil");
    ensure!(t.is_consistent(), "oil translation is inconsistent");
    let yuan = |s: &str| t.algebra(Side::Two).parse(s).unwrap();
    let dollars = |s: &str| t.algebra(Side::One).parse(s).unwrap();
    let cases = [
        ("eta_500_700", Mode::Inner, dollars("lam_80_90 | lam_90_100")),
        (
            "eta_500_700",
            Mode::Outer,
            dollars("lam_70_80 | lam_80_90 | lam_90_100 | lam_100_110"),
        ),
        ("eta_lt_200", Mode::Inner, dollars("lam_0_10 | lam_10_20 | lam_20_30")),
        ("eta_lt_200", Mode::Outer, StarProp::Star),
    ];
    for (src, mode, expected) in cases {
        let got = t.apply(Side::Two, mode, yuan(src));
        ensure!(
            got == expected,
            "{mode} {src}: got {}, expected {}",
            t.algebra(Side::One).render(got),
            t.algebra(Side::One).render(expected)
        );
    }
    Ok("4 translations exact".into())
}

fn platypus_reproduction() -> Outcome {
    let corpus = load_corpus("platypus");
    let r = corpus.implication.as_ref().ok_or("no implication file")?;
    let axioms = r.check_axioms();
    ensure!(axioms.passed(), "axioms: {:?}", axioms.first_failure());
    let t = r.to_translation().map_err(|e| e.to_string())?;
    let english = t.algebra(Side::One);
    let top2 = StarProp::Prop(t.algebra(Side::Two).top());
    ensure!(
        t.outer(Side::Two, top2) == english.parse("!plat").unwrap(),
        "outer image of true is {}",
        english.render(t.outer(Side::Two, top2))
    );
    let space = JointStateSpace::from_implication(r).map_err(|e| e.to_string())?;
    let absent = space.states().iter().filter(|s| s.atoms[1].is_none()).count();
    ensure!(space.len() == 3 && absent == 1, "{} states, {absent} one-sided", space.len());
    let verdict = classify_awareness(&t, &space).awareness.to_string();
    ensure!(verdict.starts_with("language 2 less aware than language 1"), "classified as {verdict}");
    Ok(format!("3 states, {verdict}"))
}

fn fixed_points_separation() -> Outcome {
    let t = corpus_translation("fig4");
    ensure!(t.check_galois().passed(), "galois connection fails");
    ensure!(t.check_approximation().passed(), "approximation fails");
    let one = t.algebra(Side::One);
    let lam = one.parse("lam").unwrap().prop().unwrap();
    let fixed = fixed_points(&t, Side::One);
    let perfect = perfect_translations(&t, Side::One).map_err(|e| e.to_string())?;
    ensure!(fixed.contains(&lam), "lam is not a fixed point");
    ensure!(perfect == vec![Prop::FALSE, one.top()], "perfect set {perfect:?}");
    ensure!(
        perfect.iter().all(|p| fixed.contains(p)) && fixed.len() > perfect.len(),
        "inclusion is not strict"
    );
    Ok(format!("{} fixed points, {} perfect", fixed.len(), perfect.len()))
}

fn round_trip() -> Outcome {
    let mut rng = rng(0x5eed_0004);
    for k in 0..500 {
        let t = consistent_instance(&mut rng, 5);
        let r = CrossImplication::from_translation(&t).map_err(|e| format!("instance {k}: {e}"))?;
        ensure!(r.check_axioms().passed(), "instance {k}: relation fails its axioms");
        let back = r.to_translation().map_err(|e| format!("instance {k}: {e}"))?;
        ensure!(back == t, "instance {k}: maps differ after the round trip");
    }
    Ok("500 instances".into())
}

/// Seeds every pair the operator tables assert, bypassing consistency checks.
fn relation_from_tables(t: &Translation) -> Result<CrossImplication, Error> {
    let mut seeds = Vec::new();
    for side in Side::BOTH {
        let j = side.other();
        for p in t.algebra(side).props() {
            let x = Node::new(side, p.into());
            seeds.push((x, Node::new(j, t.outer(side, p.into()))));
            seeds.push((Node::new(j, t.inner(side, p.into())), x));
        }
    }
    let [a1, a2] = t.shared_algebras();
    CrossImplication::from_seeds(a1, a2, &seeds)
}

fn mutation_equivalence() -> Outcome {
    let mut rng = rng(0x5eed_0004);
    let mut injected = 0;
    let mut still_consistent = 0;
    for k in 0..500 {
        let t = consistent_instance(&mut rng, 5);
        let space = JointStateSpace::from_translation(&t).map_err(|e| format!("instance {k}: {e}"))?;
        ensure!(verify_agreement(&t, &space).passed(), "instance {k}: agreement fails");

        let (op, x, m) = mutate(&mut rng, &t);
        let what = format!("instance {k}, {op} at {}", t.algebra(op.from).render(x));
        let by_tables = relation_from_tables(&m);
        let implication_ok = match &by_tables {
            Ok(r) => r.check_axioms().passed() && r.to_translation().ok().as_ref() == Some(&m),
            Err(_) => false,
        };
        if m.is_consistent() {
            still_consistent += 1;
            let own = JointStateSpace::from_translation(&m).map_err(|e| format!("{what}: {e}"))?;
            ensure!(verify_agreement(&m, &own).passed(), "{what}: consistent but no agreeing space");
            ensure!(implication_ok, "{what}: consistent but the implication route rejects it");
        } else {
            injected += 1;
            ensure!(!implication_ok, "{what}: violation passes the implication axioms");
            ensure!(
                !verify_agreement(&m, &space).passed(),
                "{what}: violation agrees with the joint space"
            );
        }
    }
    Ok(format!(
        "500 consistent, {injected} violations detected, {still_consistent} mutations stayed consistent"
    ))
}

fn oracle_agrees(t: &Translation, budget: OracleBudget) -> Result<(), String> {
    let r = CrossImplication::from_translation(t).map_err(|e| e.to_string())?;
    let space = JointStateSpace::from_translation(t).map_err(|e| e.to_string())?;
    let brute = brute_states(&r, budget).map_err(|e| e.to_string())?;
    let mut fast: Vec<_> = space.states().iter().map(|s| state_as_node_set(&r, &space, s)).collect();
    fast.sort_by_key(|s| s.ones().collect::<Vec<_>>());
    if fast != brute {
        return Err(format!("{} fast states, {} brute-force states", fast.len(), brute.len()));
    }
    for side in Side::BOTH {
        let j = side.other();
        let table = brute_adjoint(t.algebra(side), t.algebra(j), t.map(j, Mode::Outer), budget)
            .map_err(|e| e.to_string())?;
        if table != t.map(side, Mode::Inner) {
            return Err(format!("inner map from language {side} differs"));
        }
    }
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let budget = OracleBudget::default();
    for name in CONSISTENT_CORPORA {
        oracle_agrees(&corpus_translation(name), budget).map_err(|e| format!("{name}: {e}"))?;
    }
    let mut rng = rng(0x5eed_0006);
    for k in 0..200 {
        let t = consistent_instance(&mut rng, 6);
        oracle_agrees(&t, budget).map_err(|e| format!("random instance {k}: {e}"))?;
    }
    Ok(format!("{} corpus + 200 random instances", CONSISTENT_CORPORA.len()))
}

fn common_language_invariants(t: &Translation) -> Result<(), String> {
    for side in Side::BOTH {
        let a = t.algebra(side);
        let b = t.algebra(side.other());
        let perfect = perfect_translations(t, side).map_err(|e| e.to_string())?;
        match common_language(t, side) {
            Ok(cl) => {
                if cl.members != perfect {
                    return Err("common language differs from the perfect set".into());
                }
                let member = |p: Prop| cl.members.binary_search(&p).is_ok();
                for &p in &cl.members {
                    for &q in &cl.members {
                        if !member(p.meet(q)) || !member(p.meet(a.complement(q))) {
                            return Err(format!("not closed at {}, {}", a.render(p.into()), a.render(q.into())));
                        }
                        let (pp, pq) = (cl.partner(p).unwrap(), cl.partner(q).unwrap());
                        if p.implies(q) != pp.implies(pq) {
                            return Err(format!(
                                "partner map breaks the order at {}, {}",
                                a.render(p.into()),
                                a.render(q.into())
                            ));
                        }
                    }
                    let image = t.outer(side, p.into());
                    if image != StarProp::Prop(cl.partner(p).unwrap()) || !b.contains(image) {
                        return Err("partner is not the translation".into());
                    }
                }
                if cl.top() == Prop::FALSE {
                    return Err("top equals bottom".into());
                }
            }
            Err(Error::DegenerateCommonLanguage) => {
                if perfect.len() >= 2 {
                    return Err("reported degenerate with a non-trivial perfect set".into());
                }
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(())
}

fn characterizations() -> Outcome {
    for name in CONSISTENT_CORPORA {
        common_language_invariants(&corpus_translation(name)).map_err(|e| format!("{name}: {e}"))?;
    }
    let mut rng = rng(0x5eed_0007);
    for k in 0..500 {
        let t = consistent_instance(&mut rng, 5);
        common_language_invariants(&t).map_err(|e| format!("random instance {k}: {e}"))?;
    }
    Ok(format!("{} corpus + 500 random instances", CONSISTENT_CORPORA.len()))
}

fn embedding_diagram() -> Outcome {
    let mut checked = 0;
    for name in CONSISTENT_CORPORA {
        let t = corpus_translation(name);
        let space = JointStateSpace::from_translation(&t).map_err(|e| format!("{name}: {e}"))?;
        for side in Side::BOTH {
            let cl = match common_language(&t, side) {
                Ok(cl) => cl,
                Err(e) => return Err(format!("{name}: {e}")),
            };
            let report = joint_embeddings(&t, &space, &cl);
            ensure!(report.passed(), "{name}, host {side}: {:?}", report.first_failure());
            checked += 1;
        }
    }
    Ok(format!("{checked} corpus/host combinations"))
}

fn probability_sandwich() -> Outcome {
    const TOLERANCE: f64 = 1e-12;
    let mut rng = rng(0x5eed_0009);
    let mut checks = 0u64;
    for name in CONSISTENT_CORPORA {
        let t = corpus_translation(name);
        let space = JointStateSpace::from_translation(&t).map_err(|e| format!("{name}: {e}"))?;
        let st = SemanticTranslation::new(&space);
        let props: Vec<(Side, StarProp, bool)> = Side::BOTH
            .iter()
            .flat_map(|&side| {
                let t = &t;
                t.algebra(side).props().map(move |p| {
                    let x = StarProp::Prop(p);
                    (side, x, t.inner(side, x) == t.outer(side, x))
                })
            })
            .collect();
        let valuations: Vec<_> = props
            .iter()
            .map(|&(side, x, _)| space.valuation(side, x.prop().unwrap()))
            .collect();
        for _ in 0..1000 {
            let p = random_distribution(&mut rng, space.len());
            for (k, &(side, x, exact)) in props.iter().enumerate() {
                let interval = st.bounds(&p, side, x).map_err(|e| e.to_string())?;
                let value = p.measure(&valuations[k]);
                ensure!(
                    interval.lo <= value + TOLERANCE && value <= interval.hi + TOLERANCE,
                    "{name}: {} from language {side}: {value} outside [{}, {}]",
                    t.algebra(side).render(x),
                    interval.lo,
                    interval.hi
                );
                if exact {
                    ensure!(
                        (interval.hi - interval.lo).abs() <= TOLERANCE,
                        "{name}: exact {} has interval [{}, {}]",
                        t.algebra(side).render(x),
                        interval.lo,
                        interval.hi
                    );
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} bounds checked"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oil interval translations", oil_reproduction, Some(Duration::from_secs(1))),
        ("platypus relation and joint space", platypus_reproduction, Some(Duration::from_secs(1))),
        ("fixed points strictly exceed perfect translations", fixed_points_separation, Some(Duration::from_secs(1))),
        ("translation/implication round trip", round_trip, Some(Duration::from_secs(60))),
        ("joint space equivalence under mutation", mutation_equivalence, None),
        ("oracle equivalence", oracle_equivalence, Some(Duration::from_secs(120))),
        ("perfect-translation characterizations", characterizations, None),
        ("embedding diagram commutes", embedding_diagram, None),
        ("probability sandwich", probability_sandwich, None),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if elapsed > *limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}; {elapsed:.2?})", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} ({elapsed:.2?})", k + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
