use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context};
use serde_json::{json, Value};
use xlate_core::algebra::DEFAULT_MAX_ATOMS;
use xlate_core::corpus::{Corpus, CorpusFiles};
use xlate_core::oracle::{brute_adjoint, brute_states, state_as_node_set, OracleBudget};
use xlate_core::{
    classify_awareness, common_language, dot, fixed_points, perfect_translations, probability_bounds,
    verify_agreement, Algebra, AxiomReport, CrossImplication, Distribution, Error, JointStateSpace, Limits,
    Mode, Side, Translation, Verdict,
};

use crate::output::{report_text, Body, InputDigest};
use crate::{CheckMode, Cli, Command, DotTarget, Failure, Format, Inputs, ModeArg};

type Outcome = Result<bool, Failure>;

struct Run<'a> {
    cli: &'a Cli,
    body: Body,
    text: String,
    start: Instant,
}

impl<'a> Run<'a> {
    fn format(&self, default: Format) -> Format {
        self.cli.format.unwrap_or(default)
    }

    fn load(&mut self, inputs: &Inputs) -> Result<Corpus, Failure> {
        let files = match (&inputs.corpus, &inputs.lang1, &inputs.lang2) {
            (Some(dir), _, _) => CorpusFiles::in_dir(dir)?,
            (None, Some(l1), Some(l2)) => {
                if inputs.translation.is_none() && inputs.implication.is_none() {
                    return Err(Failure::Usage(anyhow!("give --translation or --implication")));
                }
                CorpusFiles {
                    languages: [l1.clone(), l2.clone()],
                    translation: inputs.translation.clone(),
                    implication: inputs.implication.clone(),
                }
            }
            _ => return Err(Failure::Usage(anyhow!("give --corpus DIR or --lang1 and --lang2"))),
        };
        let limits = Limits {
            max_atoms: self.cli.max_atoms.unwrap_or(DEFAULT_MAX_ATOMS),
            ..Limits::default()
        };
        let corpus = Corpus::load(&files, limits)?;
        for (path, text) in &corpus.sources {
            self.body.inputs.push(InputDigest::new(path, text.as_bytes()));
        }
        Ok(corpus)
    }

    fn add_report(&mut self, name: &str, report: &AxiomReport, algebras: [&Algebra; 2]) {
        self.body.add_report(name, report, algebras);
        self.text.push_str(&report_text(name, report, algebras));
    }

    /// Write the report in the requested format; returns whether every
    /// report passed.
    fn finish(self, default: Format) -> Outcome {
        let ok = self.body.passed();
        let content = match self.format(default) {
            Format::Text => self.text,
            Format::Json => {
                let elapsed = self.cli.timing.then(|| self.start.elapsed().as_secs_f64() * 1e3);
                self.body.to_json(elapsed)
            }
        };
        match &self.cli.output {
            Some(path) => fs::write(path, content)
                .with_context(|| format!("cannot write {}", path.display()))
                .map_err(Failure::Usage)?,
            None => print!("{content}"),
        }
        Ok(ok)
    }
}

fn side(n: u8) -> Side {
    Side::from_number(n).expect("clap restricts to 1 or 2")
}

/// The corpus translation, required to satisfy its axioms.
fn consistent_translation(corpus: &Corpus) -> Result<Translation, Failure> {
    let t = corpus.resolved_translation()?;
    if let Some(v) = t.check_consistency().first_failure() {
        return Err(Error::Inconsistent {
            axiom: v.axiom.clone(),
        }
        .into());
    }
    Ok(t)
}

fn relation(corpus: &Corpus, t: &Translation) -> Result<CrossImplication, Failure> {
    match &corpus.implication {
        Some(r) => Ok(r.clone()),
        None => Ok(CrossImplication::from_translation(t)?),
    }
}

fn render_all(a: &Algebra, props: &[xlate_core::Prop]) -> Vec<String> {
    props.iter().map(|&p| a.render(p.into())).collect()
}

pub fn run(cli: &Cli) -> Outcome {
    let mut run = Run {
        cli,
        body: Body::new(command_name(&cli.command)),
        text: String::new(),
        start: Instant::now(),
    };
    match &cli.command {
        Command::Check { inputs, mode } => check(run, inputs, *mode),
        Command::Translate {
            inputs,
            from,
            mode,
            formula,
        } => translate(run, inputs, side(*from), *mode, formula),
        Command::Joint { inputs } => joint(run, inputs),
        Command::Common { inputs } => common(run, inputs),
        Command::Classify { inputs } => classify(run, inputs),
        Command::Bounds {
            inputs,
            from,
            probability,
            formula,
            ..
        } => bounds(run, inputs, side(*from), probability.as_deref(), formula),
        Command::ExportDot { inputs, what, closure } => export_dot(&mut run, inputs, *what, *closure)
            .and_then(|()| run.finish(Format::Text)),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Translate { .. } => "translate",
        Command::Joint { .. } => "joint",
        Command::Common { .. } => "common",
        Command::Classify { .. } => "classify",
        Command::Bounds { .. } => "bounds",
        Command::ExportDot { .. } => "export-dot",
    }
}

fn check(mut run: Run, inputs: &Inputs, mode: Option<CheckMode>) -> Outcome {
    let corpus = run.load(inputs)?;
    let algebras = [corpus.algebras[0].as_ref(), corpus.algebras[1].as_ref()];
    let mode = mode.unwrap_or(if corpus.translation.is_some() {
        CheckMode::Translation
    } else {
        CheckMode::Implication
    });
    match mode {
        CheckMode::Translation => {
            let t = corpus.resolved_translation()?;
            let consistency = t.check_consistency();
            run.add_report("consistency", &consistency, algebras);
            if consistency.passed() {
                run.add_report("derived", &t.check_derived_properties(), algebras);
                if run.cli.oracle {
                    let r = relation(&corpus, &t)?;
                    oracle_checks(&mut run, &r, &t, algebras);
                }
            }
        }
        CheckMode::Implication => {
            let r = match &corpus.implication {
                Some(r) => r.clone(),
                None => CrossImplication::from_translation(&corpus.resolved_translation()?)?,
            };
            let axioms = r.check_axioms();
            run.add_report("implication", &axioms, algebras);
            if axioms.passed() && run.cli.oracle {
                let t = r.to_translation()?;
                oracle_checks(&mut run, &r, &t, algebras);
            }
        }
    }
    run.finish(Format::Json)
}

/// Compare the fast constructions with the brute-force ones.
fn oracle_checks(run: &mut Run, r: &CrossImplication, t: &Translation, algebras: [&Algebra; 2]) {
    let budget = OracleBudget::default();
    let mut report = AxiomReport::default();
    let states = brute_states(r, budget).and_then(|brute| {
        let space = JointStateSpace::from_implication(r)?;
        let mut fast: Vec<_> = space
            .states()
            .iter()
            .map(|s| state_as_node_set(r, &space, s))
            .collect();
        fast.sort_by_key(|s| s.ones().collect::<Vec<_>>());
        Ok(fast == brute)
    });
    let adjoints = Side::BOTH
        .iter()
        .map(|&s| {
            brute_adjoint(t.algebra(s), t.algebra(s.other()), t.map(s.other(), Mode::Outer), budget)
                .map(|table| table == t.map(s, Mode::Inner))
        })
        .collect::<Result<Vec<bool>, Error>>();
    match (states, adjoints) {
        (Ok(states), Ok(adjoints)) => {
            let verdict = |name: &str, passed: bool| Verdict {
                axiom: name.into(),
                passed,
                witness: None,
            };
            report.verdicts.push(verdict("oracle-states", states));
            report.verdicts.push(verdict("oracle-adjoint", adjoints.iter().all(|&b| b)));
            run.add_report("oracle", &report, algebras);
        }
        (Err(e), _) | (_, Err(e)) => {
            run.body.artifact("oracle", json!({ "skipped": e.to_string() }));
            run.text.push_str(&format!("oracle: skipped ({e})\n"));
        }
    }
}

fn translate(mut run: Run, inputs: &Inputs, from: Side, mode: ModeArg, formula: &str) -> Outcome {
    let corpus = run.load(inputs)?;
    let t = consistent_translation(&corpus)?;
    let mode = match mode {
        ModeArg::Inner => Mode::Inner,
        ModeArg::Outer => Mode::Outer,
    };
    let x = t
        .algebra(from)
        .parse(formula)
        .with_context(|| format!("formula `{formula}`"))?;
    let y = t.apply(from, mode, x);
    let target = t.algebra(from.other());
    let rendered = target.render(y);
    if run.cli.oracle && mode == Mode::Inner {
        let table = brute_adjoint(t.algebra(from), target, t.map(from.other(), Mode::Outer), OracleBudget::default())?;
        let verdict = Verdict {
            axiom: "oracle-adjoint".into(),
            passed: table[t.algebra(from).index(x)] == y,
            witness: None,
        };
        let report = AxiomReport {
            verdicts: vec![verdict],
        };
        run.body.add_report("oracle", &report, t.algebras());
    }
    run.body.artifact(
        "translation",
        json!({
            "from": from.number(),
            "mode": mode.name(),
            "formula": formula,
            "result": rendered,
        }),
    );
    run.text = format!("{rendered}\n");
    run.finish(Format::Text)
}

fn space_and_translation(corpus: &Corpus) -> Result<(JointStateSpace, Translation), Failure> {
    match (&corpus.translation, &corpus.implication) {
        (None, Some(r)) => {
            let space = JointStateSpace::from_implication(r)?;
            Ok((space, r.to_translation()?))
        }
        _ => {
            let t = consistent_translation(corpus)?;
            Ok((JointStateSpace::from_translation(&t)?, t))
        }
    }
}

fn joint(mut run: Run, inputs: &Inputs) -> Outcome {
    let corpus = run.load(inputs)?;
    let (space, t) = space_and_translation(&corpus)?;
    let algebras = t.algebras();
    for (k, s) in space.states().iter().enumerate() {
        let label = |side: Side| match s.atoms[side.index()] {
            Some(a) => algebras[side.index()].model_label(a).to_string(),
            None => "-".into(),
        };
        run.text.push_str(&format!("{k}: {} / {}\n", label(Side::One), label(Side::Two)));
    }
    run.body.artifact("joint", space.to_json());
    let agreement = verify_agreement(&t, &space);
    run.add_report("agreement", &agreement, algebras);
    if run.cli.oracle {
        let r = relation(&corpus, &t)?;
        oracle_checks(&mut run, &r, &t, algebras);
    }
    run.finish(Format::Json)
}

fn common(mut run: Run, inputs: &Inputs) -> Outcome {
    let corpus = run.load(inputs)?;
    let (space, t) = space_and_translation(&corpus)?;
    let mut tables = Vec::new();
    let mut embedding = None;
    for s in Side::BOTH {
        let a = t.algebra(s);
        let b = t.algebra(s.other());
        let perfect = perfect_translations(&t, s)?;
        let fixed = fixed_points(&t, s);
        let language = match common_language(&t, s) {
            Ok(cl) => {
                if s == Side::One {
                    embedding = Some(xlate_core::joint_embeddings(&t, &space, &cl));
                }
                let pairs: Vec<Value> = cl
                    .members
                    .iter()
                    .zip(&cl.partners)
                    .map(|(&m, &p)| json!({ "member": a.render(m.into()), "partner": b.render(p.into()) }))
                    .collect();
                json!({ "atoms": render_all(a, &cl.atoms()), "pairs": pairs })
            }
            Err(Error::DegenerateCommonLanguage) => Value::Null,
            Err(e) => return Err(e.into()),
        };
        run.text.push_str(&format!(
            "language {} ({}): {} perfect, {} fixed points\n  perfect: {}\n",
            s,
            a.name(),
            perfect.len(),
            fixed.len(),
            render_all(a, &perfect).join("; ")
        ));
        tables.push(json!({
            "language": a.name(),
            "perfect": render_all(a, &perfect),
            "fixed_points": render_all(a, &fixed),
            "common_language": language,
        }));
    }
    run.body.artifact("common", Value::Array(tables));
    if let Some(report) = embedding {
        run.add_report("embedding", &report, t.algebras());
    }
    run.finish(Format::Json)
}

fn classify(mut run: Run, inputs: &Inputs) -> Outcome {
    let corpus = run.load(inputs)?;
    let (space, t) = space_and_translation(&corpus)?;
    let verdict = classify_awareness(&t, &space);
    let conditions: Vec<Value> = verdict
        .conditions
        .iter()
        .map(|c| {
            json!({
                "less": c.less.number(),
                "coarsened_restriction": c.coarsened_restriction,
                "minimal_joint_language": c.minimal_joint_language,
                "common_language": c.common_language,
                "sigma_inclusion": c.sigma_inclusion,
                "inner_equals_outer": c.inner_equals_outer,
                "pure_coarsening": c.pure_coarsening,
                "pure_restriction": c.pure_restriction,
            })
        })
        .collect();
    run.body.artifact(
        "awareness",
        json!({ "verdict": verdict.awareness.to_string(), "conditions": conditions }),
    );
    let report = AxiomReport {
        verdicts: vec![Verdict {
            axiom: "conditions-agree".into(),
            passed: verdict.conditions_agree(),
            witness: None,
        }],
    };
    run.body.add_report("awareness", &report, t.algebras());
    run.text = format!("{}\n", verdict.awareness);
    if !verdict.conditions_agree() {
        run.text.push_str("warning: the awareness characterizations disagree\n");
    }
    run.finish(Format::Json)
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn bounds(mut run: Run, inputs: &Inputs, from: Side, probability: Option<&Path>, formula: &str) -> Outcome {
    let corpus = run.load(inputs)?;
    let (space, t) = space_and_translation(&corpus)?;
    let dist = match probability {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))
                .map_err(Failure::Usage)?;
            run.body.inputs.push(InputDigest::new(path, text.as_bytes()));
            Distribution::from_json(&space, &text).with_context(|| path.display().to_string())?
        }
        None => Distribution::uniform(space.len()),
    };
    let x = t
        .algebra(from)
        .parse(formula)
        .with_context(|| format!("formula `{formula}`"))?;
    let interval = probability_bounds(&space, &dist, from, x)?;
    let rounded = vec![round4(interval.lo), round4(interval.hi)];
    run.body.artifact(
        "bounds",
        json!({
            "from": from.number(),
            "formula": formula,
            "lo": interval.lo,
            "hi": interval.hi,
            "rounded": rounded,
        }),
    );
    run.text = format!("{rounded:?}\n");
    run.finish(Format::Json)
}

fn export_dot(run: &mut Run, inputs: &Inputs, what: DotTarget, closure: bool) -> Result<(), Failure> {
    let corpus = run.load(inputs)?;
    let text = match what {
        DotTarget::Algebra1 => dot::algebra_dot(&corpus.algebras[0], Side::One),
        DotTarget::Algebra2 => dot::algebra_dot(&corpus.algebras[1], Side::Two),
        DotTarget::Cross => {
            let r = match &corpus.implication {
                Some(r) => r.clone(),
                None => CrossImplication::from_translation(&consistent_translation(&corpus)?)?,
            };
            dot::cross_dot(&r, closure)
        }
    };
    run.body.artifact("dot", Value::String(text.clone()));
    run.text = text;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_for_display() {
        assert_eq!(format!("{:?}", vec![round4(1.0 / 3.0), round4(1.0)]), "[0.3333, 1.0]");
        assert_eq!(round4(0.66666), 0.6667);
    }
}
