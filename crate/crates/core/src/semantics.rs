//! Joint state spaces: a set of states on which both languages are
//! interpreted as events, and the set-theoretic versions of the translations.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde_json::{json, Value};

use crate::algebra::{Algebra, Prop, Side, StarProp};
use crate::error::{Error, Result};
use crate::implication::CrossImplication;
use crate::report::{first_hit, item, AxiomReport, Mode, Operator, Witness};
use crate::translation::Translation;

/// A state names the atom of each language true in it, or `None` when the
/// language cannot describe the state at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub atoms: [Option<usize>; 2],
}

impl State {
    fn sort_key(&self) -> (usize, usize) {
        (
            self.atoms[0].unwrap_or(usize::MAX),
            self.atoms[1].unwrap_or(usize::MAX),
        )
    }
}

/// An event, or `*` for an approximation that does not exist.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StarEvent {
    Event(FixedBitSet),
    Star,
}

impl StarEvent {
    pub fn event(&self) -> Option<&FixedBitSet> {
        match self {
            StarEvent::Event(e) => Some(e),
            StarEvent::Star => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointStateSpace {
    algebras: [Arc<Algebra>; 2],
    states: Vec<State>,
    /// `atom_events[i][a]`: the states where atom `a` of language `i` holds.
    atom_events: [Vec<FixedBitSet>; 2],
}

impl JointStateSpace {
    /// The canonical space of a relation satisfying I1–I5. Each state pairs
    /// two atoms that are compatible under both outer maps; an atom whose
    /// outer image is `*` also gets a state of its own.
    pub fn from_implication(r: &CrossImplication) -> Result<JointStateSpace> {
        let t = r.to_translation()?;
        Ok(JointStateSpace::from_outer_maps(&t))
    }

    /// Same as building the relation of `t` first; `t` must be consistent.
    pub fn from_translation(t: &Translation) -> Result<JointStateSpace> {
        JointStateSpace::from_implication(&CrossImplication::from_translation(t)?)
    }

    fn from_outer_maps(t: &Translation) -> JointStateSpace {
        let [a1, a2] = t.algebras();
        let outer_of = |side: Side, k: usize| t.outer(side, Prop::singleton(k).into());
        let mut states = Vec::new();
        for x in 0..a1.model_count() {
            let ox = outer_of(Side::One, x);
            for y in 0..a2.model_count() {
                let oy = outer_of(Side::Two, y);
                if StarProp::from(Prop::singleton(y)).implies(ox)
                    && StarProp::from(Prop::singleton(x)).implies(oy)
                {
                    states.push(State {
                        atoms: [Some(x), Some(y)],
                    });
                }
            }
            if ox.is_star() {
                states.push(State { atoms: [Some(x), None] });
            }
        }
        for y in 0..a2.model_count() {
            if outer_of(Side::Two, y).is_star() {
                states.push(State { atoms: [None, Some(y)] });
            }
        }
        states.sort_by_key(State::sort_key);
        let atom_events = [0, 1].map(|i| {
            let count = t.algebras()[i].model_count();
            let mut events = vec![FixedBitSet::with_capacity(states.len()); count];
            for (s, st) in states.iter().enumerate() {
                if let Some(a) = st.atoms[i] {
                    events[a].insert(s);
                }
            }
            events
        });
        JointStateSpace {
            algebras: t.shared_algebras(),
            states,
            atom_events,
        }
    }

    /// Assemble a space from explicit atom events. Events of each language
    /// must be non-empty and pairwise disjoint, so that the valuation is an
    /// injective Boolean homomorphism.
    pub fn from_parts(
        algebras: [Arc<Algebra>; 2],
        states: Vec<State>,
        atom_events: [Vec<FixedBitSet>; 2],
    ) -> Result<JointStateSpace> {
        for side in Side::BOTH {
            let a = &algebras[side.index()];
            let events = &atom_events[side.index()];
            if events.len() != a.model_count() {
                return Err(Error::MalformedStateSpace(format!(
                    "language `{}` has {} atoms but {} events",
                    a.name(),
                    a.model_count(),
                    events.len()
                )));
            }
            let mut seen = FixedBitSet::with_capacity(states.len());
            for (k, e) in events.iter().enumerate() {
                if e.len() > states.len() || e.ones().any(|s| s >= states.len()) {
                    return Err(Error::MalformedStateSpace(format!("event of atom {k} names unknown states")));
                }
                if e.count_ones(..) == 0 {
                    return Err(Error::MalformedStateSpace(format!(
                        "atom {k} of `{}` has an empty event",
                        a.name()
                    )));
                }
                if !seen.is_disjoint(e) {
                    return Err(Error::MalformedStateSpace(format!(
                        "atom events of `{}` overlap",
                        a.name()
                    )));
                }
                seen.union_with(e);
            }
        }
        if states.is_empty() {
            return Err(Error::MalformedStateSpace("no states".into()));
        }
        let mut atom_events = atom_events;
        for events in &mut atom_events {
            for e in events {
                e.grow(states.len());
            }
        }
        Ok(JointStateSpace {
            algebras,
            states,
            atom_events,
        })
    }

    pub fn algebra(&self, side: Side) -> &Algebra {
        &self.algebras[side.index()]
    }

    pub fn algebras(&self) -> [&Algebra; 2] {
        [&self.algebras[0], &self.algebras[1]]
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn atom_events(&self, side: Side) -> &[FixedBitSet] {
        &self.atom_events[side.index()]
    }

    /// The event of a proposition: states whose atom of `side` lies below it.
    pub fn valuation(&self, side: Side, p: Prop) -> FixedBitSet {
        let mut e = FixedBitSet::with_capacity(self.states.len());
        for k in p.models() {
            e.union_with(&self.atom_events[side.index()][k]);
        }
        e
    }

    pub fn star_valuation(&self, side: Side, x: StarProp) -> StarEvent {
        match x {
            StarProp::Star => StarEvent::Star,
            StarProp::Prop(p) => StarEvent::Event(self.valuation(side, p)),
        }
    }

    /// All events of one language, indexed by proposition.
    pub fn sigma(&self, side: Side) -> Vec<FixedBitSet> {
        self.algebra(side).props().map(|p| self.valuation(side, p)).collect()
    }

    /// No two states lie in exactly the same atoms of both languages.
    pub fn is_minimal(&self) -> bool {
        let mut signatures: Vec<[Option<usize>; 2]> = (0..self.states.len())
            .map(|s| {
                [0, 1].map(|i| self.atom_events[i].iter().position(|e| e.contains(s)))
            })
            .collect();
        let before = signatures.len();
        signatures.sort();
        signatures.dedup();
        signatures.len() == before
    }

    /// JSON view: the state list and, per language, the event of each atom.
    pub fn to_json(&self) -> Value {
        let states: Vec<Value> = self
            .states
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let label = |i: usize| match s.atoms[i] {
                    Some(a) => Value::String(self.algebras[i].model_label(a).to_string()),
                    None => Value::Null,
                };
                json!({ "index": k, "language1": label(0), "language2": label(1) })
            })
            .collect();
        let table = |side: Side| -> Vec<Value> {
            let a = self.algebra(side);
            a.atoms()
                .into_iter()
                .chain(std::iter::once(a.top()))
                .map(|p| {
                    let states: Vec<usize> = self.valuation(side, p).ones().collect();
                    json!({ "formula": a.render(p.into()), "states": states })
                })
                .collect()
        };
        json!({
            "language1": self.algebras[0].name(),
            "language2": self.algebras[1].name(),
            "states": states,
            "valuation1": table(Side::One),
            "valuation2": table(Side::Two),
            "minimal": self.is_minimal(),
        })
    }
}

/// Union of the members of `sigma` inside `e`.
pub fn inner_approximation(sigma: &[FixedBitSet], e: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(e.len());
    for f in sigma {
        if f.is_subset(e) {
            out.union_with(f);
        }
    }
    out
}

/// Intersection of the members of `sigma` containing `e`, or `*` if none do.
pub fn outer_approximation(sigma: &[FixedBitSet], e: &FixedBitSet) -> StarEvent {
    let mut out: Option<FixedBitSet> = None;
    for f in sigma.iter().filter(|f| e.is_subset(f)) {
        match &mut out {
            None => out = Some(f.clone()),
            Some(acc) => acc.intersect_with(f),
        }
    }
    out.map_or(StarEvent::Star, StarEvent::Event)
}

/// The four set-level maps between the two event fields.
#[derive(Debug, Clone)]
pub struct SemanticTranslation {
    sigma: [Vec<FixedBitSet>; 2],
    lookup: [HashMap<FixedBitSet, usize>; 2],
    /// `maps[from][mode][p]`: image of the event of proposition `p`.
    maps: [[Vec<StarEvent>; 2]; 2],
}

impl SemanticTranslation {
    pub fn new(space: &JointStateSpace) -> SemanticTranslation {
        let sigma = [space.sigma(Side::One), space.sigma(Side::Two)];
        let lookup = [0, 1].map(|i| {
            sigma[i]
                .iter()
                .enumerate()
                .map(|(k, e)| (e.clone(), k))
                .collect::<HashMap<_, _>>()
        });
        let maps = [0, 1].map(|i| {
            let target = &sigma[1 - i];
            [
                sigma[i]
                    .iter()
                    .map(|e| StarEvent::Event(inner_approximation(target, e)))
                    .collect::<Vec<_>>(),
                sigma[i]
                    .iter()
                    .map(|e| outer_approximation(target, e))
                    .collect::<Vec<_>>(),
            ]
        });
        SemanticTranslation { sigma, lookup, maps }
    }

    pub fn sigma(&self, side: Side) -> &[FixedBitSet] {
        &self.sigma[side.index()]
    }

    /// The proposition whose event is `e`, if `e` belongs to the field.
    pub fn prop_of(&self, side: Side, e: &FixedBitSet) -> Option<Prop> {
        self.lookup[side.index()].get(e).map(|&k| Prop(k as u64))
    }

    /// Image of the event of `x`; `*` maps to `*`.
    pub fn apply_prop(&self, from: Side, mode: Mode, x: StarProp) -> StarEvent {
        match x {
            StarProp::Star => StarEvent::Star,
            StarProp::Prop(p) => self.maps[from.index()][mode.index()][p.0 as usize].clone(),
        }
    }

    /// Image of an event of the source field, or `None` if `e` is not one.
    pub fn apply(&self, from: Side, mode: Mode, e: &StarEvent) -> Option<StarEvent> {
        match e {
            StarEvent::Star => Some(StarEvent::Star),
            StarEvent::Event(e) => {
                let p = self.prop_of(from, e)?;
                Some(self.apply_prop(from, mode, p.into()))
            }
        }
    }

    /// Probability interval of the event of `x` as seen from the other
    /// language, reusing precomputed approximations.
    pub fn bounds(&self, p: &Distribution, from: Side, x: StarProp) -> Result<Interval> {
        if x.is_star() {
            return Err(Error::StarArgument {
                operation: "probability bounds".into(),
            });
        }
        let lo = match self.apply_prop(from, Mode::Inner, x) {
            StarEvent::Event(e) => p.measure(&e),
            StarEvent::Star => 1.0,
        };
        let hi = match self.apply_prop(from, Mode::Outer, x) {
            StarEvent::Event(e) => p.measure(&e),
            StarEvent::Star => 1.0,
        };
        Ok(Interval { lo, hi })
    }
}

/// Check that a translation and a joint space describe the same thing in
/// three equivalent ways: cross implication matches event containment, the
/// set-level maps are the translation carried over by the valuations, and
/// the translation is recovered from the set-level maps.
pub fn verify_agreement(t: &Translation, space: &JointStateSpace) -> AxiomReport {
    let sem = SemanticTranslation::new(space);
    let mut report = AxiomReport::default();

    let containment = Side::BOTH.iter().find_map(|&i| {
        let j = i.other();
        let src = t.algebra(i);
        let dst = t.algebra(j);
        first_hit(src.prop_count(), |x| {
            let lambda = Prop(x as u64);
            let inner = t.inner(i, lambda.into());
            let vl = &sem.sigma(i)[x];
            dst.props()
                .find(|&eta| {
                    let syntactic = StarProp::from(eta).implies(inner);
                    let semantic = sem.sigma(j)[eta.0 as usize].is_subset(vl);
                    syntactic != semantic
                })
                .map(|eta| Witness::new(vec![item("lambda", i, lambda.into()), item("eta", j, eta.into())]))
        })
    });
    report.verdicts.push(crate::report::Verdict::from_search("agree-implication", containment));

    let carried = maps_mismatch(t, space, &sem, |t, sem, op, x| {
        let expected = space.star_valuation(op.from.other(), t.apply(op.from, op.mode, x));
        sem.apply_prop(op.from, op.mode, x) == expected
    });
    report.verdicts.push(crate::report::Verdict::from_search("agree-semantic", carried));

    let recovered = maps_mismatch(t, space, &sem, |t, sem, op, x| {
        let back = match sem.apply_prop(op.from, op.mode, x) {
            StarEvent::Star => Some(StarProp::Star),
            StarEvent::Event(e) => sem.prop_of(op.from.other(), &e).map(StarProp::Prop),
        };
        back == Some(t.apply(op.from, op.mode, x))
    });
    report.verdicts.push(crate::report::Verdict::from_search("agree-syntactic", recovered));
    report
}

fn maps_mismatch(
    t: &Translation,
    space: &JointStateSpace,
    sem: &SemanticTranslation,
    agrees: impl Fn(&Translation, &SemanticTranslation, Operator, StarProp) -> bool + Sync + Send,
) -> Option<Witness> {
    for from in Side::BOTH {
        for mode in Mode::BOTH {
            let op = Operator { from, mode };
            let src = space.algebra(from);
            let hit = first_hit(src.star_count(), |k| {
                let x = src.from_index(k);
                (!agrees(t, sem, op, x)).then(|| Witness::on(op, vec![item("lambda", from, x)]))
            });
            if hit.is_some() {
                return hit;
            }
        }
    }
    None
}

/// A probability distribution over the states of a joint space.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    weights: Vec<f64>,
}

/// Tolerance for the total mass of a distribution.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Distribution> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution(format!("weight {w} is not a non-negative number")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { total });
        }
        Ok(Distribution { weights })
    }

    pub fn uniform(states: usize) -> Distribution {
        Distribution {
            weights: vec![1.0 / states as f64; states],
        }
    }

    /// Parse a JSON object mapping state indices to weights; states left
    /// out get weight zero.
    pub fn from_json(space: &JointStateSpace, src: &str) -> Result<Distribution> {
        let map: BTreeMap<String, f64> = serde_json::from_str(src)
            .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
        let mut weights = vec![0.0; space.len()];
        for (key, w) in map {
            let k: usize = key
                .parse()
                .map_err(|_| Error::InvalidDistribution(format!("`{key}` is not a state index")))?;
            if k >= weights.len() {
                return Err(Error::InvalidDistribution(format!("state {k} does not exist")));
            }
            weights[k] = w;
        }
        Distribution::new(weights)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn measure(&self, e: &FixedBitSet) -> f64 {
        e.ones().map(|s| self.weights[s]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Bounds on the probability of `x`, a proposition of `from`, using only
/// events the other language can express.
pub fn probability_bounds(
    space: &JointStateSpace,
    p: &Distribution,
    from: Side,
    x: StarProp,
) -> Result<Interval> {
    if p.weights.len() != space.len() {
        return Err(Error::InvalidDistribution(format!(
            "{} weights for {} states",
            p.weights.len(),
            space.len()
        )));
    }
    let Some(x) = x.prop() else {
        return Err(Error::StarArgument {
            operation: "probability bounds".into(),
        });
    };
    let target = space.sigma(from.other());
    let e = space.valuation(from, x);
    let lo = p.measure(&inner_approximation(&target, &e));
    let hi = match outer_approximation(&target, &e) {
        StarEvent::Event(f) => p.measure(&f),
        StarEvent::Star => 1.0,
    };
    Ok(Interval { lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::implication::Node;
    use crate::lang::parse_language;

    fn exactly_one(name: &str, atoms: &[&str]) -> Arc<Algebra> {
        let mut src = format!("language {name}\natoms: {}\nbelieve: {}\n", atoms.join(" "), atoms.join(" | "));
        for (i, a) in atoms.iter().enumerate() {
            for b in &atoms[i + 1..] {
                src.push_str(&format!("believe: !({a} & {b})\n"));
            }
        }
        Arc::new(Algebra::new(parse_language(&src).unwrap()).unwrap())
    }

    fn platypus() -> (Translation, JointStateSpace) {
        let a1 = exactly_one("english", &["egg_only", "mam_only", "plat"]);
        let a2 = exactly_one("spanish", &["eta_huev", "eta_mam"]);
        let n1 = |s: &str| Node::new(Side::One, a1.parse(s).unwrap());
        let n2 = |s: &str| Node::new(Side::Two, a2.parse(s).unwrap());
        let mut seeds = Vec::new();
        for (x, y) in [("mam_only", "eta_mam"), ("egg_only", "eta_huev"), ("!plat", "true")] {
            seeds.push((n1(x), n2(y)));
            seeds.push((n2(y), n1(x)));
        }
        let r = CrossImplication::from_seeds(a1.clone(), a2.clone(), &seeds).unwrap();
        let t = r.to_translation().unwrap();
        let space = JointStateSpace::from_implication(&r).unwrap();
        (t, space)
    }

    #[test]
    fn platypus_has_three_states() {
        let (t, space) = platypus();
        assert_eq!(
            space.states(),
            &[
                State { atoms: [Some(0), Some(0)] },
                State { atoms: [Some(1), Some(1)] },
                State { atoms: [Some(2), None] },
            ]
        );
        let t2 = space.valuation(Side::Two, t.algebra(Side::Two).top());
        assert_eq!(t2.ones().collect::<Vec<_>>(), vec![0, 1]);
        assert!(space.is_minimal());
        assert!(verify_agreement(&t, &space).passed());
    }

    #[test]
    fn platypus_bounds() {
        let (t, space) = platypus();
        let p = Distribution::uniform(space.len());
        let egg = t.algebra(Side::One).parse("egg_only | plat").unwrap();
        let b = probability_bounds(&space, &p, Side::One, egg).unwrap();
        assert!((b.lo - 1.0 / 3.0).abs() < 1e-12 && (b.hi - 1.0).abs() < 1e-12);
        let mam = t.algebra(Side::Two).parse("eta_mam").unwrap();
        let b = probability_bounds(&space, &p, Side::Two, mam).unwrap();
        assert!((b.lo - 1.0 / 3.0).abs() < 1e-12 && (b.hi - 1.0 / 3.0).abs() < 1e-12);
        let sem = SemanticTranslation::new(&space);
        assert_eq!(sem.bounds(&p, Side::One, egg).unwrap(), probability_bounds(&space, &p, Side::One, egg).unwrap());
        assert!(probability_bounds(&space, &p, Side::One, StarProp::Star).is_err());
    }

    #[test]
    fn distributions_must_be_normalized() {
        assert!(matches!(Distribution::new(vec![0.5, 0.4]), Err(Error::NotNormalized { .. })));
        assert!(Distribution::new(vec![-0.5, 1.5]).is_err());
        assert!(Distribution::new(vec![0.5, 0.5]).is_ok());
        let (_, space) = platypus();
        let p = Distribution::from_json(&space, r#"{"0": 0.25, "2": 0.75}"#).unwrap();
        assert_eq!(p.weights(), &[0.25, 0.0, 0.75]);
        assert!(Distribution::from_json(&space, r#"{"7": 1.0}"#).is_err());
    }

    #[test]
    fn permuted_valuation_breaks_agreement() {
        let (t, space) = platypus();
        let mut events: [Vec<FixedBitSet>; 2] = [
            space.atom_events(Side::One).to_vec(),
            space.atom_events(Side::Two).to_vec(),
        ];
        events[0].swap(0, 1);
        let permuted =
            JointStateSpace::from_parts(t.shared_algebras(), space.states().to_vec(), events).unwrap();
        let report = verify_agreement(&t, &permuted);
        let v = report.verdict("agree-implication").unwrap();
        assert!(!v.passed);
        let w = v.witness.as_ref().unwrap();
        assert_eq!(w.items.len(), 2);
    }

    #[test]
    fn approximations_follow_the_field() {
        let sigma: Vec<FixedBitSet> = [vec![], vec![0, 1], vec![2], vec![0, 1, 2]]
            .iter()
            .map(|v| {
                let mut e = FixedBitSet::with_capacity(4);
                v.iter().for_each(|&s| e.insert(s));
                e
            })
            .collect();
        let mut e = FixedBitSet::with_capacity(4);
        e.insert(0);
        assert_eq!(inner_approximation(&sigma, &e).count_ones(..), 0);
        assert_eq!(outer_approximation(&sigma, &e), StarEvent::Event(sigma[1].clone()));
        e.insert(3);
        assert_eq!(outer_approximation(&sigma, &e), StarEvent::Star);
    }

    #[test]
    fn from_parts_rejects_overlap() {
        let (t, space) = platypus();
        let mut events = [
            space.atom_events(Side::One).to_vec(),
            space.atom_events(Side::Two).to_vec(),
        ];
        events[1][0].insert(1);
        assert!(matches!(
            JointStateSpace::from_parts(t.shared_algebras(), space.states().to_vec(), events),
            Err(Error::MalformedStateSpace(_))
        ));
    }
}
