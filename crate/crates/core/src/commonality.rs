//! What two languages can say in common, and how their awareness compares.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;

use crate::algebra::{Prop, Side, StarProp};
use crate::error::{Error, Result};
use crate::implication::{CrossImplication, Node};
use crate::report::{item, AxiomReport, Mode, Operator, Verdict, Witness};
use crate::semantics::JointStateSpace;
use crate::translation::Translation;

/// Propositions of `side` that translate exactly. Four characterizations
/// are computed separately and must agree: inner image equals outer image;
/// mutual implication with some proposition of the other language; the
/// outer round trip returns the proposition; the inner round trip does.
pub fn perfect_translations(t: &Translation, side: Side) -> Result<Vec<Prop>> {
    let src = t.algebra(side);
    let dst = t.algebra(side.other());
    let r = CrossImplication::from_translation(t)?;
    let j = side.other();
    let by_images = |p: Prop| t.inner(side, p.into()) == t.outer(side, p.into());
    let by_equivalence = |p: Prop| {
        let x = Node::new(side, p.into());
        dst.props().any(|q| {
            let y = Node::new(j, q.into());
            r.implies(x, y) && r.implies(y, x)
        })
    };
    let by_outer_round_trip = |p: Prop| t.outer(j, t.outer(side, p.into())) == StarProp::from(p);
    let by_inner_round_trip = |p: Prop| t.inner(j, t.inner(side, p.into())) == StarProp::from(p);
    let mut out = Vec::new();
    for p in src.props() {
        let verdicts = [
            by_images(p),
            by_equivalence(p),
            by_outer_round_trip(p),
            by_inner_round_trip(p),
        ];
        if verdicts.iter().any(|&v| v != verdicts[0]) {
            return Err(Error::CharacterizationMismatch {
                witness: format!("{} in language {side}: {verdicts:?}", src.render(p.into())),
            });
        }
        if verdicts[0] {
            out.push(p);
        }
    }
    Ok(out)
}

/// Propositions returned unchanged by both round trips through the other
/// language (inner then outer, and outer then inner).
pub fn fixed_points(t: &Translation, side: Side) -> Vec<Prop> {
    let j = side.other();
    t.algebra(side)
        .props()
        .filter(|&p| {
            let x = StarProp::from(p);
            t.outer(j, t.inner(side, x)) == x && t.inner(j, t.outer(side, x)) == x
        })
        .collect()
}

/// The perfectly translatable propositions of one language together with
/// their counterparts in the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonLanguage {
    pub host: Side,
    /// Ascending.
    pub members: Vec<Prop>,
    /// `partners[k]` is the counterpart of `members[k]`.
    pub partners: Vec<Prop>,
}

impl CommonLanguage {
    pub fn partner(&self, p: Prop) -> Option<Prop> {
        self.members
            .binary_search(&p)
            .ok()
            .map(|k| self.partners[k])
    }

    pub fn top(&self) -> Prop {
        *self.members.last().expect("common language is never empty")
    }

    /// Minimal non-false members.
    pub fn atoms(&self) -> Vec<Prop> {
        self.members
            .iter()
            .copied()
            .filter(|&p| {
                !p.is_false()
                    && !self
                        .members
                        .iter()
                        .any(|&q| !q.is_false() && q != p && q.implies(p))
            })
            .collect()
    }
}

/// Build the common language hosted in `host` and check its structure:
/// closed under meets and relative complements, a distinct top and bottom,
/// and a partner map that preserves and reflects the order.
pub fn common_language(t: &Translation, host: Side) -> Result<CommonLanguage> {
    let members = perfect_translations(t, host)?;
    if members.len() < 2 {
        return Err(Error::DegenerateCommonLanguage);
    }
    let mut partners = Vec::with_capacity(members.len());
    for &p in &members {
        match t.outer(host, p.into()) {
            StarProp::Prop(q) => partners.push(q),
            StarProp::Star => {
                return Err(Error::CharacterizationMismatch {
                    witness: format!("{} has no counterpart", t.algebra(host).render(p.into())),
                })
            }
        }
    }
    let common = CommonLanguage {
        host,
        members,
        partners,
    };
    let set: HashSet<Prop> = common.members.iter().copied().collect();
    let top = common.top();
    let mismatch = |what: &str, p: Prop, q: Prop| Error::CharacterizationMismatch {
        witness: format!(
            "{what} at {} and {}",
            t.algebra(host).render(p.into()),
            t.algebra(host).render(q.into())
        ),
    };
    if !set.contains(&Prop::FALSE) || top.is_false() {
        return Err(Error::DegenerateCommonLanguage);
    }
    for (k, &p) in common.members.iter().enumerate() {
        for (l, &q) in common.members.iter().enumerate() {
            if !set.contains(&p.meet(q)) {
                return Err(mismatch("not closed under meets", p, q));
            }
            let relative = Prop(q.0 & !p.0);
            if !set.contains(&relative) {
                return Err(mismatch("not closed under relative complements", p, q));
            }
            let ordered = p.implies(q);
            let partner_ordered = common.partners[k].implies(common.partners[l]);
            if ordered != partner_ordered {
                return Err(mismatch("partner map does not preserve order", p, q));
            }
        }
    }
    Ok(common)
}

/// Check that the valuations embed both languages faithfully and that the
/// common language lands on the same events along every route.
pub fn joint_embeddings(t: &Translation, space: &JointStateSpace, common: &CommonLanguage) -> AxiomReport {
    let mut report = AxiomReport::default();
    let sigma = [space.sigma(Side::One), space.sigma(Side::Two)];

    let injective = Side::BOTH.iter().find_map(|&side| {
        let mut seen = std::collections::HashMap::new();
        sigma[side.index()].iter().enumerate().find_map(|(k, e)| {
            seen.insert(e.clone(), k).map(|earlier| {
                Witness::new(vec![
                    item("lambda", side, StarProp::Prop(Prop(earlier as u64))),
                    item("lambda2", side, StarProp::Prop(Prop(k as u64))),
                ])
            })
        })
    });
    report.verdicts.push(Verdict::from_search("embedding-injective", injective));

    let homomorphism = Side::BOTH.iter().find_map(|&side| {
        let a = t.algebra(side);
        let events = &sigma[side.index()];
        crate::report::first_hit(a.prop_count(), |x| {
            let ex = &events[x];
            (0..a.prop_count()).find_map(|y| {
                let ey = &events[y];
                let meet = &events[x & y];
                let diff = &events[y & !x & a.top().0 as usize];
                let meet_ok = words_eq(meet, ex, ey, |a, b| a & b);
                let diff_ok = words_eq(diff, ex, ey, |a, b| b & !a);
                (!(meet_ok && diff_ok)).then(|| {
                    Witness::new(vec![
                        item("lambda", side, StarProp::Prop(Prop(x as u64))),
                        item("lambda2", side, StarProp::Prop(Prop(y as u64))),
                    ])
                })
            })
        })
    });
    report.verdicts.push(Verdict::from_search("embedding-homomorphism", homomorphism));

    let host = common.host;
    let guest = host.other();
    let common_leg = common
        .members
        .iter()
        .zip(&common.partners)
        .find(|(p, q)| sigma[host.index()][p.0 as usize] != sigma[guest.index()][q.0 as usize])
        .map(|(p, q)| Witness::new(vec![item("common", host, (*p).into()), item("partner", guest, (*q).into())]));
    report.verdicts.push(Verdict::from_search("diagram-common", common_leg));

    let translated = common.members.iter().zip(&common.partners).find_map(|(&p, &q)| {
        let target = &sigma[host.index()][p.0 as usize];
        for from in Side::BOTH {
            let x = if from == host { p } else { q };
            for mode in Mode::BOTH {
                let image = t.apply(from, mode, x.into());
                let ok = match image {
                    StarProp::Prop(y) => &sigma[from.other().index()][y.0 as usize] == target,
                    StarProp::Star => false,
                };
                if !ok {
                    return Some(Witness::on(Operator { from, mode }, vec![item("common", host, p.into())]));
                }
            }
        }
        None
    });
    report.verdicts.push(Verdict::from_search("diagram-translation", translated));
    report
}

fn words_eq(expected: &FixedBitSet, a: &FixedBitSet, b: &FixedBitSet, op: fn(usize, usize) -> usize) -> bool {
    let (ea, eb, ee) = (a.as_slice(), b.as_slice(), expected.as_slice());
    let n = ea.len().max(eb.len()).max(ee.len());
    (0..n).all(|k| {
        let w = |s: &[usize]| s.get(k).copied().unwrap_or(0);
        op(w(ea), w(eb)) == w(ee)
    })
}

/// How one language's awareness sits inside another's.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// Same possible states, fewer distinctions.
    PureCoarsening,
    /// Fewer possible states, same distinctions on them.
    PureRestriction,
    /// A coarsening of a restriction.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Awareness {
    Equal,
    LessAware { less: Side, form: Form },
    Incomparable,
}

impl std::fmt::Display for Awareness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Awareness::Equal => f.write_str("equal awareness"),
            Awareness::Incomparable => f.write_str("incomparable awareness"),
            Awareness::LessAware { less, form } => {
                let form = match form {
                    Form::PureCoarsening => "pure coarsening",
                    Form::PureRestriction => "pure restriction",
                    Form::Mixed => "coarsening and restriction",
                };
                write!(f, "language {less} less aware than language {} ({form})", less.other())
            }
        }
    }
}

/// The characterizations of "language `less` is less aware than `more`",
/// each computed on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LessAwareConditions {
    pub less: Side,
    /// A coarsening of a restriction of the other language's events.
    pub coarsened_restriction: bool,
    /// The other language's events are all subsets of the state space.
    pub minimal_joint_language: bool,
    /// Every proposition translates perfectly.
    pub common_language: bool,
    /// Event field inclusion.
    pub sigma_inclusion: bool,
    /// Inner and outer maps agree everywhere.
    pub inner_equals_outer: bool,
    pub pure_coarsening: bool,
    pub pure_restriction: bool,
}

impl LessAwareConditions {
    pub fn agree(&self) -> bool {
        let c = [
            self.coarsened_restriction,
            self.minimal_joint_language,
            self.common_language,
            self.sigma_inclusion,
            self.inner_equals_outer,
        ];
        c.iter().all(|&x| x == c[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AwarenessVerdict {
    pub awareness: Awareness,
    /// Indexed by the side tested as the less aware one.
    pub conditions: [LessAwareConditions; 2],
}

impl AwarenessVerdict {
    pub fn conditions_agree(&self) -> bool {
        self.conditions.iter().all(LessAwareConditions::agree)
    }
}

pub fn classify_awareness(t: &Translation, space: &JointStateSpace) -> AwarenessVerdict {
    let sigma = [space.sigma(Side::One), space.sigma(Side::Two)];
    let as_set = |side: Side| -> HashSet<FixedBitSet> { sigma[side.index()].iter().cloned().collect() };
    let sets = [as_set(Side::One), as_set(Side::Two)];
    let whole = {
        let mut e = FixedBitSet::with_capacity(space.len());
        e.insert_range(..);
        e
    };
    let conditions = Side::BOTH.map(|i| {
        let j = i.other();
        let a_i = space.valuation(i, t.algebra(i).top());
        let a_j = space.valuation(j, t.algebra(j).top());
        let restricted: HashSet<FixedBitSet> = sigma[j.index()]
            .iter()
            .map(|e| {
                let mut e = e.clone();
                e.intersect_with(&a_i);
                e
            })
            .collect();
        let sigma_inclusion = sets[i.index()].is_subset(&sets[j.index()]);
        let coarsened_restriction =
            sets[j.index()].contains(&a_i) && sets[i.index()].is_subset(&restricted);
        let minimal_joint_language = a_j == whole && {
            let events = space.atom_events(j);
            events.iter().all(|e| e.count_ones(..) == 1)
        };
        let common_language = perfect_translations(t, i)
            .map(|p| p.len() == t.algebra(i).prop_count())
            .unwrap_or(false);
        let inner_equals_outer = t
            .algebra(i)
            .props()
            .all(|p| t.inner(i, p.into()) == t.outer(i, p.into()));
        LessAwareConditions {
            less: i,
            coarsened_restriction,
            minimal_joint_language,
            common_language,
            sigma_inclusion,
            inner_equals_outer,
            pure_coarsening: a_i == a_j && sigma_inclusion,
            pure_restriction: a_i.is_subset(&a_j) && sets[i.index()] == restricted,
        }
    });
    let awareness = if sets[0] == sets[1] {
        Awareness::Equal
    } else if let Some(c) = conditions.iter().find(|c| c.sigma_inclusion) {
        let form = if c.pure_coarsening {
            Form::PureCoarsening
        } else if c.pure_restriction {
            Form::PureRestriction
        } else {
            Form::Mixed
        };
        Awareness::LessAware { less: c.less, form }
    } else {
        Awareness::Incomparable
    };
    AwarenessVerdict {
        awareness,
        conditions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::lang::parse_language;
    use std::sync::Arc;

    fn exactly_one(name: &str, atoms: &[&str]) -> Arc<Algebra> {
        let mut src = format!("language {name}\natoms: {}\nbelieve: {}\n", atoms.join(" "), atoms.join(" | "));
        for (i, a) in atoms.iter().enumerate() {
            for b in &atoms[i + 1..] {
                src.push_str(&format!("believe: !({a} & {b})\n"));
            }
        }
        Arc::new(Algebra::new(parse_language(&src).unwrap()).unwrap())
    }

    fn single_atom_example() -> Translation {
        let a1 = Arc::new(Algebra::new(parse_language("language one\natoms: lam\n").unwrap()).unwrap());
        let a2 = exactly_one("two", &["eta_a", "eta_b", "eta_c"]);
        let p1 = |s: &str| a1.parse(s).unwrap();
        let p2 = |s: &str| a2.parse(s).unwrap();
        let o12 = [p2("eta_a | eta_b"), p2("eta_b | eta_c")];
        let o21 = [p1("!lam"), p1("true"), p1("lam")];
        Translation::from_atom_outers(a1.clone(), a2.clone(), &o12, &o21).unwrap()
    }

    #[test]
    fn fixed_point_that_is_not_perfect() {
        let t = single_atom_example();
        let a1 = t.algebra(Side::One);
        let lam = a1.parse("lam").unwrap().prop().unwrap();
        let perfect = perfect_translations(&t, Side::One).unwrap();
        assert_eq!(perfect, vec![Prop::FALSE, a1.top()]);
        let fixed = fixed_points(&t, Side::One);
        assert!(fixed.contains(&lam));
        assert!(perfect.iter().all(|p| fixed.contains(p)));
        let common = common_language(&t, Side::One).unwrap();
        assert_eq!(common.members.len(), 2);
        assert_eq!(common.atoms(), vec![a1.top()]);
    }

    #[test]
    fn identity_is_fully_common_and_equal() {
        let a = exactly_one("same", &["x", "y", "z"]);
        let atoms: Vec<StarProp> = a.atoms().into_iter().map(StarProp::Prop).collect();
        let t = Translation::from_atom_outers(a.clone(), a.clone(), &atoms, &atoms).unwrap();
        assert_eq!(perfect_translations(&t, Side::Two).unwrap().len(), 8);
        assert_eq!(fixed_points(&t, Side::One).len(), 8);
        let space = JointStateSpace::from_translation(&t).unwrap();
        let verdict = classify_awareness(&t, &space);
        assert_eq!(verdict.awareness, Awareness::Equal);
        assert!(verdict.conditions_agree());
        let common = common_language(&t, Side::One).unwrap();
        assert!(joint_embeddings(&t, &space, &common).passed());
    }

    #[test]
    fn degenerate_common_language_is_an_error() {
        // Each side sees something the other cannot describe at all.
        let a1 = exactly_one("one", &["x", "y"]);
        let a2 = exactly_one("two", &["u", "v"]);
        let o12 = [StarProp::Star, a2.parse("u | v").unwrap()];
        let o21 = [StarProp::Star, a1.parse("x | y").unwrap()];
        let t = Translation::from_atom_outers(a1, a2, &o12, &o21).unwrap();
        assert!(t.is_consistent());
        assert_eq!(perfect_translations(&t, Side::One).unwrap(), vec![Prop::FALSE]);
        assert!(matches!(common_language(&t, Side::One), Err(Error::DegenerateCommonLanguage)));
    }

    #[test]
    fn awareness_text() {
        let v = Awareness::LessAware {
            less: Side::Two,
            form: Form::PureRestriction,
        };
        assert_eq!(v.to_string(), "language 2 less aware than language 1 (pure restriction)");
    }
}
