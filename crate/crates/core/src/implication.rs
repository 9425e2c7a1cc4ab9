//! Implication across two languages.
//!
//! The relation lives on the disjoint union of both extended lattices. Within
//! a language it should coincide with the algebra's own order; the pairs
//! that cross between languages carry the translation. Construction from
//! seed pairs takes the transitive closure, so it may also force extra pairs
//! inside a language, which the I1 check then reports.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::algebra::{Algebra, Prop, Side, StarProp};
use crate::error::{Error, Result};
use crate::report::{first_hit, item, AxiomReport, Mode, Witness};
use crate::translation::Translation;

/// Largest combined number of lattice elements for seed closure.
pub const MAX_CLOSURE_NODES: usize = 1 << 15;

/// An element of one of the two extended lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub side: Side,
    pub value: StarProp,
}

impl Node {
    pub fn new(side: Side, value: StarProp) -> Node {
        Node { side, value }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossImplication {
    algebras: [Arc<Algebra>; 2],
    /// `cross[i][x]`: the elements of the other language implied by `x`.
    cross: [Vec<FixedBitSet>; 2],
    /// `excess[i][x]`: elements of the same language implied by `x` that lie
    /// outside its up-set. Empty rows when there are none.
    excess: [Vec<FixedBitSet>; 2],
}

impl CrossImplication {
    /// The smallest transitive relation containing both algebra orders, the
    /// bottom and top identifications across languages, and `seeds`.
    pub fn from_seeds(a1: Arc<Algebra>, a2: Arc<Algebra>, seeds: &[(Node, Node)]) -> Result<CrossImplication> {
        let algebras = [a1, a2];
        let n = [algebras[0].star_count(), algebras[1].star_count()];
        let total = n[0] + n[1];
        if total > MAX_CLOSURE_NODES {
            return Err(Error::BudgetExceeded(format!(
                "closure over {total} lattice elements exceeds {MAX_CLOSURE_NODES}"
            )));
        }
        let global = |node: Node| -> Result<usize> {
            let a = &algebras[node.side.index()];
            if !a.contains(node.value) {
                return Err(Error::OutOfRange {
                    algebra: a.name().to_string(),
                });
            }
            Ok(a.index(node.value) + if node.side == Side::Two { n[0] } else { 0 })
        };

        let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(total, total * 4);
        for _ in 0..total {
            graph.add_node(());
        }
        let mut edge = |u: usize, v: usize| {
            graph.add_edge(NodeIndex::new(u), NodeIndex::new(v), ());
        };
        for side in Side::BOTH {
            let a = &algebras[side.index()];
            let base = if side == Side::Two { n[0] } else { 0 };
            let top = a.top().0;
            for x in a.props() {
                let mut free = !x.0 & top;
                while free != 0 {
                    let m = free & free.wrapping_neg();
                    free &= free - 1;
                    edge(base + x.0 as usize, base + (x.0 | m) as usize);
                }
            }
            edge(base + top as usize, base + a.prop_count());
        }
        let f1 = global(Node::new(Side::One, StarProp::FALSE))?;
        let f2 = global(Node::new(Side::Two, StarProp::FALSE))?;
        let s1 = global(Node::new(Side::One, StarProp::Star))?;
        let s2 = global(Node::new(Side::Two, StarProp::Star))?;
        for (u, v) in [(f1, f2), (f2, f1), (s1, s2), (s2, s1)] {
            edge(u, v);
        }
        for &(a, b) in seeds {
            let (u, v) = (global(a)?, global(b)?);
            edge(u, v);
        }

        // Components come out in reverse topological order, so every
        // successor component is finished before it is needed.
        let components = tarjan_scc(&graph);
        let mut component_of = vec![0usize; total];
        for (c, members) in components.iter().enumerate() {
            for v in members {
                component_of[v.index()] = c;
            }
        }
        let mut reach: Vec<FixedBitSet> = Vec::with_capacity(components.len());
        for (c, members) in components.iter().enumerate() {
            let mut set = FixedBitSet::with_capacity(total);
            for v in members {
                set.insert(v.index());
            }
            for v in members {
                for w in graph.neighbors(*v) {
                    let d = component_of[w.index()];
                    if d != c {
                        set.union_with(&reach[d]);
                    }
                }
            }
            reach.push(set);
        }

        let mut cross: [Vec<FixedBitSet>; 2] = Default::default();
        let mut excess: [Vec<FixedBitSet>; 2] = Default::default();
        for side in Side::BOTH {
            let a = &algebras[side.index()];
            let (own, other) = if side == Side::One { (0, n[0]) } else { (n[0], 0) };
            let other_len = n[side.other().index()];
            for x in a.star_props() {
                let row = &reach[component_of[own + a.index(x)]];
                let mut c = FixedBitSet::with_capacity(other_len);
                for y in row.ones() {
                    if y >= other && y < other + other_len {
                        c.insert(y - other);
                    }
                }
                let mut e = FixedBitSet::new();
                for y in row.ones() {
                    if y >= own && y < own + n[side.index()] {
                        let yv = a.from_index(y - own);
                        if !x.implies(yv) {
                            e.grow(n[side.index()]);
                            e.insert(y - own);
                        }
                    }
                }
                cross[side.index()].push(c);
                excess[side.index()].push(e);
            }
        }
        Ok(CrossImplication {
            algebras,
            cross,
            excess,
        })
    }

    /// The relation induced by a consistent translation: `x` implies `y`
    /// across languages exactly when the outer image of `x` implies `y`.
    pub fn from_translation(t: &Translation) -> Result<CrossImplication> {
        let report = t.check_consistency();
        if let Some(v) = report.first_failure() {
            return Err(Error::Inconsistent {
                axiom: v.axiom.clone(),
            });
        }
        let algebras = t.shared_algebras();
        let mut cross: [Vec<FixedBitSet>; 2] = Default::default();
        let mut excess: [Vec<FixedBitSet>; 2] = Default::default();
        for side in Side::BOTH {
            let src = &algebras[side.index()];
            let dst = &algebras[side.other().index()];
            for x in src.star_props() {
                let image = t.outer(side, x);
                let mut row = FixedBitSet::with_capacity(dst.star_count());
                for y in dst.star_props() {
                    if image.implies(y) {
                        row.insert(dst.index(y));
                    }
                }
                cross[side.index()].push(row);
                excess[side.index()].push(FixedBitSet::new());
            }
        }
        Ok(CrossImplication {
            algebras,
            cross,
            excess,
        })
    }

    pub fn algebra(&self, side: Side) -> &Algebra {
        &self.algebras[side.index()]
    }

    pub fn algebras(&self) -> [&Algebra; 2] {
        [&self.algebras[0], &self.algebras[1]]
    }

    pub fn shared_algebras(&self) -> [Arc<Algebra>; 2] {
        self.algebras.clone()
    }

    /// Elements of the other language implied by `x`, by extended-lattice index.
    pub fn cross_row(&self, side: Side, x: StarProp) -> &FixedBitSet {
        &self.cross[side.index()][self.algebra(side).index(x)]
    }

    /// Pairs inside one language that the relation adds to the algebra's
    /// order, in index order.
    pub fn excess_pairs(&self, side: Side) -> Vec<(StarProp, StarProp)> {
        let a = self.algebra(side);
        self.excess[side.index()]
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.ones().map(move |y| (a.from_index(x), a.from_index(y))))
            .collect()
    }

    pub fn implies(&self, a: Node, b: Node) -> bool {
        if a.side == b.side {
            a.value.implies(b.value) || {
                let row = &self.excess[a.side.index()][self.algebra(a.side).index(a.value)];
                row.contains(self.algebra(a.side).index(b.value))
            }
        } else {
            self.cross_row(a.side, a.value)
                .contains(self.algebra(b.side).index(b.value))
        }
    }

    /// Number of cross-language pairs.
    pub fn cross_pair_count(&self) -> usize {
        self.cross.iter().flatten().map(|r| r.count_ones(..)).sum()
    }

    /// The full within-language rows: up-set plus any excess.
    fn within_rows(&self, side: Side) -> Vec<FixedBitSet> {
        let a = self.algebra(side);
        let len = a.star_count();
        let top = a.top().0;
        a.star_props()
            .enumerate()
            .map(|(k, x)| {
                let mut row = FixedBitSet::with_capacity(len);
                if let StarProp::Prop(p) = x {
                    let free = !p.0 & top;
                    let mut sub = free;
                    loop {
                        row.insert((p.0 | sub) as usize);
                        if sub == 0 {
                            break;
                        }
                        sub = (sub - 1) & free;
                    }
                }
                row.insert(len - 1);
                for y in self.excess[side.index()][k].ones() {
                    row.insert(y);
                }
                row
            })
            .collect()
    }

    /// For each element `y` of `side`, the elements of the other language
    /// that imply it.
    fn implied_by(&self, side: Side) -> Vec<FixedBitSet> {
        let here = self.algebra(side).star_count();
        let rows = &self.cross[side.other().index()];
        let mut cols = vec![FixedBitSet::with_capacity(rows.len()); here];
        for (x, row) in rows.iter().enumerate() {
            for y in row.ones() {
                cols[y].insert(x);
            }
        }
        cols
    }

    pub fn check_axioms(&self) -> AxiomReport {
        let mut report = AxiomReport::default();
        report.extend(self.check_order_restriction());
        report.extend(self.check_transitivity());
        report.extend(self.check_extremes());
        report.extend(self.check_lattice_preservation());
        report.extend(self.check_negation());
        report
    }

    /// I1: within each language the relation is exactly the algebra's order.
    pub fn check_order_restriction(&self) -> AxiomReport {
        let witness = Side::BOTH.iter().find_map(|&side| {
            self.excess_pairs(side)
                .first()
                .map(|&(x, y)| Witness::new(vec![item("lambda", side, x), item("lambda2", side, y)]))
        });
        AxiomReport::single("I1", witness)
    }

    /// I2: transitivity, with the lexicographically first failing triple.
    pub fn check_transitivity(&self) -> AxiomReport {
        let within = [self.within_rows(Side::One), self.within_rows(Side::Two)];
        let n = [self.algebras[0].star_count(), self.algebras[1].star_count()];
        // Row of a node split by target language.
        let part = |side: Side, x: usize, target: Side| -> &FixedBitSet {
            if side == target {
                &within[side.index()][x]
            } else {
                &self.cross[side.index()][x]
            }
        };
        let failing_target = |xs: Side, x: usize, ys: Side, y: usize| -> Option<(Side, usize)> {
            Side::BOTH.iter().find_map(|&zs| {
                part(ys, y, zs)
                    .ones()
                    .find(|&z| !part(xs, x, zs).contains(z))
                    .map(|z| (zs, z))
            })
        };
        let witness = Side::BOTH.iter().find_map(|&xs| {
            first_hit(n[xs.index()], |x| {
                Side::BOTH.iter().find_map(|&ys| {
                    part(xs, x, ys).ones().find_map(|y| {
                        failing_target(xs, x, ys, y).map(|(zs, z)| {
                            Witness::new(vec![
                                item("x", xs, self.algebras[xs.index()].from_index(x)),
                                item("y", ys, self.algebras[ys.index()].from_index(y)),
                                item("z", zs, self.algebras[zs.index()].from_index(z)),
                            ])
                        })
                    })
                })
            })
        });
        AxiomReport::single("I2", witness)
    }

    /// I3: the bottoms imply each other, and so do the extra tops.
    pub fn check_extremes(&self) -> AxiomReport {
        let pairs = [
            (Node::new(Side::One, StarProp::FALSE), Node::new(Side::Two, StarProp::FALSE)),
            (Node::new(Side::Two, StarProp::FALSE), Node::new(Side::One, StarProp::FALSE)),
            (Node::new(Side::One, StarProp::Star), Node::new(Side::Two, StarProp::Star)),
            (Node::new(Side::Two, StarProp::Star), Node::new(Side::One, StarProp::Star)),
        ];
        let witness = pairs
            .iter()
            .find(|(a, b)| !self.implies(*a, *b))
            .map(|(a, b)| Witness::new(vec![item("x", a.side, a.value), item("y", b.side, b.value)]));
        AxiomReport::single("I3", witness)
    }

    /// I4: what a proposition implies is closed under meets, and what
    /// implies it is closed under joins.
    pub fn check_lattice_preservation(&self) -> AxiomReport {
        let witness = Side::BOTH.iter().find_map(|&i| {
            let j = i.other();
            let src = self.algebra(i);
            let dst = self.algebra(j);
            let implied_by = self.implied_by(i);
            let star_j = dst.prop_count();
            first_hit(src.prop_count(), |x| {
                let members = |row: &FixedBitSet| -> Vec<Prop> {
                    row.ones().filter(|&y| y != star_j).map(|y| Prop(y as u64)).collect()
                };
                let up = members(&self.cross[i.index()][x]);
                if let Some((a, b)) = closure_failure(dst, &up, Prop::meet, true) {
                    return Some(Witness::new(vec![
                        item("lambda", i, src.from_index(x)),
                        item("eta", j, a.into()),
                        item("eta2", j, b.into()),
                    ]));
                }
                let down = members(&implied_by[x]);
                closure_failure(dst, &down, Prop::join, false).map(|(a, b)| {
                    Witness::new(vec![
                        item("lambda", i, src.from_index(x)),
                        item("eta", j, a.into()),
                        item("eta2", j, b.into()),
                    ])
                })
            })
        });
        AxiomReport::single("I4", witness)
    }

    /// I5: if `lambda` implies the other language's `true` and `eta`
    /// implies `!lambda`, then `lambda` implies `!eta`.
    pub fn check_negation(&self) -> AxiomReport {
        let witness = Side::BOTH.iter().find_map(|&i| {
            let j = i.other();
            let src = self.algebra(i);
            let dst = self.algebra(j);
            let implied_by = self.implied_by(i);
            let top_j = dst.index(dst.top().into());
            first_hit(src.prop_count(), |x| {
                let row = &self.cross[i.index()][x];
                if !row.contains(top_j) {
                    return None;
                }
                let lambda = Prop(x as u64);
                let not_lambda = src.complement(lambda);
                implied_by[not_lambda.0 as usize]
                    .ones()
                    .filter(|&y| y != dst.prop_count())
                    .find(|&y| {
                        let not_eta = dst.complement(Prop(y as u64));
                        !row.contains(not_eta.0 as usize)
                    })
                    .map(|y| {
                        Witness::new(vec![
                            item("lambda", i, lambda.into()),
                            item("eta", j, dst.from_index(y)),
                        ])
                    })
            })
        });
        AxiomReport::single("I5", witness)
    }

    /// Recover the translation: the inner image of `x` is the join of what
    /// implies it, the outer image the meet of what it implies, or `*` when
    /// it implies no proposition.
    pub fn to_translation(&self) -> Result<Translation> {
        let report = self.check_axioms();
        if let Some(v) = report.first_failure() {
            return Err(Error::Inconsistent {
                axiom: v.axiom.clone(),
            });
        }
        let mut maps: [[Vec<StarProp>; 2]; 2] = Default::default();
        for i in Side::BOTH {
            let src = self.algebra(i);
            let dst = self.algebra(i.other());
            let star_j = dst.prop_count();
            let implied_by = self.implied_by(i);
            let mut inner = Vec::with_capacity(src.star_count());
            let mut outer = Vec::with_capacity(src.star_count());
            for (x, below) in implied_by.iter().enumerate().take(src.prop_count()) {
                let join = below
                    .ones()
                    .filter(|&y| y != star_j)
                    .fold(0u64, |acc, y| acc | y as u64);
                inner.push(StarProp::Prop(Prop(join)));
                let mut targets = self.cross[i.index()][x].ones().filter(|&y| y != star_j).peekable();
                let meet = if targets.peek().is_none() {
                    StarProp::Star
                } else {
                    StarProp::Prop(Prop(targets.fold(dst.top().0, |acc, y| acc & y as u64)))
                };
                outer.push(meet);
            }
            inner.push(StarProp::Star);
            outer.push(StarProp::Star);
            maps[i.index()][Mode::Inner.index()] = inner;
            maps[i.index()][Mode::Outer.index()] = outer;
        }
        Translation::from_maps(self.algebras[0].clone(), self.algebras[1].clone(), maps)
    }
}

/// First pair in `set` whose combination leaves `set`. `set` is sorted.
/// When it is an up-set (for meets) or down-set (for joins), closure is
/// equivalent to containing its overall meet or join, which is tried first.
fn closure_failure(
    a: &Algebra,
    set: &[Prop],
    combine: fn(Prop, Prop) -> Prop,
    upward: bool,
) -> Option<(Prop, Prop)> {
    if set.is_empty() {
        return None;
    }
    let contains = |p: Prop| set.binary_search(&p).is_ok();
    let top = a.top().0;
    let monotone = set.iter().all(|&p| {
        let free = if upward { !p.0 & top } else { p.0 };
        let mut rest = free;
        while rest != 0 {
            let m = rest & rest.wrapping_neg();
            rest &= rest - 1;
            if !contains(Prop(p.0 ^ m)) {
                return false;
            }
        }
        true
    });
    if monotone {
        let whole = set.iter().copied().reduce(combine).unwrap();
        if contains(whole) {
            return None;
        }
    }
    set.iter().find_map(|&x| {
        set.iter()
            .find(|&&y| !contains(combine(x, y)))
            .map(|&y| (x, y))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn node(a: &Algebra, side: Side, s: &str) -> Node {
        Node::new(side, a.parse(s).unwrap())
    }

    fn both(x: Node, y: Node) -> [(Node, Node); 2] {
        [(x, y), (y, x)]
    }

    fn platypus() -> CrossImplication {
        let a1 = exactly_one("english", &["egg_only", "mam_only", "plat"]);
        let a2 = exactly_one("spanish", &["eta_huev", "eta_mam"]);
        let mut seeds = Vec::new();
        seeds.extend(both(node(&a1, Side::One, "mam_only"), node(&a2, Side::Two, "eta_mam")));
        seeds.extend(both(node(&a1, Side::One, "egg_only"), node(&a2, Side::Two, "eta_huev")));
        seeds.extend(both(node(&a1, Side::One, "!plat"), node(&a2, Side::Two, "true")));
        CrossImplication::from_seeds(a1, a2, &seeds).unwrap()
    }

    #[test]
    fn platypus_closure_satisfies_axioms() {
        let r = platypus();
        let report = r.check_axioms();
        assert!(report.passed(), "{report:?}");
        let [a1, a2] = r.algebras();
        // Transitivity through `true` on the second side.
        assert!(r.implies(node(a2, Side::Two, "eta_huev"), node(a1, Side::One, "!plat")));
        assert!(!r.implies(node(a1, Side::One, "plat"), node(a2, Side::Two, "true")));
        let t = r.to_translation().unwrap();
        assert_eq!(t.outer(Side::One, a1.parse("plat").unwrap()), StarProp::Star);
        assert_eq!(
            t.outer(Side::Two, a2.parse("true").unwrap()),
            a1.parse("egg_only | mam_only").unwrap()
        );
        assert_eq!(
            t.inner(Side::Two, a2.parse("!eta_mam").unwrap()),
            a1.parse("egg_only").unwrap()
        );
        assert!(t.check_consistency().passed());
        let back = CrossImplication::from_translation(&t).unwrap();
        assert_eq!(back.to_translation().unwrap(), t);
        for side in Side::BOTH {
            for x in r.algebra(side).star_props() {
                assert_eq!(r.cross_row(side, x), back.cross_row(side, x));
            }
        }
    }

    #[test]
    fn collapsing_seed_breaks_order_restriction() {
        let a1 = exactly_one("one", &["x", "y"]);
        let a2 = exactly_one("two", &["u", "v"]);
        let seeds = [
            (node(&a1, Side::One, "x"), node(&a2, Side::Two, "u")),
            (node(&a2, Side::Two, "u"), node(&a1, Side::One, "y")),
        ];
        let r = CrossImplication::from_seeds(a1.clone(), a2, &seeds).unwrap();
        let report = r.check_order_restriction();
        assert!(!report.passed());
        let w = report.verdicts[0].witness.as_ref().unwrap();
        assert_eq!(w.value("lambda"), Some(a1.parse("x").unwrap()));
        assert_eq!(w.value("lambda2"), Some(a1.parse("y").unwrap()));
        assert!(r.to_translation().is_err());
    }

    #[test]
    fn meet_preservation_failure_is_found() {
        // x implies both u and v but not their meet `false`.
        let a1 = exactly_one("one", &["x", "y"]);
        let a2 = exactly_one("two", &["u", "v"]);
        let seeds = [
            (node(&a1, Side::One, "x"), node(&a2, Side::Two, "u")),
            (node(&a1, Side::One, "x"), node(&a2, Side::Two, "v")),
        ];
        let r = CrossImplication::from_seeds(a1, a2, &seeds).unwrap();
        let report = r.check_axioms();
        assert!(report.verdict("I1").unwrap().passed);
        assert!(report.verdict("I2").unwrap().passed);
        assert!(report.verdict("I3").unwrap().passed);
        let i4 = report.verdict("I4").unwrap();
        assert!(!i4.passed);
        let w = i4.witness.as_ref().unwrap();
        let [_, a2] = r.algebras();
        assert_eq!(w.value("eta"), Some(a2.parse("u").unwrap()));
        assert_eq!(w.value("eta2"), Some(a2.parse("v").unwrap()));
    }

    #[test]
    fn seeds_only_add_pairs() {
        let r = platypus();
        let [a1, a2] = r.algebras();
        let bare = CrossImplication::from_seeds(r.shared_algebras()[0].clone(), r.shared_algebras()[1].clone(), &[]).unwrap();
        for side in Side::BOTH {
            for x in r.algebra(side).star_props() {
                assert!(bare.cross_row(side, x).is_subset(r.cross_row(side, x)));
            }
        }
        assert!(bare.implies(node(a1, Side::One, "false"), node(a2, Side::Two, "eta_mam")));
        assert!(!bare.implies(node(a1, Side::One, "plat"), node(a2, Side::Two, "true")));
    }

    #[test]
    fn transitivity_failure_has_a_triple() {
        let a1 = exactly_one("one", &["x", "y"]);
        let a2 = exactly_one("two", &["u", "v"]);
        let t = {
            let atoms2: Vec<StarProp> = a2.atoms().into_iter().map(StarProp::Prop).collect();
            let atoms1: Vec<StarProp> = a1.atoms().into_iter().map(StarProp::Prop).collect();
            Translation::from_atom_outers(a1.clone(), a2.clone(), &atoms2, &atoms1).unwrap()
        };
        let mut r = CrossImplication::from_translation(&t).unwrap();
        assert!(r.check_axioms().passed());
        // Drop x => u | v (that is, `true`) while keeping x => u; the first
        // broken chain runs through `true` on the first side.
        let x = a1.index(a1.parse("x").unwrap());
        let uv = a2.index(a2.parse("u | v").unwrap());
        r.cross[0][x].set(uv, false);
        let report = r.check_transitivity();
        let w = report.verdicts[0].witness.as_ref().unwrap();
        assert_eq!(w.value("x"), Some(a1.parse("x").unwrap()));
        assert_eq!(w.items[1].side, Side::One);
        assert_eq!(w.value("y"), Some(a1.parse("true").unwrap()));
        assert_eq!(w.items[2].side, Side::Two);
        assert_eq!(w.value("z"), Some(a2.parse("true").unwrap()));
    }
}
