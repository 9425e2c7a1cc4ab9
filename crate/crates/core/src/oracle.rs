//! Brute-force reference computations.
//!
//! Everything here works from definitions: filters are tested member by
//! member, states are found by enumerating candidate sets of lattice
//! elements, adjoints by scanning every candidate. Nothing is shared with
//! the fast constructions in the other modules, so agreement between the
//! two is meaningful.

use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;

use crate::algebra::{Algebra, Prop, Side, StarProp};
use crate::error::{Error, Result};
use crate::implication::{CrossImplication, Node};
use crate::semantics::{JointStateSpace, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    /// Largest number of atoms (models) per language.
    pub max_atoms: usize,
    /// Largest number of candidate sets examined.
    pub max_subsets: u64,
    pub time_limit: Duration,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_atoms: 12,
            max_subsets: 1 << 24,
            time_limit: Duration::from_secs(60),
        }
    }
}

struct Meter {
    budget: OracleBudget,
    start: Instant,
    spent: u64,
}

impl Meter {
    fn new(budget: OracleBudget) -> Meter {
        Meter {
            budget,
            start: Instant::now(),
            spent: 0,
        }
    }

    fn charge(&mut self, n: u64) -> Result<()> {
        self.spent += n;
        if self.spent > self.budget.max_subsets {
            return Err(Error::BudgetExceeded(format!(
                "more than {} candidates",
                self.budget.max_subsets
            )));
        }
        if self.start.elapsed() > self.budget.time_limit {
            return Err(Error::BudgetExceeded(format!(
                "time limit of {:?} reached",
                self.budget.time_limit
            )));
        }
        Ok(())
    }

    fn check_atoms(&self, algebras: [&Algebra; 2]) -> Result<()> {
        for a in algebras {
            if a.model_count() > self.budget.max_atoms {
                return Err(Error::BudgetExceeded(format!(
                    "language `{}` has {} atoms, budget allows {}",
                    a.name(),
                    a.model_count(),
                    self.budget.max_atoms
                )));
            }
        }
        Ok(())
    }
}

/// Whether the propositions accepted by `member` form an ultrafilter: a
/// non-empty, upward-closed, meet-closed set without `false`, containing
/// each proposition or its negation.
pub fn is_ultrafilter(a: &Algebra, member: impl Fn(Prop) -> bool) -> bool {
    let props: Vec<Prop> = a.props().filter(|&p| member(p)).collect();
    if props.is_empty() || member(Prop::FALSE) {
        return false;
    }
    let upward = props
        .iter()
        .all(|&p| a.props().filter(|&q| p.implies(q)).all(&member));
    let meets = props
        .iter()
        .all(|&p| props.iter().all(|&q| member(p.meet(q))));
    let prime = a.props().all(|p| member(p) || member(a.complement(p)));
    upward && meets && prime
}

/// Cheaper test for a principal up-set `up(x)`, which is always a filter:
/// proper, and containing each proposition or its negation.
fn principal_is_ultrafilter(a: &Algebra, x: Prop) -> bool {
    !x.is_false() && a.props().all(|p| x.implies(p) || x.implies(a.complement(p)))
}

/// Combined index of a node: the first language's extended lattice, then
/// the second's.
pub fn node_index(r: &CrossImplication, node: Node) -> usize {
    let offset = match node.side {
        Side::One => 0,
        Side::Two => r.algebra(Side::One).star_count(),
    };
    offset + r.algebra(node.side).index(node.value)
}

fn node_at(r: &CrossImplication, k: usize) -> Node {
    let n1 = r.algebra(Side::One).star_count();
    if k < n1 {
        Node::new(Side::One, r.algebra(Side::One).from_index(k))
    } else {
        Node::new(Side::Two, r.algebra(Side::Two).from_index(k - n1))
    }
}

/// All states of the relation: non-empty upward-closed sets of lattice
/// elements whose part in each language is empty or an ultrafilter, and
/// which contain some proposition. Each is a set of combined node indices.
///
/// Small instances are enumerated subset by subset; larger ones by pairing
/// every candidate ultrafilter (or nothing) from each side.
pub fn brute_states(r: &CrossImplication, budget: OracleBudget) -> Result<Vec<FixedBitSet>> {
    let mut meter = Meter::new(budget);
    meter.check_atoms(r.algebras())?;
    let total = r.algebra(Side::One).star_count() + r.algebra(Side::Two).star_count();
    let mut states = if total < 40 && (1u64 << total) <= budget.max_subsets {
        states_by_subsets(r, total, &mut meter)?
    } else {
        states_by_filter_pairs(r, total, &mut meter)?
    };
    states.sort_by_key(|s| s.ones().collect::<Vec<_>>());
    Ok(states)
}

fn successor_masks(r: &CrossImplication, total: usize) -> Vec<u64> {
    (0..total)
        .map(|u| {
            let a = node_at(r, u);
            (0..total)
                .filter(|&v| r.implies(a, node_at(r, v)))
                .fold(0u64, |m, v| m | 1 << v)
        })
        .collect()
}

fn states_by_subsets(r: &CrossImplication, total: usize, meter: &mut Meter) -> Result<Vec<FixedBitSet>> {
    let succ = successor_masks(r, total);
    let n1 = r.algebra(Side::One).star_count();
    let star1 = n1 - 1;
    let star2 = total - 1;
    let mut out = Vec::new();
    for set in 1u64..(1u64 << total) {
        if set % 4096 == 0 {
            meter.charge(4096)?;
        }
        // Only the extra tops: not a state.
        if set & !((1 << star1) | (1 << star2)) == 0 {
            continue;
        }
        let closed = (0..total).all(|u| set >> u & 1 == 0 || succ[u] & !set == 0);
        if !closed {
            continue;
        }
        let ok = Side::BOTH.iter().all(|&side| {
            let a = r.algebra(side);
            let base = if side == Side::One { 0 } else { n1 };
            let member = |p: Prop| set >> (base + p.0 as usize) & 1 == 1;
            let empty = a.props().all(|p| !member(p));
            empty || is_ultrafilter(a, member)
        });
        if ok {
            let mut e = FixedBitSet::with_capacity(total);
            for u in 0..total {
                if set >> u & 1 == 1 {
                    e.insert(u);
                }
            }
            out.push(e);
        }
    }
    Ok(out)
}

fn states_by_filter_pairs(r: &CrossImplication, total: usize, meter: &mut Meter) -> Result<Vec<FixedBitSet>> {
    let n1 = r.algebra(Side::One).star_count();
    // Every filter of a finite algebra is the up-set of its meet, so the
    // candidates are the up-sets of single propositions.
    let candidates = Side::BOTH.map(|side| -> Result<Vec<Option<Prop>>> {
        let a = r.algebra(side);
        let mut found = vec![None];
        for x in a.props() {
            meter.charge(1)?;
            if principal_is_ultrafilter(a, x) {
                found.push(Some(x));
            }
        }
        Ok(found)
    });
    let [c1, c2] = candidates;
    let (c1, c2) = (c1?, c2?);
    let mut out = Vec::new();
    for f1 in &c1 {
        for f2 in &c2 {
            if f1.is_none() && f2.is_none() {
                continue;
            }
            meter.charge(1)?;
            let mut set = FixedBitSet::with_capacity(total);
            for (side, f) in [(Side::One, f1), (Side::Two, f2)] {
                let a = r.algebra(side);
                let base = if side == Side::One { 0 } else { n1 };
                if let Some(x) = f {
                    for p in a.props().filter(|p| x.implies(*p)) {
                        set.insert(base + p.0 as usize);
                    }
                }
                set.insert(base + a.prop_count());
            }
            if upward_closed(r, &set, n1) {
                out.push(set);
            }
        }
    }
    Ok(out)
}

/// Closure under the relation: cross rows, covering pairs of each order,
/// and any extra within-language pairs.
fn upward_closed(r: &CrossImplication, set: &FixedBitSet, n1: usize) -> bool {
    for side in Side::BOTH {
        let a = r.algebra(side);
        let base = if side == Side::One { 0 } else { n1 };
        let other_base = if side == Side::One { n1 } else { 0 };
        let top = a.top().0;
        for k in 0..a.star_count() {
            if !set.contains(base + k) {
                continue;
            }
            let x = a.from_index(k);
            if let StarProp::Prop(p) = x {
                let covers_ok = (0..a.model_count())
                    .filter(|m| p.0 >> m & 1 == 0)
                    .all(|m| set.contains(base + (p.0 | 1 << m) as usize));
                let star_ok = p.0 != top || set.contains(base + a.prop_count());
                if !covers_ok || !star_ok {
                    return false;
                }
            }
            if r.cross_row(side, x).ones().any(|y| !set.contains(other_base + y)) {
                return false;
            }
        }
        if r
            .excess_pairs(side)
            .iter()
            .any(|&(x, y)| set.contains(base + a.index(x)) && !set.contains(base + a.index(y)))
        {
            return false;
        }
    }
    true
}

/// The set of lattice elements true at a state of a constructed space:
/// everything above its atoms, plus both extra tops.
pub fn state_as_node_set(r: &CrossImplication, space: &JointStateSpace, state: &State) -> FixedBitSet {
    let n1 = r.algebra(Side::One).star_count();
    let total = n1 + r.algebra(Side::Two).star_count();
    let mut set = FixedBitSet::with_capacity(total);
    for side in Side::BOTH {
        let a = space.algebra(side);
        let base = if side == Side::One { 0 } else { n1 };
        if let Some(atom) = state.atoms[side.index()] {
            for p in a.props().filter(|p| p.0 >> atom & 1 == 1) {
                set.insert(base + p.0 as usize);
            }
        }
        set.insert(base + a.prop_count());
    }
    set
}

/// Inner map `from -> to` recomputed from the outer map `to -> from` by
/// joining every target proposition whose outer image implies the argument.
pub fn brute_adjoint(
    from: &Algebra,
    to: &Algebra,
    outer_back: &[StarProp],
    budget: OracleBudget,
) -> Result<Vec<StarProp>> {
    let mut meter = Meter::new(budget);
    meter.check_atoms([from, to])?;
    let mut table = Vec::with_capacity(from.star_count());
    for lambda in from.props() {
        meter.charge(to.prop_count() as u64)?;
        let mut join = Prop::FALSE;
        for eta in to.props() {
            let image = outer_back[to.index(eta.into())];
            if image.implies(lambda.into()) {
                join = join.join(eta);
            }
        }
        table.push(StarProp::Prop(join));
    }
    table.push(StarProp::Star);
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtensionOutcome {
    /// Members of an ultrafilter extending the filter and avoiding the
    /// excluded proposition.
    Found(Vec<Prop>),
    NoneExists,
    /// The filter is not a proper filter, or already implies the excluded
    /// proposition.
    PreconditionViolated(String),
}

/// Search for an ultrafilter on `side` containing `filter` none of whose
/// members implies `excluded`, a proposition of the other language.
pub fn brute_ultrafilter_extension(
    r: &CrossImplication,
    side: Side,
    filter: &[Prop],
    excluded: Prop,
) -> ExtensionOutcome {
    let a = r.algebra(side);
    let j = side.other();
    let member = |p: Prop| filter.contains(&p);
    let proper_filter = !filter.is_empty()
        && !member(Prop::FALSE)
        && filter.iter().all(|&p| a.props().filter(|&q| p.implies(q)).all(member))
        && filter.iter().all(|&p| filter.iter().all(|&q| member(p.meet(q))));
    if !proper_filter {
        return ExtensionOutcome::PreconditionViolated("not a proper filter".into());
    }
    let avoids = |set: &[Prop]| {
        set.iter()
            .all(|&p| !r.implies(Node::new(side, p.into()), Node::new(j, excluded.into())))
    };
    if !avoids(filter) {
        return ExtensionOutcome::PreconditionViolated("the filter already implies the excluded proposition".into());
    }
    for x in a.props() {
        let candidate: Vec<Prop> = a.props().filter(|&p| x.implies(p)).collect();
        let is_ultra = is_ultrafilter(a, |p| x.implies(p));
        if is_ultra && filter.iter().all(|f| candidate.contains(f)) && avoids(&candidate) {
            return ExtensionOutcome::Found(candidate);
        }
    }
    ExtensionOutcome::NoneExists
}
