//! The four translation maps between two languages and their axioms.
//!
//! For a source language `i` and target `j` there is an inner map, giving
//! the strongest target statement implied by a source statement, and an
//! outer map, giving the weakest target statement implying it. Maps act on
//! the extended lattices and always send `*` to `*`; an outer image of `*`
//! for a proposition means it has no approximation from above.

use std::sync::Arc;

use crate::algebra::{Algebra, Element, Prop, Side, StarProp};
use crate::error::{Error, Result};
use crate::report::{first_hit, item, AxiomReport, Mode, Operator, Witness};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    algebras: [Arc<Algebra>; 2],
    /// `maps[from][mode]`, indexed by the source extended-lattice index.
    maps: [[Vec<StarProp>; 2]; 2],
}

impl Translation {
    /// Build from outer images of atoms. Outer maps are extended by joins
    /// over atoms, inner maps are the adjoints of the opposite outer maps.
    pub fn from_atom_outers(
        a1: Arc<Algebra>,
        a2: Arc<Algebra>,
        outer12: &[StarProp],
        outer21: &[StarProp],
    ) -> Result<Translation> {
        let algebras = [a1, a2];
        let atom_images = [outer12, outer21];
        let mut outers: [Vec<StarProp>; 2] = Default::default();
        for side in Side::BOTH {
            let src = &algebras[side.index()];
            let dst = &algebras[side.other().index()];
            let images = atom_images[side.index()];
            if images.len() != src.model_count() {
                return Err(Error::MalformedTranslation(format!(
                    "{} atom images given for language `{}` with {} atoms",
                    images.len(),
                    src.name(),
                    src.model_count()
                )));
            }
            if let Some(bad) = images.iter().find(|x| !dst.contains(**x)) {
                return Err(Error::MalformedTranslation(format!(
                    "atom image {bad:?} is not an element of `{}`",
                    dst.name()
                )));
            }
            outers[side.index()] = join_extend(src, images);
        }
        let mut maps: [[Vec<StarProp>; 2]; 2] = Default::default();
        for side in Side::BOTH {
            let src = &algebras[side.index()];
            let dst = &algebras[side.other().index()];
            let back = &outers[side.other().index()];
            maps[side.index()][Mode::Inner.index()] = adjoint_from_atoms(src, dst, back);
        }
        let [o12, o21] = outers;
        maps[0][Mode::Outer.index()] = o12;
        maps[1][Mode::Outer.index()] = o21;
        Ok(Translation { algebras, maps })
    }

    /// Build from four explicit tables, `maps[from][mode]`, each indexed by
    /// the source extended-lattice index.
    pub fn from_maps(
        a1: Arc<Algebra>,
        a2: Arc<Algebra>,
        maps: [[Vec<StarProp>; 2]; 2],
    ) -> Result<Translation> {
        let algebras = [a1, a2];
        for side in Side::BOTH {
            let src = &algebras[side.index()];
            let dst = &algebras[side.other().index()];
            for mode in Mode::BOTH {
                let table = &maps[side.index()][mode.index()];
                let op = Operator { from: side, mode };
                if table.len() != src.star_count() {
                    return Err(Error::MalformedTranslation(format!(
                        "{op}: table has {} entries, expected {}",
                        table.len(),
                        src.star_count()
                    )));
                }
                if table.last() != Some(&StarProp::Star) {
                    return Err(Error::MalformedTranslation(format!("{op}: `*` must map to `*`")));
                }
                if table.iter().any(|x| !dst.contains(*x)) {
                    return Err(Error::MalformedTranslation(format!(
                        "{op}: value outside `{}`",
                        dst.name()
                    )));
                }
            }
        }
        Ok(Translation { algebras, maps })
    }

    /// A copy with one table entry replaced.
    pub fn with_entry(&self, op: Operator, x: StarProp, value: StarProp) -> Result<Translation> {
        let src = self.algebra(op.from);
        if !src.contains(x) || x.is_star() {
            return Err(Error::MalformedTranslation(format!(
                "{op}: cannot override the entry for {x:?}"
            )));
        }
        let mut maps = self.maps.clone();
        maps[op.from.index()][op.mode.index()][src.index(x)] = value;
        Translation::from_maps(self.algebras[0].clone(), self.algebras[1].clone(), maps)
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

    pub fn map(&self, from: Side, mode: Mode) -> &[StarProp] {
        &self.maps[from.index()][mode.index()]
    }

    pub fn maps(&self) -> &[[Vec<StarProp>; 2]; 2] {
        &self.maps
    }

    /// Apply a stored map. `x` must belong to the source language.
    pub fn apply(&self, from: Side, mode: Mode, x: StarProp) -> StarProp {
        self.maps[from.index()][mode.index()][self.algebra(from).index(x)]
    }

    pub fn inner(&self, from: Side, x: StarProp) -> StarProp {
        self.apply(from, Mode::Inner, x)
    }

    pub fn outer(&self, from: Side, x: StarProp) -> StarProp {
        self.apply(from, Mode::Outer, x)
    }

    /// Checked application on tagged elements.
    pub fn translate(&self, from: Side, mode: Mode, x: &Element) -> Result<Element> {
        let src = self.algebra(from);
        if x.algebra() != src.name() || !src.contains(x.value()) {
            return Err(Error::CrossAlgebra {
                left: src.name().to_string(),
                right: x.algebra().to_string(),
            });
        }
        self.algebra(from.other()).element(self.apply(from, mode, x.value()))
    }

    /// The adjunction condition at one pair: `eta` implies the inner image
    /// of `lambda` exactly when the outer image of `eta` implies `lambda`.
    pub fn galois_at(&self, i: Side, lambda: StarProp, eta: StarProp) -> bool {
        eta.implies(self.inner(i, lambda)) == self.outer(i.other(), eta).implies(lambda)
    }

    /// Inner image implies outer image.
    pub fn approximation_at(&self, i: Side, lambda: StarProp) -> bool {
        self.inner(i, lambda).implies(self.outer(i, lambda))
    }

    /// Negation is preserved up to the awareness of the source: whenever the
    /// outer image of `lambda` is a proposition, the inner image of its
    /// negation is the negated outer image within the inner image of `true`.
    pub fn restricted_duality_at(&self, i: Side, lambda: Prop) -> bool {
        let src = self.algebra(i);
        let dst = self.algebra(i.other());
        let outer = self.outer(i, lambda.into());
        let Some(outer) = outer.prop() else {
            return true;
        };
        let lhs = self.inner(i, src.complement(lambda).into());
        let rhs = StarProp::Prop(dst.complement(outer)).meet(self.inner(i, src.top().into()));
        lhs == rhs
    }

    pub fn check_galois(&self) -> AxiomReport {
        let witness = Side::BOTH.iter().find_map(|&i| {
            let src = self.algebra(i);
            let dst = self.algebra(i.other());
            first_hit(src.star_count(), |li| {
                let lambda = src.from_index(li);
                dst.star_props()
                    .find(|&eta| !self.galois_at(i, lambda, eta))
                    .map(|eta| {
                        Witness::new(vec![
                            item("lambda", i, lambda),
                            item("eta", i.other(), eta),
                        ])
                    })
            })
        });
        AxiomReport::single("C1", witness)
    }

    pub fn check_approximation(&self) -> AxiomReport {
        let witness = Side::BOTH.iter().find_map(|&i| {
            let src = self.algebra(i);
            src.star_props()
                .find(|&lambda| !self.approximation_at(i, lambda))
                .map(|lambda| Witness::new(vec![item("lambda", i, lambda)]))
        });
        AxiomReport::single("C2", witness)
    }

    pub fn check_restricted_duality(&self) -> AxiomReport {
        let witness = Side::BOTH.iter().find_map(|&i| {
            let src = self.algebra(i);
            src.props()
                .find(|&lambda| !self.restricted_duality_at(i, lambda))
                .map(|lambda| Witness::new(vec![item("lambda", i, lambda.into())]))
        });
        AxiomReport::single("C3", witness)
    }

    /// C1, C2 and C3 together.
    pub fn check_consistency(&self) -> AxiomReport {
        let mut report = self.check_galois();
        report.extend(self.check_approximation());
        report.extend(self.check_restricted_duality());
        report
    }

    pub fn is_consistent(&self) -> bool {
        self.check_consistency().passed()
    }

    /// Properties that follow from the adjunction: inner maps are extreme,
    /// concrete, monotone and preserve conjunction; outer maps are extreme,
    /// monotone and preserve disjunction; each map's approximable set is an
    /// ideal.
    pub fn check_derived_properties(&self) -> AxiomReport {
        let inner_ops: Vec<Operator> = Side::BOTH
            .iter()
            .map(|&from| Operator { from, mode: Mode::Inner })
            .collect();
        let outer_ops: Vec<Operator> = Side::BOTH
            .iter()
            .map(|&from| Operator { from, mode: Mode::Outer })
            .collect();
        let all_ops: Vec<Operator> = inner_ops.iter().chain(&outer_ops).copied().collect();
        let mut report = AxiomReport::default();
        let mut push = |name: &str, ops: &[Operator], check: &dyn Fn(Operator) -> Option<Witness>| {
            let witness = ops.iter().find_map(|&op| check(op));
            report.verdicts.push(crate::report::Verdict::from_search(name, witness));
        };
        push("T1", &all_ops, &|op| self.extreme_witness(op));
        push("T2", &inner_ops, &|op| self.concrete_witness(op));
        push("T3", &all_ops, &|op| self.monotone_witness(op));
        push("T4", &inner_ops, &|op| {
            self.pair_witness(op, |a, b| a.meet(b))
        });
        push("T5", &outer_ops, &|op| {
            self.pair_witness(op, |a, b| a.join(b))
        });
        push("ideal", &all_ops, &|op| self.ideal_witness(op));
        report
    }

    fn extreme_witness(&self, op: Operator) -> Option<Witness> {
        if self.apply(op.from, op.mode, StarProp::FALSE) != StarProp::FALSE {
            return Some(Witness::on(op, vec![item("lambda", op.from, StarProp::FALSE)]));
        }
        if self.apply(op.from, op.mode, StarProp::Star) != StarProp::Star {
            return Some(Witness::on(op, vec![item("lambda", op.from, StarProp::Star)]));
        }
        None
    }

    fn concrete_witness(&self, op: Operator) -> Option<Witness> {
        self.algebra(op.from)
            .props()
            .find(|&p| self.apply(op.from, op.mode, p.into()).is_star())
            .map(|p| Witness::on(op, vec![item("lambda", op.from, p.into())]))
    }

    fn monotone_witness(&self, op: Operator) -> Option<Witness> {
        let src = self.algebra(op.from);
        first_hit(src.star_count(), |a| {
            let x = src.from_index(a);
            let tx = self.apply(op.from, op.mode, x);
            src.star_props()
                .find(|&y| x.implies(y) && !tx.implies(self.apply(op.from, op.mode, y)))
                .map(|y| Witness::on(op, vec![item("lambda", op.from, x), item("lambda2", op.from, y)]))
        })
    }

    fn pair_witness(&self, op: Operator, combine: fn(StarProp, StarProp) -> StarProp) -> Option<Witness> {
        let src = self.algebra(op.from);
        first_hit(src.star_count(), |a| {
            let x = src.from_index(a);
            let tx = self.apply(op.from, op.mode, x);
            src.star_props()
                .find(|&y| {
                    self.apply(op.from, op.mode, combine(x, y))
                        != combine(tx, self.apply(op.from, op.mode, y))
                })
                .map(|y| Witness::on(op, vec![item("lambda", op.from, x), item("lambda2", op.from, y)]))
        })
    }

    fn ideal_witness(&self, op: Operator) -> Option<Witness> {
        let src = self.algebra(op.from);
        let approximable = |p: Prop| !self.apply(op.from, op.mode, p.into()).is_star();
        if !approximable(Prop::FALSE) {
            return Some(Witness::on(op, vec![item("lambda", op.from, StarProp::FALSE)]));
        }
        first_hit(src.prop_count(), |a| {
            let x = Prop(a as u64);
            if !approximable(x) {
                return None;
            }
            src.props()
                .find(|&y| {
                    (y.implies(x) && !approximable(y)) || (approximable(y) && !approximable(x.join(y)))
                })
                .map(|y| Witness::on(op, vec![item("lambda", op.from, x.into()), item("lambda2", op.from, y.into())]))
        })
    }
}

/// Extend atom images to all propositions by joins; `false` maps to `false`
/// and `*` to `*`.
fn join_extend(src: &Algebra, atom_images: &[StarProp]) -> Vec<StarProp> {
    let mut table = Vec::with_capacity(src.star_count());
    table.push(StarProp::FALSE);
    for k in 1..src.prop_count() {
        let low = k.trailing_zeros() as usize;
        let rest = table[k & (k - 1)];
        table.push(StarProp::join(rest, atom_images[low]));
    }
    table.push(StarProp::Star);
    table
}

/// Inner map `src -> dst` as the adjoint of the outer map `dst -> src`,
/// given that the outer map is join-extended from atoms: the union of the
/// target atoms whose outer image is a proposition below the argument.
fn adjoint_from_atoms(src: &Algebra, dst: &Algebra, back: &[StarProp]) -> Vec<StarProp> {
    let atom_images: Vec<StarProp> = dst.atoms().iter().map(|&b| back[dst.index(b.into())]).collect();
    let mut table: Vec<StarProp> = src
        .props()
        .map(|lambda| {
            let bits = atom_images
                .iter()
                .enumerate()
                .filter(|(_, img)| matches!(img, StarProp::Prop(p) if p.implies(lambda)))
                .fold(0u64, |acc, (b, _)| acc | 1 << b);
            StarProp::Prop(Prop(bits))
        })
        .collect();
    table.push(StarProp::Star);
    table
}
