//! Finite Boolean algebras of propositions, represented as sets of models.
//!
//! A proposition is a bitmask over the algebra's model list. The extended
//! lattice adds one element above `true`, written `*` and modelled by
//! [`StarProp::Star`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lang::{parse_formula_in, Formula, LanguageSpec};

/// Default cap on elementary propositions for model enumeration.
pub const DEFAULT_MAX_ATOMS: usize = 20;
/// Default cap on models; exhaustive checks walk all `2^models` propositions.
pub const DEFAULT_MAX_MODELS: usize = 20;
/// Representation limit for [`Prop`].
pub const HARD_MAX_MODELS: usize = 32;

/// The two languages of a translation problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::One, Side::Two];

    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }

    /// 0 or 1, for indexing pairs.
    pub fn index(self) -> usize {
        match self {
            Side::One => 0,
            Side::Two => 1,
        }
    }

    /// 1 or 2, as written in files and reports.
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Side> {
        match n {
            1 => Some(Side::One),
            2 => Some(Side::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// A set of models, bit `k` standing for model `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prop(pub u64);

impl Prop {
    pub const FALSE: Prop = Prop(0);

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn meet(self, other: Prop) -> Prop {
        Prop(self.0 & other.0)
    }

    pub fn join(self, other: Prop) -> Prop {
        Prop(self.0 | other.0)
    }

    pub fn implies(self, other: Prop) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_false(self) -> bool {
        self.0 == 0
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    /// Indices of the models in this set, ascending.
    pub fn models(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let k = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(k)
        })
    }

    pub fn singleton(model: usize) -> Prop {
        Prop(1 << model)
    }
}

/// An element of the extended lattice: a proposition or the extra top `*`.
///
/// The derived ordering puts every proposition (by bitmask) before `Star`,
/// which is the canonical enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StarProp {
    Prop(Prop),
    Star,
}

impl StarProp {
    pub const FALSE: StarProp = StarProp::Prop(Prop::FALSE);

    pub fn is_star(self) -> bool {
        self == StarProp::Star
    }

    pub fn prop(self) -> Option<Prop> {
        match self {
            StarProp::Prop(p) => Some(p),
            StarProp::Star => None,
        }
    }

    pub fn meet(self, other: StarProp) -> StarProp {
        match (self, other) {
            (StarProp::Star, x) | (x, StarProp::Star) => x,
            (StarProp::Prop(a), StarProp::Prop(b)) => StarProp::Prop(a.meet(b)),
        }
    }

    pub fn join(self, other: StarProp) -> StarProp {
        match (self, other) {
            (StarProp::Star, _) | (_, StarProp::Star) => StarProp::Star,
            (StarProp::Prop(a), StarProp::Prop(b)) => StarProp::Prop(a.join(b)),
        }
    }

    /// The order of the extended lattice: everything implies `*`, and `*`
    /// implies only itself.
    pub fn implies(self, other: StarProp) -> bool {
        match (self, other) {
            (_, StarProp::Star) => true,
            (StarProp::Star, StarProp::Prop(_)) => false,
            (StarProp::Prop(a), StarProp::Prop(b)) => a.implies(b),
        }
    }
}

impl From<Prop> for StarProp {
    fn from(p: Prop) -> StarProp {
        StarProp::Prop(p)
    }
}

/// Enumeration limits applied when building an [`Algebra`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_atoms: usize,
    pub max_models: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_atoms: DEFAULT_MAX_ATOMS,
            max_models: DEFAULT_MAX_MODELS,
        }
    }
}

/// The algebra of propositions of one language, up to logical equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    name: Arc<str>,
    spec: LanguageSpec,
    /// True elementary propositions of each model, ascending.
    models: Vec<Vec<usize>>,
    /// For each elementary proposition, the models where it holds.
    atom_masks: Vec<u64>,
    labels: Vec<String>,
}

impl Algebra {
    pub fn new(spec: LanguageSpec) -> Result<Algebra> {
        Algebra::with_limits(spec, Limits::default())
    }

    pub fn with_limits(spec: LanguageSpec, limits: Limits) -> Result<Algebra> {
        let models = enumerate_models(&spec, limits.max_atoms)?;
        let cap = limits.max_models.min(HARD_MAX_MODELS);
        if models.len() > cap {
            return Err(Error::TooManyModels {
                language: spec.name.clone(),
                models: models.len(),
                cap,
            });
        }
        let mut atom_masks = vec![0u64; spec.atoms.len()];
        for (k, m) in models.iter().enumerate() {
            for &a in m {
                atom_masks[a] |= 1 << k;
            }
        }
        let labels = (0..models.len())
            .map(|k| model_label(&spec, &models[k], &atom_masks, k))
            .collect();
        Ok(Algebra {
            name: spec.name.as_str().into(),
            spec,
            models,
            atom_masks,
            labels,
        })
    }

    /// Parse a language file and build its algebra.
    pub fn from_source(src: &str, limits: Limits) -> Result<Algebra> {
        let spec = crate::lang::parse_language(src)?;
        Algebra::with_limits(spec, limits)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shared_name(&self) -> Arc<str> {
        self.name.clone()
    }

    pub fn spec(&self) -> &LanguageSpec {
        &self.spec
    }

    pub fn model_count(&self) -> usize {
        self.models.len()
    }

    /// The elementary propositions true in model `k`.
    pub fn model(&self, k: usize) -> &[usize] {
        &self.models[k]
    }

    pub fn top(&self) -> Prop {
        Prop(mask(self.models.len()))
    }

    /// Number of propositions, `2^models`.
    pub fn prop_count(&self) -> usize {
        1 << self.models.len()
    }

    /// Number of elements of the extended lattice.
    pub fn star_count(&self) -> usize {
        self.prop_count() + 1
    }

    /// All propositions in canonical (bitmask) order.
    pub fn props(&self) -> impl Iterator<Item = Prop> + Clone {
        (0..self.prop_count() as u64).map(Prop)
    }

    /// All elements of the extended lattice, `*` last.
    pub fn star_props(&self) -> impl Iterator<Item = StarProp> + Clone {
        self.props()
            .map(StarProp::Prop)
            .chain(std::iter::once(StarProp::Star))
    }

    /// Position of `x` in [`Algebra::star_props`].
    pub fn index(&self, x: StarProp) -> usize {
        match x {
            StarProp::Prop(p) => p.0 as usize,
            StarProp::Star => self.prop_count(),
        }
    }

    pub fn from_index(&self, i: usize) -> StarProp {
        if i == self.prop_count() {
            StarProp::Star
        } else {
            StarProp::Prop(Prop(i as u64))
        }
    }

    pub fn contains(&self, x: StarProp) -> bool {
        match x {
            StarProp::Star => true,
            StarProp::Prop(p) => p.0 & !self.top().0 == 0,
        }
    }

    /// The singleton propositions, in model order.
    pub fn atoms(&self) -> Vec<Prop> {
        (0..self.models.len()).map(Prop::singleton).collect()
    }

    pub fn is_atom(&self, p: Prop) -> bool {
        p.count() == 1 && self.contains(p.into())
    }

    pub fn complement(&self, p: Prop) -> Prop {
        Prop(!p.0 & self.top().0)
    }

    pub fn negate(&self, x: StarProp) -> Result<StarProp> {
        match x {
            StarProp::Star => Err(Error::NegateStar),
            StarProp::Prop(p) => Ok(StarProp::Prop(self.complement(p))),
        }
    }

    /// The set of models satisfying `f`.
    pub fn denote(&self, f: &Formula) -> Result<Prop> {
        let top = self.top().0;
        fn go(a: &Algebra, f: &Formula, top: u64) -> Result<u64> {
            Ok(match f {
                Formula::True => top,
                Formula::False => 0,
                Formula::Atom(n) => {
                    let i = a.spec.atom_index(n).ok_or_else(|| {
                        crate::lang::ParseError::UndeclaredAtom {
                            name: n.clone(),
                            line: 1,
                            column: 1,
                        }
                    })?;
                    a.atom_masks[i]
                }
                Formula::Not(x) => !go(a, x, top)? & top,
                Formula::And(x, y) => go(a, x, top)? & go(a, y, top)?,
                Formula::Or(x, y) => go(a, x, top)? | go(a, y, top)?,
                Formula::Implies(x, y) => (!go(a, x, top)? & top) | go(a, y, top)?,
            })
        }
        go(self, f, top).map(Prop)
    }

    /// Parse a formula of this language, or `*`.
    pub fn parse(&self, src: &str) -> Result<StarProp> {
        if src.trim() == "*" {
            return Ok(StarProp::Star);
        }
        let f = parse_formula_in(src, &self.spec.atoms)?;
        Ok(StarProp::Prop(self.denote(&f)?))
    }

    /// Canonical text of a model: the first elementary proposition true in
    /// it alone, else a full conjunction of literals.
    pub fn model_label(&self, k: usize) -> &str {
        &self.labels[k]
    }

    /// Canonical text: `*`, `false`, `true`, or the atoms below `x` joined
    /// by ` | ` in model order.
    pub fn render(&self, x: StarProp) -> String {
        let p = match x {
            StarProp::Star => return "*".into(),
            StarProp::Prop(p) => p,
        };
        if p.is_false() {
            return "false".into();
        }
        if p == self.top() {
            return "true".into();
        }
        let several = p.count() > 1;
        p.models()
            .map(|k| {
                let label = &self.labels[k];
                if several && label.contains(' ') {
                    format!("({label})")
                } else {
                    label.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }

    /// Tag an element with this algebra for the checked API.
    pub fn element(&self, x: StarProp) -> Result<Element> {
        if !self.contains(x) {
            return Err(Error::OutOfRange {
                algebra: self.name.to_string(),
            });
        }
        Ok(Element {
            algebra: self.name.clone(),
            top: self.top(),
            value: x,
        })
    }
}

fn mask(n: usize) -> u64 {
    if n >= 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

fn model_label(spec: &LanguageSpec, model: &[usize], atom_masks: &[u64], k: usize) -> String {
    if let Some(i) = atom_masks.iter().position(|&m| m == 1 << k) {
        return spec.atoms[i].clone();
    }
    spec.atoms
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if model.contains(&i) {
                a.clone()
            } else {
                format!("!{a}")
            }
        })
        .collect::<Vec<_>>()
        .join(" & ")
}

enum Compiled {
    Const(bool),
    Atom(usize),
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    fn new(f: &Formula, index: &HashMap<&str, usize>) -> Compiled {
        match f {
            Formula::True => Compiled::Const(true),
            Formula::False => Compiled::Const(false),
            // Names were validated by the parser.
            Formula::Atom(n) => Compiled::Atom(index[n.as_str()]),
            Formula::Not(a) => Compiled::Not(Box::new(Compiled::new(a, index))),
            Formula::And(a, b) => {
                Compiled::And(Box::new(Compiled::new(a, index)), Box::new(Compiled::new(b, index)))
            }
            Formula::Or(a, b) => {
                Compiled::Or(Box::new(Compiled::new(a, index)), Box::new(Compiled::new(b, index)))
            }
            Formula::Implies(a, b) => Compiled::Or(
                Box::new(Compiled::Not(Box::new(Compiled::new(a, index)))),
                Box::new(Compiled::new(b, index)),
            ),
        }
    }

    /// Evaluate on the 64 assignments `block*64 .. block*64+63`, where bit
    /// `i` of an assignment number is the value of elementary proposition `i`.
    fn eval_block(&self, block: u64) -> u64 {
        const PATTERNS: [u64; 6] = [
            0xAAAA_AAAA_AAAA_AAAA,
            0xCCCC_CCCC_CCCC_CCCC,
            0xF0F0_F0F0_F0F0_F0F0,
            0xFF00_FF00_FF00_FF00,
            0xFFFF_0000_FFFF_0000,
            0xFFFF_FFFF_0000_0000,
        ];
        match self {
            Compiled::Const(b) => {
                if *b {
                    !0
                } else {
                    0
                }
            }
            Compiled::Atom(i) if *i < 6 => PATTERNS[*i],
            Compiled::Atom(i) => {
                if (block >> (i - 6)) & 1 == 1 {
                    !0
                } else {
                    0
                }
            }
            Compiled::Not(a) => !a.eval_block(block),
            Compiled::And(a, b) => a.eval_block(block) & b.eval_block(block),
            Compiled::Or(a, b) => a.eval_block(block) | b.eval_block(block),
        }
    }
}

/// All assignments satisfying the beliefs, as sorted lists of true
/// elementary propositions, ordered lexicographically.
pub fn enumerate_models(spec: &LanguageSpec, max_atoms: usize) -> Result<Vec<Vec<usize>>> {
    let n = spec.atoms.len();
    if n > max_atoms || n > 40 {
        return Err(Error::TooManyAtoms {
            language: spec.name.clone(),
            atoms: n,
            cap: max_atoms.min(40),
        });
    }
    let index: HashMap<&str, usize> = spec
        .atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (a.as_str(), i))
        .collect();
    let beliefs: Vec<Compiled> = spec
        .beliefs
        .iter()
        .map(|b| Compiled::new(b, &index))
        .collect();
    let total: u64 = 1 << n;
    let blocks = total.div_ceil(64);
    let valid = if total < 64 { mask(total as usize) } else { !0 };
    let mut models = Vec::new();
    for block in 0..blocks {
        let mut word = valid;
        for b in &beliefs {
            word &= b.eval_block(block);
            if word == 0 {
                break;
            }
        }
        while word != 0 {
            let r = word.trailing_zeros() as u64;
            word &= word - 1;
            let k = block * 64 + r;
            models.push((0..n).filter(|&i| (k >> i) & 1 == 1).collect::<Vec<_>>());
        }
    }
    if models.is_empty() {
        return Err(Error::Contradiction {
            language: spec.name.clone(),
        });
    }
    models.sort();
    Ok(models)
}

/// An extended-lattice element tagged with the algebra it belongs to.
/// Operations on elements of different algebras fail.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    algebra: Arc<str>,
    top: Prop,
    value: StarProp,
}

impl Element {
    pub fn algebra(&self) -> &str {
        &self.algebra
    }

    pub fn value(&self) -> StarProp {
        self.value
    }

    fn same_algebra(&self, other: &Element) -> Result<()> {
        if self.algebra != other.algebra || self.top != other.top {
            return Err(Error::CrossAlgebra {
                left: self.algebra.to_string(),
                right: other.algebra.to_string(),
            });
        }
        Ok(())
    }

    fn with(&self, value: StarProp) -> Element {
        Element {
            algebra: self.algebra.clone(),
            top: self.top,
            value,
        }
    }

    pub fn meet(&self, other: &Element) -> Result<Element> {
        self.same_algebra(other)?;
        Ok(self.with(self.value.meet(other.value)))
    }

    pub fn join(&self, other: &Element) -> Result<Element> {
        self.same_algebra(other)?;
        Ok(self.with(self.value.join(other.value)))
    }

    pub fn implies(&self, other: &Element) -> Result<bool> {
        self.same_algebra(other)?;
        Ok(self.value.implies(other.value))
    }

    pub fn negate(&self) -> Result<Element> {
        match self.value {
            StarProp::Star => Err(Error::NegateStar),
            StarProp::Prop(p) => Ok(self.with(StarProp::Prop(Prop(!p.0 & self.top.0)))),
        }
    }
}
