//! Pass/fail verdicts with counterexamples.

use std::fmt;

use rayon::prelude::*;

use crate::algebra::{Algebra, Side, StarProp};

/// Which of the two approximations a map computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Inner,
    Outer,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::Inner, Mode::Outer];

    pub fn index(self) -> usize {
        match self {
            Mode::Inner => 0,
            Mode::Outer => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Inner => "inner",
            Mode::Outer => "outer",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One of the four maps, named by source language and mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Operator {
    pub from: Side,
    pub mode: Mode,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}>{}", self.mode, self.from, self.from.other())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessItem {
    pub role: &'static str,
    pub side: Side,
    pub value: StarProp,
}

/// A tuple of lattice elements at which a property fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub operator: Option<Operator>,
    pub items: Vec<WitnessItem>,
}

impl Witness {
    pub fn new(items: Vec<WitnessItem>) -> Witness {
        Witness {
            operator: None,
            items,
        }
    }

    pub fn on(operator: Operator, items: Vec<WitnessItem>) -> Witness {
        Witness {
            operator: Some(operator),
            items,
        }
    }

    pub fn value(&self, role: &str) -> Option<StarProp> {
        self.items.iter().find(|i| i.role == role).map(|i| i.value)
    }

    pub fn describe(&self, algebras: [&Algebra; 2]) -> String {
        let mut parts = Vec::new();
        if let Some(op) = self.operator {
            parts.push(format!("operator={op}"));
        }
        for item in &self.items {
            let text = algebras[item.side.index()].render(item.value);
            parts.push(format!("{}@{}={}", item.role, item.side, text));
        }
        parts.join(", ")
    }
}

pub fn item(role: &'static str, side: Side, value: StarProp) -> WitnessItem {
    WitnessItem { role, side, value }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub axiom: String,
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn from_search(axiom: &str, witness: Option<Witness>) -> Verdict {
        Verdict {
            axiom: axiom.into(),
            passed: witness.is_none(),
            witness,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub verdicts: Vec<Verdict>,
}

impl AxiomReport {
    pub fn single(axiom: &str, witness: Option<Witness>) -> AxiomReport {
        AxiomReport {
            verdicts: vec![Verdict::from_search(axiom, witness)],
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, axiom: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.axiom == axiom)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }

    pub fn first_failure(&self) -> Option<&Verdict> {
        self.failures().next()
    }

    pub fn extend(&mut self, other: AxiomReport) {
        self.verdicts.extend(other.verdicts);
    }
}

/// The first `k` in `0..n` for which `f` yields a witness, searched in parallel.
pub(crate) fn first_hit<T: Send>(n: usize, f: impl Fn(usize) -> Option<T> + Sync + Send) -> Option<T> {
    (0..n).into_par_iter().find_map_first(f)
}
