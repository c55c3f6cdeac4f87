//! Correctness formulas, derivations, the proof-system checkers, bounded
//! obligation discharge and translation of object-oriented proofs into
//! proofs about the transformed recursive programs.

mod check;
mod discharge;
mod translate;

use std::fmt;
use std::str::FromStr;

use crate::syntax::{Expr, Stmt, Var};

pub use check::{check, CheckOptions, ObligationReport, Status, Verdict};
pub use discharge::{discharge, discharge_assertion, obligation_footprint, Discharge, Obligation, ENUMERATION_CAP};
pub use translate::{translate_proof, TranslateError, Translation};

/// `{pre} stmt {post}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    pub pre: Expr,
    pub stmt: Stmt,
    pub post: Expr,
}

impl Formula {
    pub fn new(pre: Expr, stmt: Stmt, post: Expr) -> Formula {
        Formula { pre, stmt, post }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Skip,
    Assign,
    ParAssign,
    Comp,
    Cond,
    Loop,
    Conseq,
    FailI,
    FailII,
    Block,
    AssignInst,
    Weaken,
    RecI,
    RecII,
    RecIII,
    Disj,
    Conj,
    ExistsIntro,
    Invariance,
    Subst,
    /// Reference to the i-th (1-based) assumption of the enclosing
    /// recursion rule.
    Assume(usize),
}

const RULE_NAMES: &[(Rule, &str)] = &[
    (Rule::Skip, "SKIP"),
    (Rule::Assign, "ASSIGN"),
    (Rule::ParAssign, "PAR-ASSIGN"),
    (Rule::Comp, "COMP"),
    (Rule::Cond, "COND"),
    (Rule::Loop, "LOOP"),
    (Rule::Conseq, "CONSEQ"),
    (Rule::FailI, "FAIL-I"),
    (Rule::FailII, "FAIL-II"),
    (Rule::Block, "BLOCK"),
    (Rule::AssignInst, "ASSIGN-INST"),
    (Rule::Weaken, "WEAKEN"),
    (Rule::RecI, "REC-I"),
    (Rule::RecII, "REC-II"),
    (Rule::RecIII, "REC-III"),
    (Rule::Disj, "DISJ"),
    (Rule::Conj, "CONJ"),
    (Rule::ExistsIntro, "EXISTS-INTRO"),
    (Rule::Invariance, "INVARIANCE"),
    (Rule::Subst, "SUBST-RULE"),
];

impl Rule {
    pub fn name(self) -> String {
        match self {
            Rule::Assume(i) => format!("ASSUME({i})"),
            r => RULE_NAMES.iter().find(|(x, _)| *x == r).map(|(_, n)| n.to_string()).expect("named rule"),
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        RULE_NAMES.iter().find(|(_, n)| *n == name).map(|(r, _)| *r)
    }

    pub fn is_recursion(self) -> bool {
        matches!(self, Rule::RecI | Rule::RecII | Rule::RecIII)
    }

    pub fn is_auxiliary(self) -> bool {
        matches!(self, Rule::Disj | Rule::Conj | Rule::ExistsIntro | Rule::Invariance | Rule::Subst)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Rule-specific data that cannot be read off the formulas.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum Side {
    #[default]
    None,
    /// Assumption list of a recursion rule.
    Assumptions(Vec<Formula>),
    /// `[z̄ := t̄]` of the substitution rule.
    Subst(Vec<Var>, Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub rule: Rule,
    pub conclusion: Formula,
    pub side: Side,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn leaf(rule: Rule, conclusion: Formula) -> Derivation {
        Derivation { rule, conclusion, side: Side::None, premises: Vec::new() }
    }

    pub fn node(rule: Rule, conclusion: Formula, premises: Vec<Derivation>) -> Derivation {
        Derivation { rule, conclusion, side: Side::None, premises }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }
}

/// The proof systems, each given by its admissible rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    PK,
    SPK,
    PO,
    SPO,
    PR,
    SPR,
    POPlus,
    SPOPlus,
    PRPlus,
    SPRPlus,
}

impl System {
    pub const ALL: [System; 10] = [
        System::PK,
        System::SPK,
        System::PO,
        System::SPO,
        System::PR,
        System::SPR,
        System::POPlus,
        System::SPOPlus,
        System::PRPlus,
        System::SPRPlus,
    ];

    /// Strong partial correctness: failure counts as a violation.
    pub fn is_strong(self) -> bool {
        matches!(self, System::SPK | System::SPO | System::SPR | System::SPOPlus | System::SPRPlus)
    }

    pub fn is_object_oriented(self) -> bool {
        matches!(self, System::PO | System::SPO | System::POPlus | System::SPOPlus)
    }

    pub fn is_recursive(self) -> bool {
        matches!(self, System::PR | System::SPR | System::PRPlus | System::SPRPlus)
    }

    /// The system without recursion rules, used for recursion-rule premises.
    pub fn base(self) -> System {
        match self {
            System::POPlus => System::PO,
            System::SPOPlus => System::SPO,
            System::PRPlus => System::PR,
            System::SPRPlus => System::SPR,
            s => s,
        }
    }

    /// Target system of proof translation.
    pub fn translated(self) -> Option<System> {
        match self {
            System::PO => Some(System::PR),
            System::SPO => Some(System::SPR),
            System::POPlus => Some(System::PRPlus),
            System::SPOPlus => Some(System::SPRPlus),
            _ => None,
        }
    }

    pub fn allows(self, rule: Rule) -> bool {
        let strong = self.is_strong();
        match rule {
            Rule::Skip | Rule::Assign | Rule::ParAssign | Rule::Comp | Rule::Cond | Rule::Loop | Rule::Conseq => true,
            Rule::Block => true,
            Rule::FailI => !strong,
            Rule::FailII => strong,
            Rule::AssignInst => self.is_object_oriented(),
            Rule::Weaken => matches!(self, System::PO | System::POPlus),
            r if r.is_auxiliary() => !matches!(self, System::PK | System::SPK),
            Rule::RecI => self == System::POPlus,
            Rule::RecII => self == System::SPOPlus,
            Rule::RecIII => matches!(self, System::PRPlus | System::SPRPlus),
            Rule::Assume(_) => matches!(self, System::POPlus | System::SPOPlus | System::PRPlus | System::SPRPlus),
            _ => false,
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::PK => "PK",
            System::SPK => "SPK",
            System::PO => "PO",
            System::SPO => "SPO",
            System::PR => "PR",
            System::SPR => "SPR",
            System::POPlus => "PO+",
            System::SPOPlus => "SPO+",
            System::PRPlus => "PR+",
            System::SPRPlus => "SPR+",
        })
    }
}

impl FromStr for System {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        System::ALL
            .into_iter()
            .find(|x| x.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown proof system `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_rules_are_gated_by_strength() {
        for sys in System::ALL {
            assert_eq!(sys.allows(Rule::FailI), !sys.is_strong(), "{sys}");
            assert_eq!(sys.allows(Rule::FailII), sys.is_strong(), "{sys}");
        }
    }

    #[test]
    fn rule_names_round_trip() {
        for (r, n) in RULE_NAMES {
            assert_eq!(Rule::from_name(n), Some(*r));
        }
        assert_eq!("spo+".parse::<System>(), Ok(System::SPOPlus));
    }
}
