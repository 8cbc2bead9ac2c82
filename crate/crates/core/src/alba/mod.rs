//! The ALBA rewrite engine for regular signatures: preprocessing, first
//! approximation, reduction and Ackermann elimination, and assembly of the
//! pure quasi-inequalities it outputs.

mod preprocess;
mod rules;
mod strategy;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::Certificate;
use crate::syntax::{Formula, Inequality, QuasiInequality, Signature, Sym};

pub use preprocess::{distribute, distribute_and_split, eliminate_variables, preprocess};
pub use rules::{ackermann, ackermann_shape, apply_rule, Dir, Rule};
pub use strategy::{guided_step, run, run_system, simplify_quasi, Strategy, DEFAULT_MAX_DEPTH, DEFAULT_MAX_NODES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rule {rule} is not applicable: {reason}")]
    NotApplicable { rule: String, reason: String },
    #[error("fresh name `{0}` already occurs in the system")]
    Freshness(String),
    #[error("certificate does not witness an inductive inequality: {0}")]
    NotInductive(String),
    #[error("search budget exhausted after {0} nodes")]
    Budget(usize),
    #[error(transparent)]
    Classify(#[from] crate::classify::Error),
}

/// Where a side condition came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub rule: String,
    pub step: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Item {
    pub ineq: Inequality,
    pub side: Option<Provenance>,
}

/// A conjunction of inequalities under the standing quasi-inequality `⇒ #i0 ≤ @m0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct System {
    pub items: Vec<Item>,
    pub i0: Sym,
    pub m0: Sym,
    pub safe: bool,
    pub steps: usize,
    next_nom: usize,
    next_conom: usize,
    pub sig: Arc<Signature>,
}

impl System {
    /// First approximation: `{#i0 ≤ φ, ψ ≤ @m0}`.
    pub fn first_approximation(ineq: &Inequality, sig: &Signature) -> System {
        let mut s = System {
            items: vec![],
            i0: Sym::from(""),
            m0: Sym::from(""),
            safe: true,
            steps: 0,
            next_nom: 0,
            next_conom: 0,
            sig: Arc::new(sig.clone()),
        };
        // Respect names already used by the input.
        s.items.push(Item {
            ineq: ineq.clone(),
            side: None,
        });
        s.i0 = s.fresh_nominal();
        s.m0 = s.fresh_conominal();
        s.items = vec![
            Item {
                ineq: Inequality::new(Formula::Nominal(s.i0.clone()), ineq.lhs.clone()),
                side: None,
            },
            Item {
                ineq: Inequality::new(ineq.rhs.clone(), Formula::Conominal(s.m0.clone())),
                side: None,
            },
        ];
        s
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.items.iter().any(|i| i.ineq.mentions(name)) || &*self.i0 == name || &*self.m0 == name
    }

    pub fn fresh_nominal(&mut self) -> Sym {
        loop {
            let s = format!("i{}", self.next_nom);
            self.next_nom += 1;
            if !self.mentions(&s) {
                return Sym::from(s);
            }
        }
    }

    pub fn fresh_conominal(&mut self) -> Sym {
        loop {
            let s = format!("m{}", self.next_conom);
            self.next_conom += 1;
            if !self.mentions(&s) {
                return Sym::from(s);
            }
        }
    }

    pub fn is_pure(&self) -> bool {
        self.items.iter().all(|i| i.ineq.is_pure())
    }

    pub fn vars(&self) -> Vec<Sym> {
        let mut out: Vec<Sym> = Vec::new();
        for i in &self.items {
            for p in i.ineq.vars() {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Contains `#i0 ≤ t` and `t ≤ @m0` for one pure `t`.
    pub fn is_tautological(&self) -> bool {
        let i0 = Formula::Nominal(self.i0.clone());
        let m0 = Formula::Conominal(self.m0.clone());
        self.items.iter().any(|a| {
            a.ineq.lhs == i0
                && a.ineq.rhs.is_pure()
                && self.items.iter().any(|b| b.ineq.rhs == m0 && b.ineq.lhs == a.ineq.rhs)
        })
    }

    /// `&items ⇒ #i0 ≤ @m0`.
    pub fn to_quasi(&self) -> QuasiInequality {
        QuasiInequality::new(
            self.items.iter().map(|i| i.ineq.clone()).collect(),
            Inequality::new(Formula::Nominal(self.i0.clone()), Formula::Conominal(self.m0.clone())),
        )
    }

    pub fn lines(&self) -> Vec<String> {
        self.items
            .iter()
            .map(|i| match &i.side {
                Some(p) => format!("{}  [side: {}]", i.ineq, p.rule),
                None => i.ineq.to_string(),
            })
            .collect()
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.lines().join(", "))
    }
}

/// One rule application: the rule, the inequality it acted on (if any) and the resulting branches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub rule: String,
    pub target: Option<String>,
    pub system: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "result")]
pub enum AlbaResult {
    Success {
        /// Simplified pure quasi-inequalities, one per surviving branch.
        pure: Vec<QuasiInequality>,
        /// The same before simplification.
        raw: Vec<QuasiInequality>,
        trace: Vec<TraceEntry>,
        safe: bool,
    },
    Failure {
        #[serde(serialize_with = "ser_systems")]
        stuck: Vec<System>,
        remaining: Vec<Sym>,
        trace: Vec<TraceEntry>,
    },
}

fn ser_systems<S: serde::Serializer>(v: &[System], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for sys in v {
        seq.serialize_element(&sys.lines())?;
    }
    seq.end()
}

impl AlbaResult {
    pub fn is_success(&self) -> bool {
        matches!(self, AlbaResult::Success { .. })
    }

    pub fn trace(&self) -> &[TraceEntry] {
        match self {
            AlbaResult::Success { trace, .. } | AlbaResult::Failure { trace, .. } => trace,
        }
    }

    pub fn pure(&self) -> Option<&[QuasiInequality]> {
        match self {
            AlbaResult::Success { pure, .. } => Some(pure),
            AlbaResult::Failure { .. } => None,
        }
    }
}

/// Convenience: guided run with the given certificate.
pub fn run_guided(ineq: &Inequality, cert: &Certificate, sig: &Signature) -> Result<AlbaResult, Error> {
    run(ineq, &Strategy::Guided(cert.clone()), sig)
}
