//! Lemmon's axioms, the systems E2–E5 and their frame classes.

use serde::Serialize;

use crate::fol::{reference, Fo};
use crate::semantics::{Frame, Set};
use crate::syntax::{parse_inequality, Inequality, Signature};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Axiom {
    pub label: &'static str,
    /// Modal formula as usually written.
    pub modal: &'static str,
    /// The axiom as an inequality in the HAR signature.
    pub text: &'static str,
    /// Reference conditions whose conjunction the correspondent should match.
    pub condition: &'static [&'static str],
}

impl Axiom {
    pub fn inequality(&self) -> Inequality {
        parse_inequality(self.text, &Signature::har(), false).expect("built-in axiom parses")
    }

    /// Conjunction of the reference conditions, `$true` when there are none.
    pub fn expected(&self) -> Fo {
        Fo::and_all(self.condition.iter().map(|k| reference(k).expect("known reference").fo()))
    }
}

pub const LEMMON_AXIOMS: [Axiom; 5] = [
    Axiom {
        label: "(1)",
        modal: "□(p→q)→□(□p→□q)",
        text: "box (p -> q) <= box (box p -> box q)",
        condition: &["transitivity"],
    },
    Axiom {
        label: "(1')",
        modal: "□(p→q)→(□p→□q)",
        text: "box (p -> q) <= box p -> box q",
        condition: &[],
    },
    Axiom {
        label: "(2)",
        modal: "□p→p",
        text: "box p <= p",
        condition: &["reflexivity"],
    },
    Axiom {
        label: "(4)",
        modal: "□p→□□p",
        text: "box p <= box box p",
        condition: &["transitivity", "closure"],
    },
    Axiom {
        label: "(5)",
        modal: "¬□p→□¬□p",
        text: "neg box p <= box neg box p",
        condition: &["normality", "euclideanness"],
    },
];

pub fn axiom(label: &str) -> Option<&'static Axiom> {
    LEMMON_AXIOMS.iter().find(|a| a.label == label)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LemmonSystem {
    pub name: &'static str,
    pub axioms: &'static [&'static str],
    /// The frame class as named in the literature.
    pub class: &'static str,
    pub condition: &'static [&'static str],
}

impl LemmonSystem {
    pub fn axioms(&self) -> impl Iterator<Item = &'static Axiom> + '_ {
        self.axioms.iter().map(|l| axiom(l).expect("known axiom"))
    }

    pub fn expected(&self) -> Fo {
        Fo::and_all(self.condition.iter().map(|k| reference(k).expect("known reference").fo()))
    }
}

pub const LEMMON_SYSTEMS: [LemmonSystem; 4] = [
    LemmonSystem {
        name: "E2",
        axioms: &["(1')", "(2)"],
        class: "Pre-normal reflexivity",
        condition: &["reflexivity"],
    },
    LemmonSystem {
        name: "E3",
        axioms: &["(1)", "(2)"],
        class: "Pre-normal reflexivity and pre-normal transitivity",
        condition: &["reflexivity", "transitivity"],
    },
    LemmonSystem {
        name: "E4",
        axioms: &["(1')", "(2)", "(4)"],
        class: "Pre-normal reflexivity, pre-normal transitivity and closure under normality",
        condition: &["reflexivity", "transitivity", "closure"],
    },
    LemmonSystem {
        name: "E5",
        axioms: &["(1')", "(2)", "(5)"],
        class: "Pre-normal reflexivity, pre-normal euclideanness and normality",
        condition: &["reflexivity", "euclideanness", "normality"],
    },
];

/// Every world normal and the relation an equivalence.
pub fn is_s5(f: &Frame) -> bool {
    let n = f.n();
    let all: Set = f.worlds();
    f.normal() == all
        && (0..n).all(|x| f.related(x, x))
        && (0..n).all(|x| (0..n).all(|y| !f.related(x, y) || f.related(y, x)))
        && (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| !(f.related(x, y) && f.related(y, z)) || f.related(x, z))))
}
