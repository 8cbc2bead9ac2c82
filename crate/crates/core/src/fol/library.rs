use serde::Serialize;

use super::{parse_fo, Fo};

/// A named first-order frame condition.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Reference {
    pub key: &'static str,
    pub name: &'static str,
    pub text: &'static str,
}

impl Reference {
    pub fn fo(&self) -> Fo {
        parse_fo(self.text).expect("reference sentences parse")
    }
}

const LIBRARY: [Reference; 5] = [
    Reference {
        key: "normality",
        name: "Normality",
        text: "![x]: N(x)",
    },
    Reference {
        key: "closure",
        name: "Closure under normality",
        text: "![x,y]: (N(x) & R(x,y) => N(y))",
    },
    Reference {
        key: "reflexivity",
        name: "Pre-normal reflexivity",
        text: "![x]: (N(x) => R(x,x))",
    },
    Reference {
        key: "transitivity",
        name: "Pre-normal transitivity",
        text: "![x,y,z]: (N(x) & N(y) & R(x,y) & R(y,z) => R(x,z))",
    },
    Reference {
        key: "euclideanness",
        name: "Pre-normal euclideanness",
        text: "![x,y,z]: (N(x) & N(y) & R(x,y) & R(x,z) => R(y,z))",
    },
];

pub fn reference_library() -> &'static [Reference] {
    &LIBRARY
}

/// Look a condition up by key or by display name (case-insensitive).
pub fn reference(name: &str) -> Option<Reference> {
    LIBRARY
        .iter()
        .find(|r| r.key.eq_ignore_ascii_case(name) || r.name.eq_ignore_ascii_case(name))
        .copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_references_are_sentences() {
        for r in reference_library() {
            let f = r.fo();
            assert!(f.is_sentence(), "{}", r.name);
            assert_eq!(parse_fo(&f.to_string()).unwrap(), f);
        }
        assert_eq!(reference("Pre-normal reflexivity").unwrap().key, "reflexivity");
        assert!(reference("seriality").is_none());
    }
}
