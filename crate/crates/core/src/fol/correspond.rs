use serde::Serialize;

use super::{simplify, st_quasi_closed, Error, Fo};
use crate::alba::{run, AlbaResult, Strategy};
use crate::classify::{find_certificate, Certificate};
use crate::syntax::{Inequality, Signature};

/// An inequality together with its certificate, the reduction result and
/// the first-order correspondent read off the pure output.
#[derive(Clone, Debug, Serialize)]
pub struct Correspondence {
    pub certificate: Option<Certificate>,
    pub alba: AlbaResult,
    /// Conjunction of the closed standard translations, before simplification.
    pub raw: Fo,
    pub fo: Fo,
}

/// Correspondent using the guided strategy when a certificate exists and
/// the default exhaustive search otherwise.
pub fn correspondent(ineq: &Inequality, sig: &Signature) -> Result<Correspondence, Error> {
    let cert = find_certificate(ineq, sig)?;
    let strategy = match &cert {
        Some(c) => Strategy::Guided(c.clone()),
        None => Strategy::exhaustive(),
    };
    correspondent_with(ineq, &strategy, sig)
}

pub fn correspondent_with(ineq: &Inequality, strategy: &Strategy, sig: &Signature) -> Result<Correspondence, Error> {
    let certificate = match strategy {
        Strategy::Guided(c) => Some(c.clone()),
        Strategy::Exhaustive { .. } => None,
    };
    let alba = run(ineq, strategy, sig)?;
    let pure = match &alba {
        AlbaResult::Success { pure, .. } => pure,
        AlbaResult::Failure { remaining, .. } => {
            let names: Vec<String> = remaining.iter().map(|p| p.to_string()).collect();
            return Err(Error::Failed(names.join(", ")));
        }
    };
    let parts = pure.iter().map(st_quasi_closed).collect::<Result<Vec<_>, _>>()?;
    let raw = Fo::and_all(parts);
    let fo = simplify(&raw);
    Ok(Correspondence {
        certificate,
        alba,
        raw,
        fo,
    })
}
