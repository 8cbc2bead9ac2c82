//! Kripke frames with impossible worlds, classical and distributive, and
//! model checking of base and expanded formulas on them.

mod dist;
mod eval;
mod frame;

use thiserror::Error;

pub use dist::{
    dist_extension, dist_frame_valid, dist_satisfies, enumerate_dist_frames, enumerate_posets, DistFrame, DistModel,
    Poset,
};
pub use eval::{eval_quasi, extension, frame_valid, quasi_valid, satisfies, AtomEnv, Model, VALUATION_BUDGET};
pub use frame::{enumerate_frames, frame_at, frame_count, frames_up_to, full, members, Frame, FrameJson, MAX_WORLDS};

/// Subset of worlds as a bitmask.
pub type Set = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("unsupported connective: {0}")]
    Unsupported(String),
    #[error("unbound symbol `{0}`")]
    UnboundAtom(String),
    #[error("quasi-inequality is not pure: variable `{0}`")]
    NotPure(String),
    #[error("valuation of `{0}` is not an up-set")]
    NotUpSet(String),
}
