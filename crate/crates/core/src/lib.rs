pub mod alba;
pub mod algebra;
pub mod classify;
pub mod corpus;
pub mod fol;
pub mod gen;
pub mod semantics;
pub mod syntax;
