//! Constructive solver and verifier for Hamilton–Waterloo instances with
//! uniform C4- and Cm-factors: `K_v` minus a perfect matching split into `r`
//! C4-factors and `s` Cm-factors.

pub mod algebra;
pub mod blocks;
pub mod cli;
pub mod composer;
pub mod model;
pub mod outer;
pub mod search;
pub mod tables;
pub mod verifier;
