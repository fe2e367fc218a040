//! Dynamics, geometric tracking control and controllability analysis for a
//! rolling spherical robot driven by three internal rotors.

pub mod checks;
pub mod cli;
pub mod config;
pub mod control;
pub mod controllability;
pub mod geometry;
pub mod liegroup;
pub mod model;
pub mod sim;
