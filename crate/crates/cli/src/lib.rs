//! Command line and HTTP front ends for the chain partition game.

pub mod commands;
pub mod service;
