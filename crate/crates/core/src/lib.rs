//! Simulation and controller-synthesis toolkit for autonomous spacecraft
//! inspection: Hill-frame relative dynamics, illumination/FOV coverage
//! geometry, data-driven Mamdani fuzzy force controllers, and a generational
//! genetic algorithm that tunes them for fuel-minimal, constraint-respecting
//! inspection.

pub mod dynamics;
pub mod error;
pub mod fuzzy;
pub mod ga;
pub mod geometry;
pub mod guidance;
pub mod io;
pub mod sim;

pub use error::{Error, Result};
