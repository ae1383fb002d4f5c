//! Constraint-based indoor scene arrangement.
//!
//! The crate is organized around three pillars:
//!
//! * a declarative constraint language ([`cdsl`]) evaluated against a scene
//!   ([`eval`]),
//! * a simulated-annealing object placement solver ([`solver`]) over tagged
//!   placeholder objects ([`assets`], [`semantics`]),
//! * a multi-floor floorplan synthesizer ([`floorplan`]).
//!
//! Everything rests on a small exact-geometry kernel ([`geom`]). Scene and
//! plan documents have canonical byte-stable serializations ([`doc`]).

pub mod assets;
pub mod batch;
pub mod cdsl;
pub mod doc;
pub mod eval;
pub mod floorplan;
pub mod geom;
pub mod rng;
pub mod semantics;
pub mod solver;
