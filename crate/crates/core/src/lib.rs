//! Epistemic logic of believed and truthful public announcements: formulas,
//! Kripke models, product update, KD45 normal forms and true-lie analysis.

pub mod actionmodel;
pub mod error;
pub mod formula;
pub mod kripke;
pub mod normalform;
pub mod parser;
pub mod scenarios;
pub mod semantics;
pub mod truelie;

pub use actionmodel::{ActionKind, ActionModel, PointedActionModel};
pub use error::{Error, Result};
pub use formula::{Agent, AgentSet, Atom, CheckMode, Formula, Sigma};
pub use kripke::{FrameClass, KripkeModel, PointedModel};
pub use parser::{parse_formula, print_formula};
