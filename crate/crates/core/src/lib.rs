pub mod automata;
pub mod completion;
pub mod autostruct;
pub mod error;
pub mod lattice;
pub mod lstallings;
pub mod oracle;
pub mod presentation;
pub mod relhyp;
pub mod stallings;
pub mod words;

pub use error::{Error, Result};
