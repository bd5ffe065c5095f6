//! Front ends for `pervol-core`: a session with a result cache and a local JSON service.

pub mod server;
pub mod session;

pub use session::{exit_code, Engine, Failure, Session};
