//! Run sessions: procedures and the command shell executed under resource
//! limits, streaming [`SessionEvent`]s.

mod events;
mod interp;
mod registry;
mod run;

pub use events::{well_formed, RunMode, SessionEvent, SourceFile, VizCommand};
pub use interp::MAX_GRID_SIDE;
pub use registry::SessionRegistry;
pub use run::{spawn_run, RunControl, RunHandle};
