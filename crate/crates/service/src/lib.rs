//! Session service for the puzzle game: Manual, AI and Assist modes,
//! an append-only event log, and the HTTP/JSON API over them.

pub mod config;
pub mod error;
pub mod events;
pub mod http;
pub mod service;
pub mod session;

pub use error::ServiceError;
pub use events::{read_jsonl, replay, Event, EventLog, EventPayload, ReplayedSession};
pub use http::router;
pub use service::{ConfigUpdate, RandomPuzzleRequest, ServiceSettings, SessionService};
pub use session::{CheckSource, Mode, Session};
