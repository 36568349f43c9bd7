//! Referential discourse segmentation from local centering data.
//!
//! The engine reads documents whose utterances carry ranked forward-looking
//! center lists and annotated referential expressions. It resolves each
//! anaphor against the centers reachable through the current hierarchy of
//! discourse segments, and uses the resolution outcome to continue, close,
//! lift, or open segments.
//!
//! ```no_run
//! let bytes = std::fs::read("sample.json").unwrap();
//! for doc in centered_seg::corpus::parse_corpus(&bytes).unwrap() {
//!     let trace = centered_seg::segmenter::run(&doc).unwrap();
//!     print!("{}", centered_seg::render::render_trace(&trace));
//! }
//! ```

pub mod centering;
pub mod cli;
pub mod corpus;
pub mod eval;
pub mod registry;
pub mod render;
pub mod resolver;
pub mod segmenter;

pub use corpus::{parse_corpus, validate_document, Document};
pub use segmenter::{run, AnalysisTrace, Segmenter};
