//! Metadata inspection and removal for images, archives, office documents,
//! audio and PDF.
//!
//! ```no_run
//! use demeta::{clean_file, CleanPolicy, CleanStatus};
//!
//! let data = std::fs::read("photo.jpg").unwrap();
//! let result = clean_file(&data, Some("photo.jpg"), &CleanPolicy::default());
//! if result.status == CleanStatus::Cleaned {
//!     std::fs::write("photo.cleaned.jpg", result.output.unwrap()).unwrap();
//! }
//! ```

pub mod archive;
pub mod audio;
pub mod cli;
mod engine;
mod error;
pub mod image;
mod kind;
mod model;
pub mod pdf;
mod util;
pub mod xmp;

pub use archive::tar::Compression;
pub use archive::{clean_odf, clean_ooxml, clean_tar, clean_zip};
pub use audio::{clean_flac, clean_mp3, clean_ogg_vorbis};
pub use engine::{clean_file, inspect_file, MAX_NESTING_DEPTH};
pub use error::{Error, Result};
pub use image::{clean_jpeg, clean_png};
pub use kind::{detect_kind, Confidence, FileKind, KindTag};
pub use model::{
    anonymize_field, Category, CleanPolicy, CleanResult, CleanStatus, FieldValue, MetadataEntry, UnknownMemberAction,
};
pub use pdf::{clean_pdf, inspect_pdf, parse_pdf, PdfDocument, PdfError};
