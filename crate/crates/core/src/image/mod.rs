//! Raster image cleaners.

pub mod exif;
pub mod jpeg;
pub mod photoshop;
pub mod png;

use crate::engine::settle;
use crate::model::{CleanPolicy, CleanResult};

/// Keeps only the chunks needed to decode the image; every CRC is recomputed.
pub fn clean_png(data: &[u8]) -> CleanResult {
    settle(data, png::process(data), &CleanPolicy::default())
}

/// Keeps SOI, tables, frame and scan headers, entropy data and EOI.
///
/// An Adobe APP14 segment survives only in four-component images, where
/// its transform flag decides how CMYK/YCCK samples are decoded.
pub fn clean_jpeg(data: &[u8]) -> CleanResult {
    settle(data, jpeg::process(data), &CleanPolicy::default())
}
