//! Audio cleaners. Frames and audio packets are never touched.

pub mod flac;
pub mod id3;
pub mod mp3;
pub mod ogg;
pub mod vorbis;

use crate::engine::settle;
use crate::model::{CleanPolicy, CleanResult};

/// Excises ID3v2, ID3v1 and APEv2 tags, plus junk before the first frame.
pub fn clean_mp3(data: &[u8]) -> CleanResult {
    settle(data, mp3::process(data), &CleanPolicy::default())
}

/// Replaces the comment header with an empty one and renumbers pages.
pub fn clean_ogg_vorbis(data: &[u8]) -> CleanResult {
    settle(data, ogg::process(data), &CleanPolicy::default())
}

/// Drops every metadata block except StreamInfo.
pub fn clean_flac(data: &[u8]) -> CleanResult {
    settle(data, flac::process(data), &CleanPolicy::default())
}
