//! Vorbis comment blocks, shared by Ogg Vorbis and FLAC.

use crate::model::MetadataEntry;
use crate::util::{le32, render_text, render_utf8_lossy};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VorbisComment {
    pub vendor: String,
    pub comments: Vec<String>,
}

impl VorbisComment {
    /// Parses the little-endian length-prefixed layout. Returns the block and
    /// the number of bytes consumed.
    pub fn parse(b: &[u8]) -> Option<(Self, usize)> {
        let vlen = le32(b, 0)? as usize;
        let vendor = b.get(4..4 + vlen)?;
        let mut pos = 4 + vlen;
        let count = le32(b, pos)?;
        pos += 4;
        let mut comments = Vec::new();
        for _ in 0..count {
            let len = le32(b, pos)? as usize;
            let c = b.get(pos + 4..pos + 4 + len)?;
            comments.push(render_utf8_lossy(c));
            pos += 4 + len;
        }
        Some((
            VorbisComment {
                vendor: render_utf8_lossy(vendor),
                comments,
            },
            pos,
        ))
    }

    pub fn entries(&self, location: &str) -> Vec<MetadataEntry> {
        let mut out = Vec::new();
        if !self.vendor.is_empty() {
            out.push(MetadataEntry::contextual("Vorbis.vendor", render_text(&self.vendor), location));
        }
        for c in &self.comments {
            let (k, v) = c.split_once('=').unwrap_or((c.as_str(), ""));
            out.push(MetadataEntry::contextual(
                format!("Vorbis.{}", k.to_ascii_uppercase()),
                render_text(v),
                location,
            ));
        }
        out
    }
}
