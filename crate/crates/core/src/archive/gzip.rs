//! gzip wrapper (RFC 1952) parsing and canonical regeneration.

use std::io::{Read, Write};

use flate2::read::MultiGzDecoder;
use flate2::write::DeflateEncoder;
use flate2::Compression;

use crate::error::{Error, Result};
use crate::model::MetadataEntry;
use crate::util::{le32, render_latin1, render_unix_time};

const FTEXT: u8 = 1;
const FHCRC: u8 = 2;
const FEXTRA: u8 = 4;
const FNAME: u8 = 8;
const FCOMMENT: u8 = 16;

/// OS byte written on output: "unknown".
pub const OS_UNKNOWN: u8 = 255;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GzipHeader {
    pub flags: u8,
    pub mtime: u32,
    pub xfl: u8,
    pub os: u8,
    pub extra: Option<Vec<u8>>,
    pub name: Option<Vec<u8>>,
    pub comment: Option<Vec<u8>>,
}

pub fn parse_header(d: &[u8]) -> Result<GzipHeader> {
    let bad = |at: usize, r: &str| Error::malformed("gzip", at, r.to_string());
    if d.len() < 10 || d[0] != 0x1F || d[1] != 0x8B {
        return Err(bad(0, "bad gzip magic"));
    }
    if d[2] != 8 {
        return Err(bad(2, "unsupported gzip compression method"));
    }
    let flags = d[3];
    let mut h = GzipHeader {
        flags,
        mtime: le32(d, 4).unwrap(),
        xfl: d[8],
        os: d[9],
        ..Default::default()
    };
    let mut pos = 10;
    if flags & FEXTRA != 0 {
        let len = crate::util::le16(d, pos).ok_or_else(|| bad(pos, "truncated gzip extra field"))? as usize;
        h.extra = Some(d.get(pos + 2..pos + 2 + len).ok_or_else(|| bad(pos, "truncated gzip extra field"))?.to_vec());
        pos += 2 + len;
    }
    let zstring = |pos: &mut usize| -> Result<Vec<u8>> {
        let rest = d.get(*pos..).unwrap_or_default();
        let n = rest.iter().position(|&b| b == 0).ok_or_else(|| bad(*pos, "unterminated gzip header string"))?;
        let s = rest[..n].to_vec();
        *pos += n + 1;
        Ok(s)
    };
    if flags & FNAME != 0 {
        h.name = Some(zstring(&mut pos)?);
    }
    if flags & FCOMMENT != 0 {
        h.comment = Some(zstring(&mut pos)?);
    }
    Ok(h)
}

impl GzipHeader {
    pub fn findings(&self) -> Vec<MetadataEntry> {
        let loc = "gzip header";
        let mut out = Vec::new();
        if self.mtime != 0 {
            out.push(MetadataEntry::contextual("GZIP.mtime", render_unix_time(self.mtime as i64), loc));
        }
        if let Some(n) = &self.name {
            out.push(MetadataEntry::contextual("GZIP.filename", render_latin1(n), loc));
        }
        if let Some(c) = &self.comment {
            out.push(MetadataEntry::contextual("GZIP.comment", render_latin1(c), loc));
        }
        if let Some(x) = &self.extra {
            out.push(MetadataEntry::contextual("GZIP.extra", crate::util::binary_note(x.len()), loc));
        }
        if self.os != OS_UNKNOWN {
            out.push(MetadataEntry::contextual("GZIP.os", self.os.to_string(), loc));
        }
        if self.flags & (FTEXT | FHCRC) != 0 || self.flags & 0xE0 != 0 {
            out.push(MetadataEntry::unknown("GZIP.flags", format!("0x{:02X}", self.flags), loc));
        }
        out
    }
}

/// Decompresses every gzip member, verifying CRC-32 and length trailers.
pub fn decompress(d: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    MultiGzDecoder::new(d)
        .read_to_end(&mut out)
        .map_err(|e| Error::malformed("gzip", 0, format!("decompression failed: {e}")))?;
    Ok(out)
}

/// Canonical gzip: MTIME 0, no name, no comment, XFL 0, OS 255.
pub fn compress(payload: &[u8]) -> Vec<u8> {
    let mut out = vec![0x1F, 0x8B, 8, 0, 0, 0, 0, 0, 0, OS_UNKNOWN];
    let mut enc = DeflateEncoder::new(out, Compression::new(crate::archive::zip::DEFLATE_LEVEL));
    enc.write_all(payload).expect("in-memory write");
    out = enc.finish().expect("in-memory write");
    out.extend(crc32fast::hash(payload).to_le_bytes());
    out.extend((payload.len() as u32).to_le_bytes());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_header_has_no_findings() {
        let gz = compress(b"payload");
        let h = parse_header(&gz).unwrap();
        assert!(h.findings().is_empty());
        assert_eq!(decompress(&gz).unwrap(), b"payload");
    }

    #[test]
    fn name_and_mtime_reported() {
        let mut gz = compress(b"x");
        gz[3] = FNAME;
        gz[4..8].copy_from_slice(&1_330_701_652u32.to_le_bytes());
        gz.splice(10..10, b"secret.tar\0".iter().copied());
        let h = parse_header(&gz).unwrap();
        let keys: Vec<_> = h.findings().into_iter().map(|e| (e.key, e.value)).collect();
        assert_eq!(
            keys,
            vec![
                ("GZIP.mtime".to_string(), "2012-03-02 15:20:52".to_string()),
                ("GZIP.filename".to_string(), "secret.tar".to_string()),
            ]
        );
        assert_eq!(decompress(&gz).unwrap(), b"x");
    }

    #[test]
    fn corrupt_trailer_fails() {
        let mut gz = compress(b"payload");
        let n = gz.len();
        gz[n - 5] ^= 0xFF;
        assert!(decompress(&gz).is_err());
    }
}
