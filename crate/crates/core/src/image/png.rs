//! PNG chunk whitelist.

use std::io::Read;

use crate::engine::Outcome;
use crate::error::{Error, Result};
use crate::image::exif;
use crate::kind::PNG_SIGNATURE;
use crate::model::{Category, MetadataEntry};
use crate::util::{at, be32, binary_note, render_latin1, render_utf8_lossy};

/// Chunks required to decode the image, including APNG animation.
pub const WHITELIST: [&[u8; 4]; 8] = [b"IHDR", b"PLTE", b"tRNS", b"IDAT", b"IEND", b"acTL", b"fcTL", b"fdAT"];

/// Ancillary chunks defined by the PNG specification.
const KNOWN_ANCILLARY: [&[u8; 4]; 15] = [
    b"tEXt", b"zTXt", b"iTXt", b"tIME", b"eXIf", b"gAMA", b"cHRM", b"sRGB", b"iCCP", b"sBIT", b"bKGD", b"hIST",
    b"pHYs", b"sPLT", b"cICP",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PngChunk {
    pub kind: [u8; 4],
    pub body: Vec<u8>,
    pub crc: u32,
}

impl PngChunk {
    pub fn new(kind: [u8; 4], body: Vec<u8>) -> Self {
        let crc = chunk_crc(&kind, &body);
        PngChunk { kind, body, crc }
    }

    pub fn kind_str(&self) -> String {
        String::from_utf8_lossy(&self.kind).into_owned()
    }

    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.body.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.kind);
        out.extend_from_slice(&self.body);
        out.extend_from_slice(&chunk_crc(&self.kind, &self.body).to_be_bytes());
    }
}

pub(crate) fn chunk_crc(kind: &[u8; 4], body: &[u8]) -> u32 {
    let mut h = crc32fast::Hasher::new();
    h.update(kind);
    h.update(body);
    h.finalize()
}

/// A parsed PNG: chunks with their file offsets, plus any bytes after IEND.
#[derive(Debug)]
pub struct PngFile {
    pub chunks: Vec<(usize, PngChunk)>,
    pub trailing: usize,
}

pub fn parse(data: &[u8]) -> Result<PngFile> {
    if !data.starts_with(&PNG_SIGNATURE) {
        return Err(Error::malformed("PNG", 0, "signature mismatch"));
    }
    let mut pos = PNG_SIGNATURE.len();
    let mut chunks = Vec::new();
    loop {
        let start = pos;
        let len = be32(data, pos).ok_or_else(|| Error::malformed("PNG", start, "truncated chunk header"))? as usize;
        let kind: [u8; 4] = data
            .get(pos + 4..pos + 8)
            .ok_or_else(|| Error::malformed("PNG", start, "truncated chunk header"))?
            .try_into()
            .unwrap();
        let body_end = pos
            .checked_add(8 + len)
            .filter(|&e| e + 4 <= data.len())
            .ok_or_else(|| Error::malformed("PNG", start, format!("truncated {} chunk", String::from_utf8_lossy(&kind))))?;
        let body = data[pos + 8..body_end].to_vec();
        let crc = be32(data, body_end).unwrap();
        if crc != chunk_crc(&kind, &body) {
            return Err(Error::malformed(
                "PNG",
                start,
                format!("CRC mismatch in {} chunk", String::from_utf8_lossy(&kind)),
            ));
        }
        if chunks.is_empty() && &kind != b"IHDR" {
            return Err(Error::malformed("PNG", start, "first chunk is not IHDR"));
        }
        pos = body_end + 4;
        let is_end = &kind == b"IEND";
        chunks.push((start, PngChunk { kind, body, crc }));
        if is_end {
            break;
        }
        if pos >= data.len() {
            return Err(Error::malformed("PNG", pos, "missing IEND chunk"));
        }
    }
    Ok(PngFile {
        chunks,
        trailing: data.len() - pos,
    })
}

pub(crate) fn process(data: &[u8]) -> Result<Outcome> {
    let png = parse(data)?;
    let mut outcome = Outcome::default();
    let mut out = PNG_SIGNATURE.to_vec();
    for (offset, chunk) in &png.chunks {
        if WHITELIST.contains(&&chunk.kind) {
            chunk.write_to(&mut out);
            continue;
        }
        let location = format!("chunk {} {}", chunk.kind_str(), at(*offset));
        for entry in describe(chunk, &location) {
            outcome.removed(entry);
        }
    }
    if png.trailing > 0 {
        let end = data.len() - png.trailing;
        outcome.removed(MetadataEntry::unknown(
            "PNG.trailer",
            binary_note(png.trailing),
            format!("after IEND {}", at(end)),
        ));
    }
    outcome.output = out;
    Ok(outcome)
}

fn describe(chunk: &PngChunk, location: &str) -> Vec<MetadataEntry> {
    let body = &chunk.body;
    match &chunk.kind {
        b"tEXt" => {
            let (keyword, text) = split_nul(body);
            vec![MetadataEntry::contextual(
                format!("PNG.tEXt.{}", render_latin1(keyword)),
                render_latin1(text),
                location,
            )]
        }
        b"zTXt" => {
            let (keyword, rest) = split_nul(body);
            let text = rest.get(1..).map(inflate_zlib).unwrap_or_default();
            vec![MetadataEntry::contextual(
                format!("PNG.zTXt.{}", render_latin1(keyword)),
                render_latin1(&text),
                location,
            )]
        }
        b"iTXt" => describe_itxt(body, location),
        b"tIME" if body.len() == 7 => {
            let year = u16::from_be_bytes([body[0], body[1]]);
            vec![MetadataEntry::contextual(
                "PNG.tIME",
                format!(
                    "{year:04}-{:02}-{:02} {:02}:{:02}:{:02}",
                    body[2], body[3], body[4], body[5], body[6]
                ),
                location,
            )]
        }
        b"eXIf" => {
            let mut entries: Vec<MetadataEntry> = exif::parse(body)
                .map(|e| e.entries(location))
                .unwrap_or_default();
            if entries.is_empty() {
                entries.push(MetadataEntry::contextual("PNG.eXIf", binary_note(body.len()), location));
            }
            entries
        }
        b"iCCP" => {
            let (name, _) = split_nul(body);
            vec![MetadataEntry::contextual("PNG.iCCP", render_latin1(name), location)]
        }
        kind if KNOWN_ANCILLARY.contains(&kind) => vec![MetadataEntry::contextual(
            format!("PNG.{}", chunk.kind_str()),
            binary_note(body.len()),
            location,
        )],
        _ => vec![MetadataEntry::new(
            format!("PNG.{}", chunk.kind_str()),
            binary_note(body.len()),
            location,
            Category::Unknown,
        )],
    }
}

fn describe_itxt(body: &[u8], location: &str) -> Vec<MetadataEntry> {
    let (keyword, rest) = split_nul(body);
    let compressed = rest.first().copied().unwrap_or(0) == 1;
    let rest = rest.get(2..).unwrap_or_default();
    let (_lang, rest) = split_nul(rest);
    let (_translated, text) = split_nul(rest);
    let text = if compressed { inflate_zlib(text) } else { text.to_vec() };
    if keyword == b"XML:com.adobe.xmp" {
        let fields = crate::xmp::fields(&text);
        if !fields.is_empty() {
            return fields
                .into_iter()
                .map(|(k, v)| MetadataEntry::contextual(format!("XMP.{k}"), v, location))
                .collect();
        }
    }
    vec![MetadataEntry::contextual(
        format!("PNG.iTXt.{}", render_utf8_lossy(keyword)),
        render_utf8_lossy(&text),
        location,
    )]
}

fn split_nul(b: &[u8]) -> (&[u8], &[u8]) {
    match b.iter().position(|&c| c == 0) {
        Some(i) => (&b[..i], &b[i + 1..]),
        None => (b, &[]),
    }
}

fn inflate_zlib(b: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    let _ = flate2::read::ZlibDecoder::new(b).take(1 << 20).read_to_end(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn png(chunks: &[(&[u8; 4], &[u8])]) -> Vec<u8> {
        let mut d = PNG_SIGNATURE.to_vec();
        for (k, b) in chunks {
            PngChunk::new(**k, b.to_vec()).write_to(&mut d);
        }
        d
    }

    const IHDR: &[u8] = &[0, 0, 0, 1, 0, 0, 0, 1, 8, 0, 0, 0, 0];

    #[test]
    fn text_chunk_location_and_key() {
        let d = png(&[(b"IHDR", IHDR), (b"tEXt", b"Comment\0hi"), (b"IDAT", &[1, 2]), (b"IEND", &[])]);
        let out = process(&d).unwrap();
        let e = &out.findings[0].entry;
        assert_eq!(e.key, "PNG.tEXt.Comment");
        assert_eq!(e.value, "hi");
        assert_eq!(e.location, "chunk tEXt @0x0021");
        assert_eq!(e.category, Category::Contextual);
    }

    #[test]
    fn unknown_ancillary_is_unknown_category() {
        let d = png(&[(b"IHDR", IHDR), (b"prVt", b"xyz"), (b"IDAT", &[1]), (b"IEND", &[])]);
        let out = process(&d).unwrap();
        assert_eq!(out.findings[0].entry.category, Category::Unknown);
        assert_eq!(out.findings[0].entry.key, "PNG.prVt");
    }

    #[test]
    fn missing_iend_fails() {
        let d = png(&[(b"IHDR", IHDR), (b"IDAT", &[1])]);
        assert!(matches!(parse(&d), Err(Error::Malformed { .. })));
    }

    #[test]
    fn missing_ihdr_fails() {
        let d = png(&[(b"IDAT", &[1]), (b"IEND", &[])]);
        assert!(parse(&d).is_err());
    }

    #[test]
    fn truncated_chunk_fails() {
        let mut d = png(&[(b"IHDR", IHDR), (b"IDAT", &[1, 2, 3]), (b"IEND", &[])]);
        d.truncate(40);
        assert!(parse(&d).is_err());
    }

    #[test]
    fn trailing_bytes_reported() {
        let mut d = png(&[(b"IHDR", IHDR), (b"IDAT", &[1]), (b"IEND", &[])]);
        d.extend_from_slice(b"secret");
        let out = process(&d).unwrap();
        assert_eq!(out.findings.len(), 1);
        assert_eq!(out.findings[0].entry.key, "PNG.trailer");
        assert!(!out.output.ends_with(b"secret"));
    }

    #[test]
    fn ztxt_is_inflated() {
        use flate2::{write::ZlibEncoder, Compression};
        use std::io::Write;
        let mut enc = ZlibEncoder::new(Vec::new(), Compression::default());
        enc.write_all(b"alice").unwrap();
        let mut body = b"Author\0\0".to_vec();
        body.extend(enc.finish().unwrap());
        let d = png(&[(b"IHDR", IHDR), (b"zTXt", &body), (b"IDAT", &[1]), (b"IEND", &[])]);
        let out = process(&d).unwrap();
        assert_eq!(out.findings[0].entry.key, "PNG.zTXt.Author");
        assert_eq!(out.findings[0].entry.value, "alice");
    }

    #[test]
    fn time_chunk_rendered() {
        let d = png(&[(b"IHDR", IHDR), (b"tIME", &[0x07, 0xDC, 3, 2, 16, 20, 52]), (b"IDAT", &[1]), (b"IEND", &[])]);
        let out = process(&d).unwrap();
        assert_eq!(out.findings[0].entry.value, "2012-03-02 16:20:52");
    }
}
