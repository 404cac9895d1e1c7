//! JPEG segment whitelist.

use crate::engine::Outcome;
use crate::error::{Error, Result};
use crate::image::{exif, photoshop};
use crate::model::{Category, MetadataEntry};
use crate::util::{at, be16, binary_note, render_latin1, render_utf8_lossy};

pub const SOI: u8 = 0xD8;
pub const EOI: u8 = 0xD9;
pub const SOS: u8 = 0xDA;
pub const APP14: u8 = 0xEE;

const EXIF_ID: &[u8] = b"Exif\0\0";
const XMP_ID: &[u8] = b"http://ns.adobe.com/xap/1.0/\0";
const XMP_EXT_ID: &[u8] = b"http://ns.adobe.com/xmp/extension/\0";

/// One marker segment. `payload` excludes the length field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JpegSegment<'a> {
    pub marker: u8,
    /// Offset of the marker's 0xFF byte.
    pub offset: usize,
    pub payload: Option<&'a [u8]>,
    /// Entropy-coded data following an SOS header, restart markers included.
    pub entropy_data: Option<&'a [u8]>,
}

impl JpegSegment<'_> {
    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&[0xFF, self.marker]);
        if let Some(p) = self.payload {
            out.extend_from_slice(&((p.len() + 2) as u16).to_be_bytes());
            out.extend_from_slice(p);
        }
        if let Some(e) = self.entropy_data {
            out.extend_from_slice(e);
        }
    }
}

#[derive(Debug)]
pub struct JpegFile<'a> {
    /// Every segment between SOI and EOI, exclusive.
    pub segments: Vec<JpegSegment<'a>>,
    /// Offset just past EOI.
    pub end: usize,
}

impl JpegFile<'_> {
    /// Component count of the first frame header.
    pub fn frame_components(&self) -> Option<u8> {
        self.segments
            .iter()
            .find(|s| is_sof(s.marker))
            .and_then(|s| s.payload?.get(5).copied())
    }

    /// Concatenation of every scan's entropy-coded bytes.
    pub fn scan_data(&self) -> Vec<u8> {
        self.segments.iter().filter_map(|s| s.entropy_data).flatten().copied().collect()
    }
}

pub fn is_sof(m: u8) -> bool {
    matches!(m, 0xC0..=0xC3 | 0xC5..=0xC7 | 0xC9..=0xCB | 0xCD..=0xCF)
}

fn is_standalone(m: u8) -> bool {
    matches!(m, 0x01 | 0xD0..=0xD7)
}

/// Segments needed to decode the image.
fn is_structural(m: u8) -> bool {
    is_sof(m) || matches!(m, 0xDB | 0xC4 | 0xCC | 0xDD | 0xDC | 0xDE | 0xDF | SOS | 0xD0..=0xD7)
}

pub fn parse(data: &[u8]) -> Result<JpegFile<'_>> {
    if !data.starts_with(&[0xFF, SOI]) {
        return Err(Error::malformed("JPEG", 0, "missing SOI marker"));
    }
    let mut pos = 2;
    let mut segments = Vec::new();
    let mut seen_sos = false;
    loop {
        if data.get(pos) != Some(&0xFF) {
            return Err(match data.get(pos) {
                None => Error::malformed("JPEG", pos, "missing EOI marker"),
                Some(_) => Error::malformed("JPEG", pos, "expected marker"),
            });
        }
        while data.get(pos) == Some(&0xFF) {
            pos += 1;
        }
        let offset = pos - 1;
        let marker = *data.get(pos).ok_or_else(|| Error::malformed("JPEG", offset, "missing EOI marker"))?;
        pos += 1;
        if marker == EOI {
            if !seen_sos {
                return Err(Error::malformed("JPEG", offset, "no SOS segment before EOI"));
            }
            return Ok(JpegFile { segments, end: pos });
        }
        if marker == SOI || marker == 0x00 {
            return Err(Error::malformed("JPEG", offset, format!("unexpected marker 0x{marker:02X}")));
        }
        if is_standalone(marker) {
            segments.push(JpegSegment {
                marker,
                offset,
                payload: None,
                entropy_data: None,
            });
            continue;
        }
        let len = be16(data, pos).ok_or_else(|| Error::malformed("JPEG", offset, "truncated segment"))? as usize;
        if len < 2 || pos + len > data.len() {
            return Err(Error::malformed(
                "JPEG",
                offset,
                format!("truncated segment 0x{marker:02X}"),
            ));
        }
        let payload = &data[pos + 2..pos + len];
        pos += len;
        let entropy_data = if marker == SOS {
            seen_sos = true;
            let start = pos;
            pos = scan_end(data, pos);
            Some(&data[start..pos])
        } else {
            None
        };
        segments.push(JpegSegment {
            marker,
            offset,
            payload: Some(payload),
            entropy_data,
        });
    }
}

/// Finds the first marker that terminates entropy-coded data.
fn scan_end(data: &[u8], mut i: usize) -> usize {
    while i < data.len() {
        if data[i] == 0xFF {
            match data.get(i + 1) {
                Some(0x00) | Some(0xD0..=0xD7) => i += 2,
                Some(0xFF) => i += 1,
                _ => return i,
            }
        } else {
            i += 1;
        }
    }
    i
}

pub(crate) fn process(data: &[u8]) -> Result<Outcome> {
    let jpeg = parse(data)?;
    let keep_adobe = jpeg.frame_components() == Some(4);
    let mut outcome = Outcome::default();
    let mut out = vec![0xFF, SOI];
    for seg in &jpeg.segments {
        let location = format!("segment {} {}", marker_name(seg.marker), at(seg.offset));
        if is_structural(seg.marker) {
            seg.write_to(&mut out);
            continue;
        }
        let is_adobe = seg.marker == APP14 && seg.payload.is_some_and(|p| p.starts_with(b"Adobe"));
        if is_adobe && keep_adobe {
            seg.write_to(&mut out);
            let mut e = describe_adobe(seg.payload.unwrap(), &location);
            e.category = Category::StructuralRequired;
            outcome.retained(e);
            continue;
        }
        for entry in describe(seg, &location) {
            outcome.removed(entry);
        }
    }
    out.extend_from_slice(&[0xFF, EOI]);
    if jpeg.end < data.len() {
        outcome.removed(MetadataEntry::unknown(
            "JPEG.trailer",
            binary_note(data.len() - jpeg.end),
            format!("after EOI {}", at(jpeg.end)),
        ));
    }
    outcome.output = out;
    Ok(outcome)
}

pub fn marker_name(m: u8) -> String {
    match m {
        0xE0..=0xEF => format!("APP{}", m - 0xE0),
        0xFE => "COM".into(),
        0xDB => "DQT".into(),
        0xC4 => "DHT".into(),
        0xDD => "DRI".into(),
        SOS => "SOS".into(),
        m if is_sof(m) => format!("SOF{}", m - 0xC0),
        m => format!("0x{m:02X}"),
    }
}

fn describe_adobe(p: &[u8], location: &str) -> MetadataEntry {
    let transform = p.get(11).copied();
    let value = match transform {
        Some(t) => format!("transform={t}"),
        None => binary_note(p.len()),
    };
    MetadataEntry::contextual("Adobe.APP14", value, location)
}

fn describe(seg: &JpegSegment, location: &str) -> Vec<MetadataEntry> {
    let p = seg.payload.unwrap_or_default();
    match seg.marker {
        0xE0 if p.starts_with(b"JFIF\0") => {
            let mut v = vec![MetadataEntry::contextual(
                "JFIF.Version",
                match (p.get(5), p.get(6)) {
                    (Some(a), Some(b)) => format!("{a}.{b:02}"),
                    _ => binary_note(p.len()),
                },
                location,
            )];
            if let (Some(unit), Some(x), Some(y)) = (p.get(7), be16(p, 8), be16(p, 10)) {
                let unit = match unit {
                    1 => "inches",
                    2 => "cm",
                    _ => "aspect",
                };
                v.push(MetadataEntry::contextual("JFIF.Resolution", format!("{x}x{y} {unit}"), location));
            }
            if p.get(12).copied().unwrap_or(0) > 0 && p.get(13).copied().unwrap_or(0) > 0 {
                v.push(MetadataEntry::contextual("JFIF.Thumbnail", binary_note(p.len().saturating_sub(14)), location));
            }
            v
        }
        0xE0 if p.starts_with(b"JFXX\0") => {
            vec![MetadataEntry::contextual("JFIF.ExtensionThumbnail", binary_note(p.len() - 6), location)]
        }
        0xE1 if p.starts_with(EXIF_ID) => {
            let entries = exif::parse(&p[EXIF_ID.len()..]).map(|e| e.entries(location)).unwrap_or_default();
            if entries.is_empty() {
                vec![MetadataEntry::contextual("EXIF", binary_note(p.len()), location)]
            } else {
                entries
            }
        }
        0xE1 if p.starts_with(XMP_ID) => {
            let fields = crate::xmp::fields(&p[XMP_ID.len()..]);
            if fields.is_empty() {
                vec![MetadataEntry::contextual("XMP", binary_note(p.len()), location)]
            } else {
                fields
                    .into_iter()
                    .map(|(k, v)| MetadataEntry::contextual(format!("XMP.{k}"), v, location))
                    .collect()
            }
        }
        0xE1 if p.starts_with(XMP_EXT_ID) => {
            vec![MetadataEntry::contextual("XMP.Extension", binary_note(p.len()), location)]
        }
        0xE2 if p.starts_with(b"ICC_PROFILE\0") => {
            vec![MetadataEntry::contextual("ICC.Profile", binary_note(p.len().saturating_sub(14)), location)]
        }
        0xED if p.starts_with(photoshop::SIGNATURE) => {
            let entries = photoshop::entries(&p[photoshop::SIGNATURE.len()..], location);
            if entries.is_empty() {
                vec![MetadataEntry::contextual("Photoshop", binary_note(p.len()), location)]
            } else {
                entries
            }
        }
        APP14 if p.starts_with(b"Adobe") => vec![describe_adobe(p, location)],
        0xFE => vec![MetadataEntry::contextual("JPEG.Comment", render_utf8_lossy(p), location)],
        m @ 0xE0..=0xEF => {
            let ident: Vec<u8> = p.iter().take_while(|c| c.is_ascii_graphic() || **c == b' ').take(32).copied().collect();
            let value = if ident.is_empty() {
                binary_note(p.len())
            } else {
                format!("{} {}", render_latin1(&ident), binary_note(p.len()))
            };
            vec![MetadataEntry::unknown(format!("JPEG.APP{}", m - 0xE0), value, location)]
        }
        m => vec![MetadataEntry::unknown(format!("JPEG.0x{m:02X}"), binary_note(p.len()), location)],
    }
}
