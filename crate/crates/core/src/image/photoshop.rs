//! Photoshop image resource blocks (JPEG APP13) and the IPTC records inside them.

use crate::model::MetadataEntry;
use crate::util::{be16, be32, binary_note, hex, render_latin1, render_utf8_lossy};

pub const SIGNATURE: &[u8] = b"Photoshop 3.0\0";

pub fn entries(mut d: &[u8], location: &str) -> Vec<MetadataEntry> {
    let mut out = Vec::new();
    while d.len() >= 12 && matches!(&d[..4], b"8BIM" | b"PHUT" | b"AgHg" | b"DCSR") {
        let id = be16(d, 4).unwrap();
        let name_len = d[6] as usize;
        // Pascal name, padded so length byte + name is even
        let name_total = (1 + name_len + 1) & !1;
        let Some(size) = be32(d, 6 + name_total) else { break };
        let data_at = 6 + name_total + 4;
        let Some(body) = d.get(data_at..data_at + size as usize) else { break };
        out.extend(resource(id, body, location));
        let next = data_at + ((size as usize + 1) & !1);
        d = d.get(next..).unwrap_or_default();
    }
    out
}

fn resource(id: u16, body: &[u8], location: &str) -> Vec<MetadataEntry> {
    let e = |k: &str, v: String| MetadataEntry::contextual(format!("Photoshop.{k}"), v, location);
    match id {
        0x0404 => iptc(body, location),
        0x0409 | 0x040C => vec![e("PhotoshopThumbnail", binary_note(body.len().saturating_sub(28)))],
        0x0425 => vec![e("IPTCDigest", hex(body))],
        0x0406 => vec![e(
            "PhotoshopQuality",
            be16(body, 0).map(|q| (q as i16 + 4).to_string()).unwrap_or_default(),
        )],
        0x040A => vec![e("CopyrightFlag", if body.first() == Some(&1) { "True" } else { "False" }.into())],
        0x040B => vec![e("URL", render_latin1(body))],
        0x0422 => vec![MetadataEntry::contextual("EXIF", binary_note(body.len()), location)],
        0x0424 => vec![MetadataEntry::contextual("XMP", binary_note(body.len()), location)],
        _ => vec![e(&format!("0x{id:04X}"), binary_note(body.len()))],
    }
}

fn iptc(mut d: &[u8], location: &str) -> Vec<MetadataEntry> {
    let mut out = Vec::new();
    while d.len() >= 5 && d[0] == 0x1C {
        let (record, dataset) = (d[1], d[2]);
        let len = be16(d, 3).unwrap() as usize;
        let Some(value) = d.get(5..5 + len) else { break };
        let key = match iptc_name(record, dataset) {
            Some(n) => format!("IPTC.{n}"),
            None => format!("IPTC.{record}:{dataset}"),
        };
        out.push(MetadataEntry::contextual(key, render_utf8_lossy(value), location));
        d = &d[5 + len..];
    }
    out
}

fn iptc_name(record: u8, dataset: u8) -> Option<&'static str> {
    Some(match (record, dataset) {
        (1, 90) => "CodedCharacterSet",
        (2, 0) => "ApplicationRecordVersion",
        (2, 5) => "ObjectName",
        (2, 25) => "Keywords",
        (2, 55) => "DateCreated",
        (2, 60) => "TimeCreated",
        (2, 80) => "By-line",
        (2, 85) => "By-lineTitle",
        (2, 90) => "City",
        (2, 95) => "Province-State",
        (2, 101) => "Country-PrimaryLocationName",
        (2, 105) => "Headline",
        (2, 110) => "Credit",
        (2, 115) => "Source",
        (2, 116) => "CopyrightNotice",
        (2, 120) => "Caption-Abstract",
        (2, 122) => "Writer-Editor",
        _ => return None,
    })
}
