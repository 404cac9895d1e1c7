//! ID3v2, ID3v1 and APEv2 tag readers.

use crate::model::MetadataEntry;
use crate::util::{binary_note, le32, render_latin1, render_text, render_utf8_lossy};

pub fn syncsafe(b: &[u8]) -> Option<u32> {
    if b.len() < 4 || b[..4].iter().any(|&x| x & 0x80 != 0) {
        return None;
    }
    Some(((b[0] as u32) << 21) | ((b[1] as u32) << 14) | ((b[2] as u32) << 7) | b[3] as u32)
}

/// Total length of an ID3v2 tag starting at `d[0]`, footer included.
pub fn v2_len(d: &[u8]) -> Option<usize> {
    if d.len() < 10 || &d[..3] != b"ID3" || d[3] == 0xFF || d[4] == 0xFF {
        return None;
    }
    let size = syncsafe(&d[6..10])? as usize;
    let footer = if d[3] == 4 && d[5] & 0x10 != 0 { 10 } else { 0 };
    Some(10 + size + footer)
}

/// Offset just past any ID3v2 tags at the start of `d`.
pub fn leading_tags_end(d: &[u8]) -> Option<usize> {
    let mut pos = 0;
    while let Some(len) = v2_len(&d[pos..]) {
        if pos + len > d.len() {
            return None;
        }
        pos += len;
    }
    Some(pos)
}

fn remove_unsync(d: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(d.len());
    let mut i = 0;
    while i < d.len() {
        out.push(d[i]);
        if d[i] == 0xFF && d.get(i + 1) == Some(&0) {
            i += 1;
        }
        i += 1;
    }
    out
}

fn decode_text(enc: u8, b: &[u8]) -> String {
    let parts: Vec<String> = match enc {
        1 | 2 => {
            let mut units: Vec<u16> = b.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
            let mut strings = Vec::new();
            for piece in units.split_mut(|&u| u == 0) {
                let mut le = false;
                let mut piece: &mut [u16] = piece;
                if enc == 1 {
                    match piece.first() {
                        Some(0xFFFE) => {
                            le = true;
                            piece = &mut piece[1..];
                        }
                        Some(0xFEFF) => piece = &mut piece[1..],
                        _ => {}
                    }
                }
                if le {
                    for u in piece.iter_mut() {
                        *u = u.swap_bytes();
                    }
                }
                strings.push(String::from_utf16_lossy(piece));
            }
            strings
        }
        3 => b.split(|&c| c == 0).map(|p| String::from_utf8_lossy(p).into_owned()).collect(),
        _ => b.split(|&c| c == 0).map(|p| p.iter().map(|&c| c as char).collect()).collect(),
    };
    let parts: Vec<String> = parts.into_iter().filter(|p| !p.is_empty()).collect();
    render_text(&parts.join("; "))
}

/// Splits an encoded, NUL-terminated string off the front of `b`.
fn split_encoded(enc: u8, b: &[u8]) -> (&[u8], &[u8]) {
    if matches!(enc, 1 | 2) {
        let mut i = 0;
        while i + 1 < b.len() {
            if b[i] == 0 && b[i + 1] == 0 {
                return (&b[..i], &b[i + 2..]);
            }
            i += 2;
        }
        (b, &[])
    } else {
        match b.iter().position(|&c| c == 0) {
            Some(i) => (&b[..i], &b[i + 1..]),
            None => (b, &[]),
        }
    }
}

fn frame_entry(id: &str, body: &[u8], location: &str) -> MetadataEntry {
    let enc = body.first().copied().unwrap_or(0);
    let rest = body.get(1..).unwrap_or_default();
    let (key, value) = match id {
        "TXXX" | "TXX" | "WXXX" | "WXX" => {
            let (desc, val) = split_encoded(enc, rest);
            let val = if id.starts_with('W') { render_latin1(val) } else { decode_text(enc, val) };
            (format!("ID3v2.{id}.{}", decode_text(enc, desc)), val)
        }
        _ if id.starts_with('T') => (format!("ID3v2.{id}"), decode_text(enc, rest)),
        _ if id.starts_with('W') => (format!("ID3v2.{id}"), render_latin1(body)),
        "COMM" | "COM" | "USLT" | "ULT" => {
            let text = rest.get(3..).unwrap_or_default();
            let (_desc, val) = split_encoded(enc, text);
            (format!("ID3v2.{id}"), decode_text(enc, val))
        }
        "APIC" => {
            let (mime, rest2) = split_encoded(0, rest);
            let pic_type = rest2.first().copied().unwrap_or(0);
            let (_, data) = split_encoded(enc, rest2.get(1..).unwrap_or_default());
            (
                format!("ID3v2.{id}"),
                format!("picture type {pic_type}, {} {}", render_latin1(mime), binary_note(data.len())),
            )
        }
        "PRIV" | "UFID" | "GEOB" => {
            let (owner, data) = split_encoded(0, body);
            (format!("ID3v2.{id}.{}", render_latin1(owner)), binary_note(data.len()))
        }
        _ => (format!("ID3v2.{id}"), binary_note(body.len())),
    };
    MetadataEntry::contextual(key, value, location)
}

/// Itemizes the frames of one ID3v2 tag.
pub fn v2_entries(tag: &[u8], location: &str) -> Vec<MetadataEntry> {
    let version = tag[3];
    let flags = tag[5];
    let size = syncsafe(&tag[6..10]).unwrap_or(0) as usize;
    let mut body = tag.get(10..10 + size).unwrap_or_default().to_vec();
    if flags & 0x80 != 0 && version < 4 {
        body = remove_unsync(&body);
    }
    let mut pos = 0;
    if flags & 0x40 != 0 {
        pos = match version {
            3 => crate::util::be32(&body, 0).map(|s| s as usize + 4).unwrap_or(body.len()),
            4 => syncsafe(&body).map(|s| s as usize).unwrap_or(body.len()),
            _ => 0,
        };
    }
    let mut out = Vec::new();
    let (id_len, header_len) = if version == 2 { (3, 6) } else { (4, 10) };
    while pos + header_len <= body.len() {
        let id_bytes = &body[pos..pos + id_len];
        if id_bytes[0] == 0 || !id_bytes.iter().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit()) {
            break;
        }
        let id = String::from_utf8_lossy(id_bytes).into_owned();
        let frame_size = match version {
            2 => ((body[pos + 3] as usize) << 16) | ((body[pos + 4] as usize) << 8) | body[pos + 5] as usize,
            3 => crate::util::be32(&body, pos + 4).unwrap_or(0) as usize,
            _ => syncsafe(&body[pos + 4..pos + 8]).unwrap_or(0) as usize,
        };
        let start = pos + header_len;
        let Some(frame) = body.get(start..start + frame_size) else { break };
        let mut frame = frame.to_vec();
        if version == 4 {
            let fflags = body[pos + 9];
            if fflags & 0x01 != 0 && frame.len() >= 4 {
                frame.drain(..4);
            }
            if fflags & 0x02 != 0 {
                frame = remove_unsync(&frame);
            }
        }
        out.push(frame_entry(&id, &frame, location));
        pos = start + frame_size;
    }
    if out.is_empty() {
        out.push(MetadataEntry::contextual("ID3v2", format!("empty tag, {}", binary_note(tag.len())), location));
    }
    out
}

const ID3V1_FIELDS: [(&str, std::ops::Range<usize>); 5] = [
    ("title", 3..33),
    ("artist", 33..63),
    ("album", 63..93),
    ("year", 93..97),
    ("comment", 97..127),
];

/// Itemizes a 128-byte ID3v1/v1.1 tag.
pub fn v1_entries(tag: &[u8], location: &str) -> Vec<MetadataEntry> {
    let mut out = Vec::new();
    let v11 = tag[125] == 0 && tag[126] != 0;
    for (name, range) in ID3V1_FIELDS {
        let range = if name == "comment" && v11 { 97..125 } else { range };
        let raw = &tag[range];
        let end = raw.iter().position(|&c| c == 0).unwrap_or(raw.len());
        let text = render_latin1(&raw[..end]);
        let text = text.trim_end();
        if !text.is_empty() {
            out.push(MetadataEntry::contextual(format!("ID3v1.{name}"), text, location));
        }
    }
    if v11 {
        out.push(MetadataEntry::contextual("ID3v1.track", tag[126].to_string(), location));
    }
    if tag[127] != 0xFF {
        out.push(MetadataEntry::contextual("ID3v1.genre", tag[127].to_string(), location));
    }
    if out.is_empty() {
        out.push(MetadataEntry::contextual("ID3v1", "empty tag", location));
    }
    out
}

/// Total length of an APEv2 tag whose 32-byte footer ends at `d.len()`.
pub fn ape_len(d: &[u8]) -> Option<usize> {
    let footer = d.get(d.len().checked_sub(32)?..)?;
    if &footer[..8] != b"APETAGEX" {
        return None;
    }
    let size = le32(footer, 12)? as usize;
    let flags = le32(footer, 20)?;
    let header = if flags & (1 << 31) != 0 { 32 } else { 0 };
    Some(size + header)
}

/// Itemizes an APEv2 tag (header optional, footer required).
pub fn ape_entries(tag: &[u8], location: &str) -> Vec<MetadataEntry> {
    let footer = &tag[tag.len() - 32..];
    let count = le32(footer, 16).unwrap_or(0);
    let mut pos = if tag.starts_with(b"APETAGEX") && tag.len() >= 64 { 32 } else { 0 };
    let items_end = tag.len() - 32;
    let mut out = Vec::new();
    for _ in 0..count {
        let (Some(len), Some(flags)) = (le32(tag, pos), le32(tag, pos + 4)) else { break };
        let key_start = pos + 8;
        let Some(nul) = tag.get(key_start..items_end).and_then(|r| r.iter().position(|&c| c == 0)) else {
            break;
        };
        let key = render_latin1(&tag[key_start..key_start + nul]);
        let vstart = key_start + nul + 1;
        let Some(value) = tag.get(vstart..vstart + len as usize) else { break };
        let value = if (flags >> 1) & 3 == 1 { binary_note(value.len()) } else { render_utf8_lossy(value) };
        out.push(MetadataEntry::contextual(format!("APE.{key}"), value, location));
        pos = vstart + len as usize;
    }
    if out.is_empty() {
        out.push(MetadataEntry::contextual("APE", binary_note(tag.len()), location));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v23_tag(frames: &[(&str, Vec<u8>)]) -> Vec<u8> {
        let mut body = Vec::new();
        for (id, data) in frames {
            body.extend(id.as_bytes());
            body.extend((data.len() as u32).to_be_bytes());
            body.extend([0, 0]);
            body.extend(data);
        }
        body.extend([0u8; 8]); // padding
        let n = body.len() as u32;
        let mut tag = b"ID3\x03\x00\x00".to_vec();
        tag.extend([(n >> 21) as u8 & 0x7F, (n >> 14) as u8 & 0x7F, (n >> 7) as u8 & 0x7F, n as u8 & 0x7F]);
        tag.extend(body);
        tag
    }

    #[test]
    fn syncsafe_decoding() {
        assert_eq!(syncsafe(&[0, 0, 2, 1]), Some(257));
        assert_eq!(syncsafe(&[0, 0, 0x80, 0]), None);
    }

    #[test]
    fn text_frames_in_each_encoding() {
        let mut utf16 = vec![1, 0xFF, 0xFE];
        for u in "héllo".encode_utf16() {
            utf16.extend(u.to_le_bytes());
        }
        let tag = v23_tag(&[
            ("TPE1", b"\x00someone".to_vec()),
            ("TIT2", utf16),
            ("TALB", b"\x03caf\xc3\xa9".to_vec()),
            ("TXXX", b"\x00MOOD\x00calm".to_vec()),
            ("COMM", b"\x00engdesc\x00a comment".to_vec()),
        ]);
        assert_eq!(v2_len(&tag), Some(tag.len()));
        let e = v2_entries(&tag, "loc");
        let kv: Vec<_> = e.iter().map(|e| (e.key.as_str(), e.value.as_str())).collect();
        assert_eq!(
            kv,
            vec![
                ("ID3v2.TPE1", "someone"),
                ("ID3v2.TIT2", "héllo"),
                ("ID3v2.TALB", "café"),
                ("ID3v2.TXXX.MOOD", "calm"),
                ("ID3v2.COMM", "a comment"),
            ]
        );
    }

    #[test]
    fn v11_track() {
        let mut t = vec![0u8; 128];
        t[..3].copy_from_slice(b"TAG");
        t[3..8].copy_from_slice(b"Title");
        t[33..40].copy_from_slice(b"someone");
        t[126] = 7;
        t[127] = 17;
        let e = v1_entries(&t, "loc");
        let kv: Vec<_> = e.iter().map(|e| (e.key.as_str(), e.value.as_str())).collect();
        assert_eq!(
            kv,
            vec![("ID3v1.title", "Title"), ("ID3v1.artist", "someone"), ("ID3v1.track", "7"), ("ID3v1.genre", "17")]
        );
    }
}
