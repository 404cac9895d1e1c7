//! Content-preservation and structural checks on cleaned outputs, built
//! from the oracles only.

use crate::oracle::*;
use crate::{Content, Fixture};

fn kind_of(name: &str, d: &[u8]) -> &'static str {
    let n = name.to_ascii_lowercase();
    if d.starts_with(b"\x89PNG") {
        "png"
    } else if d.starts_with(&[0xFF, 0xD8]) {
        "jpeg"
    } else if d.starts_with(b"PK\x03\x04") {
        "zip"
    } else if d.starts_with(b"%PDF") {
        "pdf"
    } else if d.starts_with(b"OggS") {
        "ogg"
    } else if d.starts_with(b"fLaC") {
        "flac"
    } else if d.starts_with(&[0x1F, 0x8B]) {
        "gzip"
    } else if d.starts_with(b"BZh") {
        "bzip2"
    } else if n.ends_with(".mp3") {
        "mp3"
    } else if n.ends_with(".tar") {
        "tar"
    } else {
        "other"
    }
}

fn same(what: &str, a: &[u8], b: &[u8]) -> Result<(), String> {
    if a == b {
        Ok(())
    } else {
        Err(format!("{what} differs ({} vs {} bytes)", a.len(), b.len()))
    }
}

/// Whether `cleaned` keeps the payload of the archive member `orig`:
/// nested formats are compared through their own content oracle.
pub fn member_payload_kept(name: &str, orig: &[u8], cleaned: &[u8]) -> Result<(), String> {
    match kind_of(name, orig) {
        "png" => same(&format!("{name}: IDAT"), &png_idat(orig), &png_idat(cleaned)),
        "jpeg" => same(&format!("{name}: scan"), &jpeg_walk(orig).scans, &jpeg_walk(cleaned).scans),
        "zip" => {
            let a = zip_members(orig)?;
            let b = zip_members(cleaned)?;
            for m in a.iter().filter(|m| !m.name.ends_with('/')) {
                let o = b.iter().find(|x| x.name == m.name).ok_or(format!("{name}: {} missing", m.name))?;
                member_payload_kept(&format!("{name}/{}", m.name), &m.data, &o.data)?;
            }
            Ok(())
        }
        _ => same(name, orig, cleaned),
    }
}

fn archive_payloads(f: &Fixture, out: &[u8]) -> Result<Vec<(String, Vec<u8>)>, String> {
    Ok(match f.ext() {
        "tar" => tar_members(out).into_iter().map(|m| (m.path, m.data)).collect(),
        "tar.gz" => tar_members(&gunzip(out)).into_iter().map(|m| (m.path, m.data)).collect(),
        "tar.bz2" => tar_members(&bunzip2(out)).into_iter().map(|m| (m.path, m.data)).collect(),
        _ => zip_members(out)?.into_iter().map(|m| (m.name, m.data)).collect(),
    })
}

/// Exact equality of the fixture's content under its format's oracle.
pub fn content_preserved(f: &Fixture, out: &[u8]) -> Result<(), String> {
    match &f.content {
        Content::Stream(s) => {
            let got = match f.ext() {
                "png" => png_idat(out),
                "jpg" => jpeg_walk(out).scans,
                "mp3" => mp3_frames(out),
                "flac" => out[flac_blocks(out).1..].to_vec(),
                e => return Err(format!("no stream oracle for .{e}")),
            };
            same("content stream", s, &got)
        }
        Content::Packets(p) => {
            let got = ogg_packets(out);
            if got.len() < 3 || got[3..] != p[..] {
                return Err(format!("audio packets differ ({} packets after headers)", got.len().saturating_sub(3)));
            }
            Ok(())
        }
        Content::Pages(p) => {
            let got = pdf_page_contents(out);
            if &got != p {
                return Err(format!("page contents differ ({} pages)", got.len()));
            }
            Ok(())
        }
        Content::Members(m) => {
            let got = archive_payloads(f, out)?;
            for (name, data) in m {
                let (_, o) = got
                    .iter()
                    .find(|(n, _)| n.trim_end_matches('/') == name)
                    .ok_or(format!("member {name} missing"))?;
                member_payload_kept(name, data, o)?;
            }
            Ok(())
        }
    }
}

fn zip_valid(d: &[u8]) -> Result<(), String> {
    for m in zip_members(d)? {
        if !m.name.ends_with('/') {
            structurally_valid(&m.name, &m.data).map_err(|e| format!("{}: {e}", m.name))?;
        }
    }
    Ok(())
}

fn tar_valid(d: &[u8]) -> Result<(), String> {
    tar_checksums_ok(d)?;
    for m in tar_members(d) {
        if m.kind == tar::EntryType::Regular {
            structurally_valid(&m.path, &m.data).map_err(|e| format!("{}: {e}", m.path))?;
        }
    }
    Ok(())
}

/// Re-parses `d` with independent readers: chunk, page and member CRCs,
/// TAR header checksums, and a full decode where a decoder is at hand.
/// Recurses into archive members.
pub fn structurally_valid(name: &str, d: &[u8]) -> Result<(), String> {
    let guard = |f: &dyn Fn() -> Result<(), String>| {
        std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|_| Err("oracle could not parse".into()))
    };
    guard(&|| match kind_of(name, d) {
        "png" => {
            let c = png_chunks(d);
            if let Some(bad) = c.iter().find(|c| !c.crc_ok) {
                return Err(format!("bad CRC on {}", String::from_utf8_lossy(&bad.kind)));
            }
            if c.last().map(|c| &c.kind) != Some(b"IEND") {
                return Err("no IEND".into());
            }
            Ok(())
        }
        "jpeg" => {
            let w = jpeg_walk(d);
            if w.trailing != 0 {
                return Err(format!("{} bytes after EOI", w.trailing));
            }
            Ok(())
        }
        "zip" => zip_valid(d),
        "tar" => tar_valid(d),
        "gzip" => tar_valid(&gunzip(d)),
        "bzip2" => tar_valid(&bunzip2(d)),
        "ogg" => {
            let p = ogg_pages(d);
            if p.iter().any(|p| !p.crc_ok) {
                return Err("bad Ogg page CRC".into());
            }
            if p.iter().enumerate().any(|(i, p)| p.sequence != i as u32) {
                return Err("page sequence gap".into());
            }
            ogg_packets(d);
            Ok(())
        }
        "flac" => {
            let (b, end) = flac_blocks(d);
            if b.first().map(|b| (b.0, b.2)) != Some((0, 34)) || end > d.len() {
                return Err("bad FLAC metadata".into());
            }
            Ok(())
        }
        "mp3" => {
            if mp3_frames(d).is_empty() {
                return Err("no frames".into());
            }
            Ok(())
        }
        "pdf" => lopdf::Document::load_mem(d).map(|_| ()).map_err(|e| e.to_string()),
        _ => Ok(()),
    })
}
