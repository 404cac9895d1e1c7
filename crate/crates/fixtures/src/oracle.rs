//! Independent readers used to check cleaner output. None of this code is
//! shared with the library under test.

use std::io::{Cursor, Read};

/// CRC-32 (ISO-HDLC), one bit at a time.
pub fn crc32(data: &[u8]) -> u32 {
    let mut c = 0xFFFF_FFFFu32;
    for &b in data {
        c ^= b as u32;
        for _ in 0..8 {
            c = if c & 1 != 0 { (c >> 1) ^ 0xEDB8_8320 } else { c >> 1 };
        }
    }
    !c
}

/// Ogg CRC-32: polynomial 0x04C11DB7, init 0, no reflection, no final xor.
pub fn ogg_crc(data: &[u8]) -> u32 {
    let mut c = 0u32;
    for &b in data {
        c ^= (b as u32) << 24;
        for _ in 0..8 {
            c = if c & 0x8000_0000 != 0 { (c << 1) ^ 0x04C1_1DB7 } else { c << 1 };
        }
    }
    c
}

fn be32(d: &[u8], i: usize) -> u32 {
    u32::from_be_bytes(d[i..i + 4].try_into().unwrap())
}

fn le32(d: &[u8], i: usize) -> u32 {
    u32::from_le_bytes(d[i..i + 4].try_into().unwrap())
}

pub struct PngChunk {
    pub kind: [u8; 4],
    pub body: Vec<u8>,
    pub crc_ok: bool,
}

/// Walks PNG chunks. Panics on a bad signature or truncation.
pub fn png_chunks(d: &[u8]) -> Vec<PngChunk> {
    assert_eq!(&d[..8], b"\x89PNG\r\n\x1a\n", "PNG signature");
    let mut pos = 8;
    let mut out = Vec::new();
    while pos < d.len() {
        let len = be32(d, pos) as usize;
        let kind: [u8; 4] = d[pos + 4..pos + 8].try_into().unwrap();
        let body = d[pos + 8..pos + 8 + len].to_vec();
        let stored = be32(d, pos + 8 + len);
        out.push(PngChunk {
            kind,
            crc_ok: crc32(&d[pos + 4..pos + 8 + len]) == stored,
            body,
        });
        pos += 12 + len;
        if &kind == b"IEND" {
            break;
        }
    }
    out
}

pub fn png_idat(d: &[u8]) -> Vec<u8> {
    png_chunks(d).into_iter().filter(|c| &c.kind == b"IDAT").flat_map(|c| c.body).collect()
}

/// JPEG markers in order, with the entropy-coded data of every scan.
pub struct JpegWalk {
    pub markers: Vec<u8>,
    pub segments: Vec<(u8, Vec<u8>)>,
    pub scans: Vec<u8>,
    pub trailing: usize,
}

pub fn jpeg_walk(d: &[u8]) -> JpegWalk {
    assert_eq!(&d[..2], [0xFF, 0xD8], "SOI");
    let mut w = JpegWalk {
        markers: vec![0xD8],
        segments: Vec::new(),
        scans: Vec::new(),
        trailing: 0,
    };
    let mut pos = 2;
    loop {
        while d[pos] == 0xFF && d[pos + 1] == 0xFF {
            pos += 1;
        }
        assert_eq!(d[pos], 0xFF, "marker expected at {pos}");
        let m = d[pos + 1];
        w.markers.push(m);
        pos += 2;
        if m == 0xD9 {
            w.trailing = d.len() - pos;
            return w;
        }
        let len = u16::from_be_bytes([d[pos], d[pos + 1]]) as usize;
        w.segments.push((m, d[pos + 2..pos + len].to_vec()));
        pos += len;
        if m == 0xDA {
            let start = pos;
            while !(d[pos] == 0xFF && d[pos + 1] != 0 && !(0xD0..=0xD7).contains(&d[pos + 1])) {
                pos += 1;
            }
            w.scans.extend(&d[start..pos]);
        }
    }
}

pub fn count(hay: &[u8], needle: &[u8]) -> usize {
    hay.windows(needle.len()).filter(|w| *w == needle).count()
}

pub fn contains(hay: &[u8], needle: &[u8]) -> bool {
    count(hay, needle) > 0
}

pub struct OggPageInfo {
    pub header_type: u8,
    pub granule: u64,
    pub serial: u32,
    pub sequence: u32,
    pub crc_ok: bool,
}

pub fn ogg_pages(d: &[u8]) -> Vec<OggPageInfo> {
    let mut pos = 0;
    let mut out = Vec::new();
    while pos < d.len() {
        assert_eq!(&d[pos..pos + 4], b"OggS", "capture pattern at {pos}");
        let nseg = d[pos + 26] as usize;
        let body: usize = d[pos + 27..pos + 27 + nseg].iter().map(|&s| s as usize).sum();
        let end = pos + 27 + nseg + body;
        let mut page = d[pos..end].to_vec();
        page[22..26].fill(0);
        out.push(OggPageInfo {
            header_type: d[pos + 5],
            granule: u64::from_le_bytes(d[pos + 6..pos + 14].try_into().unwrap()),
            serial: le32(d, pos + 14),
            sequence: le32(d, pos + 18),
            crc_ok: ogg_crc(&page) == le32(d, pos + 22),
        });
        pos = end;
    }
    out
}

/// Every packet of the first logical stream, read with the `ogg` crate.
pub fn ogg_packets(d: &[u8]) -> Vec<Vec<u8>> {
    let mut r = ogg::PacketReader::new(Cursor::new(d));
    let mut out = Vec::new();
    while let Some(p) = r.read_packet().expect("ogg crate rejects the stream") {
        out.push(p.data);
    }
    out
}

/// (block type, is_last, length) of every FLAC metadata block, plus the
/// offset where frames begin.
pub fn flac_blocks(d: &[u8]) -> (Vec<(u8, bool, usize)>, usize) {
    assert_eq!(&d[..4], b"fLaC");
    let mut pos = 4;
    let mut out = Vec::new();
    loop {
        let h = d[pos];
        let len = u32::from_be_bytes([0, d[pos + 1], d[pos + 2], d[pos + 3]]) as usize;
        out.push((h & 0x7F, h & 0x80 != 0, len));
        pos += 4 + len;
        if h & 0x80 != 0 {
            return (out, pos);
        }
    }
}

/// Audio bytes of an MP3: tags at either end are skipped by their own
/// size fields.
pub fn mp3_frames(d: &[u8]) -> Vec<u8> {
    let mut start = 0;
    while d[start..].starts_with(b"ID3") {
        let s = &d[start + 6..start + 10];
        let size = ((s[0] as usize) << 21) | ((s[1] as usize) << 14) | ((s[2] as usize) << 7) | s[3] as usize;
        let footer = if d[start + 5] & 0x10 != 0 { 10 } else { 0 };
        start += 10 + size + footer;
    }
    while !(d[start] == 0xFF && d[start + 1] & 0xE0 == 0xE0) {
        start += 1;
    }
    let mut end = d.len();
    loop {
        if end >= 128 && &d[end - 128..end - 125] == b"TAG" {
            end -= 128;
        } else if end >= 32 && &d[end - 32..end - 24] == b"APETAGEX" {
            let size = le32(d, end - 20) as usize;
            let header = if le32(d, end - 12) & 0x8000_0000 != 0 { 32 } else { 0 };
            end -= size + header;
        } else {
            break;
        }
    }
    d[start..end].to_vec()
}

/// Checks every TAR header checksum; returns the number of headers seen.
pub fn tar_checksums_ok(d: &[u8]) -> Result<usize, String> {
    let mut pos = 0;
    let mut n = 0;
    while pos + 512 <= d.len() {
        let h = &d[pos..pos + 512];
        if h.iter().all(|&b| b == 0) {
            return Ok(n);
        }
        let stored = std::str::from_utf8(&h[148..156])
            .unwrap()
            .trim_matches(|c: char| c == '\0' || c == ' ')
            .to_string();
        let stored = u32::from_str_radix(&stored, 8).map_err(|e| format!("checksum field at {pos}: {e}"))?;
        let sum: u32 = h.iter().enumerate().map(|(i, &b)| if (148..156).contains(&i) { 32 } else { b as u32 }).sum();
        if sum != stored {
            return Err(format!("header at {pos}: checksum {stored} != {sum}"));
        }
        let size_field = std::str::from_utf8(&h[124..136]).unwrap().trim_matches(|c: char| c == '\0' || c == ' ');
        let size = usize::from_str_radix(size_field, 8).unwrap_or(0);
        pos += 512 + size.div_ceil(512) * 512;
        n += 1;
    }
    Err("archive does not end with zero blocks".into())
}

pub fn gunzip(d: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    flate2::read::GzDecoder::new(d).read_to_end(&mut out).unwrap();
    out
}

pub fn bunzip2(d: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    bzip2::read::BzDecoder::new(d).read_to_end(&mut out).unwrap();
    out
}

pub struct TarMember {
    pub path: String,
    pub kind: tar::EntryType,
    pub mode: u32,
    pub uid: u64,
    pub gid: u64,
    pub mtime: u64,
    pub uname: Vec<u8>,
    pub gname: Vec<u8>,
    pub data: Vec<u8>,
}

/// Reads a tar archive with the `tar` crate.
pub fn tar_members(d: &[u8]) -> Vec<TarMember> {
    let mut a = tar::Archive::new(d);
    let mut out = Vec::new();
    for e in a.entries().unwrap() {
        let mut e = e.unwrap();
        let h = e.header().clone();
        let mut data = Vec::new();
        e.read_to_end(&mut data).unwrap();
        out.push(TarMember {
            path: e.path().unwrap().to_string_lossy().into_owned(),
            kind: h.entry_type(),
            mode: h.mode().unwrap(),
            uid: h.uid().unwrap(),
            gid: h.gid().unwrap(),
            mtime: h.mtime().unwrap(),
            uname: h.username_bytes().unwrap_or_default().to_vec(),
            gname: h.groupname_bytes().unwrap_or_default().to_vec(),
            data,
        });
    }
    out
}

pub struct ZipMember {
    pub name: String,
    pub data: Vec<u8>,
    pub stored: bool,
    pub dos_datetime: (u16, u8, u8, u8, u8, u8),
    pub extra_len: usize,
    pub comment: String,
}

/// Reads every member with the `zip` crate, which verifies CRCs.
pub fn zip_members(d: &[u8]) -> Result<Vec<ZipMember>, String> {
    let mut a = zip::ZipArchive::new(Cursor::new(d)).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for i in 0..a.len() {
        let mut f = a.by_index(i).map_err(|e| e.to_string())?;
        let mut data = Vec::new();
        f.read_to_end(&mut data).map_err(|e| format!("{}: {e}", f.name()))?;
        let t = f.last_modified().unwrap_or_default();
        out.push(ZipMember {
            name: f.name().to_string(),
            stored: f.compression() == zip::CompressionMethod::Stored,
            dos_datetime: (t.year(), t.month(), t.day(), t.hour(), t.minute(), t.second()),
            extra_len: f.extra_data().map_or(0, |e| e.len()),
            comment: f.comment().to_string(),
            data,
        });
    }
    Ok(out)
}

pub fn zip_archive_comment(d: &[u8]) -> Vec<u8> {
    zip::ZipArchive::new(Cursor::new(d)).unwrap().comment().to_vec()
}

/// `Target` attributes of every relationship in a `.rels` part.
pub fn rels_targets(xml: &str) -> Vec<(String, bool)> {
    let mut out = Vec::new();
    for rel in xml.split("<Relationship ").skip(1) {
        let attr = |name: &str| {
            rel.split(&format!("{name}=\"")).nth(1).and_then(|s| s.split('"').next()).map(str::to_string)
        };
        if let Some(t) = attr("Target") {
            out.push((t, attr("TargetMode").as_deref() == Some("External")));
        }
    }
    out
}

/// Decoded content stream of every page, in page order, via `lopdf`.
pub fn pdf_page_contents(d: &[u8]) -> Vec<Vec<u8>> {
    let doc = lopdf::Document::load_mem(d).expect("lopdf cannot load the document");
    doc.get_pages().values().map(|&id| doc.get_page_content(id).unwrap()).collect()
}

pub fn pdf_page_count(d: &[u8]) -> usize {
    lopdf::Document::load_mem(d).map(|doc| doc.get_pages().len()).unwrap_or(0)
}
