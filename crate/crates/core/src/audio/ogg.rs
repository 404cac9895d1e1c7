//! Ogg Vorbis: the comment packet is replaced and the header pages relaid.

use crate::audio::vorbis::VorbisComment;
use crate::engine::Outcome;
use crate::error::{Error, Result};
use crate::model::MetadataEntry;
use crate::util::{at, le32, le64};

/// Comment packet with an empty vendor string, no comments and the framing bit.
pub const MINIMAL_COMMENT_PACKET: [u8; 16] = [3, b'v', b'o', b'r', b'b', b'i', b's', 0, 0, 0, 0, 0, 0, 0, 0, 1];

const CONTINUED: u8 = 0x01;
const BOS: u8 = 0x02;
const EOS: u8 = 0x04;

static CRC_TABLE: [u32; 256] = {
    let mut t = [0u32; 256];
    let mut i = 0;
    while i < 256 {
        let mut r = (i as u32) << 24;
        let mut k = 0;
        while k < 8 {
            r = if r & 0x8000_0000 != 0 { (r << 1) ^ 0x04C1_1DB7 } else { r << 1 };
            k += 1;
        }
        t[i] = r;
        i += 1;
    }
    t
};

pub fn crc(data: &[u8]) -> u32 {
    data.iter()
        .fold(0u32, |c, &b| (c << 8) ^ CRC_TABLE[((c >> 24) as u8 ^ b) as usize])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OggPage {
    pub offset: usize,
    pub header_type: u8,
    pub granule: u64,
    pub serial: u32,
    pub sequence: u32,
    pub crc: u32,
    pub segments: Vec<u8>,
    pub payload: Vec<u8>,
}

impl OggPage {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut b = Vec::with_capacity(27 + self.segments.len() + self.payload.len());
        b.extend(b"OggS\0");
        b.push(self.header_type);
        b.extend(self.granule.to_le_bytes());
        b.extend(self.serial.to_le_bytes());
        b.extend(self.sequence.to_le_bytes());
        b.extend([0; 4]);
        b.push(self.segments.len() as u8);
        b.extend(&self.segments);
        b.extend(&self.payload);
        let c = crc(&b);
        b[22..26].copy_from_slice(&c.to_le_bytes());
        b
    }

    /// True when the last packet on the page continues onto the next one.
    fn ends_open(&self) -> bool {
        self.segments.last() == Some(&255)
    }
}

pub fn parse_pages(d: &[u8]) -> Result<Vec<OggPage>> {
    let mut pages = Vec::new();
    let mut pos = 0;
    while pos < d.len() {
        let bad = |reason: &str| Error::malformed("Ogg", pos, reason.to_string());
        if d.len() - pos < 27 || &d[pos..pos + 4] != b"OggS" {
            return Err(bad("expected page capture pattern"));
        }
        if d[pos + 4] != 0 {
            return Err(bad("unsupported stream structure version"));
        }
        let nseg = d[pos + 26] as usize;
        let segments = d.get(pos + 27..pos + 27 + nseg).ok_or_else(|| bad("truncated segment table"))?;
        let body_len: usize = segments.iter().map(|&s| s as usize).sum();
        let end = pos + 27 + nseg + body_len;
        let raw = d.get(pos..end).ok_or_else(|| bad("truncated page"))?;
        let stored = le32(raw, 22).unwrap_or(0);
        let mut zeroed = raw.to_vec();
        zeroed[22..26].fill(0);
        if crc(&zeroed) != stored {
            return Err(bad("page CRC mismatch"));
        }
        pages.push(OggPage {
            offset: pos,
            header_type: raw[5],
            granule: le64(raw, 6).unwrap_or(0),
            serial: le32(raw, 14).unwrap_or(0),
            sequence: le32(raw, 18).unwrap_or(0),
            crc: stored,
            segments: segments.to_vec(),
            payload: raw[27 + nseg..].to_vec(),
        });
        pos = end;
    }
    if pages.is_empty() {
        return Err(Error::malformed("Ogg", 0, "no pages"));
    }
    Ok(pages)
}

/// Reassembles packets; each is paired with the index of the page it starts on.
pub fn packets(pages: &[OggPage]) -> Vec<(usize, Vec<u8>)> {
    let mut out: Vec<(usize, Vec<u8>)> = Vec::new();
    let mut open = false;
    for (i, p) in pages.iter().enumerate() {
        let mut off = 0;
        for &s in &p.segments {
            let chunk = &p.payload[off..off + s as usize];
            off += s as usize;
            if open {
                out.last_mut().unwrap().1.extend(chunk);
            } else {
                out.push((i, chunk.to_vec()));
            }
            open = s == 255;
        }
    }
    out
}

/// Lays packets out on pages of at most 255 lacing values.
/// `granule` is stamped on pages where a packet ends, -1 elsewhere.
fn lay_out(packets: &[&[u8]], serial: u32, first_seq: u32, granule: u64) -> Vec<OggPage> {
    let mut pages = Vec::new();
    let mut segs: Vec<(u8, &[u8], bool)> = Vec::new(); // lacing, bytes, ends packet
    for p in packets {
        let mut chunks: Vec<&[u8]> = p.chunks(255).collect();
        if p.len() % 255 == 0 {
            chunks.push(&[]);
        }
        let last = chunks.len() - 1;
        for (i, c) in chunks.into_iter().enumerate() {
            segs.push((c.len() as u8, c, i == last));
        }
    }
    let mut continued = false;
    for group in segs.chunks(255) {
        let ends = group.iter().any(|s| s.2);
        pages.push(OggPage {
            offset: 0,
            header_type: if continued { CONTINUED } else { 0 },
            granule: if ends { granule } else { u64::MAX },
            serial,
            sequence: first_seq + pages.len() as u32,
            crc: 0,
            segments: group.iter().map(|s| s.0).collect(),
            payload: group.iter().flat_map(|s| s.1.iter().copied()).collect(),
        });
        continued = !group.last().unwrap().2;
    }
    pages
}

pub(crate) fn process(d: &[u8]) -> Result<Outcome> {
    let pages = parse_pages(d)?;
    let serial = pages[0].serial;
    if pages.iter().any(|p| p.serial != serial) {
        return Err(Error::Unsupported("multiplexed or chained Ogg streams".into()));
    }
    let pkts = packets(&pages);
    let ident = &pkts[0].1;
    if !ident.starts_with(b"\x01vorbis") {
        let codec = if ident.starts_with(b"OpusHead") { "Ogg Opus" } else { "Ogg stream with a non-Vorbis codec" };
        return Err(Error::Unsupported(codec.into()));
    }
    if pkts.len() < 3 || !pkts[1].1.starts_with(b"\x03vorbis") || !pkts[2].1.starts_with(b"\x05vorbis") {
        return Err(Error::malformed("Ogg", 0, "missing Vorbis header packets"));
    }

    // Audio pages are copied as they are, so the first audio packet must
    // begin its page.
    let header_pages = match pkts.get(3) {
        Some(&(p, _)) => {
            if pkts[2].0 == p || pages[p - 1].ends_open() {
                return Err(Error::malformed("Ogg", pages[p].offset, "audio data shares a page with the setup header"));
            }
            p
        }
        None => pages.len(),
    };

    let comment = &pkts[1].1;
    let comment_page = &pages[pkts[1].0];
    let location = format!("comment packet, page {} {}", comment_page.sequence, at(comment_page.offset));
    let mut out = Outcome::default();
    if comment.as_slice() != MINIMAL_COMMENT_PACKET {
        let parsed = VorbisComment::parse(&comment[7..]);
        let mut entries = parsed.as_ref().map(|(vc, _)| vc.entries(&location)).unwrap_or_default();
        if entries.is_empty() {
            entries.push(MetadataEntry::unknown(
                "Vorbis.comment_packet",
                format!("non-minimal comment packet ({} bytes)", comment.len()),
                &location,
            ));
        }
        for e in entries {
            out.removed(e);
        }
    }

    let mut relaid = lay_out(&[ident], serial, 0, 0);
    relaid[0].header_type = BOS;
    relaid.extend(lay_out(&[&MINIMAL_COMMENT_PACKET, &pkts[2].1], serial, 1, 0));
    for p in &pages[header_pages..] {
        relaid.push(OggPage {
            header_type: p.header_type & !BOS,
            sequence: relaid.len() as u32,
            ..p.clone()
        });
    }
    if header_pages == pages.len() && pages.last().unwrap().header_type & EOS != 0 {
        relaid.last_mut().unwrap().header_type |= EOS;
    }
    out.output = relaid.iter().flat_map(|p| p.to_bytes()).collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crc_matches_bitwise_definition() {
        fn bitwise(d: &[u8]) -> u32 {
            let mut c = 0u32;
            for &b in d {
                c ^= (b as u32) << 24;
                for _ in 0..8 {
                    c = if c & 0x8000_0000 != 0 { (c << 1) ^ 0x04C1_1DB7 } else { c << 1 };
                }
            }
            c
        }
        let d: Vec<u8> = (0..=255u8).cycle().take(1000).collect();
        assert_eq!(crc(&d), bitwise(&d));
    }

    #[test]
    fn layout_handles_multiple_of_255() {
        let a = vec![7u8; 510];
        let pages = lay_out(&[&a], 1, 0, 0);
        assert_eq!(pages[0].segments, vec![255, 255, 0]);
        assert_eq!(packets(&pages)[0].1, a);
    }

    #[test]
    fn layout_spans_pages() {
        let a = vec![1u8; 255 * 300];
        let b = vec![2u8; 10];
        let pages = lay_out(&[&a, &b], 9, 1, 0);
        assert_eq!(pages.len(), 2);
        assert_eq!(pages[0].granule, u64::MAX);
        assert_eq!(pages[1].header_type, CONTINUED);
        assert_eq!(pages[1].sequence, 2);
        let pk = packets(&pages);
        assert_eq!(pk[0].1, a);
        assert_eq!(pk[1].1, b);
    }
}
