//! MPEG audio: tags are excised, frames are copied untouched.

use std::ops::Range;

use crate::audio::id3;
use crate::engine::Outcome;
use crate::error::{Error, Result};
use crate::model::MetadataEntry;
use crate::util::{at, binary_note};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Id3v2Leading,
    Id3v2TrailingWithFooter,
    Id3v1,
    ApeV2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Id3Region {
    pub kind: RegionKind,
    pub span: Range<usize>,
}

const BITRATES: [[u16; 15]; 5] = [
    [0, 32, 64, 96, 128, 160, 192, 224, 256, 288, 320, 352, 384, 416, 448],
    [0, 32, 48, 56, 64, 80, 96, 112, 128, 160, 192, 224, 256, 320, 384],
    [0, 32, 40, 48, 56, 64, 80, 96, 112, 128, 160, 192, 224, 256, 320],
    [0, 32, 48, 56, 64, 80, 96, 112, 128, 144, 160, 176, 192, 224, 256],
    [0, 8, 16, 24, 32, 40, 48, 56, 64, 80, 96, 112, 128, 144, 160],
];

/// Length in bytes of the frame whose 4-byte header starts `h`.
/// Free-format frames are not supported.
pub fn frame_len(h: &[u8]) -> Option<usize> {
    if h.len() < 4 || h[0] != 0xFF || h[1] & 0xE0 != 0xE0 {
        return None;
    }
    let version = (h[1] >> 3) & 3;
    let layer = (h[1] >> 1) & 3;
    let br_idx = (h[2] >> 4) as usize;
    let sr_idx = ((h[2] >> 2) & 3) as usize;
    let pad = ((h[2] >> 1) & 1) as usize;
    if version == 1 || layer == 0 || br_idx == 0 || br_idx == 15 || sr_idx == 3 {
        return None;
    }
    let v1 = version == 3;
    let table = match (v1, layer) {
        (true, 3) => 0,
        (true, 2) => 1,
        (true, _) => 2,
        (false, 3) => 3,
        (false, _) => 4,
    };
    let bitrate = BITRATES[table][br_idx] as usize * 1000;
    let rate = [44100, 48000, 32000][sr_idx] >> match version {
        3 => 0,
        2 => 1,
        _ => 2,
    };
    Some(match layer {
        3 => (12 * bitrate / rate + pad) * 4,
        1 if !v1 => 72 * bitrate / rate + pad,
        _ => 144 * bitrate / rate + pad,
    })
}

/// True when `d` starts with a frame that is followed by another frame
/// header or ends exactly at the end of `d`.
pub fn looks_like_frame_stream(d: &[u8]) -> bool {
    match frame_len(d) {
        Some(n) if n <= d.len() => n == d.len() || frame_len(&d[n..]).is_some(),
        _ => false,
    }
}

fn first_frame(d: &[u8]) -> Option<usize> {
    (0..d.len()).find(|&i| d[i] == 0xFF && looks_like_frame_stream(&d[i..]))
}

/// Locates every tag region and the byte range left for audio.
pub fn tag_regions(d: &[u8]) -> Result<(Vec<Id3Region>, Range<usize>)> {
    let mut regions = Vec::new();
    let mut start = 0;
    while let Some(len) = id3::v2_len(&d[start..]) {
        if start + len > d.len() {
            return Err(Error::malformed("MP3", start, "ID3v2 tag extends past end of file"));
        }
        regions.push(Id3Region {
            kind: RegionKind::Id3v2Leading,
            span: start..start + len,
        });
        start += len;
    }
    let mut end = d.len();
    let mut trailing = Vec::new();
    loop {
        let tail = &d[start..end];
        if tail.len() >= 128 && tail[tail.len() - 128..].starts_with(b"TAG") {
            trailing.push(Id3Region {
                kind: RegionKind::Id3v1,
                span: end - 128..end,
            });
            end -= 128;
            continue;
        }
        if let Some(len) = id3::ape_len(tail).filter(|&l| l <= tail.len()) {
            trailing.push(Id3Region {
                kind: RegionKind::ApeV2,
                span: end - len..end,
            });
            end -= len;
            continue;
        }
        if tail.len() >= 10 && tail[tail.len() - 10..].starts_with(b"3DI") {
            if let Some(size) = id3::syncsafe(&tail[tail.len() - 4..]) {
                let len = size as usize + 20;
                if len <= tail.len() && tail[tail.len() - len..].starts_with(b"ID3") {
                    trailing.push(Id3Region {
                        kind: RegionKind::Id3v2TrailingWithFooter,
                        span: end - len..end,
                    });
                    end -= len;
                    continue;
                }
            }
        }
        break;
    }
    trailing.reverse();
    regions.extend(trailing);
    Ok((regions, start..end))
}

/// Encoder string from a Xing/Info header inside the first frame.
fn encoder_tag(frame: &[u8]) -> Option<String> {
    let head = &frame[..frame.len().min(64)];
    head.windows(4).position(|w| w == b"Xing" || w == b"Info")?;
    let i = ["LAME", "Lavc", "Lavf", "GOGO"]
        .iter()
        .filter_map(|m| frame.windows(4).position(|w| w == m.as_bytes()))
        .min()?;
    let s: String = frame[i..]
        .iter()
        .take(9)
        .take_while(|c| c.is_ascii_graphic() || **c == b' ')
        .map(|&c| c as char)
        .collect();
    Some(s.trim_end().to_string())
}

pub(crate) fn process(d: &[u8]) -> Result<Outcome> {
    let (regions, audio) = tag_regions(d)?;
    let mut out = Outcome::default();
    for r in &regions {
        let tag = &d[r.span.clone()];
        let loc = |name: &str| format!("{name} {}", at(r.span.start));
        let entries = match r.kind {
            RegionKind::Id3v2Leading | RegionKind::Id3v2TrailingWithFooter => {
                id3::v2_entries(tag, &loc(&format!("ID3v2.{} tag", tag[3])))
            }
            RegionKind::Id3v1 => id3::v1_entries(tag, &loc("ID3v1 tag")),
            RegionKind::ApeV2 => id3::ape_entries(tag, &loc("APEv2 tag")),
        };
        for e in entries {
            out.removed(e);
        }
    }
    let body = &d[audio.clone()];
    let first = first_frame(body).ok_or_else(|| Error::malformed("MP3", audio.start, "no MPEG audio frames"))?;
    if first > 0 {
        out.removed(MetadataEntry::unknown("MP3.junk", binary_note(first), at(audio.start)));
    }
    let frames = &body[first..];
    let n = frame_len(frames).unwrap_or(frames.len()).min(frames.len());
    if let Some(enc) = encoder_tag(&frames[..n]) {
        out.retained(MetadataEntry::contextual("MP3.encoder", enc, format!("first frame {}", at(audio.start + first))));
        out.warnings
            .push("encoder tag inside the first audio frame was left in place; removing it is not supported".into());
    }
    out.output = frames.to_vec();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    // MPEG-1 Layer III, 128 kbps, 44.1 kHz, no padding: 417 bytes.
    fn frame() -> Vec<u8> {
        let mut f = vec![0u8; 417];
        f[..4].copy_from_slice(&[0xFF, 0xFB, 0x90, 0x00]);
        f
    }

    #[test]
    fn frame_lengths() {
        assert_eq!(frame_len(&[0xFF, 0xFB, 0x90, 0x00]), Some(417));
        assert_eq!(frame_len(&[0xFF, 0xFB, 0x92, 0x00]), Some(418));
        // MPEG-2 Layer III 64 kbps 22.05 kHz
        assert_eq!(frame_len(&[0xFF, 0xF3, 0x80, 0x00]), Some(208));
        assert_eq!(frame_len(&[0xFF, 0xFB, 0xF0, 0x00]), None);
    }

    #[test]
    fn strips_v1_and_junk() {
        let mut d = b"junk".to_vec();
        let audio: Vec<u8> = [frame(), frame()].concat();
        d.extend(&audio);
        let mut v1 = vec![0u8; 128];
        v1[..3].copy_from_slice(b"TAG");
        v1[33..37].copy_from_slice(b"anon");
        v1[127] = 0xFF;
        d.extend(v1);
        let o = process(&d).unwrap();
        assert_eq!(o.output, audio);
        let keys: Vec<_> = o.findings.iter().map(|f| f.entry.key.as_str()).collect();
        assert_eq!(keys, vec!["ID3v1.artist", "MP3.junk"]);
    }

    #[test]
    fn encoder_tag_is_reported_not_removed() {
        let mut f = frame();
        f[36..40].copy_from_slice(b"Info");
        f[156..165].copy_from_slice(b"LAME3.100");
        let d = [f.clone(), frame()].concat();
        let o = process(&d).unwrap();
        assert_eq!(o.output, d);
        assert!(!o.has_removals());
        assert_eq!(o.findings[0].entry.value, "LAME3.100");
        assert_eq!(o.warnings.len(), 1);
    }

    #[test]
    fn tag_without_audio_fails() {
        let d = b"ID3\x03\x00\x00\x00\x00\x00\x00".to_vec();
        assert!(process(&d).is_err());
    }
}
