//! TIFF/EXIF structure reader used to itemize what an EXIF block holds.

use std::collections::HashSet;

use crate::model::{Category, MetadataEntry};
use crate::util::{binary_note, render_latin1, render_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ifd {
    Primary,
    Exif,
    Gps,
    Interop,
    Thumbnail,
}

#[derive(Debug, Clone)]
pub struct ExifField {
    pub tag: u16,
    pub name: Option<&'static str>,
    pub value: String,
}

#[derive(Debug, Default)]
pub struct Exif {
    pub fields: Vec<ExifField>,
    /// Byte length of the embedded thumbnail, when IFD1 points at one.
    pub thumbnail_len: Option<usize>,
}

impl Exif {
    pub fn entries(&self, location: &str) -> Vec<MetadataEntry> {
        let mut out: Vec<MetadataEntry> = self
            .fields
            .iter()
            .map(|f| match f.name {
                Some(name) => MetadataEntry::contextual(format!("EXIF.{name}"), f.value.clone(), location),
                None => MetadataEntry::new(
                    format!("EXIF.0x{:04X}", f.tag),
                    f.value.clone(),
                    location,
                    Category::Unknown,
                ),
            })
            .collect();
        if let Some(len) = self.thumbnail_len {
            out.push(MetadataEntry::contextual("EXIF.ThumbnailImage", binary_note(len), location));
        }
        out
    }
}

struct Tiff<'a> {
    d: &'a [u8],
    le: bool,
}

impl Tiff<'_> {
    fn u16(&self, at: usize) -> Option<u16> {
        let b = self.d.get(at..at + 2)?;
        Some(if self.le { u16::from_le_bytes([b[0], b[1]]) } else { u16::from_be_bytes([b[0], b[1]]) })
    }

    fn u32(&self, at: usize) -> Option<u32> {
        let b: [u8; 4] = self.d.get(at..at + 4)?.try_into().ok()?;
        Some(if self.le { u32::from_le_bytes(b) } else { u32::from_be_bytes(b) })
    }
}

/// Parses a TIFF-structured EXIF payload (starting at the byte-order mark).
pub fn parse(tiff: &[u8]) -> Option<Exif> {
    let le = match tiff.get(0..2)? {
        b"II" => true,
        b"MM" => false,
        _ => return None,
    };
    let t = Tiff { d: tiff, le };
    if t.u16(2)? != 42 {
        return None;
    }
    let mut exif = Exif::default();
    let mut visited = HashSet::new();
    let mut queue = vec![(t.u32(4)? as usize, Ifd::Primary)];
    while let Some((offset, ifd)) = queue.pop() {
        if offset == 0 || !visited.insert(offset) || visited.len() > 32 {
            continue;
        }
        let Some(count) = t.u16(offset) else { continue };
        let mut thumb_offset = None;
        let mut thumb_len = None;
        for i in 0..count as usize {
            let e = offset + 2 + i * 12;
            let (Some(tag), Some(typ), Some(n)) = (t.u16(e), t.u16(e + 2), t.u32(e + 4)) else {
                break;
            };
            let size = type_size(typ) * n as usize;
            let data_at = if size <= 4 { Some(e + 8) } else { t.u32(e + 8).map(|v| v as usize) };
            let raw = data_at.and_then(|a| tiff.get(a..a.checked_add(size)?));
            match tag {
                0x8769 => queue.push((t.u32(e + 8).unwrap_or(0) as usize, Ifd::Exif)),
                0x8825 => queue.push((t.u32(e + 8).unwrap_or(0) as usize, Ifd::Gps)),
                0xA005 => queue.push((t.u32(e + 8).unwrap_or(0) as usize, Ifd::Interop)),
                _ => {}
            }
            if ifd == Ifd::Thumbnail {
                match tag {
                    0x0201 => thumb_offset = t.u32(e + 8).map(|v| v as usize).filter(|_| typ == 4),
                    0x0202 => thumb_len = t.u32(e + 8).map(|v| v as usize).filter(|_| typ == 4),
                    _ => {}
                }
            }
            let value = match raw {
                Some(raw) => render_value(&t, tag, typ, n as usize, raw),
                None => "(invalid offset)".to_string(),
            };
            exif.fields.push(ExifField {
                tag,
                name: tag_name(ifd, tag),
                value,
            });
        }
        if let (Some(o), Some(l)) = (thumb_offset, thumb_len) {
            if o.checked_add(l).is_some_and(|end| end <= tiff.len()) {
                exif.thumbnail_len = Some(l);
            }
        }
        if ifd == Ifd::Primary {
            if let Some(next) = t.u32(offset + 2 + count as usize * 12) {
                queue.push((next as usize, Ifd::Thumbnail));
            }
        }
        // Keep document order stable: process in push order.
        queue.sort_by_key(|(_, k)| std::cmp::Reverse(ifd_rank(*k)));
    }
    Some(exif)
}

fn ifd_rank(ifd: Ifd) -> u8 {
    match ifd {
        Ifd::Primary => 0,
        Ifd::Exif => 1,
        Ifd::Gps => 2,
        Ifd::Interop => 3,
        Ifd::Thumbnail => 4,
    }
}

fn type_size(typ: u16) -> usize {
    match typ {
        1 | 2 | 6 | 7 => 1,
        3 | 8 => 2,
        4 | 9 | 11 => 4,
        5 | 10 | 12 => 8,
        _ => 0,
    }
}

fn render_value(t: &Tiff, tag: u16, typ: u16, n: usize, raw: &[u8]) -> String {
    const MAX_ITEMS: usize = 16;
    let join = |items: Vec<String>| {
        let more = n > MAX_ITEMS;
        let mut s = items.join(", ");
        if more {
            s.push_str(&format!(", ... ({n} values)"));
        }
        s
    };
    let le = t.le;
    let rd16 = |b: &[u8]| if le { u16::from_le_bytes([b[0], b[1]]) } else { u16::from_be_bytes([b[0], b[1]]) };
    let rd32 = |b: &[u8]| {
        let a = [b[0], b[1], b[2], b[3]];
        if le { u32::from_le_bytes(a) } else { u32::from_be_bytes(a) }
    };
    match typ {
        2 => render_latin1(raw.split(|&c| c == 0).next().unwrap_or_default()),
        3 => join(raw.chunks_exact(2).take(MAX_ITEMS).map(|c| rd16(c).to_string()).collect()),
        8 => join(raw.chunks_exact(2).take(MAX_ITEMS).map(|c| (rd16(c) as i16).to_string()).collect()),
        4 => join(raw.chunks_exact(4).take(MAX_ITEMS).map(|c| rd32(c).to_string()).collect()),
        9 => join(raw.chunks_exact(4).take(MAX_ITEMS).map(|c| (rd32(c) as i32).to_string()).collect()),
        5 => join(
            raw.chunks_exact(8)
                .take(MAX_ITEMS)
                .map(|c| format!("{}/{}", rd32(&c[..4]), rd32(&c[4..])))
                .collect(),
        ),
        10 => join(
            raw.chunks_exact(8)
                .take(MAX_ITEMS)
                .map(|c| format!("{}/{}", rd32(&c[..4]) as i32, rd32(&c[4..]) as i32))
                .collect(),
        ),
        1 | 6 if n <= MAX_ITEMS => join(raw.iter().map(|b| b.to_string()).collect()),
        7 => match tag {
            // Version tags are four ASCII digits
            0x9000 | 0xA000 | 0x0002 if raw.iter().all(u8::is_ascii_graphic) => render_latin1(raw),
            // UserComment: 8-byte character code then text
            0x9286 if raw.len() >= 8 && raw.starts_with(b"ASCII\0\0\0") => render_latin1(&raw[8..]),
            _ => binary_note(raw.len()),
        },
        _ => {
            if raw.len() <= 64 && raw.iter().all(|b| b.is_ascii_graphic() || *b == b' ') && !raw.is_empty() {
                render_text(&String::from_utf8_lossy(raw))
            } else {
                binary_note(raw.len())
            }
        }
    }
}

fn tag_name(ifd: Ifd, tag: u16) -> Option<&'static str> {
    if ifd == Ifd::Gps {
        return Some(match tag {
            0x0000 => "GPSVersionID",
            0x0001 => "GPSLatitudeRef",
            0x0002 => "GPSLatitude",
            0x0003 => "GPSLongitudeRef",
            0x0004 => "GPSLongitude",
            0x0005 => "GPSAltitudeRef",
            0x0006 => "GPSAltitude",
            0x0007 => "GPSTimeStamp",
            0x0012 => "GPSMapDatum",
            0x001D => "GPSDateStamp",
            _ => return None,
        });
    }
    if ifd == Ifd::Interop {
        return Some(match tag {
            0x0001 => "InteropIndex",
            0x0002 => "InteropVersion",
            _ => return None,
        });
    }
    Some(match tag {
        0x0100 => "ImageWidth",
        0x0101 => "ImageHeight",
        0x0102 => "BitsPerSample",
        0x0103 => "Compression",
        0x0106 => "PhotometricInterpretation",
        0x010E => "ImageDescription",
        0x010F => "Make",
        0x0110 => "Model",
        0x0111 => "StripOffsets",
        0x0112 => "Orientation",
        0x0115 => "SamplesPerPixel",
        0x011A => "XResolution",
        0x011B => "YResolution",
        0x0128 => "ResolutionUnit",
        0x0131 => "Software",
        0x0132 => "ModifyDate",
        0x013B => "Artist",
        0x013E => "WhitePoint",
        0x013F => "PrimaryChromaticities",
        0x0201 => "ThumbnailOffset",
        0x0202 => "ThumbnailLength",
        0x0211 => "YCbCrCoefficients",
        0x0213 => "YCbCrPositioning",
        0x0214 => "ReferenceBlackWhite",
        0x8298 => "Copyright",
        0x8769 => "ExifOffset",
        0x8825 => "GPSInfo",
        0x829A => "ExposureTime",
        0x829D => "FNumber",
        0x8822 => "ExposureProgram",
        0x8827 => "ISO",
        0x9000 => "ExifVersion",
        0x9003 => "DateTimeOriginal",
        0x9004 => "CreateDate",
        0x9010 => "OffsetTime",
        0x9011 => "OffsetTimeOriginal",
        0x9101 => "ComponentsConfiguration",
        0x9201 => "ShutterSpeedValue",
        0x9202 => "ApertureValue",
        0x9204 => "ExposureCompensation",
        0x9207 => "MeteringMode",
        0x9209 => "Flash",
        0x920A => "FocalLength",
        0x927C => "MakerNote",
        0x9286 => "UserComment",
        0x9290 => "SubSecTime",
        0x9291 => "SubSecTimeOriginal",
        0x9292 => "SubSecTimeDigitized",
        0xA000 => "FlashpixVersion",
        0xA001 => "ColorSpace",
        0xA002 => "ExifImageWidth",
        0xA003 => "ExifImageHeight",
        0xA005 => "InteropOffset",
        0xA402 => "ExposureMode",
        0xA403 => "WhiteBalance",
        0xA406 => "SceneCaptureType",
        0xA420 => "ImageUniqueID",
        0xA430 => "OwnerName",
        0xA431 => "SerialNumber",
        0xA433 => "LensMake",
        0xA434 => "LensModel",
        0xA435 => "LensSerialNumber",
        _ => return None,
    })
}
