//! Content-first format detection.

use crate::archive::zip;
use crate::audio::{id3, mp3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KindTag {
    Png,
    Jpeg,
    Zip,
    Tar,
    TarGz,
    TarBz2,
    Ooxml,
    Odf,
    Mp3,
    OggVorbis,
    Flac,
    Pdf,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    Magic,
    ExtensionOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FileKind {
    pub tag: KindTag,
    pub confidence: Confidence,
}

impl FileKind {
    const fn magic(tag: KindTag) -> Self {
        FileKind {
            tag,
            confidence: Confidence::Magic,
        }
    }

    pub const UNKNOWN: FileKind = FileKind {
        tag: KindTag::Unknown,
        confidence: Confidence::ExtensionOnly,
    };
}

pub(crate) const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];
pub(crate) const ODF_MIME_PREFIX: &[u8] = b"application/vnd.oasis.opendocument";

/// Identifies the container format of `data`.
///
/// Signatures always win over the name. The name is consulted only for
/// pre-POSIX tar archives, which carry no magic of their own.
pub fn detect_kind(data: &[u8], name_hint: Option<&str>) -> FileKind {
    use KindTag::*;

    if data.starts_with(&PNG_SIGNATURE) {
        return FileKind::magic(Png);
    }
    if data.starts_with(&[0xFF, 0xD8, 0xFF]) {
        return FileKind::magic(Jpeg);
    }
    if data.starts_with(b"PK\x03\x04") || data.starts_with(b"PK\x05\x06") {
        return FileKind::magic(refine_zip(data));
    }
    if data.starts_with(&[0x1F, 0x8B]) {
        return FileKind::magic(TarGz);
    }
    if data.len() >= 4 && data.starts_with(b"BZh") && (b'1'..=b'9').contains(&data[3]) {
        return FileKind::magic(TarBz2);
    }
    if data.get(257..262) == Some(b"ustar") {
        return FileKind::magic(Tar);
    }
    if data.starts_with(b"fLaC") {
        return FileKind::magic(Flac);
    }
    if data.starts_with(b"OggS") {
        return FileKind::magic(OggVorbis);
    }
    if data.starts_with(b"%PDF-") {
        return FileKind::magic(Pdf);
    }
    if data.starts_with(b"ID3") {
        // FLAC files are sometimes wrapped in a leading ID3v2 tag.
        let after = id3::leading_tags_end(data).unwrap_or(0);
        if after > 0 && data[after..].starts_with(b"fLaC") {
            return FileKind::magic(Flac);
        }
        return FileKind::magic(Mp3);
    }
    if mp3::looks_like_frame_stream(data) {
        return FileKind::magic(Mp3);
    }

    if let Some(name) = name_hint {
        let lower = name.to_ascii_lowercase();
        if lower.ends_with(".tar") && crate::archive::tar::header_checksum_ok(data) {
            return FileKind {
                tag: Tar,
                confidence: Confidence::ExtensionOnly,
            };
        }
    }
    FileKind::UNKNOWN
}

fn refine_zip(data: &[u8]) -> KindTag {
    let Ok(archive) = zip::ZipArchive::parse(data) else {
        return KindTag::Zip;
    };
    if let Some(entry) = archive.entries.iter().find(|e| e.name == "mimetype") {
        if let Ok(body) = entry.contents(data) {
            if body.starts_with(ODF_MIME_PREFIX) {
                return KindTag::Odf;
            }
        }
    }
    if archive.entries.iter().any(|e| e.name == "[Content_Types].xml") {
        return KindTag::Ooxml;
    }
    KindTag::Zip
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_unknown() {
        assert_eq!(detect_kind(&[], None), FileKind::UNKNOWN);
        assert_eq!(detect_kind(&[], Some("x.tar")), FileKind::UNKNOWN);
    }

    #[test]
    fn png_signature() {
        let mut d = PNG_SIGNATURE.to_vec();
        d.extend_from_slice(&[0, 0, 0, 13]);
        d.extend_from_slice(b"IHDR");
        assert_eq!(detect_kind(&d, None), FileKind::magic(KindTag::Png));
    }

    #[test]
    fn magic_beats_extension() {
        let d = b"%PDF-1.4\n";
        assert_eq!(detect_kind(d, Some("photo.jpg")).tag, KindTag::Pdf);
        assert_eq!(detect_kind(&[0xFF, 0xD8, 0xFF, 0xE0], Some("a.pdf")).tag, KindTag::Jpeg);
    }

    #[test]
    fn simple_signatures() {
        assert_eq!(detect_kind(b"fLaC\0\0\0\x22", None).tag, KindTag::Flac);
        assert_eq!(detect_kind(b"OggS\0\x02", None).tag, KindTag::OggVorbis);
        assert_eq!(detect_kind(b"BZh91AY&SY", None).tag, KindTag::TarBz2);
        assert_eq!(detect_kind(&[0x1F, 0x8B, 8, 0], None).tag, KindTag::TarGz);
        assert_eq!(detect_kind(b"ID3\x03\0\0\0\0\0\0", None).tag, KindTag::Mp3);
        assert_eq!(detect_kind(b"BZhx", None).tag, KindTag::Unknown);
    }

    #[test]
    fn random_bytes_unknown() {
        let noise: Vec<u8> = (0u32..512).map(|i| (i.wrapping_mul(2_654_435_761) >> 13) as u8).collect();
        assert_eq!(detect_kind(&noise, Some("noise.bin")), FileKind::UNKNOWN);
    }
}
