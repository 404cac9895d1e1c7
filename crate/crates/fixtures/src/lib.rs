//! Test fixtures built with reference producers, plus independent oracles
//! that re-read container structure without going through demeta.

pub mod archive;
pub mod audio;
pub mod check;
pub mod image;
pub mod oracle;
pub mod pdf;
pub mod tiff;

/// What must survive cleaning, in a form an oracle can compare.
#[derive(Debug, Clone, PartialEq)]
pub enum Content {
    /// Concatenated image data (IDAT bodies, JPEG scans) or audio frames.
    Stream(Vec<u8>),
    /// Audio packets after the header packets.
    Packets(Vec<Vec<u8>>),
    /// Decoded page content streams.
    Pages(Vec<Vec<u8>>),
    /// Archive member names and data.
    Members(Vec<(String, Vec<u8>)>),
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub bytes: Vec<u8>,
    pub content: Content,
}

impl Fixture {
    pub fn new(name: &str, bytes: Vec<u8>, content: Content) -> Self {
        Fixture {
            name: name.to_string(),
            bytes,
            content,
        }
    }

    pub fn ext(&self) -> &str {
        let n = self.name.as_str();
        for e in [".tar.gz", ".tar.bz2"] {
            if n.ends_with(e) {
                return &e[1..];
            }
        }
        n.rsplit('.').next().unwrap_or("")
    }
}

/// Every metadata-bearing fixture, at least three per format.
pub fn corpus() -> Vec<Fixture> {
    let mut v = image::png_fixtures();
    v.extend(image::jpeg_fixtures());
    v.extend(archive::zip_fixtures());
    v.extend(archive::tar_fixtures());
    v.extend(archive::ooxml_fixtures());
    v.extend(archive::odf_fixtures());
    v.extend(audio::mp3_fixtures());
    v.extend(audio::ogg_fixtures());
    v.extend(audio::flac_fixtures());
    v.extend(pdf::pdf_fixtures());
    v
}
