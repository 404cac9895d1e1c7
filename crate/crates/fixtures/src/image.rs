//! PNG and JPEG fixtures.

use std::io::Write;

use crate::oracle::crc32;
use crate::{Content, Fixture};

pub const PHOTOSHOP_CS3: &str = "Adobe Photoshop CS3 Windows";

pub fn png_chunk(kind: &[u8; 4], body: &[u8]) -> Vec<u8> {
    let mut c = (body.len() as u32).to_be_bytes().to_vec();
    c.extend(kind);
    c.extend(body);
    let crc = crc32(&c[4..]);
    c.extend(crc.to_be_bytes());
    c
}

fn zlib(data: &[u8]) -> Vec<u8> {
    let mut e = flate2::write::ZlibEncoder::new(Vec::new(), flate2::Compression::default());
    e.write_all(data).unwrap();
    e.finish().unwrap()
}

/// IHDR plus the compressed pixels of an 8x8 RGB gradient, split over two
/// IDAT chunks.
fn png_parts() -> (Vec<u8>, Vec<Vec<u8>>) {
    let mut ihdr = Vec::new();
    ihdr.extend(8u32.to_be_bytes());
    ihdr.extend(8u32.to_be_bytes());
    ihdr.extend([8, 2, 0, 0, 0]);
    let mut raw = Vec::new();
    for y in 0..8u8 {
        raw.push(0);
        for x in 0..8u8 {
            raw.extend([x * 32, y * 32, 128]);
        }
    }
    let z = zlib(&raw);
    let (a, b) = z.split_at(z.len() / 2);
    (png_chunk(b"IHDR", &ihdr), vec![png_chunk(b"IDAT", a), png_chunk(b"IDAT", b)])
}

fn png_with(before: &[Vec<u8>], after: &[Vec<u8>], trailer: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let (ihdr, idats) = png_parts();
    let mut d = b"\x89PNG\r\n\x1a\n".to_vec();
    d.extend(ihdr);
    for c in before {
        d.extend(c);
    }
    let mut idat = Vec::new();
    for c in &idats {
        d.extend(c);
        idat.extend(&c[8..c.len() - 4]);
    }
    for c in after {
        d.extend(c);
    }
    d.extend(png_chunk(b"IEND", b""));
    d.extend(trailer);
    (d, idat)
}

pub fn bare_png() -> Vec<u8> {
    png_with(&[], &[], b"").0
}

pub fn xmp_packet(creator_tool: &str) -> String {
    format!(
        r#"<?xpacket begin="" id="W5M0MpCehiHzreSzNTczkc9d"?><x:xmpmeta xmlns:x="adobe:ns:meta/" x:xmptk="Adobe XMP Core 4.1-c036"><rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"><rdf:Description rdf:about="" xmlns:xmp="http://ns.adobe.com/xap/1.0/" xmlns:dc="http://purl.org/dc/elements/1.1/" xmp:CreatorTool="{creator_tool}" xmp:CreateDate="2008-06-21T14:31:05+02:00"><dc:creator><rdf:Seq><rdf:li>Alice Example</rdf:li></rdf:Seq></dc:creator></rdf:Description></rdf:RDF></x:xmpmeta><?xpacket end="w"?>"#
    )
}

pub fn png_fixtures() -> Vec<Fixture> {
    let text = |k: &str, v: &str| png_chunk(b"tEXt", format!("{k}\0{v}").as_bytes());
    let mut ztxt = b"Comment\0\0".to_vec();
    ztxt.extend(zlib(b"shot on the roof of building 7"));
    let time = png_chunk(b"tIME", &[0x07, 0xE3, 6, 21, 14, 31, 5]);
    let phys = png_chunk(b"pHYs", &[0, 0, 0x0B, 0x13, 0, 0, 0x0B, 0x13, 1]);
    let (a, a_idat) = png_with(&[text("Author", "Alice Example"), text("Software", "GIMP 2.10"), time], &[png_chunk(b"zTXt", &ztxt)], b"");

    let mut itxt = b"XML:com.adobe.xmp\0\0\0\0\0".to_vec();
    itxt.extend(xmp_packet(PHOTOSHOP_CS3).as_bytes());
    let exif = crate::tiff::build(&[crate::tiff::Ifd::new(vec![
        (0x010F, crate::tiff::Val::Ascii("Canon".into())),
        (0x0131, crate::tiff::Val::Ascii(PHOTOSHOP_CS3.into())),
    ])]);
    let (b, b_idat) = png_with(&[png_chunk(b"iTXt", &itxt), png_chunk(b"eXIf", &exif), phys], &[], b"");

    let (c, c_idat) = png_with(
        &[png_chunk(b"prVt", b"camera serial 0042"), png_chunk(b"gAMA", &45455u32.to_be_bytes())],
        &[text("Comment", "appended")],
        b"hidden trailer bytes",
    );
    vec![
        Fixture::new("text_chunks.png", a, Content::Stream(a_idat)),
        Fixture::new("xmp_exif.png", b, Content::Stream(b_idat)),
        Fixture::new("private_trailer.png", c, Content::Stream(c_idat)),
    ]
}

/// A 16x16 RGB gradient encoded with `jpeg-encoder`, with extra APPn
/// segments added through the encoder.
fn encode_rgb(size: u16, apps: &[(u8, Vec<u8>)], icc: Option<&[u8]>) -> Vec<u8> {
    let mut pixels = Vec::new();
    for y in 0..size {
        for x in 0..size {
            pixels.extend([(x * 255 / size) as u8, (y * 255 / size) as u8, 90]);
        }
    }
    let mut out = Vec::new();
    let mut enc = jpeg_encoder::Encoder::new(&mut out, 85);
    for (n, data) in apps {
        enc.add_app_segment(*n, data).unwrap();
    }
    if let Some(p) = icc {
        enc.add_icc_profile(p).unwrap();
    }
    enc.encode(&pixels, size, size, jpeg_encoder::ColorType::Rgb).unwrap();
    out
}

fn encode_cmyk(apps: &[(u8, Vec<u8>)]) -> Vec<u8> {
    let mut pixels = Vec::new();
    for y in 0..16u8 {
        for x in 0..16u8 {
            pixels.extend([x * 16, y * 16, 40, 10]);
        }
    }
    let mut out = Vec::new();
    let mut enc = jpeg_encoder::Encoder::new(&mut out, 85);
    for (n, data) in apps {
        enc.add_app_segment(*n, data).unwrap();
    }
    enc.encode(&pixels, 16, 16, jpeg_encoder::ColorType::Cmyk).unwrap();
    out
}

/// Inserts a COM segment right after SOI.
fn with_comment(jpeg: Vec<u8>, text: &str) -> Vec<u8> {
    let mut d = jpeg[..2].to_vec();
    d.extend([0xFF, 0xFE]);
    d.extend(((text.len() + 2) as u16).to_be_bytes());
    d.extend(text.as_bytes());
    d.extend(&jpeg[2..]);
    d
}

fn exif_app1(tiff: Vec<u8>) -> Vec<u8> {
    let mut d = b"Exif\0\0".to_vec();
    d.extend(tiff);
    d
}

fn xmp_app1(packet: &str) -> Vec<u8> {
    let mut d = b"http://ns.adobe.com/xap/1.0/\0".to_vec();
    d.extend(packet.as_bytes());
    d
}

pub fn photoshop_app13() -> Vec<u8> {
    let mut iptc = Vec::new();
    for (tag, v) in [(0x50u8, "Alice Example"), (0x74, "(c) 2008 Example Press"), (0x5A, "Lyon")] {
        iptc.extend([0x1C, 0x02, tag]);
        iptc.extend((v.len() as u16).to_be_bytes());
        iptc.extend(v.as_bytes());
    }
    let mut d = b"Photoshop 3.0\0".to_vec();
    d.extend(b"8BIM");
    d.extend(0x0404u16.to_be_bytes());
    d.extend([0, 0]);
    d.extend((iptc.len() as u32).to_be_bytes());
    d.extend(&iptc);
    if iptc.len() % 2 == 1 {
        d.push(0);
    }
    d
}

/// The thumbnail embedded in `exif_photo`; it carries its own JFIF
/// header and comment.
pub fn thumbnail() -> Vec<u8> {
    with_comment(encode_rgb(8, &[], None), "thumbnail of IMG_0042")
}

pub fn fake_icc() -> Vec<u8> {
    let mut p = vec![0u8; 160];
    p[..4].copy_from_slice(&160u32.to_be_bytes());
    p[4..8].copy_from_slice(b"ADBE");
    p[12..16].copy_from_slice(b"mntr");
    p[16..20].copy_from_slice(b"RGB ");
    p[36..40].copy_from_slice(b"acsp");
    p
}

/// EXIF Software, XMP CreatorTool and an EXIF thumbnail.
pub fn exif_photo() -> Vec<u8> {
    use crate::tiff::{Ifd, Val};
    let tiff = crate::tiff::build(&[
        Ifd::new(vec![
            (0x010F, Val::Ascii("Canon".into())),
            (0x0110, Val::Ascii("Canon EOS 400D DIGITAL".into())),
            (0x0131, Val::Ascii(PHOTOSHOP_CS3.into())),
            (0x0132, Val::Ascii("2008:06:21 14:31:05".into())),
        ])
        .next(1),
        Ifd::new(vec![(0x0103, Val::Short(6))]).thumbnail(thumbnail()),
    ]);
    encode_rgb(
        16,
        &[(1, exif_app1(tiff)), (1, xmp_app1(&xmp_packet(PHOTOSHOP_CS3))), (13, photoshop_app13())],
        None,
    )
}

pub fn jpeg_fixtures() -> Vec<Fixture> {
    use crate::tiff::{Ifd, Val};
    let mut out = Vec::new();
    let a = exif_photo();
    let scan = crate::oracle::jpeg_walk(&a).scans;
    out.push(Fixture::new("photo.jpg", a, Content::Stream(scan)));

    let gps = crate::tiff::build(&[
        Ifd::new(vec![(0x010F, Val::Ascii("Apple".into())), (0x8825, Val::Pointer(1))]),
        Ifd::new(vec![
            (0x0001, Val::Ascii("N".into())),
            (0x0002, Val::Rationals(vec![(45, 1), (45, 1), (1234, 100)])),
            (0x0003, Val::Ascii("E".into())),
            (0x0004, Val::Rationals(vec![(4, 1), (50, 1), (5678, 100)])),
        ]),
    ]);
    let b = with_comment(encode_rgb(16, &[(1, exif_app1(gps))], Some(&fake_icc())), "Created with GIMP");
    let scan = crate::oracle::jpeg_walk(&b).scans;
    out.push(Fixture::new("gps_comment.jpg", b, Content::Stream(scan)));

    let artist = crate::tiff::build(&[Ifd::new(vec![
        (0x013B, Val::Ascii("Alice Example".into())),
        (0x8769, Val::Pointer(1)),
    ]), Ifd::new(vec![(0x9003, Val::Ascii("2021:01:02 03:04:05".into())), (0xA431, Val::Ascii("SN-0042".into()))])]);
    let mut c = encode_cmyk(&[(1, exif_app1(artist))]);
    c.extend(b"data after EOI");
    let scan = crate::oracle::jpeg_walk(&c).scans;
    out.push(Fixture::new("cmyk_trailer.jpg", c, Content::Stream(scan)));
    out
}

pub fn bare_jpeg() -> Vec<u8> {
    // jpeg-encoder always writes a JFIF APP0, which is itself removable.
    let j = encode_rgb(16, &[], None);
    let app0_len = u16::from_be_bytes([j[4], j[5]]) as usize;
    let mut d = j[..2].to_vec();
    d.extend(&j[4 + app0_len..]);
    d
}
