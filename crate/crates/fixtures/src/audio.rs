//! MP3, Ogg Vorbis and FLAC fixtures.

use std::io::Cursor;

use id3::frame::{Comment, ExtendedText, Picture, PictureType};
use id3::{Tag, TagLike, Version};
use ogg::writing::{PacketWriteEndInfo, PacketWriter};

use crate::{Content, Fixture};

/// MPEG-1 Layer III, 128 kbit/s, 44.1 kHz, no padding: 417-byte frames.
pub fn mpeg_frames(n: usize) -> Vec<u8> {
    let mut d = Vec::new();
    for i in 0..n {
        d.extend([0xFF, 0xFB, 0x90, 0x00]);
        // side info and main data, kept clear of 0xFF so no false sync
        d.extend((0..413).map(|j| ((i * 31 + j * 7) % 200) as u8));
    }
    d
}

fn id3v2(version: Version, f: impl FnOnce(&mut Tag)) -> Vec<u8> {
    let mut t = Tag::new();
    f(&mut t);
    let mut out = Vec::new();
    t.write_to(&mut out, version).unwrap();
    out
}

pub fn id3v1(title: &str, artist: &str, comment: &str) -> Vec<u8> {
    let field = |s: &str, n: usize| {
        let mut v = s.as_bytes().to_vec();
        v.resize(n, 0);
        v
    };
    let mut d = b"TAG".to_vec();
    d.extend(field(title, 30));
    d.extend(field(artist, 30));
    d.extend(field("", 30));
    d.extend(field("2008", 4));
    d.extend(field(comment, 30));
    d.push(12);
    d
}

/// An APEv2 tag with header and footer.
pub fn apev2(items: &[(&str, &str)]) -> Vec<u8> {
    let mut body = Vec::new();
    for (k, v) in items {
        body.extend((v.len() as u32).to_le_bytes());
        body.extend(0u32.to_le_bytes());
        body.extend(k.as_bytes());
        body.push(0);
        body.extend(v.as_bytes());
    }
    let frame = |flags: u32| {
        let mut h = b"APETAGEX".to_vec();
        h.extend(2000u32.to_le_bytes());
        h.extend((body.len() as u32 + 32).to_le_bytes());
        h.extend((items.len() as u32).to_le_bytes());
        h.extend(flags.to_le_bytes());
        h.extend([0u8; 8]);
        h
    };
    let mut d = frame(0xA000_0000);
    d.extend(&body);
    d.extend(frame(0x8000_0000));
    d
}

pub fn mp3_fixtures() -> Vec<Fixture> {
    let frames = mpeg_frames(6);
    let mut a = id3v2(Version::Id3v23, |t| {
        t.set_artist("someone");
        t.set_title("Field Recording 3");
        t.set_year(2008);
        t.add_frame(Comment {
            lang: "eng".into(),
            description: String::new(),
            text: "recorded near the harbour".into(),
        });
    });
    a.extend(&frames);
    a.extend(id3v1("Field Recording 3", "someone", "harbour"));

    let mut b = id3v2(Version::Id3v24, |t| {
        t.set_album("Demos");
        t.add_frame(ExtendedText {
            description: "ENCODED_BY_HOST".into(),
            value: "alice-laptop".into(),
        });
        t.add_frame(Picture {
            mime_type: "image/png".into(),
            picture_type: PictureType::CoverFront,
            description: "cover".into(),
            data: crate::image::bare_png(),
        });
    });
    b.extend(&frames);
    b.extend(apev2(&[("Artist", "someone"), ("Comment", "mastered at home")]));

    let mut c = id3v2(Version::Id3v22, |t| {
        t.set_artist("someone else");
        t.set_genre("Speech");
    });
    c.extend(b"junk between tag and audio");
    c.extend(&frames);

    vec![
        Fixture::new("v23_v1.mp3", a, Content::Stream(frames.clone())),
        Fixture::new("v24_ape.mp3", b, Content::Stream(frames.clone())),
        Fixture::new("v22_junk.mp3", c, Content::Stream(frames)),
    ]
}

/// A Xing header frame followed by a LAME encoder string.
pub fn mp3_with_lame() -> Vec<u8> {
    let mut first = mpeg_frames(1);
    first[36..40].copy_from_slice(b"Xing");
    first[40..44].copy_from_slice(&[0, 0, 0, 0]);
    first[156..165].copy_from_slice(b"LAME3.100");
    let mut d = first;
    d.extend(mpeg_frames(3));
    d
}

pub fn vorbis_ident() -> Vec<u8> {
    let mut p = b"\x01vorbis".to_vec();
    p.extend(0u32.to_le_bytes());
    p.push(2);
    p.extend(44100u32.to_le_bytes());
    p.extend(0u32.to_le_bytes());
    p.extend(128000u32.to_le_bytes());
    p.extend(0u32.to_le_bytes());
    p.push(0xB8);
    p.push(1);
    p
}

pub fn vorbis_comment(vendor: &str, comments: &[&str]) -> Vec<u8> {
    let mut p = b"\x03vorbis".to_vec();
    p.extend(vorbis_comment_body(vendor, comments));
    p.push(1);
    p
}

/// The comment structure shared by Ogg Vorbis and FLAC, without framing.
pub fn vorbis_comment_body(vendor: &str, comments: &[&str]) -> Vec<u8> {
    let mut p = (vendor.len() as u32).to_le_bytes().to_vec();
    p.extend(vendor.as_bytes());
    p.extend((comments.len() as u32).to_le_bytes());
    for c in comments {
        p.extend((c.len() as u32).to_le_bytes());
        p.extend(c.as_bytes());
    }
    p
}

pub fn vorbis_setup() -> Vec<u8> {
    let mut p = b"\x05vorbis".to_vec();
    p.extend((0..300).map(|i| (i * 13 % 251) as u8));
    p
}

pub fn audio_packets(n: usize, size: usize) -> Vec<Vec<u8>> {
    (0..n)
        .map(|i| {
            // first bit clear marks an audio packet
            (0..size + i * 17).map(|j| ((i * 7 + j * 3) % 127) as u8 * 2).collect()
        })
        .collect()
}

/// Writes header packets and audio packets with the `ogg` crate.
pub fn build_ogg(headers: &[Vec<u8>], audio: &[Vec<u8>], serial: u32) -> Vec<u8> {
    let mut w = PacketWriter::new(Cursor::new(Vec::new()));
    for (i, h) in headers.iter().enumerate() {
        let end = if i == 0 || i + 1 == headers.len() {
            PacketWriteEndInfo::EndPage
        } else {
            PacketWriteEndInfo::NormalPacket
        };
        w.write_packet(h.clone(), serial, end, 0).unwrap();
    }
    for (i, a) in audio.iter().enumerate() {
        let end = if i + 1 == audio.len() {
            PacketWriteEndInfo::EndStream
        } else if i % 4 == 3 {
            PacketWriteEndInfo::EndPage
        } else {
            PacketWriteEndInfo::NormalPacket
        };
        w.write_packet(a.clone(), serial, end, (i as u64 + 1) * 1024).unwrap();
    }
    w.into_inner().into_inner()
}

pub fn ogg_fixtures() -> Vec<Fixture> {
    let audio = audio_packets(10, 180);
    let mk = |comment: Vec<u8>, serial| build_ogg(&[vorbis_ident(), comment, vorbis_setup()], &audio, serial);
    let a = mk(vorbis_comment("Xiph.Org libVorbis I 20200704 (Reducing Environment)", &["ARTIST=someone", "TITLE=Field Recording 3", "date=2008"]), 0x1234);
    let big = format!("COMMENT={}", "recorded near the harbour; ".repeat(800));
    let b = mk(vorbis_comment("Lavf58.76.100", &["ENCODER=Lavf58.76.100", &big]), 0x5678);
    let c = mk(vorbis_comment("Xiph.Org libVorbis I 20200704 (Reducing Environment)", &[]), 0x9ABC);
    vec![
        Fixture::new("tagged.ogg", a, Content::Packets(audio.clone())),
        Fixture::new("long_comment.ogg", b, Content::Packets(audio.clone())),
        Fixture::new("vendor_only.ogg", c, Content::Packets(audio)),
    ]
}

/// Already minimal: the comment packet carries no vendor and no entries.
pub fn minimal_ogg() -> Vec<u8> {
    build_ogg(
        &[vorbis_ident(), vorbis_comment("", &[]), vorbis_setup()],
        &audio_packets(4, 100),
        7,
    )
}

pub fn opus_ogg() -> Vec<u8> {
    let mut head = b"OpusHead".to_vec();
    head.extend([1, 2, 0x38, 0x01, 0x80, 0xBB, 0, 0, 0, 0, 0]);
    let mut tags = b"OpusTags".to_vec();
    tags.extend(vorbis_comment_body("libopus 1.3", &["ARTIST=someone"]));
    let mut w = PacketWriter::new(Cursor::new(Vec::new()));
    w.write_packet(head, 3, PacketWriteEndInfo::EndPage, 0).unwrap();
    w.write_packet(tags, 3, PacketWriteEndInfo::EndPage, 0).unwrap();
    w.write_packet(vec![0xFC, 0, 0], 3, PacketWriteEndInfo::EndStream, 960).unwrap();
    w.into_inner().into_inner()
}

fn flac_block(kind: u8, last: bool, body: &[u8]) -> Vec<u8> {
    let mut d = vec![kind | if last { 0x80 } else { 0 }];
    d.extend(&(body.len() as u32).to_be_bytes()[1..]);
    d.extend(body);
    d
}

fn streaminfo() -> Vec<u8> {
    let mut s = Vec::new();
    s.extend(4096u16.to_be_bytes());
    s.extend(4096u16.to_be_bytes());
    s.extend([0, 0, 0x10, 0, 0x20, 0]);
    // 44100 Hz, 2 channels, 16 bits, 88200 samples
    s.extend([0x0A, 0xC4, 0x42, 0xF0, 0x00, 0x01, 0x58, 0x88]);
    s.extend([0x5Au8; 16]);
    s
}

/// Frame-shaped bytes: each run starts with the fixed-blocksize sync code.
pub fn flac_frames() -> Vec<u8> {
    let mut d = Vec::new();
    for i in 0..5u8 {
        d.extend([0xFF, 0xF8, 0x69, 0x18, i]);
        d.extend((0..300).map(|j| ((j * 11 + i as usize) % 250) as u8));
    }
    d
}

fn flac_picture() -> Vec<u8> {
    let png = crate::image::bare_png();
    let mut p = 3u32.to_be_bytes().to_vec();
    for s in ["image/png", "cover photo by alice"] {
        p.extend((s.len() as u32).to_be_bytes());
        p.extend(s.as_bytes());
    }
    for v in [8u32, 8, 24, 0] {
        p.extend(v.to_be_bytes());
    }
    p.extend((png.len() as u32).to_be_bytes());
    p.extend(png);
    p
}

pub fn build_flac(prefix: &[u8], blocks: &[(u8, Vec<u8>)]) -> Vec<u8> {
    let mut d = prefix.to_vec();
    d.extend(b"fLaC");
    d.extend(flac_block(0, blocks.is_empty(), &streaminfo()));
    for (i, (k, b)) in blocks.iter().enumerate() {
        d.extend(flac_block(*k, i + 1 == blocks.len(), b));
    }
    d.extend(flac_frames());
    d
}

pub fn flac_fixtures() -> Vec<Fixture> {
    let vc = vorbis_comment_body("reference libFLAC 1.3.3 20190804", &["ARTIST=someone", "ALBUM=Demos"]);
    let a = build_flac(b"", &[(4, vc), (6, flac_picture()), (1, vec![0; 64])]);

    let mut seek = Vec::new();
    for i in 0..3u64 {
        seek.extend((i * 4096).to_be_bytes());
        seek.extend((i * 900).to_be_bytes());
        seek.extend(4096u16.to_be_bytes());
    }
    let mut app = b"ATCH".to_vec();
    app.extend(b"host=alice-laptop");
    let b = build_flac(b"", &[(3, seek), (2, app)]);

    let tag = id3v2(Version::Id3v23, |t| t.set_artist("someone"));
    let c = build_flac(&tag, &[(4, vorbis_comment_body("", &[])), (1, vec![0; 16])]);

    let frames = flac_frames();
    vec![
        Fixture::new("tagged.flac", a, Content::Stream(frames.clone())),
        Fixture::new("seek_app.flac", b, Content::Stream(frames.clone())),
        Fixture::new("id3_prefix.flac", c, Content::Stream(frames)),
    ]
}

pub fn bare_flac() -> Vec<u8> {
    build_flac(b"", &[])
}
