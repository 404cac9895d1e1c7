use demeta::{clean_file, clean_flac, clean_mp3, clean_ogg_vorbis, inspect_file, Category, CleanPolicy, CleanStatus};
use demeta_fixtures::audio::*;
use demeta_fixtures::oracle::*;
use proptest::prelude::*;

#[test]
fn mp3_tags_stripped_to_frames() {
    let f = mp3_fixtures().remove(0);
    let r = clean_mp3(&f.bytes);
    assert_eq!(r.status, CleanStatus::Cleaned);
    let keys: Vec<(&str, &str)> = r.removed.iter().map(|e| (e.key.as_str(), e.value.as_str())).collect();
    assert!(keys.contains(&("ID3v2.TPE1", "someone")), "{keys:?}");
    assert!(keys.contains(&("ID3v1.artist", "someone")), "{keys:?}");
    let out = r.output.unwrap();
    assert_eq!(&out[..2], [0xFF, 0xFB]);
    assert!(!contains(&out, b"ID3") && !contains(&out, b"TAG"));
    assert_eq!(out, mpeg_frames(6));
}

#[test]
fn mp3_ape_and_junk_removed() {
    for f in mp3_fixtures().into_iter().skip(1) {
        let out = clean_mp3(&f.bytes).output.unwrap();
        assert_eq!(out, mpeg_frames(6), "{}", f.name);
        assert!(!contains(&out, b"APETAGEX"));
    }
}

#[test]
fn bare_frames_already_clean() {
    let d = mpeg_frames(4);
    let r = clean_file(&d, Some("a.mp3"), &CleanPolicy::default());
    assert_eq!(r.status, CleanStatus::AlreadyClean);
    assert_eq!(r.output.unwrap(), d);
}

#[test]
fn tag_without_frames_fails() {
    let mut t = id3::Tag::new();
    id3::TagLike::set_artist(&mut t, "someone");
    let mut d = Vec::new();
    t.write_to(&mut d, id3::Version::Id3v23).unwrap();
    let r = clean_mp3(&d);
    assert_eq!(r.status, CleanStatus::Failed);
    assert!(r.output.is_none());
}

#[test]
fn lame_string_reported_and_kept() {
    let d = mp3_with_lame();
    let e = inspect_file(&d, Some("lame.mp3")).unwrap();
    let enc = e.iter().find(|e| e.key == "MP3.encoder").expect("encoder entry");
    assert_eq!(enc.category, Category::Contextual);
    assert!(enc.value.contains("LAME3.100"));
    let r = clean_mp3(&d);
    assert!(!r.warnings.is_empty());
    assert_eq!(r.status, CleanStatus::AlreadyClean);
    assert!(contains(&r.output.unwrap(), b"LAME3.100"));
}

fn comment_fields(packet: &[u8]) -> (Vec<u8>, u32) {
    // independent Vorbis comment decode: type, "vorbis", vendor, count
    assert_eq!(&packet[..7], b"\x03vorbis");
    let le = |i: usize| u32::from_le_bytes(packet[i..i + 4].try_into().unwrap());
    let vlen = le(7) as usize;
    let vendor = packet[11..11 + vlen].to_vec();
    (vendor, le(11 + vlen))
}

#[test]
fn ogg_comment_emptied() {
    let f = ogg_fixtures().remove(0);
    let e = inspect_file(&f.bytes, Some(&f.name)).unwrap();
    assert!(e.iter().any(|e| e.key == "Vorbis.ARTIST" && e.value == "someone"));
    assert!(e.iter().any(|e| e.key == "Vorbis.vendor" && e.value.starts_with("Xiph.Org libVorbis")));
    let out = clean_ogg_vorbis(&f.bytes).output.unwrap();
    let pkts = ogg_packets(&out);
    assert_eq!(comment_fields(&pkts[1]), (Vec::new(), 0));
    let pages = ogg_pages(&out);
    assert!(pages.iter().all(|p| p.crc_ok));
    assert!(pages.iter().enumerate().all(|(i, p)| p.sequence == i as u32));
    assert!(pages.iter().all(|p| p.serial == 0x1234));
    assert_eq!(pages[0].header_type & 0x02, 0x02);
    assert_eq!(pages.last().unwrap().header_type & 0x04, 0x04);
    assert_eq!(pkts[0], vorbis_ident());
    assert_eq!(pkts[2], vorbis_setup());
}

#[test]
fn ogg_granules_kept_on_audio_pages() {
    let f = ogg_fixtures().remove(1);
    let before: Vec<u64> = ogg_pages(&f.bytes).iter().map(|p| p.granule).filter(|&g| g != 0).collect();
    let out = clean_ogg_vorbis(&f.bytes).output.unwrap();
    let after: Vec<u64> = ogg_pages(&out).iter().map(|p| p.granule).filter(|&g| g != 0 && g != u64::MAX).collect();
    assert_eq!(before, after);
}

#[test]
fn minimal_ogg_already_clean() {
    let d = minimal_ogg();
    let r = clean_ogg_vorbis(&d);
    assert_eq!(r.status, CleanStatus::AlreadyClean);
    assert_eq!(r.output.unwrap(), d);
}

#[test]
fn opus_unsupported() {
    let r = clean_file(&opus_ogg(), Some("voice.opus"), &CleanPolicy::default());
    assert_eq!(r.status, CleanStatus::Unsupported);
    assert!(!r.warnings.is_empty());
}

#[test]
fn multiplexed_ogg_unsupported() {
    let a = ogg_fixtures().remove(0).bytes;
    let b = build_ogg(&[vorbis_ident(), vorbis_comment("", &[]), vorbis_setup()], &audio_packets(2, 50), 99);
    let mut d = a;
    d.extend(b);
    assert_eq!(clean_ogg_vorbis(&d).status, CleanStatus::Unsupported);
}

#[test]
fn flac_reduced_to_streaminfo() {
    let f = flac_fixtures().remove(0);
    let e = inspect_file(&f.bytes, Some(&f.name)).unwrap();
    assert!(e.iter().any(|e| e.key == "FLAC.Picture"));
    assert!(e.iter().any(|e| e.key == "Vorbis.ARTIST" && e.value == "someone"));
    let out = clean_flac(&f.bytes).output.unwrap();
    let (blocks, frames) = flac_blocks(&out);
    assert_eq!(blocks, [(0, true, 34)]);
    assert_eq!(&out[frames..], flac_frames());
    // StreamInfo (and so its audio MD5) untouched
    assert_eq!(&out[8..42], &f.bytes[8..42]);
}

#[test]
fn flac_id3_prefix_removed() {
    let f = flac_fixtures().remove(2);
    let r = clean_flac(&f.bytes);
    assert!(r.removed.iter().any(|e| e.key == "ID3v2.TPE1"));
    assert!(r.output.unwrap().starts_with(b"fLaC"));
}

#[test]
fn streaminfo_only_flac_already_clean() {
    let d = clean_flac_fixture();
    assert_eq!(clean_flac(&d).status, CleanStatus::AlreadyClean);
}

fn clean_flac_fixture() -> Vec<u8> {
    demeta_fixtures::audio::bare_flac()
}

#[test]
fn truncated_flac_fails() {
    let d = b"fLaC\x00\x00\x00\x22\x10\x00".to_vec();
    assert_eq!(clean_flac(&d).status, CleanStatus::Failed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ogg_output_independent_of_comments(vendor in "[ -~]{0,40}", comments in proptest::collection::vec("[A-Z]{1,8}=[ -~]{0,300}", 0..6)) {
        let refs: Vec<&str> = comments.iter().map(String::as_str).collect();
        let audio = audio_packets(6, 120);
        let d = build_ogg(&[vorbis_ident(), vorbis_comment(&vendor, &refs), vorbis_setup()], &audio, 42);
        let r = clean_ogg_vorbis(&d);
        let out = r.output.unwrap();
        let bare = build_ogg(&[vorbis_ident(), vorbis_comment("", &[]), vorbis_setup()], &audio, 42);
        let expect = clean_ogg_vorbis(&bare).output.unwrap();
        prop_assert!(out == expect);
        prop_assert_eq!(&ogg_packets(&out)[3..], &audio[..]);
        prop_assert!(ogg_pages(&out).iter().all(|p| p.crc_ok));
    }

    #[test]
    fn mp3_output_independent_of_tags(artist in "[ -~]{1,30}", title in "[ -~]{0,30}", v1 in any::<bool>(), version in 0usize..3) {
        let mut t = id3::Tag::new();
        id3::TagLike::set_artist(&mut t, artist.clone());
        if !title.is_empty() {
            id3::TagLike::set_title(&mut t, title.clone());
        }
        let v = [id3::Version::Id3v22, id3::Version::Id3v23, id3::Version::Id3v24][version];
        let mut d = Vec::new();
        t.write_to(&mut d, v).unwrap();
        let frames = mpeg_frames(3);
        d.extend(&frames);
        if v1 {
            d.extend(id3v1(&title, &artist, ""));
        }
        prop_assert_eq!(clean_mp3(&d).output.unwrap(), frames);
    }
}
