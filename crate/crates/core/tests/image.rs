use demeta::{anonymize_field, clean_file, detect_kind, inspect_file, Category, CleanStatus, FieldValue, KindTag};
use demeta_fixtures::image::*;
use demeta_fixtures::oracle::*;
use proptest::prelude::*;

fn bare_png_with(extra: &[Vec<u8>]) -> Vec<u8> {
    let clean = bare_png();
    // IHDR chunk ends at 8 + 25
    let mut d = clean[..33].to_vec();
    for c in extra {
        d.extend(c);
    }
    d.extend(&clean[33..]);
    d
}

#[test]
fn png_text_chunk_entry() {
    let d = bare_png_with(&[png_chunk(b"tEXt", b"Comment\0hi")]);
    let e = inspect_file(&d, None).unwrap();
    assert_eq!(e.len(), 1);
    assert_eq!(e[0].key, "PNG.tEXt.Comment");
    assert_eq!(e[0].value, "hi");
    assert_eq!(e[0].category, Category::Contextual);
    assert_eq!(e[0].location, "chunk tEXt @0x0021");
}

#[test]
fn png_text_time_phys_leave_critical_chunks() {
    let d = bare_png_with(&[
        png_chunk(b"tEXt", b"Author\0alice"),
        png_chunk(b"tIME", &[7, 227, 1, 2, 3, 4, 5]),
        png_chunk(b"pHYs", &[0, 0, 11, 19, 0, 0, 11, 19, 1]),
    ]);
    let r = demeta::clean_png(&d);
    assert_eq!(r.status, CleanStatus::Cleaned);
    let out = r.output.unwrap();
    let kinds: Vec<[u8; 4]> = png_chunks(&out).iter().map(|c| c.kind).collect();
    assert_eq!(kinds, [*b"IHDR", *b"IDAT", *b"IDAT", *b"IEND"]);
    assert!(png_chunks(&out).iter().all(|c| c.crc_ok));
    assert_eq!(png_idat(&out), png_idat(&d));
}

#[test]
fn minimal_png_is_already_clean() {
    let d = bare_png();
    let r = demeta::clean_png(&d);
    assert_eq!(r.status, CleanStatus::AlreadyClean);
    assert!(r.removed.is_empty());
    assert_eq!(r.output.unwrap(), d);
}

#[test]
fn corrupt_png_crc_fails() {
    let mut d = bare_png();
    let last_idat_crc = d.len() - 12 - 1;
    d[last_idat_crc] ^= 0xFF;
    let r = demeta::clean_png(&d);
    assert_eq!(r.status, CleanStatus::Failed);
    assert!(r.output.is_none());
}

#[test]
fn png_detected_by_signature() {
    assert_eq!(detect_kind(&bare_png(), Some("photo.jpg")).tag, KindTag::Png);
    assert_eq!(detect_kind(b"", None).tag, KindTag::Unknown);
}

#[test]
fn photoshop_jpeg_lists_software_and_thumbnail() {
    // the classic sample: a Photoshop-edited camera JPEG
    let d = exif_photo();
    let e = inspect_file(&d, Some("photo.jpg")).unwrap();
    let get = |k: &str| e.iter().find(|x| x.key == k).map(|x| x.value.as_str());
    assert_eq!(get("EXIF.Software"), Some("Adobe Photoshop CS3 Windows"));
    assert_eq!(get("XMP.CreatorTool"), Some("Adobe Photoshop CS3 Windows"));
    let len = thumbnail().len();
    assert_eq!(get("EXIF.ThumbnailLength"), Some(len.to_string().as_str()));
    assert!(get("EXIF.ThumbnailImage").unwrap().contains(&len.to_string()));
    assert!(e.iter().any(|x| x.key.starts_with("IPTC.")));
}

#[test]
fn photoshop_jpeg_cleaned_to_structural_segments() {
    let d = exif_photo();
    let r = clean_file(&d, None, &Default::default());
    assert_eq!(r.status, CleanStatus::Cleaned);
    assert!(r
        .removed
        .iter()
        .any(|e| e.key == "EXIF.Software" && e.value == "Adobe Photoshop CS3 Windows"));
    let out = r.output.unwrap();
    let w = jpeg_walk(&out);
    assert!(w.markers.iter().all(|m| !(0xE0..=0xEF).contains(m) && *m != 0xFE));
    assert_eq!(w.markers.first(), Some(&0xD8));
    assert_eq!(w.markers.last(), Some(&0xD9));
    assert_eq!(w.scans, jpeg_walk(&d).scans);
    assert_eq!(count(&out, &[0xFF, 0xD8]), 1);
}

fn decode(d: &[u8]) -> Vec<u8> {
    jpeg_decoder::Decoder::new(d).decode().unwrap()
}

#[test]
fn cmyk_keeps_adobe_segment_and_pixels() {
    let f = jpeg_fixtures().remove(2);
    let orig_app14: Vec<_> = jpeg_walk(&f.bytes).segments.into_iter().filter(|s| s.0 == 0xEE).collect();
    assert_eq!(orig_app14.len(), 1, "encoder writes an Adobe segment for CMYK");
    let out = demeta::clean_jpeg(&f.bytes).output.unwrap();
    let kept: Vec<_> = jpeg_walk(&out).segments.into_iter().filter(|s| s.0 == 0xEE).collect();
    assert_eq!(kept, orig_app14);
    assert_eq!(decode(&out), decode(&f.bytes));
    assert_eq!(jpeg_walk(&out).trailing, 0);
}

#[test]
fn rgb_pixels_survive() {
    for f in jpeg_fixtures() {
        let out = demeta::clean_jpeg(&f.bytes).output.unwrap();
        assert_eq!(decode(&out), decode(&f.bytes), "{}", f.name);
    }
}

#[test]
fn bare_jpeg_is_already_clean() {
    let d = bare_jpeg();
    assert!(inspect_file(&d, None).unwrap().is_empty());
    let r = demeta::clean_jpeg(&d);
    assert_eq!(r.status, CleanStatus::AlreadyClean);
    assert_eq!(r.output.unwrap(), d);
}

#[test]
fn anonymize_rules() {
    assert_eq!(anonymize_field(FieldValue::Numeric(7172)), FieldValue::Numeric(0));
    assert_eq!(anonymize_field(FieldValue::Timestamp(0)), FieldValue::Timestamp(0));
    assert_eq!(
        anonymize_field(FieldValue::Text("Adobe Photoshop CS3 Windows".into())),
        FieldValue::Text(String::new())
    );
}

fn ancillary() -> impl Strategy<Value = Vec<u8>> {
    let kind = prop_oneof![
        Just(*b"tEXt"),
        Just(*b"zTXt"),
        Just(*b"iTXt"),
        Just(*b"tIME"),
        Just(*b"gAMA"),
        Just(*b"pHYs"),
        Just(*b"prVt"),
        Just(*b"sRGB"),
    ];
    (kind, proptest::collection::vec(any::<u8>(), 0..40)).prop_map(|(k, b)| png_chunk(&k, &b))
}

fn app_segment() -> impl Strategy<Value = (u8, Vec<u8>)> {
    (1u8..=15, proptest::collection::vec(any::<u8>(), 1..200))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn png_output_independent_of_ancillary_chunks(chunks in proptest::collection::vec(ancillary(), 0..6)) {
        let d = bare_png_with(&chunks);
        let r = demeta::clean_png(&d);
        let out = r.output.unwrap();
        prop_assert_eq!(&out, &bare_png());
        prop_assert!(out.len() <= d.len());
        prop_assert_eq!(r.status == CleanStatus::AlreadyClean, chunks.is_empty());
    }

    #[test]
    fn jpeg_output_independent_of_app_segments(apps in proptest::collection::vec(app_segment(), 0..5), comment in "[a-z ]{0,30}") {
        let base = bare_jpeg();
        let mut d = base[..2].to_vec();
        for (n, body) in &apps {
            d.extend([0xFF, 0xE0 + n]);
            d.extend(((body.len() + 2) as u16).to_be_bytes());
            d.extend(body);
        }
        if !comment.is_empty() {
            d.extend([0xFF, 0xFE]);
            d.extend(((comment.len() + 2) as u16).to_be_bytes());
            d.extend(comment.as_bytes());
        }
        d.extend(&base[2..]);
        let out = demeta::clean_jpeg(&d).output.unwrap();
        prop_assert_eq!(out, base);
    }

    #[test]
    fn anonymize_idempotent(n in any::<i64>(), s in ".*") {
        for v in [FieldValue::Numeric(n), FieldValue::Timestamp(n), FieldValue::Text(s.clone())] {
            let once = anonymize_field(v);
            prop_assert_eq!(anonymize_field(once.clone()), once);
        }
    }
}
