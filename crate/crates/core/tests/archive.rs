use demeta::{clean_file, detect_kind, inspect_file, CleanPolicy, CleanStatus, KindTag, UnknownMemberAction, MAX_NESTING_DEPTH};
use demeta_fixtures::archive::*;
use demeta_fixtures::check::structurally_valid;
use demeta_fixtures::oracle::*;
use proptest::prelude::*;

fn clean(d: &[u8], name: &str) -> demeta::CleanResult {
    clean_file(d, Some(name), &CleanPolicy::default())
}

fn well_formed_xml(d: &[u8]) -> bool {
    let mut r = quick_xml::Reader::from_reader(d);
    let mut buf = Vec::new();
    loop {
        match r.read_event_into(&mut buf) {
            Ok(quick_xml::events::Event::Eof) => return true,
            Err(_) => return false,
            _ => buf.clear(),
        }
    }
}

#[test]
fn zip_headers_normalized() {
    let d = build_zip(&[("a.txt", b"alpha\n", false), ("b.txt", b"beta\n", true)], "made on alice-laptop");
    let r = clean(&d, "two.zip");
    assert_eq!(r.status, CleanStatus::Cleaned);
    let out = r.output.unwrap();
    let m = zip_members(&out).unwrap();
    assert_eq!(m.iter().map(|m| m.name.as_str()).collect::<Vec<_>>(), ["a.txt", "b.txt"]);
    for x in &m {
        assert_eq!(x.dos_datetime, (1980, 1, 1, 0, 0, 0));
        assert_eq!(x.extra_len, 0);
        assert!(x.comment.is_empty());
    }
    assert_eq!(m[0].data, b"alpha\n");
    assert!(zip_archive_comment(&out).is_empty());
    assert!(r.removed.iter().any(|e| e.key == "ZIP.archive_comment"));
}

#[test]
fn zip_member_jpeg_cleaned_with_nested_location() {
    let f = zip_fixtures().remove(1);
    let r = clean(&f.bytes, &f.name);
    assert!(r
        .removed
        .iter()
        .any(|e| e.location.starts_with("scan.jpg \u{25B8} segment APP1") && e.key == "EXIF.Software"));
    assert!(r.removed.iter().any(|e| e.key == "ZIP.extra" && e.location == "data.csv"));
}

#[test]
fn unknown_member_abort_names_member() {
    let r = clean_file(
        &zip_with_unknown(),
        Some("mixed.zip"),
        &CleanPolicy {
            unknown_member_action: UnknownMemberAction::Abort,
            ..Default::default()
        },
    );
    assert_eq!(r.status, CleanStatus::Failed);
    assert!(r.warnings.iter().any(|w| w.contains("blob.bin")), "{:?}", r.warnings);
}

#[test]
fn unknown_member_listed_by_inspect() {
    let e = inspect_file(&zip_with_unknown(), Some("mixed.zip")).unwrap();
    assert!(e.iter().any(|e| e.key == "ZIP.member" && e.location == "blob.bin" && e.category == demeta::Category::Unknown));
}

#[test]
fn gzip_header_and_tar_owner_normalized() {
    let (tar, _) = build_tar(0);
    let d = gzip(&tar, "secret.tar");
    assert_ne!(d[3] & 0x08, 0, "fixture has FNAME");
    let r = clean(&d, "secret.tar.gz");
    assert_eq!(r.status, CleanStatus::Cleaned);
    assert!(r.removed.iter().any(|e| e.key == "GZIP.filename" && e.value == "secret.tar"));
    let out = r.output.unwrap();
    // independent header decode: ID1 ID2 CM FLG MTIME(4) XFL OS
    assert_eq!(&out[..3], [0x1F, 0x8B, 8]);
    assert_eq!(out[3] & 0x1E, 0, "no FEXTRA/FNAME/FCOMMENT/FHCRC");
    assert_eq!(&out[4..8], [0, 0, 0, 0]);
    let members = tar_members(&gunzip(&out));
    assert!(members.iter().all(|m| m.uid == 0 && m.gid == 0 && m.uname.is_empty() && m.gname.is_empty()));
}

#[test]
fn normalized_tar_is_already_clean() {
    let mut b = tar::Builder::new(Vec::new());
    let mut h = tar::Header::new_ustar();
    h.set_size(6);
    h.set_mode(0o644);
    h.set_mtime(0);
    b.append_data(&mut h, "a.txt", &b"hello\n"[..]).unwrap();
    let d = b.into_inner().unwrap();
    let r = clean(&d, "one.tar");
    assert_eq!(r.status, CleanStatus::AlreadyClean, "{:?}", r.removed);
    assert_eq!(r.output.unwrap(), d);
}

#[test]
fn pax_records_reported() {
    let (d, _) = build_tar(2);
    let r = clean(&d, "pax.tar");
    let keys: Vec<&str> = r.removed.iter().map(|e| e.key.as_str()).collect();
    for k in ["pax.mtime", "pax.comment", "pax.SCHILY.xattr.user.origin", "TAR.uid", "TAR.uname"] {
        assert!(keys.contains(&k), "{k} missing from {keys:?}");
    }
    let out = r.output.unwrap();
    assert!(!contains(&out, b"alice"));
    assert!(tar_checksums_ok(&out).is_ok());
}

#[test]
fn long_names_and_symlinks_survive() {
    let (d, _) = build_tar(1);
    let out = clean(&d, "long.tar").output.unwrap();
    let before = tar_members(&d);
    let after = tar_members(&out);
    let paths = |m: &[TarMember]| m.iter().map(|m| m.path.clone()).collect::<Vec<_>>();
    assert_eq!(paths(&before), paths(&after));
    assert!(after[0].path.len() > 100);
    let link = after.iter().find(|m| m.kind == tar::EntryType::Symlink).unwrap();
    assert_eq!(link.path, "latest");
    let mut a = tar::Archive::new(&out[..]);
    let targets: Vec<String> = a
        .entries()
        .unwrap()
        .filter_map(|e| e.unwrap().link_name().unwrap().map(|p| p.to_string_lossy().into_owned()))
        .collect();
    assert_eq!(targets, ["deep"]);
}

#[test]
fn docx_props_removed_without_dangling_rels() {
    let f = ooxml_fixtures().remove(0);
    let e = inspect_file(&f.bytes, Some(&f.name)).unwrap();
    assert!(e.iter().any(|e| e.key == "OOXML.core.creator" && e.value == "Alice Example"));
    let r = clean(&f.bytes, &f.name);
    assert_eq!(r.status, CleanStatus::Cleaned);
    let out = r.output.unwrap();
    let m = zip_members(&out).unwrap();
    assert!(m.iter().all(|m| !m.name.starts_with("docProps/")));
    let ct = m.iter().find(|m| m.name == "[Content_Types].xml").unwrap();
    assert!(well_formed_xml(&ct.data));
    assert!(!contains(&ct.data, b"docProps"));
    let root = m.iter().find(|m| m.name == "_rels/.rels").unwrap();
    assert!(well_formed_xml(&root.data));
    let targets = rels_targets(&String::from_utf8_lossy(&root.data));
    assert_eq!(targets, [("word/document.xml".to_string(), false), ("https://example.com/".to_string(), true)]);
    assert_eq!(detect_kind(&out, None).tag, KindTag::Ooxml);
}

#[test]
fn cleaned_office_files_are_fixpoints() {
    for f in ooxml_fixtures().into_iter().chain(odf_fixtures()) {
        let once = clean(&f.bytes, &f.name).output.unwrap();
        let r = clean(&once, &f.name);
        assert_eq!(r.status, CleanStatus::AlreadyClean, "{}", f.name);
    }
}

#[test]
fn xlsx_media_jpeg_reports_exif() {
    let jpeg = demeta_fixtures::image::exif_photo();
    let f = ooxml_fixtures().remove(1);
    let mut members: Vec<(String, Vec<u8>, bool)> = zip_members(&f.bytes)
        .unwrap()
        .into_iter()
        .map(|m| (m.name, m.data, m.stored))
        .collect();
    members.push(("xl/media/image2.jpeg".into(), jpeg, true));
    let refs: Vec<(&str, &[u8], bool)> = members.iter().map(|(n, d, s)| (n.as_str(), d.as_slice(), *s)).collect();
    let d = build_zip(&refs, "");
    let r = clean(&d, "book.xlsx");
    assert!(r
        .removed
        .iter()
        .any(|e| e.key == "EXIF.Software" && e.location.starts_with("xl/media/image2.jpeg \u{25B8} ")));
}

#[test]
fn odt_meta_and_thumbnail_removed() {
    let f = odf_fixtures().remove(0);
    let e = inspect_file(&f.bytes, Some(&f.name)).unwrap();
    assert!(e.iter().any(|e| e.key == "ODF.meta.creator" && e.value == "Bob Example" && e.location == "meta.xml"));
    assert!(e.iter().any(|e| e.key == "ODF.meta.editing-duration"));
    let out = clean(&f.bytes, &f.name).output.unwrap();
    let m = zip_members(&out).unwrap();
    assert_eq!(m[0].name, "mimetype");
    assert!(m[0].stored);
    assert!(m.iter().all(|m| m.name != "meta.xml" && !m.name.starts_with("Thumbnails/")));
    let manifest = m.iter().find(|m| m.name == "META-INF/manifest.xml").unwrap();
    assert!(well_formed_xml(&manifest.data));
    assert!(!contains(&manifest.data, b"meta.xml") && !contains(&manifest.data, b"Thumbnails"));
    assert!(contains(&manifest.data, b"Pictures/logo.png"));
}

#[test]
fn ods_picture_text_chunk_reported() {
    let f = odf_fixtures().remove(1);
    let r = clean(&f.bytes, &f.name);
    assert!(r
        .removed
        .iter()
        .any(|e| e.key == "PNG.tEXt.Comment" && e.location.starts_with("Pictures/logo.png \u{25B8} chunk tEXt")));
}

fn nest(levels: usize) -> Vec<u8> {
    let mut d = build_zip(&[("core.txt", b"x", false)], "");
    for i in 0..levels {
        d = build_zip(&[(&format!("level{i}.zip"), &d, true)], "c");
    }
    d
}

#[test]
fn nesting_depth_is_capped() {
    let ok = clean(&nest(MAX_NESTING_DEPTH - 1), "ok.zip");
    assert_eq!(ok.status, CleanStatus::Cleaned);
    let deep = clean(&nest(MAX_NESTING_DEPTH + 2), "deep.zip");
    assert_eq!(deep.status, CleanStatus::Failed);
    assert!(!deep.warnings.is_empty());
}

#[test]
fn encrypted_member_fails_even_when_copying() {
    let mut d = build_zip(&[("a.txt", b"secret", true)], "");
    // set the encryption bit in the local and central headers
    d[6] |= 1;
    let cd = d.windows(4).position(|w| w == b"PK\x01\x02").unwrap();
    d[cd + 8] |= 1;
    let r = clean_file(
        &d,
        Some("enc.zip"),
        &CleanPolicy {
            unknown_member_action: UnknownMemberAction::CopyVerbatim,
            ..Default::default()
        },
    );
    assert_eq!(r.status, CleanStatus::Failed);
}

#[test]
fn archive_outputs_validate() {
    for f in zip_fixtures().into_iter().chain(tar_fixtures()).chain(ooxml_fixtures()).chain(odf_fixtures()) {
        let out = clean(&f.bytes, &f.name).output.unwrap();
        structurally_valid(&f.name, &out).unwrap_or_else(|e| panic!("{}: {e}", f.name));
    }
}

fn member() -> impl Strategy<Value = (String, String, u16, u32)> {
    ("[a-z]{1,8}\\.txt", "[ -~\n]{0,120}", 1981u16..2100, 0o400u32..0o777)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn zip_output_ignores_header_metadata(members in proptest::collection::btree_map("[a-z]{1,8}\\.txt", (("[ -~\n]{0,120}"), 1981u16..2100, 0o400u32..0o777), 1..5), comment in "[a-z ]{0,20}") {
        use std::io::Write;
        let build = |vary: bool| {
            let mut w = zip::ZipWriter::new(std::io::Cursor::new(Vec::new()));
            for (name, (text, year, mode)) in &members {
                let (y, m) = if vary { (*year, *mode) } else { (1990, 0o644) };
                let o = zip::write::SimpleFileOptions::default()
                    .last_modified_time(zip::DateTime::from_date_and_time(y, 6, 1, 12, 0, 0).unwrap())
                    .unix_permissions(m);
                w.start_file(name.as_str(), o).unwrap();
                w.write_all(text.as_bytes()).unwrap();
            }
            if vary { w.set_comment(comment.clone()); }
            w.finish().unwrap().into_inner()
        };
        let a = clean(&build(true), "a.zip").output.unwrap();
        let b = clean(&build(false), "b.zip").output.unwrap();
        prop_assert!(a == b, "outputs differ");
        let got = zip_members(&a).unwrap();
        prop_assert_eq!(got.len(), members.len());
        for (m, (name, (text, _, _))) in got.iter().zip(&members) {
            prop_assert_eq!(&m.name, name);
            prop_assert_eq!(&m.data, text.as_bytes());
        }
    }

    #[test]
    fn tar_output_ignores_owner_and_times(members in proptest::collection::vec(member(), 1..5), uid in 1u64..70000, user in "[a-z]{1,10}") {
        let build = |vary: bool| {
            let mut b = tar::Builder::new(Vec::new());
            for (i, (name, text, year, mode)) in members.iter().enumerate() {
                let mut h = tar::Header::new_gnu();
                h.set_size(text.len() as u64);
                // both variants carry some metadata so both get rewritten
                h.set_mode(if vary { *mode } else { mode | 0o644 });
                let (u, owner, t) = if vary { (uid, user.as_str(), *year as u64 * 1000) } else { (5, "x", 1) };
                h.set_uid(u);
                h.set_gid(u + 1);
                h.set_username(owner).unwrap();
                h.set_mtime(t);
                b.append_data(&mut h, format!("{i}_{name}"), text.as_bytes()).unwrap();
            }
            b.into_inner().unwrap()
        };
        let a = clean(&build(true), "a.tar").output.unwrap();
        let b = clean(&build(false), "b.tar").output.unwrap();
        prop_assert!(a == b, "outputs differ");
        prop_assert!(tar_checksums_ok(&a).is_ok());
        for (m, (_, text, _, _)) in tar_members(&a).iter().zip(&members) {
            prop_assert_eq!((m.uid, m.gid, m.mtime), (0, 0, 0));
            prop_assert_eq!(&m.data, text.as_bytes());
        }
    }
}
