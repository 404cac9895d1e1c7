//! ZIP, TAR and office-container fixtures.

use std::io::{Cursor, Write};

use zip::write::{FullFileOptions, SimpleFileOptions};
use zip::{CompressionMethod, DateTime};

use crate::{Content, Fixture};

fn when(y: u16, mo: u8, d: u8) -> DateTime {
    DateTime::from_date_and_time(y, mo, d, 14, 31, 6).unwrap()
}

fn opts(method: CompressionMethod) -> SimpleFileOptions {
    SimpleFileOptions::default()
        .compression_method(method)
        .last_modified_time(when(2021, 3, 4))
        .unix_permissions(0o640)
}

/// Builds a ZIP with the `zip` crate. Each member is (name, data, stored).
pub fn build_zip(members: &[(&str, &[u8], bool)], comment: &str) -> Vec<u8> {
    let mut w = zip::ZipWriter::new(Cursor::new(Vec::new()));
    for (name, data, stored) in members {
        if name.ends_with('/') {
            w.add_directory(*name, opts(CompressionMethod::Stored)).unwrap();
            continue;
        }
        let m = if *stored { CompressionMethod::Stored } else { CompressionMethod::Deflated };
        w.start_file(*name, opts(m)).unwrap();
        w.write_all(data).unwrap();
    }
    if !comment.is_empty() {
        w.set_comment(comment);
    }
    w.finish().unwrap().into_inner()
}

fn members(list: &[(&str, &[u8])]) -> Content {
    Content::Members(list.iter().map(|(n, d)| (n.to_string(), d.to_vec())).collect())
}

const README: &[u8] = b"field notes\nday 1: nothing to report\n";
const DATA_CSV: &[u8] = b"id,value\n1,3.5\n2,4.25\n";

pub fn zip_fixtures() -> Vec<Fixture> {
    let png = crate::image::png_fixtures().remove(0).bytes;
    let a = build_zip(
        &[("notes/", b"", false), ("notes/readme.txt", README, false), ("photo.png", &png, true)],
        "built on alice-laptop",
    );

    // extra fields and per-member comments need the extended options
    let mut w = zip::ZipWriter::new(Cursor::new(Vec::new()));
    let mut o: FullFileOptions = FullFileOptions::default()
        .compression_method(CompressionMethod::Deflated)
        .last_modified_time(when(2019, 11, 30))
        .unix_permissions(0o755);
    let mut ux = vec![1u8, 4];
    ux.extend(1000u32.to_le_bytes());
    ux.push(4);
    ux.extend(1000u32.to_le_bytes());
    o.add_extra_data(0x7875, ux.into_boxed_slice(), false).unwrap();
    w.start_file("data.csv", o).unwrap();
    w.write_all(DATA_CSV).unwrap();
    let jpeg = crate::image::exif_photo();
    w.start_file("scan.jpg", opts(CompressionMethod::Stored)).unwrap();
    w.write_all(&jpeg).unwrap();
    let b = w.finish().unwrap().into_inner();

    let inner = build_zip(&[("inner.txt", README, false)], "inner comment");
    let c = build_zip(&[("bundle.zip", &inner, true), ("data.csv", DATA_CSV, false)], "");

    vec![
        Fixture::new("dir_png.zip", a, members(&[("notes/readme.txt", README), ("photo.png", &png)])),
        Fixture::new("extra_jpeg.zip", b, members(&[("data.csv", DATA_CSV), ("scan.jpg", &jpeg)])),
        Fixture::new("nested.zip", c, members(&[("bundle.zip", &inner), ("data.csv", DATA_CSV)])),
    ]
}

/// A ZIP holding one member that no cleaner recognizes.
pub fn zip_with_unknown() -> Vec<u8> {
    let blob: Vec<u8> = (0..64u8).map(|i| i.wrapping_mul(37) | 0x80).collect();
    build_zip(&[("readme.txt", README, false), ("blob.bin", &blob, false)], "")
}

fn pax_record(key: &str, value: &str) -> Vec<u8> {
    // the length prefix counts itself
    let body = format!(" {key}={value}\n");
    let mut n = body.len() + 1;
    while format!("{n}{body}").len() != n {
        n += 1;
    }
    format!("{n}{body}").into_bytes()
}

fn file_header(mode: u32, mtime: u64) -> tar::Header {
    let mut h = tar::Header::new_gnu();
    h.set_mode(mode);
    h.set_uid(1000);
    h.set_gid(1000);
    h.set_username("alice").unwrap();
    h.set_groupname("staff").unwrap();
    h.set_mtime(mtime);
    h
}

pub fn build_tar(variant: usize) -> (Vec<u8>, Content) {
    let mut b = tar::Builder::new(Vec::new());
    let mut keep: Vec<(String, Vec<u8>)> = Vec::new();
    let mut add = |b: &mut tar::Builder<Vec<u8>>, path: &str, data: &[u8], mtime: u64| {
        let mut h = file_header(0o644, mtime);
        h.set_size(data.len() as u64);
        b.append_data(&mut h, path, data).unwrap();
        keep.push((path.to_string(), data.to_vec()));
    };
    match variant {
        0 => {
            let mut d = file_header(0o755, 1_600_000_000);
            d.set_entry_type(tar::EntryType::Directory);
            d.set_size(0);
            b.append_data(&mut d, "project/", std::io::empty()).unwrap();
            add(&mut b, "project/readme.txt", README, 1_600_000_100);
            let png = crate::image::png_fixtures().remove(1).bytes;
            add(&mut b, "project/logo.png", &png, 1_600_000_200);
        }
        1 => {
            let long = format!("deep/{}/notes.txt", "very_long_directory_name".repeat(5));
            add(&mut b, &long, README, 1_500_000_000);
            let mut l = file_header(0o777, 1_500_000_001);
            l.set_entry_type(tar::EntryType::Symlink);
            l.set_size(0);
            b.append_link(&mut l, "latest", "deep").unwrap();
            add(&mut b, "data.csv", DATA_CSV, 1_500_000_002);
        }
        _ => {
            let mut pax = Vec::new();
            pax.extend(pax_record("mtime", "1650000000.123456789"));
            pax.extend(pax_record("SCHILY.xattr.user.origin", "alice-laptop"));
            pax.extend(pax_record("comment", "packed by alice"));
            let mut x = tar::Header::new_ustar();
            x.set_entry_type(tar::EntryType::XHeader);
            x.set_size(pax.len() as u64);
            x.set_mode(0o644);
            x.set_mtime(1_650_000_000);
            b.append_data(&mut x, "PaxHeaders/report.txt", pax.as_slice()).unwrap();
            add(&mut b, "report.txt", README, 1_650_000_000);
            let zip = build_zip(&[("data.csv", DATA_CSV, false)], "zipped by alice");
            add(&mut b, "archive.zip", &zip, 1_650_000_001);
        }
    }
    (b.into_inner().unwrap(), Content::Members(keep))
}

pub fn gzip(payload: &[u8], name: &str) -> Vec<u8> {
    let mut e = flate2::GzBuilder::new()
        .filename(name)
        .mtime(1_650_000_000)
        .write(Vec::new(), flate2::Compression::default());
    e.write_all(payload).unwrap();
    e.finish().unwrap()
}

pub fn bzip2(payload: &[u8]) -> Vec<u8> {
    let mut e = bzip2::write::BzEncoder::new(Vec::new(), bzip2::Compression::default());
    e.write_all(payload).unwrap();
    e.finish().unwrap()
}

pub fn tar_fixtures() -> Vec<Fixture> {
    let names = ["project", "longname", "pax"];
    let mut out = Vec::new();
    for (i, n) in names.iter().enumerate() {
        let (t, c) = build_tar(i);
        out.push(Fixture::new(&format!("{n}.tar"), t, c));
    }
    for (i, n) in names.iter().enumerate() {
        let (t, c) = build_tar(i);
        out.push(Fixture::new(&format!("{n}.tar.gz"), gzip(&t, &format!("{n}.tar")), c));
    }
    for (i, n) in names.iter().enumerate() {
        let (t, c) = build_tar(i);
        out.push(Fixture::new(&format!("{n}.tar.bz2"), bzip2(&t), c));
    }
    out
}

const CONTENT_TYPES: &str = "[Content_Types].xml";

fn content_types(main: &str, main_type: &str) -> String {
    format!(
        r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types"><Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/><Default Extension="xml" ContentType="application/xml"/><Default Extension="png" ContentType="image/png"/><Override PartName="/{main}" ContentType="{main_type}"/><Override PartName="/docProps/core.xml" ContentType="application/vnd.openxmlformats-package.core-properties+xml"/><Override PartName="/docProps/app.xml" ContentType="application/vnd.openxmlformats-officedocument.extended-properties+xml"/><Override PartName="/docProps/custom.xml" ContentType="application/vnd.openxmlformats-officedocument.custom-properties+xml"/></Types>"#
    )
}

fn root_rels(main: &str) -> String {
    format!(
        r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships"><Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument" Target="{main}"/><Relationship Id="rId2" Type="http://schemas.openxmlformats.org/package/2006/relationships/metadata/core-properties" Target="docProps/core.xml"/><Relationship Id="rId3" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/extended-properties" Target="docProps/app.xml"/><Relationship Id="rId4" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/custom-properties" Target="/docProps/custom.xml"/><Relationship Id="rId5" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/hyperlink" Target="https://example.com/" TargetMode="External"/></Relationships>"#
    )
}

const CORE: &str = r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<cp:coreProperties xmlns:cp="http://schemas.openxmlformats.org/package/2006/metadata/core-properties" xmlns:dc="http://purl.org/dc/elements/1.1/" xmlns:dcterms="http://purl.org/dc/terms/" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"><dc:creator>Alice Example</dc:creator><cp:lastModifiedBy>Bob Example</cp:lastModifiedBy><cp:revision>7</cp:revision><dcterms:created xsi:type="dcterms:W3CDTF">2021-03-04T14:31:06Z</dcterms:created></cp:coreProperties>"#;

const APP: &str = r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Properties xmlns="http://schemas.openxmlformats.org/officeDocument/2006/extended-properties"><Application>Microsoft Office Word</Application><AppVersion>16.0000</AppVersion><Company>ACME Corp</Company><TotalTime>42</TotalTime></Properties>"#;

const CUSTOM: &str = r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Properties xmlns="http://schemas.openxmlformats.org/officeDocument/2006/custom-properties" xmlns:vt="http://schemas.openxmlformats.org/officeDocument/2006/docPropsVTypes"><property fmtid="{D5CDD505-2E9C-101B-9397-08002B2CF9AE}" pid="2" name="Client"><vt:lpwstr>ACME</vt:lpwstr></property></Properties>"#;

pub fn ooxml_fixtures() -> Vec<Fixture> {
    let png = crate::image::png_fixtures().remove(0).bytes;
    let kinds = [
        (
            "report.docx",
            "word/document.xml",
            "application/vnd.openxmlformats-officedocument.wordprocessingml.document.main+xml",
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<w:document xmlns:w="http://schemas.openxmlformats.org/wordprocessingml/2006/main"><w:body><w:p><w:r><w:t>Quarterly report</w:t></w:r></w:p></w:body></w:document>"#,
            "word/_rels/document.xml.rels",
            "word/media/image1.png",
        ),
        (
            "budget.xlsx",
            "xl/workbook.xml",
            "application/vnd.openxmlformats-officedocument.spreadsheetml.sheet.main+xml",
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<workbook xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main"><sheets><sheet name="Q1" sheetId="1"/></sheets></workbook>"#,
            "xl/_rels/workbook.xml.rels",
            "xl/media/image1.png",
        ),
        (
            "deck.pptx",
            "ppt/presentation.xml",
            "application/vnd.openxmlformats-officedocument.presentationml.presentation.main+xml",
            r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<p:presentation xmlns:p="http://schemas.openxmlformats.org/presentationml/2006/main"><p:sldSz cx="9144000" cy="6858000"/></p:presentation>"#,
            "ppt/_rels/presentation.xml.rels",
            "ppt/media/image1.png",
        ),
    ];
    let part_rels = r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships"><Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/image" Target="media/image1.png"/></Relationships>"#;
    let mut out = Vec::new();
    for (name, main, main_type, body, rels, media) in kinds {
        let ct = content_types(main, main_type);
        let rr = root_rels(main);
        let bytes = build_zip(
            &[
                (CONTENT_TYPES, ct.as_bytes(), false),
                ("_rels/.rels", rr.as_bytes(), false),
                (main, body.as_bytes(), false),
                (rels, part_rels.as_bytes(), false),
                (media, &png, true),
                ("docProps/core.xml", CORE.as_bytes(), false),
                ("docProps/app.xml", APP.as_bytes(), false),
                ("docProps/custom.xml", CUSTOM.as_bytes(), false),
                ("docProps/thumbnail.jpeg", &crate::image::thumbnail(), true),
            ],
            "",
        );
        out.push(Fixture::new(
            name,
            bytes,
            members(&[(main, body.as_bytes()), (rels, part_rels.as_bytes()), (media, &png)]),
        ));
    }
    out
}

const ODF_META: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<office:document-meta xmlns:office="urn:oasis:names:tc:opendocument:xmlns:office:1.0" xmlns:meta="urn:oasis:names:tc:opendocument:xmlns:meta:1.0" xmlns:dc="http://purl.org/dc/elements/1.1/" office:version="1.3"><office:meta><meta:initial-creator>Alice Example</meta:initial-creator><dc:creator>Bob Example</dc:creator><meta:creation-date>2021-03-04T14:31:06</meta:creation-date><meta:generator>LibreOffice/7.3.7.2$Linux_X86_64</meta:generator><meta:editing-duration>PT1H2M</meta:editing-duration><meta:document-statistic meta:page-count="3" meta:word-count="812"/><meta:user-defined meta:name="Client">ACME</meta:user-defined></office:meta></office:document-meta>"#;

pub fn odf_fixtures() -> Vec<Fixture> {
    let png = crate::image::png_fixtures().remove(2).bytes;
    let kinds = [
        ("minutes.odt", "application/vnd.oasis.opendocument.text", "<office:text><text:p>Minutes</text:p></office:text>"),
        ("ledger.ods", "application/vnd.oasis.opendocument.spreadsheet", "<office:spreadsheet><table:table table:name=\"Q1\"/></office:spreadsheet>"),
        ("slides.odp", "application/vnd.oasis.opendocument.presentation", "<office:presentation><draw:page draw:name=\"p1\"/></office:presentation>"),
    ];
    let mut out = Vec::new();
    for (name, mime, inner) in kinds {
        let content = format!(
            r#"<?xml version="1.0" encoding="UTF-8"?>
<office:document-content xmlns:office="urn:oasis:names:tc:opendocument:xmlns:office:1.0" xmlns:text="urn:oasis:names:tc:opendocument:xmlns:text:1.0" xmlns:table="urn:oasis:names:tc:opendocument:xmlns:table:1.0" xmlns:draw="urn:oasis:names:tc:opendocument:xmlns:drawing:1.0" office:version="1.3"><office:body>{inner}</office:body></office:document-content>"#
        );
        let manifest = format!(
            r#"<?xml version="1.0" encoding="UTF-8"?>
<manifest:manifest xmlns:manifest="urn:oasis:names:tc:opendocument:xmlns:manifest:1.0" manifest:version="1.3"><manifest:file-entry manifest:full-path="/" manifest:media-type="{mime}"/><manifest:file-entry manifest:full-path="content.xml" manifest:media-type="text/xml"/><manifest:file-entry manifest:full-path="meta.xml" manifest:media-type="text/xml"/><manifest:file-entry manifest:full-path="Pictures/logo.png" manifest:media-type="image/png"/><manifest:file-entry manifest:full-path="Thumbnails/thumbnail.png" manifest:media-type="image/png"/></manifest:manifest>"#
        );
        let bytes = build_zip(
            &[
                ("mimetype", mime.as_bytes(), true),
                ("content.xml", content.as_bytes(), false),
                ("meta.xml", ODF_META.as_bytes(), false),
                ("Pictures/logo.png", &png, true),
                ("Thumbnails/thumbnail.png", &crate::image::bare_png(), true),
                ("META-INF/manifest.xml", manifest.as_bytes(), false),
            ],
            "",
        );
        out.push(Fixture::new(
            name,
            bytes,
            members(&[("mimetype", mime.as_bytes()), ("content.xml", content.as_bytes()), ("Pictures/logo.png", &png)]),
        ));
    }
    out
}
