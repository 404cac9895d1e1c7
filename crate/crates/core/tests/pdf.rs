use demeta::pdf::{ACTIVE_CONTENT_WARNING, PdfObject};
use demeta::{clean_file, clean_pdf, inspect_pdf, parse_pdf, Category, CleanPolicy, CleanStatus, PdfError};
use demeta_fixtures::oracle::{contains, pdf_page_contents, pdf_page_count};
use demeta_fixtures::pdf::*;
use proptest::prelude::*;

fn fixture(name: &str) -> demeta_fixtures::Fixture {
    pdf_fixtures().into_iter().find(|f| f.name == name).unwrap()
}

#[test]
fn minimal_pdf_parses() {
    let d = minimal_pdf();
    let doc = parse_pdf(&d).unwrap();
    let lo = lopdf::Document::load_mem(&d).unwrap();
    assert_eq!(doc.objects.len(), lo.objects.len());
    let root = doc.root_id().unwrap();
    let cat = doc.get(root).and_then(|o| match o {
        PdfObject::Dictionary(d) => Some(d),
        _ => None,
    });
    assert_eq!(cat.unwrap().name("Type"), Some(&b"Catalog"[..]));
    assert_eq!(doc.revisions, 1);
}

#[test]
fn encrypted_rejected() {
    let d = encrypted_pdf();
    assert!(matches!(parse_pdf(&d), Err(PdfError::EncryptedDocument)));
    let r = clean_file(&d, Some("secret.pdf"), &CleanPolicy::default());
    assert_eq!(r.status, CleanStatus::Unsupported);
    assert!(r.output.is_none());
}

#[test]
fn newest_info_wins() {
    let f = fixture("incremental.pdf");
    let doc = parse_pdf(&f.bytes).unwrap();
    assert_eq!(doc.revisions, 2);
    let e = inspect_pdf(&f.bytes).unwrap();
    assert!(e.iter().any(|e| e.key == "PDF.Info.Author" && e.value == "Bob Reviewer"));
    assert!(!e.iter().any(|e| e.value == "Alice Original"));
    assert!(e.iter().any(|e| e.key == "PDF.Revisions"));
}

#[test]
fn incremental_collapsed() {
    let f = fixture("incremental.pdf");
    assert!(contains(&f.bytes, b"Alice Original"));
    let r = clean_pdf(&f.bytes);
    assert_eq!(r.status, CleanStatus::Cleaned);
    let out = r.output.unwrap();
    assert!(!contains(&out, b"Alice Original"));
    assert!(!contains(&out, b"Bob Reviewer"));
    assert_eq!(parse_pdf(&out).unwrap().revisions, 1);
    let lo = lopdf::Document::load_mem(&out).unwrap();
    assert!(lo.trailer.get(b"Info").is_err());
    assert!(lo.trailer.get(b"Prev").is_err());
}

#[test]
fn info_and_xmp_removed() {
    let f = fixture("info_xmp.pdf");
    let r = clean_pdf(&f.bytes);
    assert_eq!(r.status, CleanStatus::Cleaned);
    let keys: Vec<&str> = r.removed.iter().map(|e| e.key.as_str()).collect();
    for k in ["PDF.Info.Author", "PDF.Info.Producer", "PDF.Catalog.Metadata"] {
        assert!(keys.contains(&k), "{k} missing from {keys:?}");
    }
    let xmp = r.removed.iter().find(|e| e.key == "PDF.Catalog.Metadata").unwrap();
    assert!(xmp.value.starts_with("XMP, ") && xmp.value.ends_with(" bytes"), "{}", xmp.value);
    assert!(r.warnings.iter().any(|w| w == ACTIVE_CONTENT_WARNING));
    let out = r.output.unwrap();
    let lo = lopdf::Document::load_mem(&out).unwrap();
    assert!(lo.trailer.get(b"Info").is_err());
    assert!(lo.catalog().unwrap().get(b"Metadata").is_err());
    assert_eq!(inspect_pdf(&out).unwrap(), []);
}

#[test]
fn producer_entry_is_contextual() {
    let (d, _) = build_pdf(&PdfSpec {
        pages: &["x"],
        info: &[("Producer", "X")],
        xmp: None,
        id: false,
        xref_stream: false,
        page_extras: false,
        compress: false,
    });
    let e = inspect_pdf(&d).unwrap();
    let p = e.iter().find(|e| e.key == "PDF.Info.Producer").unwrap();
    assert_eq!((p.value.as_str(), p.category), ("X", Category::Contextual));
}

#[test]
fn xmp_creator_tool_reported() {
    let (d, _) = build_pdf(&PdfSpec {
        pages: &["x"],
        info: &[],
        xmp: Some(demeta_fixtures::image::xmp_packet("Adobe Photoshop CS3 Windows")),
        id: false,
        xref_stream: false,
        page_extras: false,
        compress: false,
    });
    let e = inspect_pdf(&d).unwrap();
    assert!(e.iter().any(|e| e.value == "Adobe Photoshop CS3 Windows"), "{e:?}");
}

#[test]
fn minimal_is_clean() {
    let d = minimal_pdf();
    assert_eq!(inspect_pdf(&d).unwrap(), []);
    let r = clean_pdf(&d);
    assert_eq!(r.status, CleanStatus::AlreadyClean);
    assert_eq!(r.output.unwrap(), d);
}

#[test]
fn xref_stream_pages_kept() {
    let f = fixture("xref_stream.pdf");
    let e = inspect_pdf(&f.bytes).unwrap();
    assert!(e.iter().any(|e| e.key.ends_with("PieceInfo")));
    assert!(e.iter().any(|e| e.key.ends_with("LastModified")));
    let oi = e.iter().find(|e| e.key == "PDF.Catalog.OutputIntents").unwrap();
    assert_eq!(oi.category, Category::Unknown);
    let out = clean_pdf(&f.bytes).output.unwrap();
    assert_eq!(pdf_page_count(&out), 3);
    assert_eq!(pdf_page_contents(&out), pdf_page_contents(&f.bytes));
    assert!(!contains(&out, b"alice-laptop"));
}

#[test]
fn garbage_fails() {
    let r = clean_pdf(b"%PDF-1.4\nthis is not a pdf\n");
    assert_eq!(r.status, CleanStatus::Failed);
    assert!(r.output.is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn output_independent_of_info(
        author in "zq[a-zA-Z ]{4,30}",
        producer in "[a-zA-Z0-9 .]{1,30}",
        id in any::<bool>(),
        xmp in any::<bool>(),
    ) {
        let pages = ["one", "two"];
        let spec = |info: &[(&str, &str)], id, xmp: Option<String>| build_pdf(&PdfSpec {
            pages: &pages, info, xmp, id, xref_stream: false, page_extras: false, compress: false,
        }).0;
        let tagged = spec(&[("Author", &author), ("Producer", &producer)], id, xmp.then(|| demeta_fixtures::image::xmp_packet(&producer)));
        let bare = spec(&[], false, None);
        let a = clean_pdf(&tagged).output.unwrap();
        let b = clean_pdf(&bare).output.unwrap();
        prop_assert_eq!(pdf_page_contents(&a), pdf_page_contents(&b));
        prop_assert!(!contains(&a, author.as_bytes()));
        prop_assert!(inspect_pdf(&a).unwrap().is_empty());
    }
}
