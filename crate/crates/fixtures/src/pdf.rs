//! PDF fixtures written with `lopdf`.

use lopdf::content::{Content as Ops, Operation};
use lopdf::xref::XrefType;
use lopdf::{dictionary, Dictionary, Document, Object, Stream, StringFormat};

use crate::{Content, Fixture};

fn page_ops(text: &str) -> Vec<u8> {
    Ops {
        operations: vec![
            Operation::new("BT", vec![]),
            Operation::new("Tf", vec!["F1".into(), 18.into()]),
            Operation::new("Td", vec![72.into(), 720.into()]),
            Operation::new("Tj", vec![Object::string_literal(text)]),
            Operation::new("ET", vec![]),
        ],
    }
    .encode()
    .unwrap()
}

pub struct PdfSpec<'a> {
    pub pages: &'a [&'a str],
    pub info: &'a [(&'a str, &'a str)],
    pub xmp: Option<String>,
    pub id: bool,
    pub xref_stream: bool,
    pub page_extras: bool,
    pub compress: bool,
}

/// Builds a document and returns it with its decoded page contents.
pub fn build_pdf(s: &PdfSpec) -> (Vec<u8>, Vec<Vec<u8>>) {
    let mut doc = Document::with_version(if s.xref_stream { "1.5" } else { "1.4" });
    let pages_id = doc.new_object_id();
    let font = doc.add_object(dictionary! {
        "Type" => "Font", "Subtype" => "Type1", "BaseFont" => "Helvetica",
    });
    let resources = doc.add_object(dictionary! { "Font" => dictionary! { "F1" => font } });
    let mut kids = Vec::new();
    let mut contents = Vec::new();
    for text in s.pages {
        let ops = page_ops(text);
        contents.push(ops.clone());
        let cid = doc.add_object(Stream::new(Dictionary::new(), ops));
        let mut page = dictionary! {
            "Type" => "Page", "Parent" => pages_id, "Contents" => cid, "Resources" => resources,
            "MediaBox" => vec![0.into(), 0.into(), 612.into(), 792.into()],
        };
        if s.page_extras {
            page.set("LastModified", Object::string_literal("D:20210304143106+01'00'"));
            page.set("PieceInfo", dictionary! {
                "Illustrator" => dictionary! { "Private" => Object::string_literal("alice-laptop") },
            });
        }
        kids.push(doc.add_object(page).into());
    }
    let count = kids.len() as i64;
    doc.objects.insert(pages_id, dictionary! { "Type" => "Pages", "Kids" => kids, "Count" => count }.into());
    let mut catalog = dictionary! { "Type" => "Catalog", "Pages" => pages_id };
    if let Some(x) = &s.xmp {
        let m = doc.add_object(Stream::new(dictionary! { "Type" => "Metadata", "Subtype" => "XML" }, x.clone().into_bytes()));
        catalog.set("Metadata", m);
    }
    if s.page_extras {
        catalog.set("OutputIntents", vec![dictionary! { "Type" => "OutputIntent", "S" => "GTS_PDFA1" }.into()]);
    }
    let root = doc.add_object(catalog);
    doc.trailer.set("Root", root);
    if !s.info.is_empty() {
        let mut info = Dictionary::new();
        for (k, v) in s.info {
            info.set(*k, Object::string_literal(*v));
        }
        let id = doc.add_object(info);
        doc.trailer.set("Info", id);
    }
    if s.id {
        let a = Object::String(b"\x8a\x10\x33\x42\x99\x01\xfe\x77".to_vec(), StringFormat::Hexadecimal);
        doc.trailer.set("ID", vec![a.clone(), a]);
    }
    if s.xref_stream {
        doc.reference_table.cross_reference_type = XrefType::CrossReferenceStream;
    }
    if s.compress {
        doc.compress();
    }
    let mut out = Vec::new();
    doc.save_to(&mut out).unwrap();
    (out, contents)
}

/// Appends an incremental update that replaces the Info dictionary.
pub fn incremental_update(base: &[u8], info_id: u32, author: &str) -> Vec<u8> {
    let doc = Document::load_mem(base).unwrap();
    let root = doc.trailer.get(b"Root").unwrap().as_reference().unwrap();
    let size = doc.max_id + 1;
    let prev = base
        .windows(9)
        .rposition(|w| w == b"startxref")
        .map(|p| {
            let s = std::str::from_utf8(&base[p + 9..]).unwrap();
            s.split_whitespace().next().unwrap().parse::<usize>().unwrap()
        })
        .unwrap();
    let mut d = base.to_vec();
    let off = d.len();
    d.extend(format!("{info_id} 0 obj\n<< /Author ({author}) /Producer (Acrobat Distiller 9.0) >>\nendobj\n").as_bytes());
    let xref = d.len();
    d.extend(format!("xref\n{info_id} 1\n{off:010} 00000 n\r\ntrailer\n<< /Size {size} /Root {} 0 R /Info {info_id} 0 R /Prev {prev} >>\nstartxref\n{xref}\n%%EOF\n", root.0).as_bytes());
    d
}

pub fn pdf_fixtures() -> Vec<Fixture> {
    let xmp = crate::image::xmp_packet("Microsoft Word 16");
    let (a, pa) = build_pdf(&PdfSpec {
        pages: &["Quarterly report", "Appendix"],
        info: &[("Author", "Alice Example"), ("Creator", "Microsoft Word 16"), ("Producer", "Acrobat Distiller 9.0"), ("CreationDate", "D:20210304143106+01'00'")],
        xmp: Some(xmp),
        id: true,
        xref_stream: false,
        page_extras: false,
        compress: true,
    });

    let (base, pb) = build_pdf(&PdfSpec {
        pages: &["Draft"],
        info: &[("Author", "Alice Original"), ("Title", "Draft v1")],
        xmp: None,
        id: false,
        xref_stream: false,
        page_extras: false,
        compress: false,
    });
    let info_id = Document::load_mem(&base).unwrap().trailer.get(b"Info").unwrap().as_reference().unwrap().0;
    let b = incremental_update(&base, info_id, "Bob Reviewer");

    let (c, pc) = build_pdf(&PdfSpec {
        pages: &["Poster", "Back side", "Notes"],
        info: &[("Creator", "Adobe InDesign CS3")],
        xmp: None,
        id: true,
        xref_stream: true,
        page_extras: true,
        compress: true,
    });
    vec![
        Fixture::new("info_xmp.pdf", a, Content::Pages(pa)),
        Fixture::new("incremental.pdf", b, Content::Pages(pb)),
        Fixture::new("xref_stream.pdf", c, Content::Pages(pc)),
    ]
}

/// A one-page document with nothing to remove besides what the writer
/// produces itself.
pub fn minimal_pdf() -> Vec<u8> {
    build_pdf(&PdfSpec {
        pages: &["Hello"],
        info: &[],
        xmp: None,
        id: false,
        xref_stream: false,
        page_extras: false,
        compress: false,
    })
    .0
}

pub fn encrypted_pdf() -> Vec<u8> {
    let (base, _) = build_pdf(&PdfSpec {
        pages: &["secret"],
        info: &[],
        xmp: None,
        id: false,
        xref_stream: false,
        page_extras: false,
        compress: false,
    });
    let mut doc = Document::load_mem(&base).unwrap();
    let enc = doc.add_object(dictionary! { "Filter" => "Standard", "V" => 1, "R" => 2, "P" => -4 });
    doc.trailer.set("Encrypt", enc);
    let mut out = Vec::new();
    doc.save_to(&mut out).unwrap();
    out
}
