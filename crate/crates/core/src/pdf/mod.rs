//! Structural PDF scrubber.
//!
//! The document is loaded with every incremental update collapsed, then
//! rewritten from the catalog outward: only reachable objects are emitted,
//! renumbered densely, behind one classic xref table. Stream bytes are
//! copied as stored.

mod document;
pub mod object;
mod parser;
mod writer;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

pub use document::{decode_stream, parse_pdf, PdfDocument};
pub use object::{Dict, ObjectId, PdfObject, PdfStream, PdfString};

use crate::engine::{settle, Outcome};
use crate::model::{CleanPolicy, CleanResult, MetadataEntry};
use crate::util::{binary_note, hex, render_text};

#[derive(Debug, Error)]
pub enum PdfError {
    #[error("encrypted PDF documents are not supported")]
    EncryptedDocument,
    #[error("PDF with an XFA form is not supported")]
    XfaForm,
    #[error("malformed PDF cross-reference data: {0}")]
    MalformedXref(String),
    #[error("unsupported PDF stream filter: {0}")]
    UnsupportedFilter(String),
    #[error("malformed PDF at offset {offset:#x}: {reason}")]
    Malformed { offset: u64, reason: String },
}

impl PdfError {
    pub fn is_unsupported(&self) -> bool {
        matches!(self, PdfError::EncryptedDocument | PdfError::XfaForm | PdfError::UnsupportedFilter(_))
    }

    pub fn offset(&self) -> Option<u64> {
        match self {
            PdfError::Malformed { offset, .. } => Some(*offset),
            _ => None,
        }
    }
}

/// Catalog keys needed to display or navigate the document.
const CATALOG_KEYS: &[&str] = &[
    "Type",
    "Version",
    "Extensions",
    "Pages",
    "PageLabels",
    "Names",
    "Dests",
    "ViewerPreferences",
    "PageLayout",
    "PageMode",
    "Outlines",
    "Threads",
    "OpenAction",
    "AA",
    "URI",
    "AcroForm",
    "StructTreeRoot",
    "MarkInfo",
    "Lang",
    "OCProperties",
    "NeedsRendering",
    "Collection",
];

/// Trailer and xref-stream keys that carry no document information.
const TRAILER_KEYS: &[&str] = &[
    "Size", "Root", "Info", "ID", "Prev", "XRefStm", "Type", "W", "Index", "Filter", "DecodeParms", "Length", "DL",
];

/// Keys removed from every reachable dictionary.
const METADATA_KEYS: &[&str] = &["Metadata", "PieceInfo", "LastModified"];

pub const ACTIVE_CONTENT_WARNING: &str =
    "PDF active and embedded content (JavaScript, attachments, links) is not neutralized";
pub const SIGNATURE_WARNING: &str = "PDF digital signatures are invalidated by cleaning";

fn render_value(doc: &PdfDocument, o: &PdfObject) -> String {
    match doc.resolve(o) {
        Some(PdfObject::String(s)) => render_text(&object::text_string(&s.bytes)),
        Some(PdfObject::Name(n)) => String::from_utf8_lossy(n).into_owned(),
        Some(PdfObject::Stream(s)) => binary_note(s.data.len()),
        Some(other) => {
            let mut b = Vec::new();
            writer::write_object(&mut b, other);
            render_text(&String::from_utf8_lossy(&b))
        }
        None => "null".into(),
    }
}

struct Scrubbed {
    objects: Vec<PdfObject>,
    findings: Vec<MetadataEntry>,
    signed: bool,
}

/// Page objects in tree order, keyed by object number.
fn page_labels(doc: &PdfDocument, root: &Dict) -> HashMap<u32, String> {
    let mut labels = HashMap::new();
    let Some(pages) = root.get("Pages").and_then(PdfObject::reference) else { return labels };
    labels.insert(pages.0, "Pages".to_string());
    let mut seen = HashSet::new();
    let mut stack = vec![pages];
    let mut n = 0;
    while let Some(id) = stack.pop() {
        if !seen.insert(id.0) {
            continue;
        }
        let Some(d) = doc.get(id).and_then(PdfObject::dict) else { continue };
        match d.get("Kids") {
            Some(PdfObject::Array(kids)) => {
                stack.extend(kids.iter().rev().filter_map(PdfObject::reference));
            }
            _ => {
                n += 1;
                labels.insert(id.0, format!("Page{n}"));
            }
        }
    }
    labels
}

fn xmp_entries(doc: &PdfDocument, meta: &PdfObject, label: &str, location: &str) -> Vec<MetadataEntry> {
    let mut out = Vec::new();
    match doc.resolve(meta) {
        Some(PdfObject::Stream(s)) => {
            let decoded = decode_stream(s).ok();
            let len = decoded.as_ref().map_or(s.data.len(), Vec::len);
            out.push(MetadataEntry::contextual(format!("PDF.{label}.Metadata"), format!("XMP, {len} bytes"), location));
            for (k, v) in decoded.as_deref().map(crate::xmp::fields).unwrap_or_default() {
                out.push(MetadataEntry::contextual(format!("PDF.XMP.{k}"), v, location));
            }
        }
        _ => out.push(MetadataEntry::contextual(format!("PDF.{label}.Metadata"), render_value(doc, meta), location)),
    }
    out
}

/// Removes metadata keys from one dictionary and reports them.
fn scrub_dict(doc: &PdfDocument, d: &mut Dict, label: &str, location: &str, catalog: bool, out: &mut Vec<MetadataEntry>) {
    for key in METADATA_KEYS {
        let Some(v) = d.remove(key) else { continue };
        match *key {
            "Metadata" => out.extend(xmp_entries(doc, &v, label, location)),
            "PieceInfo" => {
                let apps = doc.resolve(&v).and_then(PdfObject::dict).map(|p| p.keys().collect::<Vec<_>>().join(", "));
                out.push(MetadataEntry::contextual(
                    format!("PDF.{label}.PieceInfo"),
                    apps.filter(|a| !a.is_empty()).unwrap_or_else(|| "present".into()),
                    location,
                ));
            }
            _ => out.push(MetadataEntry::contextual(format!("PDF.{label}.{key}"), render_value(doc, &v), location)),
        }
    }
    if catalog {
        let unknown: Vec<String> = d.keys().filter(|k| !CATALOG_KEYS.contains(&k.as_str())).collect();
        for k in unknown {
            let v = d.remove(&k).unwrap();
            out.push(MetadataEntry::unknown(format!("PDF.Catalog.{k}"), render_value(doc, &v), location));
        }
    }
}

fn scrub_nested(doc: &PdfDocument, o: &mut PdfObject, label: &str, location: &str, out: &mut Vec<MetadataEntry>, signed: &mut bool) {
    if let Some(d) = o.dict_mut() {
        if d.name("Type") == Some(b"Sig") || d.name("FT") == Some(b"Sig") {
            *signed = true;
        }
        scrub_dict(doc, d, label, location, false, out);
    }
    match o {
        PdfObject::Array(a) => a.iter_mut().for_each(|x| scrub_nested(doc, x, label, location, out, signed)),
        PdfObject::Dictionary(d) | PdfObject::Stream(PdfStream { dict: d, .. }) => {
            d.0.iter_mut().for_each(|(_, x)| scrub_nested(doc, x, label, location, out, signed))
        }
        _ => {}
    }
}

/// Objects reachable from the trailer before anything is removed.
fn reachable_from_trailer(doc: &PdfDocument) -> HashSet<u32> {
    let mut seen = HashSet::new();
    let mut queue: Vec<ObjectId> = Vec::new();
    PdfObject::Dictionary(doc.trailer.clone()).for_each_ref(&mut |r| queue.push(r));
    while let Some(id) = queue.pop() {
        if !seen.insert(id.0) {
            continue;
        }
        if let Some(o) = doc.get(id) {
            o.for_each_ref(&mut |r| queue.push(r));
        }
    }
    seen
}

fn scrub(doc: &PdfDocument) -> Result<Scrubbed, PdfError> {
    let root_id = doc.root_id().ok_or_else(|| PdfError::Malformed {
        offset: 0,
        reason: "trailer has no /Root reference".into(),
    })?;
    let root = doc.get(root_id).and_then(PdfObject::dict).ok_or_else(|| PdfError::Malformed {
        offset: 0,
        reason: "/Root does not resolve to a dictionary".into(),
    })?;
    if let Some(form) = root.get("AcroForm").and_then(|f| doc.resolve(f)).and_then(PdfObject::dict) {
        if form.get("XFA").is_some() {
            return Err(PdfError::XfaForm);
        }
    }

    let mut findings = Vec::new();
    if let Some(info) = doc.trailer.get("Info") {
        let location = match info.reference() {
            Some((n, _)) => format!("Info dictionary (object {n})"),
            None => "Info dictionary".into(),
        };
        match doc.resolve(info).and_then(PdfObject::dict) {
            Some(d) if !d.0.is_empty() => {
                for (k, v) in &d.0 {
                    findings.push(MetadataEntry::contextual(
                        format!("PDF.Info.{}", String::from_utf8_lossy(k)),
                        render_value(doc, v),
                        &location,
                    ));
                }
            }
            _ => findings.push(MetadataEntry::contextual("PDF.Info", "empty", &location)),
        }
    }
    if let Some(id) = doc.trailer.get("ID") {
        let value = match id {
            PdfObject::Array(a) => a
                .iter()
                .map(|x| match x {
                    PdfObject::String(s) => hex(&s.bytes),
                    other => render_value(doc, other),
                })
                .collect::<Vec<_>>()
                .join(" "),
            other => render_value(doc, other),
        };
        findings.push(MetadataEntry::contextual("PDF.ID", value, "trailer"));
    }
    for k in doc.trailer.keys().filter(|k| !TRAILER_KEYS.contains(&k.as_str())) {
        findings.push(MetadataEntry::unknown(
            format!("PDF.Trailer.{k}"),
            render_value(doc, doc.trailer.get(&k).unwrap()),
            "trailer",
        ));
    }
    if doc.revisions > 1 {
        findings.push(MetadataEntry::contextual(
            "PDF.Revisions",
            format!("{} revisions (incremental updates)", doc.revisions),
            "cross-reference chain",
        ));
    }
    let original = reachable_from_trailer(doc);
    let orphans = doc
        .objects
        .iter()
        .filter(|(id, o)| {
            !original.contains(&id.0)
                && !matches!(o.dict().and_then(|d| d.name("Type")), Some(b"XRef") | Some(b"ObjStm"))
        })
        .count();
    if orphans > 0 {
        findings.push(MetadataEntry::contextual(
            "PDF.OrphanedObjects",
            format!("{orphans} unreferenced objects"),
            "object table",
        ));
    }

    let labels = page_labels(doc, root);
    let mut order: Vec<ObjectId> = Vec::new();
    let mut scrubbed: Vec<PdfObject> = Vec::new();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([root_id]);
    let mut signed = false;
    while let Some(id) = queue.pop_front() {
        if !seen.insert(id.0) {
            continue;
        }
        let Some(obj) = doc.get(id) else { continue };
        let mut obj = obj.clone();
        let label = if id == root_id {
            "Catalog".to_string()
        } else {
            labels.get(&id.0).cloned().unwrap_or_else(|| format!("Object{}", id.0))
        };
        let location = format!("object {}", id.0);
        if let PdfObject::Stream(s) = &mut obj {
            // Length is rewritten as a direct integer on output.
            s.dict.remove("Length");
        }
        if let Some(d) = obj.dict_mut() {
            scrub_dict(doc, d, &label, &location, id == root_id, &mut findings);
        }
        scrub_nested(doc, &mut obj, &label, &location, &mut findings, &mut signed);
        obj.for_each_ref(&mut |r| {
            if !seen.contains(&r.0) {
                queue.push_back(r);
            }
        });
        order.push(id);
        scrubbed.push(obj);
    }

    let numbers: HashMap<u32, u32> = order.iter().enumerate().map(|(i, id)| (id.0, i as u32 + 1)).collect();
    let valid: BTreeSet<u32> = numbers.keys().copied().collect();
    for o in &mut scrubbed {
        o.map_refs(&|r| valid.contains(&r.0).then(|| (numbers[&r.0], 0)));
    }
    Ok(Scrubbed {
        objects: scrubbed,
        findings,
        signed,
    })
}

pub(crate) fn process(data: &[u8]) -> crate::error::Result<Outcome> {
    let doc = parse_pdf(data)?;
    let s = scrub(&doc)?;
    let mut out = Outcome::default();
    for e in s.findings {
        out.removed(e);
    }
    out.warnings.push(ACTIVE_CONTENT_WARNING.into());
    if s.signed {
        out.warnings.push(SIGNATURE_WARNING.into());
    }
    let version = if doc.version.is_empty() { "1.7" } else { &doc.version };
    out.output = writer::write_document(version, &s.objects);
    Ok(out)
}

/// Rewrites the document as a single revision without /Info, /ID, XMP
/// streams, /PieceInfo, /LastModified or unrecognized catalog keys.
pub fn clean_pdf(data: &[u8]) -> CleanResult {
    settle(data, process(data), &CleanPolicy::default())
}

/// Lists every metadata field the cleaner would remove.
pub fn inspect_pdf(data: &[u8]) -> crate::error::Result<Vec<MetadataEntry>> {
    let doc = parse_pdf(data)?;
    Ok(scrub(&doc)?.findings)
}
