//! Office Open XML packages (.docx, .xlsx, .pptx): the `docProps/` folder
//! holds the document properties and is removed wholesale.

use std::collections::HashSet;

use crate::archive::xml::{attr, child_fields, filter_elements, is_element};
use crate::archive::zip::{self, Flavor, ZipArchive};
use crate::engine::{Ctx, Outcome};
use crate::error::{Error, Result};
use crate::model::MetadataEntry;
use crate::util::{binary_note, render_text};

pub const CONTENT_TYPES: &str = "[Content_Types].xml";
const PROPS_DIR: &str = "docProps/";

struct Ooxml;

fn describe_props(name: &str, content: &[u8]) -> Vec<MetadataEntry> {
    let file = &name[PROPS_DIR.len()..];
    let mut out = Vec::new();
    match file {
        "core.xml" => {
            for f in child_fields(content, "coreProperties") {
                out.push(MetadataEntry::contextual(format!("OOXML.core.{}", f.name), render_text(f.text.trim()), name));
            }
        }
        "app.xml" => {
            for f in child_fields(content, "Properties") {
                out.push(MetadataEntry::contextual(format!("OOXML.app.{}", f.name), render_text(f.text.trim()), name));
            }
        }
        "custom.xml" => {
            for f in child_fields(content, "Properties") {
                let key = f
                    .attrs
                    .iter()
                    .find(|(k, _)| k == "name")
                    .map(|(_, v)| v.clone())
                    .unwrap_or(f.name);
                out.push(MetadataEntry::contextual(format!("OOXML.custom.{key}"), render_text(f.text.trim()), name));
            }
        }
        f if f.starts_with("thumbnail") => {
            out.push(MetadataEntry::contextual("OOXML.thumbnail", binary_note(content.len()), name));
        }
        _ => {}
    }
    if out.is_empty() && !name.ends_with('/') {
        out.push(MetadataEntry::contextual("OOXML.docProps", binary_note(content.len()), name));
    }
    out
}

/// Resolves a relationship target against the folder of its source part.
fn resolve_target(rels_path: &str, target: &str) -> String {
    if let Some(abs) = target.strip_prefix('/') {
        return normalize(abs);
    }
    // "word/_rels/document.xml.rels" describes "word/document.xml"
    let source_dir = match rels_path.rsplit_once("_rels/") {
        Some((dir, _)) => dir,
        None => "",
    };
    normalize(&format!("{source_dir}{target}"))
}

fn normalize(path: &str) -> String {
    let mut parts: Vec<&str> = Vec::new();
    for seg in path.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                parts.pop();
            }
            s => parts.push(s),
        }
    }
    parts.join("/")
}

fn invalid(name: &str, reason: String) -> Error {
    Error::malformed("OOXML", 0, format!("{name}: {reason}"))
}

impl Flavor for Ooxml {
    fn label(&self) -> &'static str {
        "OOXML"
    }

    fn omit(&self, name: &str, content: &[u8]) -> Option<Vec<MetadataEntry>> {
        name.starts_with(PROPS_DIR).then(|| describe_props(name, content))
    }

    fn rewrite(&self, name: &str, content: &[u8], omitted: &HashSet<String>) -> Result<Option<Vec<u8>>> {
        if name == CONTENT_TYPES {
            let (out, _) = filter_elements(content, |e| {
                is_element(e, "Override")
                    && attr(e, "PartName").is_some_and(|p| omitted.contains(&normalize(&p)))
            })
            .map_err(|r| invalid(name, r))?;
            return Ok(Some(out));
        }
        if name.ends_with(".rels") {
            let (out, _) = filter_elements(content, |e| {
                is_element(e, "Relationship")
                    && attr(e, "TargetMode").as_deref() != Some("External")
                    && attr(e, "Target").is_some_and(|t| omitted.contains(&resolve_target(name, &t)))
            })
            .map_err(|r| invalid(name, r))?;
            return Ok(Some(out));
        }
        Ok(None)
    }
}

pub(crate) fn process(data: &[u8], ctx: &Ctx) -> Result<Outcome> {
    let archive = ZipArchive::parse(data)?;
    if !archive.entries.iter().any(|e| e.name == CONTENT_TYPES) {
        return Err(invalid(CONTENT_TYPES, "missing".into()));
    }
    zip::rebuild(data, ctx, &Ooxml).map(|(o, _)| o)
}

/// Relationship targets of every `.rels` part, resolved to package paths.
/// External targets are skipped.
pub fn relationship_targets(data: &[u8]) -> Result<Vec<(String, String)>> {
    let archive = ZipArchive::parse(data)?;
    let mut out = Vec::new();
    for e in archive.entries.iter().filter(|e| e.name.ends_with(".rels")) {
        let content = e.contents(data)?;
        let names = std::cell::RefCell::new(Vec::new());
        filter_elements(&content, |el| {
            if is_element(el, "Relationship") && attr(el, "TargetMode").as_deref() != Some("External") {
                if let Some(t) = attr(el, "Target") {
                    names.borrow_mut().push(resolve_target(&e.name, &t));
                }
            }
            false
        })
        .map_err(|r| invalid(&e.name, r))?;
        out.extend(names.into_inner().into_iter().map(|t| (e.name.clone(), t)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_resolution() {
        assert_eq!(resolve_target("_rels/.rels", "docProps/core.xml"), "docProps/core.xml");
        assert_eq!(resolve_target("_rels/.rels", "/docProps/app.xml"), "docProps/app.xml");
        assert_eq!(resolve_target("word/_rels/document.xml.rels", "media/image1.png"), "word/media/image1.png");
        assert_eq!(resolve_target("word/_rels/document.xml.rels", "../docProps/custom.xml"), "docProps/custom.xml");
    }

    #[test]
    fn core_properties_itemized() {
        let core = br#"<?xml version="1.0"?><cp:coreProperties xmlns:cp="x" xmlns:dc="y"><dc:creator>alice</dc:creator><dc:title>Plan</dc:title></cp:coreProperties>"#;
        let e = describe_props("docProps/core.xml", core);
        assert_eq!(e[0].key, "OOXML.core.creator");
        assert_eq!(e[0].value, "alice");
        assert_eq!(e[0].location, "docProps/core.xml");
        assert_eq!(e[1].key, "OOXML.core.title");
    }
}
