//! OpenDocument packages (.odt, .ods, .odp, ...): `meta.xml` and the
//! `Thumbnails/` folder are removed and the manifest patched to match.

use std::collections::HashSet;

use crate::archive::xml::{attr, child_fields, filter_elements, is_element};
use crate::archive::zip::{self, Flavor, ZipArchive};
use crate::engine::{Ctx, Outcome};
use crate::error::{Error, Result};
use crate::model::MetadataEntry;
use crate::util::{binary_note, render_text};

pub const MIMETYPE: &str = "mimetype";
pub const MANIFEST: &str = "META-INF/manifest.xml";
const META: &str = "meta.xml";
const THUMBNAILS: &str = "Thumbnails/";

struct Odf;

fn describe_meta(content: &[u8]) -> Vec<MetadataEntry> {
    let mut out = Vec::new();
    for f in child_fields(content, "meta") {
        match f.name.as_str() {
            "user-defined" => {
                let name = f.attrs.iter().find(|(k, _)| k == "name").map(|(_, v)| v.as_str()).unwrap_or("");
                out.push(MetadataEntry::contextual(
                    format!("ODF.meta.user-defined.{name}"),
                    render_text(f.text.trim()),
                    META,
                ));
            }
            "document-statistic" => {
                for (k, v) in &f.attrs {
                    out.push(MetadataEntry::contextual(format!("ODF.meta.document-statistic.{k}"), v.clone(), META));
                }
            }
            _ => {
                let value = if f.text.trim().is_empty() && !f.attrs.is_empty() {
                    f.attrs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
                } else {
                    f.text.trim().to_string()
                };
                out.push(MetadataEntry::contextual(format!("ODF.meta.{}", f.name), render_text(&value), META));
            }
        }
    }
    if out.is_empty() {
        out.push(MetadataEntry::contextual("ODF.meta", binary_note(content.len()), META));
    }
    out
}

impl Flavor for Odf {
    fn label(&self) -> &'static str {
        "ODF"
    }

    fn omit(&self, name: &str, content: &[u8]) -> Option<Vec<MetadataEntry>> {
        if name == META {
            return Some(describe_meta(content));
        }
        if name.starts_with(THUMBNAILS) {
            if name.ends_with('/') {
                return Some(Vec::new());
            }
            return Some(vec![MetadataEntry::contextual("ODF.thumbnail", binary_note(content.len()), name)]);
        }
        None
    }

    fn rewrite(&self, name: &str, content: &[u8], omitted: &HashSet<String>) -> Result<Option<Vec<u8>>> {
        if name != MANIFEST {
            return Ok(None);
        }
        let (out, _) = filter_elements(content, |e| {
            is_element(e, "file-entry") && attr(e, "full-path").is_some_and(|p| omitted.contains(&p))
        })
        .map_err(|r| Error::malformed("ODF", 0, format!("{MANIFEST}: {r}")))?;
        Ok(Some(out))
    }

    fn stored(&self, name: &str) -> bool {
        name == MIMETYPE
    }

    fn leading(&self) -> Option<&'static str> {
        Some(MIMETYPE)
    }
}

pub(crate) fn process(data: &[u8], ctx: &Ctx) -> Result<Outcome> {
    let archive = ZipArchive::parse(data)?;
    if !archive.entries.iter().any(|e| e.name == MANIFEST) {
        return Err(Error::malformed("ODF", 0, format!("{MANIFEST} missing")));
    }
    zip::rebuild(data, ctx, &Odf).map(|(o, _)| o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meta_fields() {
        let meta = br#"<office:document-meta xmlns:office="o" xmlns:meta="m" xmlns:dc="d"><office:meta><dc:creator>alice</dc:creator><meta:editing-duration>PT1H2M</meta:editing-duration><meta:document-statistic meta:page-count="3"/><meta:user-defined meta:name="Client">ACME</meta:user-defined></office:meta></office:document-meta>"#;
        let e = describe_meta(meta);
        let kv: Vec<_> = e.iter().map(|e| (e.key.as_str(), e.value.as_str())).collect();
        assert_eq!(
            kv,
            vec![
                ("ODF.meta.creator", "alice"),
                ("ODF.meta.editing-duration", "PT1H2M"),
                ("ODF.meta.document-statistic.page-count", "3"),
                ("ODF.meta.user-defined.Client", "ACME"),
            ]
        );
    }
}
