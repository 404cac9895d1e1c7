//! Structural XML filtering that leaves surviving markup byte-for-byte intact.

use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, Writer};

fn local(name: &[u8]) -> &[u8] {
    match name.iter().rposition(|&b| b == b':') {
        Some(i) => &name[i + 1..],
        None => name,
    }
}

pub(crate) fn is_element(e: &BytesStart, local_name: &str) -> bool {
    local(e.name().as_ref()) == local_name.as_bytes()
}

/// Value of the first attribute whose local name matches.
pub(crate) fn attr(e: &BytesStart, local_name: &str) -> Option<String> {
    e.attributes()
        .flatten()
        .find(|a| local(a.key.as_ref()) == local_name.as_bytes())
        .map(|a| a.unescape_value().map(|v| v.into_owned()).unwrap_or_default())
}

/// Drops every element for which `drop` returns true, subtree included.
/// Returns the rewritten document and the number of elements dropped.
pub(crate) fn filter_elements(xml: &[u8], drop: impl Fn(&BytesStart) -> bool) -> Result<(Vec<u8>, usize), String> {
    let mut reader = Reader::from_reader(xml);
    let mut writer = Writer::new(Vec::with_capacity(xml.len()));
    let mut buf = Vec::new();
    let mut skipping = 0usize;
    let mut dropped = 0usize;
    let mut depth = 0usize;
    let mut saw_root = false;
    loop {
        let ev = reader
            .read_event_into(&mut buf)
            .map_err(|e| format!("XML error at byte {}: {e}", reader.buffer_position()))?;
        match &ev {
            Event::Eof => break,
            Event::Start(_) => {
                depth += 1;
                saw_root = true;
            }
            Event::End(_) => {
                depth = depth.checked_sub(1).ok_or("unbalanced end tag")?;
            }
            Event::Empty(_) => saw_root = true,
            _ => {}
        }
        if skipping > 0 {
            match ev {
                Event::Start(_) => skipping += 1,
                Event::End(_) => skipping -= 1,
                _ => {}
            }
            buf.clear();
            continue;
        }
        match &ev {
            Event::Start(e) if drop(e) => {
                skipping = 1;
                dropped += 1;
            }
            Event::Empty(e) if drop(e) => dropped += 1,
            _ => writer.write_event(ev).map_err(|e| e.to_string())?,
        }
        buf.clear();
    }
    if depth != 0 || !saw_root {
        return Err("truncated or empty XML document".into());
    }
    Ok((writer.into_inner(), dropped))
}

/// A direct child of a container element: local name, attributes, text.
#[derive(Debug, Clone, Default)]
pub(crate) struct Field {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub text: String,
}

/// Direct children of the first element named `container` (by local name),
/// with all descendant text concatenated.
pub(crate) fn child_fields(xml: &[u8], container: &str) -> Vec<Field> {
    let mut reader = Reader::from_reader(xml);
    let mut buf = Vec::new();
    let mut out = Vec::new();
    let mut container_depth: Option<usize> = None;
    let mut depth = 0usize;
    let mut current: Option<Field> = None;
    let to_field = |e: &BytesStart| Field {
        name: String::from_utf8_lossy(local(e.name().as_ref())).into_owned(),
        attrs: e
            .attributes()
            .flatten()
            .filter(|a| !a.key.as_ref().starts_with(b"xmlns"))
            .map(|a| {
                (
                    String::from_utf8_lossy(local(a.key.as_ref())).into_owned(),
                    a.unescape_value().map(|v| v.into_owned()).unwrap_or_default(),
                )
            })
            .collect(),
        text: String::new(),
    };
    loop {
        let ev = match reader.read_event_into(&mut buf) {
            Ok(Event::Eof) | Err(_) => break,
            Ok(ev) => ev,
        };
        match ev {
            Event::Start(e) => {
                depth += 1;
                if container_depth.is_none() && is_element(&e, container) {
                    container_depth = Some(depth);
                } else if container_depth == Some(depth - 1) {
                    current = Some(to_field(&e));
                }
            }
            Event::Empty(e) => {
                if container_depth == Some(depth) {
                    out.push(to_field(&e));
                }
            }
            Event::Text(t) => {
                if let Some(f) = current.as_mut() {
                    f.text.push_str(&t.unescape().map(|c| c.into_owned()).unwrap_or_default());
                }
            }
            Event::CData(t) => {
                if let Some(f) = current.as_mut() {
                    f.text.push_str(&String::from_utf8_lossy(&t));
                }
            }
            Event::End(_) => {
                if container_depth == Some(depth - 1) {
                    if let Some(f) = current.take() {
                        out.push(f);
                    }
                } else if container_depth == Some(depth) {
                    break;
                }
                depth = depth.saturating_sub(1);
            }
            _ => {}
        }
        buf.clear();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_keeps_other_bytes_identical() {
        let xml = br#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Types xmlns="x"><Default Extension="xml" ContentType="application/xml"/><Override PartName="/docProps/core.xml" ContentType="a"/><Override PartName="/word/document.xml" ContentType="b"></Override></Types>"#;
        let (out, n) = filter_elements(xml, |e| attr(e, "PartName").as_deref() == Some("/docProps/core.xml")).unwrap();
        assert_eq!(n, 1);
        let expected = br#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<Types xmlns="x"><Default Extension="xml" ContentType="application/xml"/><Override PartName="/word/document.xml" ContentType="b"></Override></Types>"#;
        assert_eq!(String::from_utf8(out).unwrap(), String::from_utf8(expected.to_vec()).unwrap());
        let (same, n) = filter_elements(xml, |_| false).unwrap();
        assert_eq!(n, 0);
        assert_eq!(same, xml.to_vec());
    }

    #[test]
    fn filter_drops_subtrees() {
        let xml = b"<a><b><c/>text</b><d/></a>";
        let (out, n) = filter_elements(xml, |e| is_element(e, "b")).unwrap();
        assert_eq!(n, 1);
        assert_eq!(out, b"<a><d/></a>");
    }

    #[test]
    fn filter_rejects_broken_xml() {
        assert!(filter_elements(b"<a><b></a>", |_| false).is_err());
        assert!(filter_elements(b"", |_| false).is_err());
    }

    #[test]
    fn child_fields_collect_text() {
        let xml = br#"<cp:coreProperties xmlns:cp="c" xmlns:dc="d"><dc:creator>alice</dc:creator><cp:lastModifiedBy>bob</cp:lastModifiedBy><x a="1"/></cp:coreProperties>"#;
        let f = child_fields(xml, "coreProperties");
        assert_eq!(f.len(), 3);
        assert_eq!((f[0].name.as_str(), f[0].text.as_str()), ("creator", "alice"));
        assert_eq!((f[1].name.as_str(), f[1].text.as_str()), ("lastModifiedBy", "bob"));
        assert_eq!(f[2].attrs, vec![("a".to_string(), "1".to_string())]);
    }
}
