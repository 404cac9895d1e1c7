//! Shallow XMP packet reader: `rdf:Description` properties to key/value pairs.

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::util::render_text;

fn local(name: &[u8]) -> String {
    let s = String::from_utf8_lossy(name);
    match s.rsplit_once(':') {
        Some((_, l)) => l.to_string(),
        None => s.into_owned(),
    }
}

fn description_attrs(e: &BytesStart, out: &mut Vec<(String, String)>) {
    for attr in e.attributes().flatten() {
        let key = attr.key.as_ref();
        if key.starts_with(b"xmlns") || key.starts_with(b"rdf:") || key == b"xml:lang" {
            continue;
        }
        let value = attr.unescape_value().map(|v| v.into_owned()).unwrap_or_default();
        out.push((local(key), render_text(&value)));
    }
}

/// Returns the properties of every `rdf:Description` in document order.
/// Container values (`rdf:Seq`, `rdf:Bag`, `rdf:Alt`) are joined with "; ".
pub fn fields(packet: &[u8]) -> Vec<(String, String)> {
    let mut reader = Reader::from_reader(packet);
    let mut out = Vec::new();
    let mut buf = Vec::new();
    // Depth of the open rdf:Description, if any, and the property being read.
    let mut depth = 0usize;
    let mut desc_depth: Option<usize> = None;
    let mut current: Option<(String, Vec<String>)> = None;
    loop {
        let ev = match reader.read_event_into(&mut buf) {
            Ok(Event::Eof) | Err(_) => break,
            Ok(ev) => ev,
        };
        match ev {
            Event::Start(e) => {
                depth += 1;
                let name = e.name();
                if name.as_ref() == b"x:xmpmeta" || name.as_ref() == b"x:xapmeta" {
                    if let Some(Ok(a)) = e.attributes().find(|a| a.as_ref().map(|a| a.key.as_ref() == b"x:xmptk").unwrap_or(false)) {
                        out.push(("XMPToolkit".into(), render_text(&a.unescape_value().unwrap_or_default())));
                    }
                }
                if name.as_ref() == b"rdf:Description" && desc_depth.is_none() {
                    desc_depth = Some(depth);
                    description_attrs(&e, &mut out);
                } else if desc_depth == Some(depth - 1) {
                    current = Some((local(name.as_ref()), Vec::new()));
                    // rdf:resource and qualifier attributes on the property itself
                    for attr in e.attributes().flatten() {
                        if attr.key.as_ref() == b"rdf:resource" {
                            if let Some((_, vals)) = current.as_mut() {
                                vals.push(attr.unescape_value().unwrap_or_default().into_owned());
                            }
                        }
                    }
                }
            }
            Event::Empty(e) => {
                let name = e.name();
                if name.as_ref() == b"rdf:Description" && desc_depth.is_none() {
                    description_attrs(&e, &mut out);
                } else if desc_depth == Some(depth) {
                    let mut vals = Vec::new();
                    for attr in e.attributes().flatten() {
                        if !attr.key.as_ref().starts_with(b"xmlns") {
                            vals.push(attr.unescape_value().unwrap_or_default().into_owned());
                        }
                    }
                    out.push((local(name.as_ref()), render_text(&vals.join("; "))));
                }
            }
            Event::Text(t) => {
                if let Some((_, vals)) = current.as_mut() {
                    let text = t.unescape().map(|c| c.into_owned()).unwrap_or_default();
                    let text = text.trim();
                    if !text.is_empty() {
                        vals.push(text.to_string());
                    }
                }
            }
            Event::CData(t) => {
                if let Some((_, vals)) = current.as_mut() {
                    vals.push(String::from_utf8_lossy(&t).into_owned());
                }
            }
            Event::End(_) => {
                if desc_depth == Some(depth) {
                    desc_depth = None;
                } else if desc_depth == Some(depth - 1) {
                    if let Some((k, vals)) = current.take() {
                        out.push((k, render_text(&vals.join("; "))));
                    }
                }
                depth = depth.saturating_sub(1);
            }
            _ => {}
        }
        buf.clear();
    }
    out
}
