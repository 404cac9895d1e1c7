//! Serializes a single-revision PDF with a classic cross-reference table.

use std::io::Write;

use super::object::{Dict, PdfObject};

fn write_name(out: &mut Vec<u8>, n: &[u8]) {
    out.push(b'/');
    for &c in n {
        if c.is_ascii_graphic() && !b"()<>[]{}/%#".contains(&c) {
            out.push(c);
        } else {
            write!(out, "#{c:02X}").unwrap();
        }
    }
}

fn write_dict(out: &mut Vec<u8>, d: &Dict) {
    out.extend(b"<<");
    for (k, v) in &d.0 {
        out.push(b' ');
        write_name(out, k);
        out.push(b' ');
        write_object(out, v);
    }
    out.extend(b" >>");
}

pub fn write_object(out: &mut Vec<u8>, o: &PdfObject) {
    match o {
        PdfObject::Null => out.extend(b"null"),
        PdfObject::Boolean(b) => out.extend(if *b { &b"true"[..] } else { b"false" }),
        PdfObject::Integer(n) => write!(out, "{n}").unwrap(),
        PdfObject::Real(s) => out.extend(s.as_bytes()),
        PdfObject::String(s) if s.hex => {
            out.push(b'<');
            for b in &s.bytes {
                write!(out, "{b:02X}").unwrap();
            }
            out.push(b'>');
        }
        PdfObject::String(s) => {
            out.push(b'(');
            for &b in &s.bytes {
                match b {
                    b'(' | b')' | b'\\' => out.extend([b'\\', b]),
                    b'\r' => out.extend(b"\\r"),
                    _ => out.push(b),
                }
            }
            out.push(b')');
        }
        PdfObject::Name(n) => write_name(out, n),
        PdfObject::Array(a) => {
            out.push(b'[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(b' ');
                }
                write_object(out, x);
            }
            out.push(b']');
        }
        PdfObject::Dictionary(d) => write_dict(out, d),
        PdfObject::Stream(s) => {
            let mut d = s.dict.clone();
            d.set("Length", PdfObject::Integer(s.data.len() as i64));
            write_dict(out, &d);
            out.extend(b"\nstream\n");
            out.extend(&s.data);
            out.extend(b"\nendstream");
        }
        PdfObject::Reference((n, g)) => write!(out, "{n} {g} R").unwrap(),
    }
}

/// Writes objects numbered 1..=n in order; object 1 is the catalog.
pub fn write_document(version: &str, objects: &[PdfObject]) -> Vec<u8> {
    let mut out = Vec::new();
    writeln!(out, "%PDF-{version}").unwrap();
    out.extend(b"%\xE2\xE3\xCF\xD3\n");
    let mut offsets = Vec::with_capacity(objects.len());
    for (i, o) in objects.iter().enumerate() {
        offsets.push(out.len());
        writeln!(out, "{} 0 obj", i + 1).unwrap();
        write_object(&mut out, o);
        out.extend(b"\nendobj\n");
    }
    let xref_at = out.len();
    write!(out, "xref\n0 {}\n0000000000 65535 f\r\n", objects.len() + 1).unwrap();
    for off in offsets {
        write!(out, "{off:010} 00000 n\r\n").unwrap();
    }
    write!(
        out,
        "trailer\n<< /Size {} /Root 1 0 R >>\nstartxref\n{xref_at}\n%%EOF\n",
        objects.len() + 1
    )
    .unwrap();
    out
}
