//! Drops /Info, XMP and page-level private data, and collapses incremental
//! updates so earlier revisions are gone from the file.

use demeta::{clean_pdf, inspect_pdf, parse_pdf};

fn main() {
    let (name, data) = match std::env::args().nth(1) {
        Some(p) => (p.clone(), std::fs::read(&p).expect("readable file")),
        None => {
            let f = demeta_fixtures::pdf::pdf_fixtures().remove(1);
            (f.name, f.bytes)
        }
    };
    let doc = match parse_pdf(&data) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{name}: {e}");
            std::process::exit(1);
        }
    };
    println!("{name}: PDF {} with {} objects, {} revision(s)", doc.version, doc.objects.len(), doc.revisions);
    for e in inspect_pdf(&data).unwrap() {
        println!("  {} = {}", e.key, e.value);
    }
    let r = clean_pdf(&data);
    println!("{:?}", r.status);
    for w in &r.warnings {
        println!("  warning: {w}");
    }
    if let Some(out) = r.output {
        let doc = parse_pdf(&out).unwrap();
        println!("after: {} objects, {} revision(s), {} bytes", doc.objects.len(), doc.revisions, out.len());
    }
}
