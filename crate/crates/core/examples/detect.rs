//! Sniffs the format of each file given, or of the built-in samples.
//!
//!     cargo run --example detect -- a.jpg b.tar

use demeta::detect_kind;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let inputs: Vec<(String, Vec<u8>)> = if args.is_empty() {
        demeta_fixtures::corpus().into_iter().map(|f| (f.name, f.bytes)).collect()
    } else {
        args.iter().map(|p| (p.clone(), std::fs::read(p).expect("readable file"))).collect()
    };
    for (name, data) in &inputs {
        let k = detect_kind(data, Some(name));
        println!("{name:<24} {:?} ({:?})", k.tag, k.confidence);
    }
    // magic wins over a misleading extension
    let png = demeta_fixtures::image::bare_png();
    println!("{:<24} {:?}", "png named x.mp3", detect_kind(&png, Some("x.mp3")).tag);
}
