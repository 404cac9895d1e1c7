//! Cleans PNG and JPEG files. Pixel data is carried over byte for byte.
//!
//!     cargo run --example clean_image -- in.png out.png

use demeta::{clean_file, inspect_file, CleanPolicy, CleanStatus};

fn main() {
    let mut args = std::env::args().skip(1);
    if let (Some(src), Some(dst)) = (args.next(), args.next()) {
        let data = std::fs::read(&src).expect("readable file");
        let r = clean_file(&data, Some(&src), &CleanPolicy::default());
        match r.output {
            Some(out) => std::fs::write(&dst, out).expect("writable output"),
            None => {
                eprintln!("{src}: {:?} {:?}", r.status, r.error);
                std::process::exit(1);
            }
        }
        println!("{src} -> {dst}: {} items removed", r.removed.len());
        return;
    }

    let mut samples: Vec<_> = demeta_fixtures::image::png_fixtures();
    samples.extend(demeta_fixtures::image::jpeg_fixtures());
    for f in samples {
        let r = clean_file(&f.bytes, Some(&f.name), &CleanPolicy::default());
        assert_eq!(r.status, CleanStatus::Cleaned);
        let out = r.output.unwrap();
        println!("{}: {} -> {} bytes", f.name, f.bytes.len(), out.len());
        for e in &r.removed {
            println!("  - {} = {}", e.key, e.value);
        }
        let left = inspect_file(&out, Some(&f.name)).unwrap();
        println!("  left: {:?}", left.iter().map(|e| e.key.as_str()).collect::<Vec<_>>());
    }
}
