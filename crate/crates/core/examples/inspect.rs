//! Lists metadata without changing anything. Defaults to a JPEG carrying
//! EXIF Software, XMP CreatorTool and an EXIF thumbnail.
//!
//!     cargo run --example inspect -- photo.jpg

use demeta::inspect_file;

fn main() {
    let (name, data) = match std::env::args().nth(1) {
        Some(p) => (p.clone(), std::fs::read(&p).expect("readable file")),
        None => ("photo.jpg".to_string(), demeta_fixtures::image::exif_photo()),
    };
    let entries = match inspect_file(&data, Some(&name)) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("{name}: {e}");
            std::process::exit(1);
        }
    };
    println!("{name}: {} entries", entries.len());
    for e in &entries {
        println!("  [{:<10}] {} = {}  ({})", e.category.as_str(), e.key, e.value, e.location);
    }
    let leaks = entries.iter().filter(|e| e.category.is_leak()).count();
    println!("{leaks} would be removed by clean");
}
