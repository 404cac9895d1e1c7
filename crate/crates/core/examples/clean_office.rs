//! OOXML loses docProps/, ODF loses meta.xml and its thumbnail; embedded
//! pictures are cleaned too.

use demeta::{clean_file, CleanPolicy};

fn main() {
    let mut samples: Vec<(String, Vec<u8>)> = std::env::args()
        .skip(1)
        .map(|p| (p.clone(), std::fs::read(&p).expect("readable file")))
        .collect();
    if samples.is_empty() {
        let mut f = demeta_fixtures::archive::ooxml_fixtures();
        f.extend(demeta_fixtures::archive::odf_fixtures());
        samples = f.into_iter().map(|f| (f.name, f.bytes)).collect();
    }
    for (name, data) in samples {
        let r = clean_file(&data, Some(&name), &CleanPolicy::default());
        println!("{name}: {:?}, {} items", r.status, r.removed.len());
        for e in &r.removed {
            println!("  {} = {}  @ {}", e.key, e.value, e.location);
        }
        let Some(out) = r.output else { continue };
        let z = zip::ZipArchive::new(std::io::Cursor::new(out)).unwrap();
        println!("  kept: {}", z.file_names().collect::<Vec<_>>().join(", "));
    }
}
