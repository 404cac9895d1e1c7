//! Normalizes tar headers (owner, times, pax records) inside gzip and
//! bzip2 wrappers, then rewrites the wrapper header too.

use demeta::{clean_tar, inspect_file, CleanPolicy, Compression};

fn main() {
    let (name, data) = match std::env::args().nth(1) {
        Some(p) => (p.clone(), std::fs::read(&p).expect("readable file")),
        None => {
            let f = demeta_fixtures::archive::tar_fixtures().remove(5);
            (f.name, f.bytes)
        }
    };
    let compression = if name.ends_with("gz") {
        Compression::Gzip
    } else if name.ends_with("bz2") {
        Compression::Bzip2
    } else {
        Compression::None
    };
    for e in inspect_file(&data, Some(&name)).unwrap() {
        println!("{:<28} {:<32} {}", e.key, e.value, e.location);
    }
    let r = clean_tar(&data, compression, &CleanPolicy::default());
    let out = r.output.expect("cleanable archive");
    println!("{:?}: {} -> {} bytes", r.status, data.len(), out.len());
    if compression == Compression::Gzip {
        // MTIME sits at bytes 4..8 and FLG at 3
        println!("gzip mtime {} flags {:#04x}", u32::from_le_bytes(out[4..8].try_into().unwrap()), out[3]);
    }
    let left = inspect_file(&out, Some(&name)).unwrap();
    println!("left after clean: {}", left.iter().filter(|e| e.category.is_leak()).count());
}
