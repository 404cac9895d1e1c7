//! MP3 keeps only MPEG frames, Ogg Vorbis gets an empty comment header,
//! FLAC keeps only StreamInfo.

use demeta::{clean_flac, clean_mp3, clean_ogg_vorbis, CleanResult};

fn report(name: &str, r: &CleanResult, before: usize) {
    let after = r.output.as_ref().map_or(0, Vec::len);
    println!("{name}: {:?} {before} -> {after} bytes", r.status);
    for e in &r.removed {
        println!("  {} = {}", e.key, e.value);
    }
    for w in &r.warnings {
        println!("  warning: {w}");
    }
}

fn main() {
    if let Some(p) = std::env::args().nth(1) {
        let d = std::fs::read(&p).expect("readable file");
        let r = demeta::clean_file(&d, Some(&p), &Default::default());
        report(&p, &r, d.len());
        return;
    }
    use demeta_fixtures::audio::*;
    for f in mp3_fixtures() {
        report(&f.name, &clean_mp3(&f.bytes), f.bytes.len());
    }
    for f in ogg_fixtures() {
        report(&f.name, &clean_ogg_vorbis(&f.bytes), f.bytes.len());
    }
    for f in flac_fixtures() {
        report(&f.name, &clean_flac(&f.bytes), f.bytes.len());
    }
    // encoder strings inside the first frame are audio data and stay
    let lame = mp3_with_lame();
    report("lame.mp3", &clean_mp3(&lame), lame.len());
}
