use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use demeta_fixtures::oracle::{contains, zip_members};

fn demeta(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_demeta")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn put(dir: &Path, name: &str, bytes: &[u8]) -> PathBuf {
    let p = dir.join(name);
    if let Some(parent) = p.parent() {
        std::fs::create_dir_all(parent).unwrap();
    }
    std::fs::write(&p, bytes).unwrap();
    p
}

fn sample(name: &str) -> Vec<u8> {
    demeta_fixtures::corpus().into_iter().find(|f| f.name == name).unwrap().bytes
}

#[test]
fn list_shows_software() {
    let t = tempfile::tempdir().unwrap();
    put(t.path(), "photo.jpg", &demeta_fixtures::image::exif_photo());
    let o = demeta(t.path(), &["list", "photo.jpg"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("photo.jpg:\n"), "{s}");
    assert!(s.contains("\n  EXIF.Software: Adobe Photoshop CS3 Windows\n"), "{s}");
}

#[test]
fn list_clean_file() {
    let t = tempfile::tempdir().unwrap();
    put(t.path(), "clean.png", &demeta_fixtures::image::bare_png());
    let o = demeta(t.path(), &["list", "clean.png"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "clean.png:\n  (clean)\n");
}

#[test]
fn list_missing_file() {
    let t = tempfile::tempdir().unwrap();
    let o = demeta(t.path(), &["list", "nosuchfile"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nosuchfile"));
}

#[test]
fn list_json_lines() {
    let t = tempfile::tempdir().unwrap();
    put(t.path(), "a.flac", &sample("tagged.flac"));
    put(t.path(), "b.png", &demeta_fixtures::image::bare_png());
    let o = demeta(t.path(), &["list", "--json", "a.flac", "b.png"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["file"], "a.flac");
    let e = lines[0]["entries"].as_array().unwrap();
    assert!(e.iter().any(|e| e["key"] == "Vorbis.ARTIST" && e["value"] == "someone" && e["category"].is_string() && e["location"].is_string()));
    assert_eq!(lines[1]["entries"].as_array().unwrap().len(), 0);
}

#[test]
fn dry_run_writes_nothing() {
    let t = tempfile::tempdir().unwrap();
    put(t.path(), "tagged.mp3", &sample("v23_v1.mp3"));
    let o = demeta(t.path(), &["clean", "--dry-run", "tagged.mp3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("ID3v2.TPE1: someone"), "{s}");
    let names: Vec<_> = std::fs::read_dir(t.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, ["tagged.mp3"]);
}

#[test]
fn clean_writes_sibling() {
    let t = tempfile::tempdir().unwrap();
    let orig = sample("report.docx");
    put(t.path(), "doc.docx", &orig);
    let o = demeta(t.path(), &["clean", "doc.docx"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("doc.docx: cleaned ("));
    let out = std::fs::read(t.path().join("doc.cleaned.docx")).unwrap();
    assert!(zip_members(&out).unwrap().iter().all(|m| !m.name.starts_with("docProps/")));
    assert_eq!(std::fs::read(t.path().join("doc.docx")).unwrap(), orig);
    assert_eq!(demeta(t.path(), &["check", "doc.cleaned.docx"]).status.code(), Some(0));
}

#[test]
fn abort_in_place_leaves_file() {
    let t = tempfile::tempdir().unwrap();
    let orig = demeta_fixtures::archive::zip_with_unknown();
    put(t.path(), "bundle.zip", &orig);
    let o = demeta(t.path(), &["clean", "--in-place", "--unknown-members=abort", "bundle.zip"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAILED: unknown member 'blob.bin'"), "{}", stdout(&o));
    assert_eq!(std::fs::read(t.path().join("bundle.zip")).unwrap(), orig);
    assert_eq!(std::fs::read_dir(t.path()).unwrap().count(), 1);
}

#[test]
fn in_place_replaces() {
    let t = tempfile::tempdir().unwrap();
    put(t.path(), "x.ogg", &sample("tagged.ogg"));
    let o = demeta(t.path(), &["clean", "--in-place", "x.ogg"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!contains(&std::fs::read(t.path().join("x.ogg")).unwrap(), b"ARTIST"));
    assert_eq!(std::fs::read_dir(t.path()).unwrap().count(), 1);
}

#[test]
fn output_dir_mirrors_tree() {
    let t = tempfile::tempdir().unwrap();
    put(t.path(), "in/a/one.png", &sample("text_chunks.png"));
    put(t.path(), "in/b/two.flac", &sample("tagged.flac"));
    let o = demeta(t.path(), &["clean", "-r", "--output-dir", "out", "--normalize-times", "in"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for p in ["out/a/one.png", "out/b/two.flac"] {
        let m = std::fs::metadata(t.path().join(p)).unwrap().modified().unwrap();
        assert_eq!(m, std::time::UNIX_EPOCH, "{p}");
    }
    assert_eq!(demeta(t.path(), &["check", "-r", "out"]).status.code(), Some(0));
}

#[test]
fn check_codes() {
    let t = tempfile::tempdir().unwrap();
    put(t.path(), "clean.flac", &demeta_fixtures::audio::bare_flac());
    put(t.path(), "tagged.flac", &sample("tagged.flac"));
    let quiet = demeta(t.path(), &["check", "clean.flac"]);
    assert_eq!(quiet.status.code(), Some(0));
    assert!(quiet.stdout.is_empty());
    let dirty = demeta(t.path(), &["check", "tagged.flac"]);
    assert_eq!(dirty.status.code(), Some(1));
    assert_eq!(stdout(&dirty).lines().count(), 1);
    assert!(stdout(&dirty).starts_with("tagged.flac: "));
}

#[test]
fn check_recursive_corpus() {
    let t = tempfile::tempdir().unwrap();
    let corpus = demeta_fixtures::corpus();
    for f in &corpus {
        put(t.path(), &format!("dir/{}", f.name), &f.bytes);
    }
    put(t.path(), "dir/sub/clean.png", &demeta_fixtures::image::bare_png());
    let o = demeta(t.path(), &["check", "--recursive", "dir"]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert_eq!(s.lines().count(), corpus.len(), "{s}");
    let paths: Vec<&str> = s.lines().map(|l| l.split(": ").next().unwrap()).collect();
    let mut sorted = paths.clone();
    sorted.sort();
    assert_eq!(sorted, paths);
}

#[test]
fn directory_needs_recursive() {
    let t = tempfile::tempdir().unwrap();
    put(t.path(), "d/a.png", &demeta_fixtures::image::bare_png());
    assert_eq!(demeta(t.path(), &["list", "d"]).status.code(), Some(1));
    assert_eq!(demeta(t.path(), &["list", "-r", "d"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_2() {
    let t = tempfile::tempdir().unwrap();
    put(t.path(), "a.png", &demeta_fixtures::image::bare_png());
    assert_eq!(demeta(t.path(), &["clean", "--in-place", "--output-dir", "o", "a.png"]).status.code(), Some(2));
    assert_eq!(demeta(t.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(demeta(t.path(), &["list"]).status.code(), Some(2));
    assert!(!t.path().join("o").exists());
}
