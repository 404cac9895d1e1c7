//! Command-line front end: `list`, `clean` and `check`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::UNIX_EPOCH;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::model::{CleanPolicy, CleanStatus, MetadataEntry, UnknownMemberAction};
use crate::{clean_file, inspect_file};

#[derive(Debug, Parser)]
#[command(name = "demeta", about = "Inspect and remove file metadata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum UnknownMembers {
    Abort,
    Omit,
    Copy,
}

impl From<UnknownMembers> for UnknownMemberAction {
    fn from(u: UnknownMembers) -> Self {
        match u {
            UnknownMembers::Abort => UnknownMemberAction::Abort,
            UnknownMembers::Omit => UnknownMemberAction::Omit,
            UnknownMembers::Copy => UnknownMemberAction::CopyVerbatim,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the metadata found in each file
    List {
        /// One JSON object per line
        #[arg(long)]
        json: bool,
        #[arg(short, long)]
        recursive: bool,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Write metadata-free copies
    Clean {
        /// Replace each file atomically
        #[arg(long, conflicts_with = "output_dir")]
        in_place: bool,
        /// Write outputs under DIR, mirroring relative paths
        #[arg(long, value_name = "DIR")]
        output_dir: Option<PathBuf>,
        /// Report what would be removed, write nothing
        #[arg(long)]
        dry_run: bool,
        /// What to do with unrecognized archive members
        #[arg(long, value_enum, default_value = "abort")]
        unknown_members: UnknownMembers,
        /// Set output modification times to the Unix epoch
        #[arg(long)]
        normalize_times: bool,
        #[arg(short, long)]
        recursive: bool,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Exit non-zero if any file carries removable metadata
    Check {
        #[arg(short, long)]
        recursive: bool,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
}

/// An input file and its path relative to the argument it was found under.
struct Input {
    path: PathBuf,
    relative: PathBuf,
}

fn walk(dir: &Path, base: &Path, out: &mut Vec<Input>, err: &mut dyn Write) -> bool {
    let mut entries: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(rd) => rd.filter_map(|e| e.ok().map(|e| e.path())).collect(),
        Err(e) => {
            let _ = writeln!(err, "{}: {e}", dir.display());
            return false;
        }
    };
    entries.sort();
    let mut ok = true;
    for p in entries {
        if p.is_dir() {
            ok &= walk(&p, base, out, err);
        } else if p.is_file() {
            let relative = p.strip_prefix(base).unwrap_or(&p).to_path_buf();
            out.push(Input { path: p, relative });
        }
    }
    ok
}

/// Expands the arguments into files. Returns false if any path was unusable.
fn collect(paths: &[PathBuf], recursive: bool, err: &mut dyn Write) -> (Vec<Input>, bool) {
    let mut files = Vec::new();
    let mut ok = true;
    for p in paths {
        match std::fs::metadata(p) {
            Ok(m) if m.is_dir() => {
                if recursive {
                    ok &= walk(p, p, &mut files, err);
                } else {
                    let _ = writeln!(err, "{}: is a directory (use --recursive)", p.display());
                    ok = false;
                }
            }
            Ok(_) => files.push(Input {
                path: p.clone(),
                relative: PathBuf::from(p.file_name().unwrap_or(p.as_os_str())),
            }),
            Err(e) => {
                let _ = writeln!(err, "{}: {e}", p.display());
                ok = false;
            }
        }
    }
    (files, ok)
}

fn name_hint(p: &Path) -> Option<String> {
    p.file_name().map(|n| n.to_string_lossy().into_owned())
}

/// `photo.jpg` becomes `photo.cleaned.jpg`; `a.tar.gz` becomes `a.cleaned.tar.gz`.
pub fn sibling_name(name: &str) -> String {
    let lower = name.to_ascii_lowercase();
    let split = [".tar.gz", ".tar.bz2"]
        .iter()
        .find(|ext| lower.ends_with(*ext) && lower.len() > ext.len())
        .map(|ext| name.len() - ext.len())
        .or_else(|| name.rfind('.').filter(|&i| i > 0));
    match split {
        Some(i) => format!("{}.cleaned{}", &name[..i], &name[i..]),
        None => format!("{name}.cleaned"),
    }
}

fn write_atomic(target: &Path, bytes: &[u8], permissions_from: Option<&Path>) -> std::io::Result<()> {
    let dir = match target.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    if let Some(src) = permissions_from {
        std::fs::set_permissions(tmp.path(), std::fs::metadata(src)?.permissions())?;
    }
    tmp.persist(target).map_err(|e| e.error)?;
    Ok(())
}

fn set_epoch_mtime(p: &Path) -> std::io::Result<()> {
    std::fs::File::options().write(true).open(p)?.set_modified(UNIX_EPOCH)
}

#[derive(Serialize)]
struct JsonEntry<'a> {
    key: &'a str,
    value: &'a str,
    category: &'static str,
    location: &'a str,
}

#[derive(Serialize)]
struct JsonLine<'a> {
    file: String,
    entries: Vec<JsonEntry<'a>>,
}

fn cmd_list(files: &[Input], json: bool, out: &mut dyn Write, err: &mut dyn Write) -> bool {
    let mut ok = true;
    for f in files {
        let entries = match std::fs::read(&f.path)
            .map_err(|e| e.to_string())
            .and_then(|d| inspect_file(&d, name_hint(&f.path).as_deref()).map_err(|e| e.to_string()))
        {
            Ok(e) => e,
            Err(e) => {
                let _ = writeln!(err, "{}: {e}", f.path.display());
                ok = false;
                continue;
            }
        };
        if json {
            let line = JsonLine {
                file: f.path.display().to_string(),
                entries: entries
                    .iter()
                    .map(|e| JsonEntry {
                        key: &e.key,
                        value: &e.value,
                        category: e.category.as_str(),
                        location: &e.location,
                    })
                    .collect(),
            };
            let _ = writeln!(out, "{}", serde_json::to_string(&line).expect("plain strings serialize"));
        } else {
            let _ = writeln!(out, "{}:", f.path.display());
            if entries.is_empty() {
                let _ = writeln!(out, "  (clean)");
            }
            for e in &entries {
                let _ = writeln!(out, "  {}: {}", e.key, e.value);
            }
        }
    }
    ok
}

struct CleanOpts {
    in_place: bool,
    output_dir: Option<PathBuf>,
    normalize_times: bool,
    policy: CleanPolicy,
}

fn print_items(out: &mut dyn Write, items: &[MetadataEntry]) {
    for e in items {
        let _ = writeln!(out, "  {}: {}", e.key, e.value);
    }
}

fn clean_one(f: &Input, o: &CleanOpts, out: &mut dyn Write, err: &mut dyn Write) -> bool {
    let shown = f.path.display();
    let data = match std::fs::read(&f.path) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(out, "{shown}: FAILED: {e}");
            return false;
        }
    };
    let result = clean_file(&data, name_hint(&f.path).as_deref(), &o.policy);
    for w in &result.warnings {
        if !matches!(result.status, CleanStatus::Failed | CleanStatus::Unsupported) {
            let _ = writeln!(err, "{shown}: warning: {w}");
        }
    }
    match result.status {
        CleanStatus::Unsupported => {
            let _ = writeln!(out, "{shown}: unsupported");
            return false;
        }
        CleanStatus::Failed => {
            let reason = result.error.map(|e| e.to_string()).unwrap_or_else(|| "unknown error".into());
            let _ = writeln!(out, "{shown}: FAILED: {reason}");
            return false;
        }
        CleanStatus::Cleaned => {
            let _ = writeln!(out, "{shown}: cleaned ({} items)", result.removed.len());
            if o.policy.dry_run {
                print_items(out, &result.removed);
            }
        }
        CleanStatus::AlreadyClean => {
            let _ = writeln!(out, "{shown}: already clean");
        }
    }
    let Some(bytes) = result.output else { return true };
    let target = if o.in_place {
        f.path.clone()
    } else if let Some(dir) = &o.output_dir {
        dir.join(&f.relative)
    } else {
        let name = name_hint(&f.path).unwrap_or_default();
        f.path.with_file_name(sibling_name(&name))
    };
    let unchanged_in_place = o.in_place && result.status == CleanStatus::AlreadyClean;
    let written = if unchanged_in_place {
        Ok(())
    } else {
        write_atomic(&target, &bytes, o.in_place.then_some(f.path.as_path()))
    };
    let written = written.and_then(|_| if o.normalize_times { set_epoch_mtime(&target) } else { Ok(()) });
    if let Err(e) = written {
        let _ = writeln!(err, "{}: {e}", target.display());
        return false;
    }
    true
}

fn cmd_check(files: &[Input], out: &mut dyn Write) -> bool {
    let mut ok = true;
    for f in files {
        let shown = f.path.display();
        let entries = std::fs::read(&f.path)
            .map_err(|e| e.to_string())
            .and_then(|d| inspect_file(&d, name_hint(&f.path).as_deref()).map_err(|e| e.to_string()));
        match entries {
            Ok(entries) => {
                if let Some(e) = entries.iter().find(|e| e.category.is_leak()) {
                    let _ = writeln!(out, "{shown}: {}: {}", e.key, e.value);
                    ok = false;
                }
            }
            Err(e) => {
                let _ = writeln!(out, "{shown}: {e}");
                ok = false;
            }
        }
    }
    ok
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let ok = match cli.command {
        Command::List { json, recursive, paths } => {
            let (files, found) = collect(&paths, recursive, err);
            cmd_list(&files, json, out, err) && found
        }
        Command::Clean {
            in_place,
            output_dir,
            dry_run,
            unknown_members,
            normalize_times,
            recursive,
            paths,
        } => {
            let opts = CleanOpts {
                in_place,
                output_dir,
                normalize_times,
                policy: CleanPolicy {
                    unknown_member_action: unknown_members.into(),
                    normalize_fs_times: normalize_times,
                    dry_run,
                },
            };
            let (files, found) = collect(&paths, recursive, err);
            let mut ok = found;
            for f in &files {
                ok &= clean_one(f, &opts, out, err);
            }
            ok
        }
        Command::Check { recursive, paths } => {
            let (files, found) = collect(&paths, recursive, err);
            cmd_check(&files, out) && found
        }
    };
    if ok {
        0
    } else {
        1
    }
}
