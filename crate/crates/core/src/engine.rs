//! Dispatch of inspect and clean requests to the per-format engines.
//!
//! Every engine walks its input once and produces both the rewritten bytes
//! and the list of fields it found, so the inspector and the cleaner can
//! never disagree about what a file contains.

use crate::error::{Error, Result};
use crate::kind::{detect_kind, KindTag};
use crate::model::{CleanPolicy, CleanResult, CleanStatus, MetadataEntry};
use crate::util::is_plain_text;
use crate::{archive, audio, image, pdf};

/// Nesting limit for containers inside containers.
pub const MAX_NESTING_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    Clean,
    Inspect,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Ctx<'a> {
    pub policy: &'a CleanPolicy,
    pub depth: usize,
    pub mode: Mode,
}

impl<'a> Ctx<'a> {
    pub fn clean(policy: &'a CleanPolicy) -> Self {
        Ctx {
            policy,
            depth: 0,
            mode: Mode::Clean,
        }
    }

    fn child(&self) -> Self {
        Ctx {
            depth: self.depth + 1,
            ..*self
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Finding {
    pub entry: MetadataEntry,
    pub removed: bool,
}

/// Raw engine output before status settlement.
#[derive(Debug, Default)]
pub(crate) struct Outcome {
    pub output: Vec<u8>,
    pub findings: Vec<Finding>,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn removed(&mut self, entry: MetadataEntry) {
        self.findings.push(Finding { entry, removed: true });
    }

    pub fn retained(&mut self, entry: MetadataEntry) {
        self.findings.push(Finding { entry, removed: false });
    }

    pub fn has_removals(&self) -> bool {
        self.findings.iter().any(|f| f.removed)
    }
}

pub(crate) fn run(tag: KindTag, data: &[u8], ctx: &Ctx) -> Result<Outcome> {
    use KindTag::*;
    match tag {
        Png => image::png::process(data),
        Jpeg => image::jpeg::process(data),
        Zip => archive::zip::process(data, ctx),
        Tar => archive::tar::process(data, archive::tar::Compression::None, ctx),
        TarGz => archive::tar::process(data, archive::tar::Compression::Gzip, ctx),
        TarBz2 => archive::tar::process(data, archive::tar::Compression::Bzip2, ctx),
        Ooxml => archive::ooxml::process(data, ctx),
        Odf => archive::odf::process(data, ctx),
        Mp3 => audio::mp3::process(data),
        OggVorbis => audio::ogg::process(data),
        Flac => audio::flac::process(data),
        Pdf => pdf::process(data),
        Unknown => Err(Error::Unsupported("unrecognized file format".into())),
    }
}

/// Turns an engine outcome into a result. A rewrite that removed nothing
/// is discarded so that `AlreadyClean` always hands back the input bytes.
pub(crate) fn settle(data: &[u8], outcome: Result<Outcome>, policy: &CleanPolicy) -> CleanResult {
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) if e.is_unsupported() => return CleanResult::unsupported(e, Vec::new()),
        Err(e) => return CleanResult::failed(e, Vec::new()),
    };
    let Outcome {
        output,
        findings,
        warnings,
    } = outcome;
    let removed: Vec<MetadataEntry> = findings.into_iter().filter(|f| f.removed).map(|f| f.entry).collect();

    let (status, output, removed) = if removed.is_empty() || output == data {
        (CleanStatus::AlreadyClean, data.to_vec(), Vec::new())
    } else {
        (CleanStatus::Cleaned, output, removed)
    };
    CleanResult {
        status,
        output: (!policy.dry_run).then_some(output),
        removed,
        warnings,
        error: None,
    }
}

/// Detects the format of `data` and removes every non-essential field.
///
/// All-or-nothing: on `Failed` or `Unsupported` no output is produced.
pub fn clean_file(data: &[u8], name_hint: Option<&str>, policy: &CleanPolicy) -> CleanResult {
    let kind = detect_kind(data, name_hint);
    if kind.tag == KindTag::Unknown {
        return CleanResult::unsupported(
            Error::Unsupported("unrecognized file format".into()),
            Vec::new(),
        );
    }
    settle(data, run(kind.tag, data, &Ctx::clean(policy)), policy)
}

/// Lists every metadata field found in `data`, in document order.
///
/// Unknown members of archives are listed as `Unknown` entries rather
/// than failing the inspection.
pub fn inspect_file(data: &[u8], name_hint: Option<&str>) -> Result<Vec<MetadataEntry>> {
    let kind = detect_kind(data, name_hint);
    let policy = CleanPolicy {
        unknown_member_action: crate::model::UnknownMemberAction::CopyVerbatim,
        ..CleanPolicy::default()
    };
    let ctx = Ctx {
        policy: &policy,
        depth: 0,
        mode: Mode::Inspect,
    };
    let outcome = run(kind.tag, data, &ctx)?;
    Ok(outcome.findings.into_iter().map(|f| f.entry).collect())
}

/// What happened to one archive member.
pub(crate) enum MemberVerdict {
    /// A recognized format. `output` equals the input when nothing was removed.
    Processed {
        output: Vec<u8>,
        findings: Vec<Finding>,
        warnings: Vec<String>,
    },
    /// Empty or plain text: content without embedded metadata structure.
    PlainContent,
    Unrecognized(String),
}

pub(crate) fn process_member(data: &[u8], path: &str, ctx: &Ctx) -> Result<MemberVerdict> {
    let child = ctx.child();
    if child.depth > MAX_NESTING_DEPTH {
        return Err(Error::DepthExceeded(MAX_NESTING_DEPTH));
    }
    let kind = detect_kind(data, Some(path));
    if kind.tag == KindTag::Unknown {
        if is_plain_text(data) {
            return Ok(MemberVerdict::PlainContent);
        }
        return Ok(MemberVerdict::Unrecognized("unrecognized format".into()));
    }
    match run(kind.tag, data, &child) {
        Ok(mut outcome) => {
            if !outcome.has_removals() {
                outcome.output = data.to_vec();
            }
            let findings = outcome
                .findings
                .into_iter()
                .map(|f| Finding {
                    entry: f.entry.nested_in(path),
                    removed: f.removed,
                })
                .collect();
            let warnings = outcome.warnings.into_iter().map(|w| format!("{path}: {w}")).collect();
            Ok(MemberVerdict::Processed {
                output: outcome.output,
                findings,
                warnings,
            })
        }
        Err(e) if e.is_unsupported() => Ok(MemberVerdict::Unrecognized(e.to_string())),
        Err(e @ Error::DepthExceeded(_)) => Err(e),
        Err(e) => Err(Error::Member {
            path: path.to_string(),
            source: Box::new(e),
        }),
    }
}
