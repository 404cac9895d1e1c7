//! Archive and office-container cleaners.
//!
//! Containers are rebuilt member by member. Each member's bytes go through
//! the cleaner for its own format, so an EXIF-bearing JPEG inside a ZIP
//! inside a TAR is cleaned like a standalone JPEG.

pub mod gzip;
pub mod odf;
pub mod ooxml;
pub mod plan;
pub mod tar;
mod xml;
pub mod zip;

pub use plan::{ArchivePlan, Disposition, NormalizedAttrs, PlannedMember};

use crate::engine::{process_member, settle, Ctx, MemberVerdict, Mode, Outcome};
use crate::error::{Error, Result};
use crate::model::{CleanPolicy, CleanResult, MetadataEntry, UnknownMemberAction};
use crate::util::binary_note;

pub(crate) enum Resolved {
    Keep(Vec<u8>, Disposition),
    Omit,
}

/// Runs one member through its format cleaner and applies the
/// unknown-member policy when its format is not recognized.
pub(crate) fn resolve_member(
    content: Vec<u8>,
    path: &str,
    label: &str,
    ctx: &Ctx,
    outcome: &mut Outcome,
) -> Result<Resolved> {
    match process_member(&content, path, ctx)? {
        MemberVerdict::Processed {
            output,
            findings,
            warnings,
        } => {
            outcome.findings.extend(findings);
            outcome.warnings.extend(warnings);
            Ok(Resolved::Keep(output, Disposition::CleanRecurse))
        }
        MemberVerdict::PlainContent => Ok(Resolved::Keep(content, Disposition::CleanRecurse)),
        MemberVerdict::Unrecognized(reason) => {
            let entry = MetadataEntry::unknown(
                format!("{label}.member"),
                format!("{reason}, {}", binary_note(content.len())),
                path,
            );
            if ctx.mode == Mode::Inspect {
                outcome.retained(entry);
                return Ok(Resolved::Keep(content, Disposition::CopyVerbatim));
            }
            match ctx.policy.unknown_member_action {
                UnknownMemberAction::Abort => Err(Error::UnknownMember(path.to_string())),
                UnknownMemberAction::Omit => {
                    outcome.warnings.push(format!("omitted unknown member '{path}'"));
                    outcome.removed(entry);
                    Ok(Resolved::Omit)
                }
                UnknownMemberAction::CopyVerbatim => {
                    outcome.warnings.push(format!("copied unknown member '{path}' without cleaning"));
                    outcome.retained(entry);
                    Ok(Resolved::Keep(content, Disposition::CopyVerbatim))
                }
            }
        }
    }
}

/// Rebuilds a ZIP archive with normalized headers and cleaned members.
pub fn clean_zip(data: &[u8], policy: &CleanPolicy) -> CleanResult {
    settle(data, zip::process(data, &Ctx::clean(policy)), policy)
}

/// Rewrites every TAR header and cleans every member; gzip and bzip2
/// wrappers are regenerated without names or timestamps.
pub fn clean_tar(data: &[u8], compression: tar::Compression, policy: &CleanPolicy) -> CleanResult {
    settle(data, tar::process(data, compression, &Ctx::clean(policy)), policy)
}

/// ZIP cleaning plus removal of the `docProps/` folder and the
/// content-type overrides and relationships that pointed into it.
pub fn clean_ooxml(data: &[u8], policy: &CleanPolicy) -> CleanResult {
    settle(data, ooxml::process(data, &Ctx::clean(policy)), policy)
}

/// ZIP cleaning plus removal of `meta.xml` and thumbnails, with the
/// manifest patched and `mimetype` kept first and stored.
pub fn clean_odf(data: &[u8], policy: &CleanPolicy) -> CleanResult {
    settle(data, odf::process(data, &Ctx::clean(policy)), policy)
}
