use std::collections::HashSet;

/// What the rewrite does with one archive member.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disposition {
    /// Content passed through the cleaner for its own format.
    CleanRecurse,
    /// Unrecognized content stored as-is, by explicit policy.
    CopyVerbatim,
    Omit,
    /// Container bookkeeping (manifests, relationship parts) regenerated.
    Rewrite,
}

/// Header attributes forced onto every rewritten member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedAttrs {
    /// Seconds since the Unix epoch. Zero for TAR, 1980-01-01 for ZIP.
    pub mtime: i64,
    pub uid: u32,
    pub gid: u32,
    pub uname: String,
    pub gname: String,
    pub mode: u32,
}

/// The DOS epoch, 1980-01-01 00:00:00, as Unix seconds.
pub const DOS_EPOCH_UNIX: i64 = 315_532_800;

impl NormalizedAttrs {
    pub fn tar(is_dir: bool, was_executable: bool) -> Self {
        NormalizedAttrs {
            mtime: 0,
            uid: 0,
            gid: 0,
            uname: String::new(),
            gname: String::new(),
            mode: if is_dir || was_executable { 0o755 } else { 0o644 },
        }
    }

    pub fn zip(is_dir: bool) -> Self {
        NormalizedAttrs {
            mtime: DOS_EPOCH_UNIX,
            mode: if is_dir { 0o755 } else { 0o644 },
            ..Self::tar(is_dir, false)
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlannedMember {
    pub path: String,
    pub disposition: Disposition,
    pub attrs: NormalizedAttrs,
}

/// Per-member rewrite plan, in input order.
#[derive(Debug, Clone, Default)]
pub struct ArchivePlan {
    pub members: Vec<PlannedMember>,
}

impl ArchivePlan {
    pub fn paths_unique(&self) -> bool {
        let mut seen = HashSet::new();
        self.members.iter().all(|m| seen.insert(m.path.as_str()))
    }

    pub fn kept(&self) -> impl Iterator<Item = &PlannedMember> {
        self.members.iter().filter(|m| m.disposition != Disposition::Omit)
    }
}
