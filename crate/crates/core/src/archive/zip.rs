//! ZIP reading and deterministic rewriting.
//!
//! Output conventions: members in input order, DOS timestamp 1980-01-01
//! 00:00:00, no extra fields, no comments, zero attributes apart from the
//! MS-DOS directory bit, version-made-by 2.0 / MS-DOS, no data descriptors
//! and DEFLATE level 9 for every file member.

use std::collections::HashSet;
use std::io::{Read, Write};

use flate2::read::DeflateDecoder;
use flate2::write::DeflateEncoder;
use flate2::Compression;

use crate::archive::plan::{ArchivePlan, Disposition, NormalizedAttrs, PlannedMember};
use crate::archive::{resolve_member, Resolved};
use crate::engine::{Ctx, Outcome};
use crate::error::{Error, Result};
use crate::model::MetadataEntry;
use crate::util::{le16, le32, render_utf8_lossy};

const LOCAL_SIG: u32 = 0x0403_4b50;
const CENTRAL_SIG: u32 = 0x0201_4b50;
const EOCD_SIG: u32 = 0x0605_4b50;

pub const DEFLATE_LEVEL: u32 = 9;
/// DOS date word for 1980-01-01.
pub const DOS_EPOCH_DATE: u16 = (1 << 5) | 1;
pub const DOS_EPOCH_TIME: u16 = 0;
const VERSION_MADE_BY: u16 = 20;
const FLAG_ENCRYPTED: u16 = 1;
const FLAG_UTF8: u16 = 1 << 11;
const ATTR_DIRECTORY: u32 = 0x10;

#[derive(Debug, Clone)]
pub struct ZipEntry {
    pub name: String,
    pub version_made_by: u16,
    pub flags: u16,
    pub method: u16,
    pub time: u16,
    pub date: u16,
    pub crc: u32,
    pub compressed_size: u32,
    pub uncompressed_size: u32,
    pub internal_attr: u16,
    pub external_attr: u32,
    pub central_extra: Vec<u8>,
    pub local_extra: Vec<u8>,
    pub local_time: u16,
    pub local_date: u16,
    pub comment: Vec<u8>,
    pub data_offset: usize,
}

impl ZipEntry {
    pub fn is_dir(&self) -> bool {
        self.name.ends_with('/')
    }

    pub fn is_encrypted(&self) -> bool {
        self.flags & FLAG_ENCRYPTED != 0 || self.method == 99
    }

    pub fn raw<'a>(&self, data: &'a [u8]) -> &'a [u8] {
        &data[self.data_offset..self.data_offset + self.compressed_size as usize]
    }

    /// Decompressed member content, CRC-checked.
    pub fn contents(&self, data: &[u8]) -> Result<Vec<u8>> {
        if self.is_encrypted() {
            return Err(Error::EncryptedMember(self.name.clone()));
        }
        let raw = self.raw(data);
        let body = match self.method {
            0 => raw.to_vec(),
            8 => {
                let mut out = Vec::with_capacity(self.uncompressed_size as usize);
                DeflateDecoder::new(raw)
                    .take(self.uncompressed_size as u64 + 1)
                    .read_to_end(&mut out)
                    .map_err(|e| Error::malformed("ZIP", self.data_offset, format!("'{}': {e}", self.name)))?;
                out
            }
            m => {
                return Err(Error::malformed(
                    "ZIP",
                    self.data_offset,
                    format!("'{}': unsupported compression method {m}", self.name),
                ))
            }
        };
        if body.len() != self.uncompressed_size as usize || crc32fast::hash(&body) != self.crc {
            return Err(Error::malformed(
                "ZIP",
                self.data_offset,
                format!("CRC mismatch in member '{}'", self.name),
            ));
        }
        Ok(body)
    }
}

#[derive(Debug, Clone)]
pub struct ZipArchive {
    pub entries: Vec<ZipEntry>,
    pub comment: Vec<u8>,
}

fn find_eocd(data: &[u8]) -> Option<usize> {
    if data.len() < 22 {
        return None;
    }
    let lowest = data.len().saturating_sub(22 + 0xFFFF);
    (lowest..=data.len() - 22).rev().find(|&i| {
        le32(data, i) == Some(EOCD_SIG) && le16(data, i + 20).map(|n| i + 22 + n as usize <= data.len()) == Some(true)
    })
}

impl ZipArchive {
    pub fn parse(data: &[u8]) -> Result<ZipArchive> {
        let eocd = find_eocd(data).ok_or_else(|| Error::malformed("ZIP", data.len(), "end of central directory not found"))?;
        let count = le16(data, eocd + 10).unwrap() as usize;
        let cd_size = le32(data, eocd + 12).unwrap() as usize;
        let cd_offset = le32(data, eocd + 16).unwrap() as usize;
        let comment_len = le16(data, eocd + 20).unwrap() as usize;
        if count == 0xFFFF || cd_offset == 0xFFFF_FFFF {
            return Err(Error::malformed("ZIP", eocd, "ZIP64 archives are not supported"));
        }
        if cd_offset.checked_add(cd_size).is_none_or(|end| end > eocd) {
            return Err(Error::malformed("ZIP", eocd, "central directory out of bounds"));
        }
        let comment = data[eocd + 22..eocd + 22 + comment_len].to_vec();
        let mut entries = Vec::with_capacity(count);
        let mut pos = cd_offset;
        for _ in 0..count {
            let bad = |reason: &str| Error::malformed("ZIP", pos, reason.to_string());
            if le32(data, pos) != Some(CENTRAL_SIG) {
                return Err(bad("bad central directory signature"));
            }
            let field = |off: usize| le16(data, pos + off).ok_or_else(|| bad("truncated central directory"));
            let field32 = |off: usize| le32(data, pos + off).ok_or_else(|| bad("truncated central directory"));
            let version_made_by = field(4)?;
            let flags = field(8)?;
            let method = field(10)?;
            let time = field(12)?;
            let date = field(14)?;
            let crc = field32(16)?;
            let compressed_size = field32(20)?;
            let uncompressed_size = field32(24)?;
            let name_len = field(28)? as usize;
            let extra_len = field(30)? as usize;
            let comment_len = field(32)? as usize;
            let internal_attr = field(36)?;
            let external_attr = field32(38)?;
            let local_offset = field32(42)? as usize;
            let var = pos + 46;
            let var_end = var + name_len + extra_len + comment_len;
            if var_end > data.len() {
                return Err(bad("truncated central directory entry"));
            }
            if compressed_size == 0xFFFF_FFFF || uncompressed_size == 0xFFFF_FFFF || local_offset == 0xFFFF_FFFF {
                return Err(bad("ZIP64 members are not supported"));
            }
            let name_raw = &data[var..var + name_len];
            let name = match std::str::from_utf8(name_raw) {
                Ok(s) => s.to_string(),
                // CP437 names: map bytes one to one
                Err(_) => name_raw.iter().map(|&b| b as char).collect(),
            };
            let central_extra = data[var + name_len..var + name_len + extra_len].to_vec();
            let comment = data[var + name_len + extra_len..var_end].to_vec();

            let lh = local_offset;
            if le32(data, lh) != Some(LOCAL_SIG) {
                return Err(Error::malformed("ZIP", lh, format!("bad local header for '{name}'")));
            }
            let lname = le16(data, lh + 26).unwrap_or(0) as usize;
            let lextra = le16(data, lh + 28).unwrap_or(0) as usize;
            let data_offset = lh + 30 + lname + lextra;
            if data_offset + compressed_size as usize > data.len() {
                return Err(Error::malformed("ZIP", lh, format!("member '{name}' extends past end of file")));
            }
            entries.push(ZipEntry {
                local_extra: data[lh + 30 + lname..data_offset].to_vec(),
                local_time: le16(data, lh + 10).unwrap(),
                local_date: le16(data, lh + 12).unwrap(),
                name,
                version_made_by,
                flags,
                method,
                time,
                date,
                crc,
                compressed_size,
                uncompressed_size,
                internal_attr,
                external_attr,
                central_extra,
                comment,
                data_offset,
            });
            pos = var_end;
        }
        Ok(ZipArchive { entries, comment })
    }
}

pub fn render_dos_datetime(date: u16, time: u16) -> String {
    format!(
        "{:04}-{:02}-{:02} {:02}:{:02}:{:02}",
        1980 + (date >> 9),
        (date >> 5) & 0xF,
        date & 0x1F,
        time >> 11,
        (time >> 5) & 0x3F,
        (time & 0x1F) * 2
    )
}

fn extra_ids(extra: &[u8]) -> Vec<String> {
    let mut ids = Vec::new();
    let mut i = 0;
    while let (Some(id), Some(len)) = (le16(extra, i), le16(extra, i + 2)) {
        let name = match id {
            0x0001 => "zip64",
            0x000A => "NTFS times",
            0x5455 => "extended timestamp",
            0x5855 => "Info-ZIP unix (old)",
            0x7855 => "Info-ZIP unix",
            0x7875 => "unix uid/gid",
            0x756E => "ASi unix",
            0xCAFE => "jar marker",
            0x9901 => "AES encryption",
            _ => "unknown",
        };
        ids.push(format!("0x{id:04X} ({name})"));
        i += 4 + len as usize;
    }
    if ids.is_empty() && !extra.is_empty() {
        ids.push(format!("{} bytes", extra.len()));
    }
    ids
}

fn canonical_external(is_dir: bool) -> u32 {
    if is_dir {
        ATTR_DIRECTORY
    } else {
        0
    }
}

/// Header-level fields that identify the writer, the host or the time.
pub(crate) fn header_findings(e: &ZipEntry) -> Vec<MetadataEntry> {
    let mut out = Vec::new();
    let loc = e.name.as_str();
    if (e.date, e.time) != (DOS_EPOCH_DATE, DOS_EPOCH_TIME) || (e.local_date, e.local_time) != (DOS_EPOCH_DATE, DOS_EPOCH_TIME) {
        out.push(MetadataEntry::contextual("ZIP.mtime", render_dos_datetime(e.date, e.time), loc));
    }
    if !e.central_extra.is_empty() || !e.local_extra.is_empty() {
        let mut ids = extra_ids(&e.local_extra);
        for id in extra_ids(&e.central_extra) {
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        out.push(MetadataEntry::contextual("ZIP.extra", ids.join(", "), loc));
    }
    if !e.comment.is_empty() {
        out.push(MetadataEntry::contextual("ZIP.comment", render_utf8_lossy(&e.comment), loc));
    }
    if e.external_attr != canonical_external(e.is_dir()) || e.internal_attr != 0 {
        let mut v = format!("external=0x{:08X} internal=0x{:04X}", e.external_attr, e.internal_attr);
        if e.version_made_by >> 8 == 3 {
            v.push_str(&format!(" (unix mode {:o})", e.external_attr >> 16));
        }
        out.push(MetadataEntry::contextual("ZIP.attributes", v, loc));
    }
    if e.version_made_by != VERSION_MADE_BY {
        out.push(MetadataEntry::contextual(
            "ZIP.version_made_by",
            format!("host={} version={}", e.version_made_by >> 8, e.version_made_by & 0xFF),
            loc,
        ));
    }
    out
}

/// How a member is stored in the rebuilt archive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Storage {
    Deflate,
    Stored,
}

#[derive(Default)]
pub struct ZipWriter {
    out: Vec<u8>,
    central: Vec<u8>,
    count: u16,
}

impl ZipWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_dir(&mut self, name: &str) {
        self.add_raw(name, 0, &[], 0, 0, true);
    }

    pub fn add_file(&mut self, name: &str, content: &[u8], storage: Storage) {
        let crc = crc32fast::hash(content);
        match storage {
            Storage::Stored => self.add_raw(name, 0, content, crc, content.len() as u32, false),
            Storage::Deflate => {
                let mut enc = DeflateEncoder::new(Vec::new(), Compression::new(DEFLATE_LEVEL));
                enc.write_all(content).expect("in-memory write");
                let packed = enc.finish().expect("in-memory write");
                self.add_raw(name, 8, &packed, crc, content.len() as u32, false);
            }
        }
    }

    fn add_raw(&mut self, name: &str, method: u16, payload: &[u8], crc: u32, size: u32, is_dir: bool) {
        let offset = self.out.len() as u32;
        let flags = if name.is_ascii() { 0 } else { FLAG_UTF8 };
        let needed: u16 = if method == 8 || is_dir { 20 } else { 10 };
        let name = name.as_bytes();

        let o = &mut self.out;
        o.extend(LOCAL_SIG.to_le_bytes());
        o.extend(needed.to_le_bytes());
        o.extend(flags.to_le_bytes());
        o.extend(method.to_le_bytes());
        o.extend(DOS_EPOCH_TIME.to_le_bytes());
        o.extend(DOS_EPOCH_DATE.to_le_bytes());
        o.extend(crc.to_le_bytes());
        o.extend((payload.len() as u32).to_le_bytes());
        o.extend(size.to_le_bytes());
        o.extend((name.len() as u16).to_le_bytes());
        o.extend(0u16.to_le_bytes());
        o.extend_from_slice(name);
        o.extend_from_slice(payload);

        let c = &mut self.central;
        c.extend(CENTRAL_SIG.to_le_bytes());
        c.extend(VERSION_MADE_BY.to_le_bytes());
        c.extend(needed.to_le_bytes());
        c.extend(flags.to_le_bytes());
        c.extend(method.to_le_bytes());
        c.extend(DOS_EPOCH_TIME.to_le_bytes());
        c.extend(DOS_EPOCH_DATE.to_le_bytes());
        c.extend(crc.to_le_bytes());
        c.extend((payload.len() as u32).to_le_bytes());
        c.extend(size.to_le_bytes());
        c.extend((name.len() as u16).to_le_bytes());
        c.extend([0u8; 8]); // extra len, comment len, disk start, internal attrs
        c.extend(canonical_external(is_dir).to_le_bytes());
        c.extend(offset.to_le_bytes());
        c.extend_from_slice(name);
        self.count += 1;
    }

    pub fn finish(mut self) -> Vec<u8> {
        let cd_offset = self.out.len() as u32;
        let cd_size = self.central.len() as u32;
        self.out.extend_from_slice(&self.central);
        self.out.extend(EOCD_SIG.to_le_bytes());
        self.out.extend([0u8; 4]);
        self.out.extend(self.count.to_le_bytes());
        self.out.extend(self.count.to_le_bytes());
        self.out.extend(cd_size.to_le_bytes());
        self.out.extend(cd_offset.to_le_bytes());
        self.out.extend(0u16.to_le_bytes());
        self.out
    }
}

/// Format-specific rules layered on the plain ZIP rebuild.
pub(crate) trait Flavor {
    fn label(&self) -> &'static str {
        "ZIP"
    }

    /// Members dropped wholesale, described by the returned findings.
    fn omit(&self, _name: &str, _content: &[u8]) -> Option<Vec<MetadataEntry>> {
        None
    }

    /// Regenerates bookkeeping parts once the omitted set is known.
    fn rewrite(&self, _name: &str, _content: &[u8], _omitted: &HashSet<String>) -> Result<Option<Vec<u8>>> {
        Ok(None)
    }

    fn stored(&self, _name: &str) -> bool {
        false
    }

    /// Member that must come first in the output.
    fn leading(&self) -> Option<&'static str> {
        None
    }
}

pub(crate) struct PlainZip;

impl Flavor for PlainZip {}

pub(crate) fn process(data: &[u8], ctx: &Ctx) -> Result<Outcome> {
    rebuild(data, ctx, &PlainZip).map(|(o, _)| o)
}

struct Pending {
    plan_index: usize,
    path: String,
    content: Vec<u8>,
    is_dir: bool,
}

pub(crate) fn rebuild(data: &[u8], ctx: &Ctx, flavor: &dyn Flavor) -> Result<(Outcome, ArchivePlan)> {
    let archive = ZipArchive::parse(data)?;
    let mut outcome = Outcome::default();
    let mut seen = HashSet::new();
    let mut omitted = HashSet::new();
    let mut pending: Vec<Pending> = Vec::new();
    let mut plan = ArchivePlan::default();

    for entry in &archive.entries {
        if !seen.insert(entry.name.clone()) {
            return Err(Error::malformed("ZIP", entry.data_offset, format!("duplicate member '{}'", entry.name)));
        }
        if entry.is_encrypted() {
            return Err(Error::EncryptedMember(entry.name.clone()));
        }
        for f in header_findings(entry) {
            outcome.removed(f);
        }
        let is_dir = entry.is_dir();
        let content = if is_dir { Vec::new() } else { entry.contents(data)? };
        let resolved = if let Some(findings) = flavor.omit(&entry.name, &content) {
            for f in findings {
                outcome.removed(f);
            }
            Resolved::Omit
        } else if is_dir {
            Resolved::Keep(content, Disposition::CleanRecurse)
        } else {
            resolve_member(content, &entry.name, flavor.label(), ctx, &mut outcome)?
        };
        let disposition = match resolved {
            Resolved::Keep(content, d) => {
                pending.push(Pending {
                    plan_index: plan.members.len(),
                    path: entry.name.clone(),
                    content,
                    is_dir,
                });
                d
            }
            Resolved::Omit => {
                omitted.insert(entry.name.clone());
                Disposition::Omit
            }
        };
        plan.members.push(PlannedMember {
            path: entry.name.clone(),
            disposition,
            attrs: NormalizedAttrs::zip(is_dir),
        });
    }

    for p in pending.iter_mut().filter(|p| !p.is_dir) {
        if let Some(new) = flavor.rewrite(&p.path, &p.content, &omitted)? {
            if new != p.content {
                p.content = new;
                plan.members[p.plan_index].disposition = Disposition::Rewrite;
            }
        }
    }

    if let Some(lead) = flavor.leading() {
        if let Some(i) = pending.iter().position(|p| p.path == lead) {
            let first = pending.remove(i);
            pending.insert(0, first);
        }
    }

    if !archive.comment.is_empty() {
        outcome.removed(MetadataEntry::contextual(
            "ZIP.archive_comment",
            render_utf8_lossy(&archive.comment),
            "end of central directory",
        ));
    }

    let mut writer = ZipWriter::new();
    for p in &pending {
        if p.is_dir {
            writer.add_dir(&p.path);
        } else {
            let storage = if flavor.stored(&p.path) { Storage::Stored } else { Storage::Deflate };
            writer.add_file(&p.path, &p.content, storage);
        }
    }
    outcome.output = writer.finish();
    Ok((outcome, plan))
}

/// The rewrite plan a clean would follow, without producing output.
pub fn plan(data: &[u8], policy: &crate::model::CleanPolicy) -> Result<ArchivePlan> {
    rebuild(data, &Ctx::clean(policy), &PlainZip).map(|(_, p)| p)
}
