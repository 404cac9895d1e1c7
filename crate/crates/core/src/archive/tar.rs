//! TAR (ustar, pax, GNU) reading and normalized rewriting, with optional
//! gzip or bzip2 wrapping.

use std::io::{Read, Write};

use crate::archive::plan::{ArchivePlan, Disposition, NormalizedAttrs, PlannedMember};
use crate::archive::{gzip, resolve_member, Resolved};
use crate::engine::{Ctx, Outcome};
use crate::error::{Error, Result};
use crate::model::{CleanPolicy, MetadataEntry};
use crate::util::{render_text, render_unix_time, render_utf8_lossy};

const BLOCK: usize = 512;
const PAX_HEADER_NAME: &str = "././@PaxHeader";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compression {
    None,
    Gzip,
    Bzip2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryType {
    File,
    HardLink,
    Symlink,
    CharDevice,
    BlockDevice,
    Directory,
    Fifo,
}

impl EntryType {
    fn from_flag(flag: u8) -> Option<Self> {
        Some(match flag {
            b'0' | 0 | b'7' => EntryType::File,
            b'1' => EntryType::HardLink,
            b'2' => EntryType::Symlink,
            b'3' => EntryType::CharDevice,
            b'4' => EntryType::BlockDevice,
            b'5' => EntryType::Directory,
            b'6' => EntryType::Fifo,
            _ => return None,
        })
    }

    fn flag(self) -> u8 {
        match self {
            EntryType::File => b'0',
            EntryType::HardLink => b'1',
            EntryType::Symlink => b'2',
            EntryType::CharDevice => b'3',
            EntryType::BlockDevice => b'4',
            EntryType::Directory => b'5',
            EntryType::Fifo => b'6',
        }
    }
}

/// One archive member with every header source (ustar, pax, GNU) merged.
#[derive(Debug, Clone)]
pub struct TarEntry {
    pub offset: usize,
    pub path: String,
    pub link: String,
    pub kind: EntryType,
    pub mode: u32,
    pub uid: u64,
    pub gid: u64,
    pub mtime: i64,
    pub uname: String,
    pub gname: String,
    pub devmajor: u64,
    pub devminor: u64,
    /// GNU-format access and change times, when present.
    pub gnu_times: (i64, i64),
    /// pax records attached to this member, in order.
    pub pax: Vec<(String, String)>,
    pub data_start: usize,
    pub size: usize,
}

#[derive(Debug, Default)]
pub struct TarArchive {
    pub entries: Vec<TarEntry>,
    /// Global pax records with the offset of their header.
    pub globals: Vec<(usize, String, String)>,
}

fn parse_numeric(field: &[u8]) -> Option<u64> {
    if field.first().is_some_and(|b| b & 0x80 != 0) {
        // base-256, big endian
        let mut v: u64 = (field[0] & 0x7F) as u64;
        for &b in &field[1..] {
            v = v.checked_mul(256)? + b as u64;
        }
        return Some(v);
    }
    let s: Vec<u8> = field.iter().copied().take_while(|&b| b != 0).collect();
    let s = std::str::from_utf8(&s).ok()?.trim();
    if s.is_empty() {
        return Some(0);
    }
    u64::from_str_radix(s, 8).ok()
}

fn cstr(field: &[u8]) -> String {
    let end = field.iter().position(|&b| b == 0).unwrap_or(field.len());
    String::from_utf8_lossy(&field[..end]).into_owned()
}

fn checksum(block: &[u8]) -> u32 {
    block
        .iter()
        .enumerate()
        .map(|(i, &b)| if (148..156).contains(&i) { b' ' as u32 } else { b as u32 })
        .sum()
}

fn checksum_signed(block: &[u8]) -> i64 {
    block
        .iter()
        .enumerate()
        .map(|(i, &b)| if (148..156).contains(&i) { b' ' as i64 } else { b as i8 as i64 })
        .sum()
}

/// Whether the first 512 bytes form a tar header with a valid checksum.
pub fn header_checksum_ok(data: &[u8]) -> bool {
    let Some(block) = data.get(..BLOCK) else { return false };
    if block.iter().all(|&b| b == 0) {
        return false;
    }
    match parse_numeric(&block[148..156]) {
        Some(stored) => stored as u32 == checksum(block) || stored as i64 == checksum_signed(block),
        None => false,
    }
}

fn parse_pax(body: &[u8], offset: usize) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut rest = body;
    while !rest.is_empty() {
        if rest.iter().all(|&b| b == 0) {
            break;
        }
        let sp = rest.iter().position(|&b| b == b' ').ok_or_else(|| Error::malformed("TAR", offset, "bad pax record"))?;
        let len: usize = std::str::from_utf8(&rest[..sp])
            .ok()
            .and_then(|s| s.parse().ok())
            .filter(|&l| l > sp + 1 && l <= rest.len())
            .ok_or_else(|| Error::malformed("TAR", offset, "bad pax record length"))?;
        let record = &rest[sp + 1..len];
        let record = record.strip_suffix(b"\n").unwrap_or(record);
        let eq = record.iter().position(|&b| b == b'=').ok_or_else(|| Error::malformed("TAR", offset, "bad pax record"))?;
        out.push((
            String::from_utf8_lossy(&record[..eq]).into_owned(),
            String::from_utf8_lossy(&record[eq + 1..]).into_owned(),
        ));
        rest = &rest[len..];
    }
    Ok(out)
}

impl TarArchive {
    pub fn parse(data: &[u8]) -> Result<TarArchive> {
        let mut archive = TarArchive::default();
        let mut pos = 0;
        let mut pax: Vec<(String, String)> = Vec::new();
        let mut gnu_name: Option<String> = None;
        let mut gnu_link: Option<String> = None;
        while pos < data.len() {
            let block = data
                .get(pos..pos + BLOCK)
                .ok_or_else(|| Error::malformed("TAR", pos, "truncated header block"))?;
            if block.iter().all(|&b| b == 0) {
                break;
            }
            let stored = parse_numeric(&block[148..156]);
            if stored.is_none_or(|s| s as u32 != checksum(block) && s as i64 != checksum_signed(block)) {
                return Err(Error::malformed("TAR", pos, "header checksum mismatch"));
            }
            let flag = block[156];
            let mut size = parse_numeric(&block[124..136])
                .ok_or_else(|| Error::malformed("TAR", pos, "bad size field"))? as usize;
            if EntryType::from_flag(flag).is_some() {
                if let Some((_, v)) = pax.iter().rev().find(|(k, _)| k == "size") {
                    size = v.parse().map_err(|_| Error::malformed("TAR", pos, "bad pax size"))?;
                }
            }
            let data_start = pos + BLOCK;
            let data_end = data_start
                .checked_add(size)
                .filter(|&e| e <= data.len())
                .ok_or_else(|| Error::malformed("TAR", pos, "truncated member data"))?;
            let body = &data[data_start..data_end];
            let header_at = pos;
            pos = data_start + size.div_ceil(BLOCK) * BLOCK;
            match flag {
                b'x' => pax.extend(parse_pax(body, header_at)?),
                b'g' => {
                    for (k, v) in parse_pax(body, header_at)? {
                        archive.globals.push((header_at, k, v));
                    }
                }
                b'L' => gnu_name = Some(cstr(body)),
                b'K' => gnu_link = Some(cstr(body)),
                _ => {
                    let kind = EntryType::from_flag(flag).ok_or_else(|| {
                        Error::malformed("TAR", header_at, format!("unsupported entry type '{}'", flag as char))
                    })?;
                    let is_ustar = &block[257..262] == b"ustar";
                    let is_gnu = &block[257..265] == b"ustar  \0";
                    let mut path = cstr(&block[0..100]);
                    if is_ustar && !is_gnu {
                        let prefix = cstr(&block[345..500]);
                        if !prefix.is_empty() {
                            path = format!("{prefix}/{path}");
                        }
                    }
                    let mut link = cstr(&block[157..257]);
                    if let Some(n) = gnu_name.take() {
                        path = n;
                    }
                    if let Some(l) = gnu_link.take() {
                        link = l;
                    }
                    for (k, v) in &pax {
                        match k.as_str() {
                            "path" => path = v.clone(),
                            "linkpath" => link = v.clone(),
                            _ => {}
                        }
                    }
                    let num = |r: std::ops::Range<usize>| parse_numeric(&block[r]).unwrap_or(0);
                    let gnu_times = if is_gnu {
                        (num(345..357) as i64, num(357..369) as i64)
                    } else {
                        (0, 0)
                    };
                    archive.entries.push(TarEntry {
                        offset: header_at,
                        path,
                        link,
                        kind,
                        mode: num(100..108) as u32,
                        uid: num(108..116),
                        gid: num(116..124),
                        mtime: num(136..148) as i64,
                        uname: if is_ustar { cstr(&block[265..297]) } else { String::new() },
                        gname: if is_ustar { cstr(&block[297..329]) } else { String::new() },
                        devmajor: if is_ustar { num(329..337) } else { 0 },
                        devminor: if is_ustar { num(337..345) } else { 0 },
                        gnu_times,
                        pax: std::mem::take(&mut pax),
                        data_start,
                        size,
                    });
                }
            }
        }
        if !pax.is_empty() || gnu_name.is_some() || gnu_link.is_some() {
            return Err(Error::malformed("TAR", pos, "extended header without a following member"));
        }
        Ok(archive)
    }
}

impl TarEntry {
    pub fn content<'a>(&self, data: &'a [u8]) -> &'a [u8] {
        &data[self.data_start..self.data_start + self.size]
    }

    pub fn normalized(&self) -> NormalizedAttrs {
        let mut attrs = NormalizedAttrs::tar(self.kind == EntryType::Directory, self.mode & 0o111 != 0);
        if self.kind == EntryType::Symlink {
            attrs.mode = 0o777;
        }
        attrs
    }

    fn findings(&self) -> Vec<MetadataEntry> {
        let loc = self.path.as_str();
        let norm = self.normalized();
        let mut out = Vec::new();
        let mut push = |k: &str, v: String| out.push(MetadataEntry::contextual(k, v, loc));
        if self.mtime != 0 {
            push("TAR.mtime", render_unix_time(self.mtime));
        }
        if self.uid != 0 {
            push("TAR.uid", self.uid.to_string());
        }
        if self.gid != 0 {
            push("TAR.gid", self.gid.to_string());
        }
        if !self.uname.is_empty() {
            push("TAR.uname", render_text(&self.uname));
        }
        if !self.gname.is_empty() {
            push("TAR.gname", render_text(&self.gname));
        }
        if self.mode != norm.mode {
            push("TAR.mode", format!("{:o}", self.mode));
        }
        if self.gnu_times.0 != 0 {
            push("TAR.atime", render_unix_time(self.gnu_times.0));
        }
        if self.gnu_times.1 != 0 {
            push("TAR.ctime", render_unix_time(self.gnu_times.1));
        }
        let is_dev = matches!(self.kind, EntryType::CharDevice | EntryType::BlockDevice);
        if !is_dev && (self.devmajor != 0 || self.devminor != 0) {
            push("TAR.device", format!("{}:{}", self.devmajor, self.devminor));
        }
        for (k, v) in &self.pax {
            if !matches!(k.as_str(), "path" | "linkpath" | "size") {
                push(&format!("pax.{k}"), render_utf8_lossy(v.as_bytes()));
            }
        }
        out
    }
}

fn octal(field: &mut [u8], value: u64) {
    let width = field.len() - 1;
    let s = format!("{value:0width$o}");
    field[..width].copy_from_slice(&s.as_bytes()[s.len() - width..]);
    field[width] = 0;
}

/// Splits a path over the ustar `prefix` and `name` fields, if it fits.
fn split_ustar(path: &str) -> Option<(&str, &str)> {
    if path.len() <= 100 {
        return Some(("", path));
    }
    path.match_indices('/')
        .map(|(i, _)| (&path[..i], &path[i + 1..]))
        .find(|(prefix, name)| prefix.len() <= 155 && name.len() <= 100 && !name.is_empty())
}

fn header_block(name: &str, prefix: &str, link: &str, flag: u8, mode: u32, size: u64, dev: (u64, u64)) -> [u8; BLOCK] {
    let mut h = [0u8; BLOCK];
    h[..name.len()].copy_from_slice(name.as_bytes());
    octal(&mut h[100..108], mode as u64);
    octal(&mut h[108..116], 0);
    octal(&mut h[116..124], 0);
    octal(&mut h[124..136], size);
    octal(&mut h[136..148], 0);
    h[156] = flag;
    h[157..157 + link.len()].copy_from_slice(link.as_bytes());
    h[257..263].copy_from_slice(b"ustar\0");
    h[263..265].copy_from_slice(b"00");
    octal(&mut h[329..337], dev.0);
    octal(&mut h[337..345], dev.1);
    h[345..345 + prefix.len()].copy_from_slice(prefix.as_bytes());
    let sum = checksum(&h);
    let s = format!("{sum:06o}\0 ");
    h[148..156].copy_from_slice(s.as_bytes());
    h
}

fn pax_record(key: &str, value: &str) -> Vec<u8> {
    let body = format!(" {key}={value}\n");
    let mut len = body.len() + 1;
    while len.to_string().len() + body.len() != len {
        len = len.to_string().len() + body.len();
    }
    format!("{len}{body}").into_bytes()
}

fn pad(out: &mut Vec<u8>) {
    let rem = out.len() % BLOCK;
    if rem != 0 {
        out.resize(out.len() + BLOCK - rem, 0);
    }
}

/// Largest size the 11-digit octal field can hold.
const MAX_OCTAL_SIZE: u64 = 0o77_777_777_777;

fn write_member(out: &mut Vec<u8>, entry: &TarEntry, attrs: &NormalizedAttrs, content: &[u8]) {
    let split = split_ustar(&entry.path);
    let link_fits = entry.link.len() <= 100;
    let size = if entry.kind == EntryType::File { content.len() as u64 } else { 0 };
    let mut records = Vec::new();
    if split.is_none() {
        records.extend(pax_record("path", &entry.path));
    }
    if !link_fits {
        records.extend(pax_record("linkpath", &entry.link));
    }
    if size > MAX_OCTAL_SIZE {
        records.extend(pax_record("size", &size.to_string()));
    }
    if !records.is_empty() {
        out.extend(header_block(PAX_HEADER_NAME, "", "", b'x', 0o644, records.len() as u64, (0, 0)));
        out.extend(&records);
        pad(out);
    }
    let (prefix, name) = split.unwrap_or(("", ""));
    let name = if split.is_none() { truncate_utf8(&entry.path, 100) } else { name };
    let link = if link_fits { entry.link.as_str() } else { truncate_utf8(&entry.link, 100) };
    let dev = if matches!(entry.kind, EntryType::CharDevice | EntryType::BlockDevice) {
        (entry.devmajor, entry.devminor)
    } else {
        (0, 0)
    };
    let header_size = if size > MAX_OCTAL_SIZE { 0 } else { size };
    out.extend(header_block(name, prefix, link, entry.kind.flag(), attrs.mode, header_size, dev));
    if entry.kind == EntryType::File {
        out.extend_from_slice(content);
        pad(out);
    }
}

fn truncate_utf8(s: &str, max: usize) -> &str {
    let mut end = max.min(s.len());
    while !s.is_char_boundary(end) {
        end -= 1;
    }
    &s[..end]
}

fn rebuild_tar(data: &[u8], ctx: &Ctx) -> Result<(Outcome, ArchivePlan)> {
    let archive = TarArchive::parse(data)?;
    let mut outcome = Outcome::default();
    let mut plan = ArchivePlan::default();
    let mut out = Vec::with_capacity(data.len());
    for (offset, k, v) in &archive.globals {
        outcome.removed(MetadataEntry::contextual(
            format!("pax.global.{k}"),
            render_utf8_lossy(v.as_bytes()),
            format!("global header {}", crate::util::at(*offset)),
        ));
    }
    let mut seen = std::collections::HashSet::new();
    for entry in &archive.entries {
        if !seen.insert(entry.path.as_str()) {
            return Err(Error::malformed("TAR", entry.offset, format!("duplicate member '{}'", entry.path)));
        }
        for f in entry.findings() {
            outcome.removed(f);
        }
        let attrs = entry.normalized();
        let (content, disposition) = if entry.kind == EntryType::File {
            match resolve_member(entry.content(data).to_vec(), &entry.path, "TAR", ctx, &mut outcome)? {
                Resolved::Keep(c, d) => (Some(c), d),
                Resolved::Omit => (None, Disposition::Omit),
            }
        } else {
            (Some(Vec::new()), Disposition::CleanRecurse)
        };
        if let Some(content) = &content {
            write_member(&mut out, entry, &attrs, content);
        }
        plan.members.push(PlannedMember {
            path: entry.path.clone(),
            disposition,
            attrs,
        });
    }
    out.extend([0u8; 2 * BLOCK]);
    outcome.output = out;
    Ok((outcome, plan))
}

fn unwrap(data: &[u8], compression: Compression) -> Result<(Vec<u8>, Vec<MetadataEntry>)> {
    match compression {
        Compression::None => Ok((data.to_vec(), Vec::new())),
        Compression::Gzip => {
            let header = gzip::parse_header(data)?;
            let payload = gzip::decompress(data)?;
            Ok((payload, header.findings()))
        }
        Compression::Bzip2 => {
            let mut payload = Vec::new();
            bzip2::read::MultiBzDecoder::new(data)
                .read_to_end(&mut payload)
                .map_err(|e| Error::malformed("bzip2", 0, format!("decompression failed: {e}")))?;
            Ok((payload, Vec::new()))
        }
    }
}

fn wrap(payload: &[u8], compression: Compression) -> Vec<u8> {
    match compression {
        Compression::None => payload.to_vec(),
        Compression::Gzip => gzip::compress(payload),
        Compression::Bzip2 => {
            let mut enc = bzip2::write::BzEncoder::new(Vec::new(), bzip2::Compression::best());
            enc.write_all(payload).expect("in-memory write");
            enc.finish().expect("in-memory write")
        }
    }
}

pub(crate) fn process(data: &[u8], compression: Compression, ctx: &Ctx) -> Result<Outcome> {
    let (payload, wrapper_findings) = unwrap(data, compression)?;
    if compression != Compression::None && !header_checksum_ok(&payload) && !payload.iter().all(|&b| b == 0) {
        return Err(Error::Unsupported("compressed payload is not a tar archive".into()));
    }
    let (mut outcome, _) = rebuild_tar(&payload, ctx)?;
    let mut findings: Vec<_> = wrapper_findings
        .into_iter()
        .map(|entry| crate::engine::Finding { entry, removed: true })
        .collect();
    findings.append(&mut outcome.findings);
    outcome.findings = findings;
    outcome.output = wrap(&outcome.output, compression);
    Ok(outcome)
}

/// The rewrite plan a clean of an uncompressed tar would follow.
pub fn plan(data: &[u8], policy: &CleanPolicy) -> Result<ArchivePlan> {
    rebuild_tar(data, &Ctx::clean(policy)).map(|(_, p)| p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(path: &str, kind: EntryType) -> TarEntry {
        TarEntry {
            offset: 0,
            path: path.into(),
            link: String::new(),
            kind,
            mode: 0o644,
            uid: 0,
            gid: 0,
            mtime: 0,
            uname: String::new(),
            gname: String::new(),
            devmajor: 0,
            devminor: 0,
            gnu_times: (0, 0),
            pax: Vec::new(),
            data_start: 0,
            size: 0,
        }
    }

    fn build(members: &[(&str, &[u8])]) -> Vec<u8> {
        let mut out = Vec::new();
        for (p, c) in members {
            let e = entry(p, EntryType::File);
            write_member(&mut out, &e, &e.normalized(), c);
        }
        out.extend([0u8; 1024]);
        out
    }

    #[test]
    fn written_headers_verify_and_parse() {
        let d = build(&[("a.txt", b"hello")]);
        assert!(header_checksum_ok(&d));
        let a = TarArchive::parse(&d).unwrap();
        assert_eq!(a.entries.len(), 1);
        assert_eq!(a.entries[0].path, "a.txt");
        assert_eq!(a.entries[0].content(&d), b"hello");
        assert!(a.entries[0].findings().is_empty());
    }

    #[test]
    fn long_path_uses_prefix_or_pax() {
        let mid = format!("{}/{}", "d".repeat(120), "f.txt");
        assert_eq!(split_ustar(&mid).unwrap().1, "f.txt");
        let long = "x".repeat(180);
        assert!(split_ustar(&long).is_none());
        let d = build(&[(mid.as_str(), b"1"), (long.as_str(), b"2")]);
        let a = TarArchive::parse(&d).unwrap();
        assert_eq!(a.entries[0].path, mid);
        assert_eq!(a.entries[1].path, long);
        assert_eq!(a.entries[1].pax, vec![("path".to_string(), long.clone())]);
        // path records are regenerated, not reported
        assert!(a.entries[1].findings().is_empty());
    }

    #[test]
    fn pax_record_length_is_self_consistent() {
        for v in ["a", &"b".repeat(95), &"c".repeat(995)] {
            let r = pax_record("path", v);
            let sp = r.iter().position(|&b| b == b' ').unwrap();
            let n: usize = std::str::from_utf8(&r[..sp]).unwrap().parse().unwrap();
            assert_eq!(n, r.len());
        }
    }

    #[test]
    fn checksum_mismatch_fails() {
        let mut d = build(&[("a.txt", b"hello")]);
        d[0] = b'b';
        let err = TarArchive::parse(&d).unwrap_err();
        assert!(err.to_string().contains("checksum"), "{err}");
    }

    #[test]
    fn truncated_member_fails() {
        let mut d = build(&[("a.txt", &[7u8; 600])]);
        d.truncate(700);
        assert!(TarArchive::parse(&d).is_err());
    }

    #[test]
    fn executable_bit_maps_to_755() {
        let mut e = entry("run.sh", EntryType::File);
        e.mode = 0o4711;
        assert_eq!(e.normalized().mode, 0o755);
        assert_eq!(entry("d/", EntryType::Directory).normalized().mode, 0o755);
    }
}
