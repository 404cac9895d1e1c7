//! FLAC: only the StreamInfo block survives.

use crate::audio::{id3, vorbis::VorbisComment};
use crate::engine::Outcome;
use crate::error::{Error, Result};
use crate::model::MetadataEntry;
use crate::util::{at, be32, binary_note, render_latin1, render_utf8_lossy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockType {
    StreamInfo,
    Padding,
    Application,
    SeekTable,
    VorbisComment,
    CueSheet,
    Picture,
    Unknown(u8),
}

impl BlockType {
    pub fn from_code(c: u8) -> Self {
        match c {
            0 => Self::StreamInfo,
            1 => Self::Padding,
            2 => Self::Application,
            3 => Self::SeekTable,
            4 => Self::VorbisComment,
            5 => Self::CueSheet,
            6 => Self::Picture,
            n => Self::Unknown(n),
        }
    }

    fn name(self) -> String {
        match self {
            Self::Unknown(n) => format!("Block{n}"),
            other => format!("{other:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlacBlock {
    pub offset: usize,
    pub block_type: BlockType,
    pub is_last: bool,
    pub body: Vec<u8>,
}

/// A FLAC stream: metadata blocks and the offset where frames begin.
#[derive(Debug, Clone)]
pub struct FlacFile {
    pub id3_end: usize,
    pub blocks: Vec<FlacBlock>,
    pub frames_start: usize,
}

pub fn parse(d: &[u8]) -> Result<FlacFile> {
    let id3_end = id3::leading_tags_end(d).ok_or_else(|| Error::malformed("FLAC", 0, "truncated ID3v2 tag"))?;
    if d.get(id3_end..id3_end + 4) != Some(b"fLaC") {
        return Err(Error::malformed("FLAC", id3_end, "missing fLaC signature"));
    }
    let mut pos = id3_end + 4;
    let mut blocks = Vec::new();
    loop {
        let header = be32(d, pos).ok_or_else(|| Error::malformed("FLAC", pos, "truncated block header"))?;
        let len = (header & 0x00FF_FFFF) as usize;
        let body = d
            .get(pos + 4..pos + 4 + len)
            .ok_or_else(|| Error::malformed("FLAC", pos, "truncated metadata block"))?;
        let block = FlacBlock {
            offset: pos,
            block_type: BlockType::from_code(((header >> 24) & 0x7F) as u8),
            is_last: header & 0x8000_0000 != 0,
            body: body.to_vec(),
        };
        pos += 4 + len;
        let last = block.is_last;
        blocks.push(block);
        if last {
            break;
        }
    }
    let si = &blocks[0];
    if si.block_type != BlockType::StreamInfo || si.body.len() != 34 {
        return Err(Error::malformed("FLAC", si.offset, "first block is not a 34-byte StreamInfo"));
    }
    Ok(FlacFile {
        id3_end,
        blocks,
        frames_start: pos,
    })
}

fn describe(b: &FlacBlock) -> Vec<MetadataEntry> {
    let loc = format!("block {} {}", b.block_type.name(), at(b.offset));
    let single = |key: &str, value: String| vec![MetadataEntry::contextual(format!("FLAC.{key}"), value, &loc)];
    match b.block_type {
        BlockType::VorbisComment => match VorbisComment::parse(&b.body) {
            Some((vc, _)) => {
                let e = vc.entries(&loc);
                if e.is_empty() {
                    single("VorbisComment", "empty".into())
                } else {
                    e
                }
            }
            None => single("VorbisComment", binary_note(b.body.len())),
        },
        BlockType::Picture => {
            let field = |i: usize| be32(&b.body, i).unwrap_or(0) as usize;
            let kind = field(0);
            let mime_len = field(4);
            let mime = b.body.get(8..8 + mime_len).map(render_latin1).unwrap_or_default();
            let desc_at = 8 + mime_len;
            let desc_len = field(desc_at);
            let desc = b.body.get(desc_at + 4..desc_at + 4 + desc_len).map(render_utf8_lossy).unwrap_or_default();
            let dims = desc_at + 4 + desc_len;
            let data_len = field(dims + 16);
            let mut v = format!("type {kind}, {mime}, {}x{}", field(dims), field(dims + 4));
            if !desc.is_empty() {
                v.push_str(&format!(", \"{desc}\""));
            }
            v.push_str(&format!(", {}", binary_note(data_len)));
            single("Picture", v)
        }
        BlockType::SeekTable => single("SeekTable", format!("{} seek points", b.body.len() / 18)),
        BlockType::Application => {
            let id = b.body.get(..4).map(render_latin1).unwrap_or_default();
            single("Application", format!("{id}, {}", binary_note(b.body.len())))
        }
        BlockType::Padding => single("Padding", binary_note(b.body.len())),
        BlockType::CueSheet => single("CueSheet", binary_note(b.body.len())),
        BlockType::Unknown(_) => vec![MetadataEntry::unknown(
            format!("FLAC.{}", b.block_type.name()),
            binary_note(b.body.len()),
            &loc,
        )],
        BlockType::StreamInfo => Vec::new(),
    }
}

pub(crate) fn process(d: &[u8]) -> Result<Outcome> {
    let f = parse(d)?;
    let mut out = Outcome::default();
    if f.id3_end > 0 {
        let mut pos = 0;
        while pos < f.id3_end {
            let len = id3::v2_len(&d[pos..]).unwrap_or(f.id3_end - pos);
            let tag = &d[pos..pos + len];
            for e in id3::v2_entries(tag, &format!("ID3v2.{} tag {}", tag[3], at(pos))) {
                out.removed(e);
            }
            pos += len;
        }
    }
    for b in &f.blocks[1..] {
        for e in describe(b) {
            out.removed(e);
        }
    }
    let mut o = Vec::with_capacity(d.len() - f.frames_start + 42);
    o.extend(b"fLaC");
    o.extend([0x80, 0, 0, 34]);
    o.extend(&f.blocks[0].body);
    o.extend(&d[f.frames_start..]);
    out.output = o;
    Ok(out)
}
