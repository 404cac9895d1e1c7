//! Cross-reference loading: classic tables, xref streams, object streams and
//! incremental updates. The newest definition of every object wins.

use std::collections::{BTreeMap, HashSet};
use std::io::Read;

use super::object::{Dict, ObjectId, PdfObject, PdfStream};
use super::parser::{rfind, Parser};
use super::PdfError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Entry {
    Free,
    InUse { offset: usize },
    Compressed { stream: u32, index: usize },
}

#[derive(Debug, Clone)]
pub struct PdfDocument {
    pub version: String,
    pub objects: BTreeMap<ObjectId, PdfObject>,
    pub trailer: Dict,
    /// Number of cross-reference sections (1 + incremental updates).
    pub revisions: usize,
}

impl PdfDocument {
    /// Looks an object up by number; the generation is ignored because only
    /// the newest one is ever loaded.
    pub fn get(&self, id: ObjectId) -> Option<&PdfObject> {
        self.objects.range((id.0, 0)..=(id.0, u16::MAX)).next().map(|(_, o)| o)
    }

    /// Follows a reference, or returns the object itself if it is direct.
    pub fn resolve<'a>(&'a self, o: &'a PdfObject) -> Option<&'a PdfObject> {
        match o {
            PdfObject::Reference(id) => self.get(*id),
            other => Some(other),
        }
    }

    pub fn root_id(&self) -> Option<ObjectId> {
        self.trailer.get("Root")?.reference()
    }
}

fn xref_err(reason: impl Into<String>) -> PdfError {
    PdfError::MalformedXref(reason.into())
}

fn apply_png_predictor(data: &[u8], columns: usize, bpp: usize) -> Result<Vec<u8>, PdfError> {
    let row = columns;
    let mut out = Vec::with_capacity(data.len());
    let mut prev = vec![0u8; row];
    for chunk in data.chunks(row + 1) {
        if chunk.len() != row + 1 {
            return Err(PdfError::UnsupportedFilter("truncated predictor row".into()));
        }
        let (ft, raw) = (chunk[0], &chunk[1..]);
        let mut cur = vec![0u8; row];
        for i in 0..row {
            let a = if i >= bpp { cur[i - bpp] as i16 } else { 0 };
            let b = prev[i] as i16;
            let c = if i >= bpp { prev[i - bpp] as i16 } else { 0 };
            let pred = match ft {
                0 => 0,
                1 => a,
                2 => b,
                3 => (a + b) / 2,
                4 => {
                    let p = a + b - c;
                    let (pa, pb, pc) = ((p - a).abs(), (p - b).abs(), (p - c).abs());
                    if pa <= pb && pa <= pc {
                        a
                    } else if pb <= pc {
                        b
                    } else {
                        c
                    }
                }
                _ => return Err(PdfError::UnsupportedFilter(format!("PNG predictor type {ft}"))),
            };
            cur[i] = raw[i].wrapping_add(pred as u8);
        }
        out.extend(&cur);
        prev = cur;
    }
    Ok(out)
}

/// Decodes a stream whose filters are limited to FlateDecode.
pub fn decode_stream(s: &PdfStream) -> Result<Vec<u8>, PdfError> {
    let filters: Vec<Vec<u8>> = match s.dict.get("Filter") {
        None | Some(PdfObject::Null) => Vec::new(),
        Some(PdfObject::Name(n)) => vec![n.clone()],
        Some(PdfObject::Array(a)) => a
            .iter()
            .map(|f| match f {
                PdfObject::Name(n) => Ok(n.clone()),
                _ => Err(PdfError::UnsupportedFilter("non-name filter".into())),
            })
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(PdfError::UnsupportedFilter("non-name filter".into())),
    };
    let parms = match s.dict.get("DecodeParms") {
        Some(PdfObject::Dictionary(d)) => Some(d.clone()),
        Some(PdfObject::Array(a)) => a.first().and_then(|p| p.dict().cloned()),
        _ => None,
    };
    let mut data = s.data.clone();
    for f in &filters {
        if f != b"FlateDecode" && f != b"Fl" {
            return Err(PdfError::UnsupportedFilter(String::from_utf8_lossy(f).into_owned()));
        }
        let mut out = Vec::new();
        flate2::read::ZlibDecoder::new(data.as_slice())
            .read_to_end(&mut out)
            .map_err(|e| PdfError::UnsupportedFilter(format!("corrupt FlateDecode data: {e}")))?;
        data = out;
        if let Some(p) = &parms {
            let predictor = p.int("Predictor").unwrap_or(1);
            if predictor >= 10 {
                let colors = p.int("Colors").unwrap_or(1).max(1) as usize;
                let bpc = p.int("BitsPerComponent").unwrap_or(8).max(1) as usize;
                let columns = p.int("Columns").unwrap_or(1).max(1) as usize;
                let bpp = (colors * bpc).div_ceil(8);
                data = apply_png_predictor(&data, (columns * colors * bpc).div_ceil(8), bpp)?;
            } else if predictor == 2 {
                return Err(PdfError::UnsupportedFilter("TIFF predictor".into()));
            }
        }
    }
    Ok(data)
}

fn read_classic(p: &mut Parser, entries: &mut BTreeMap<u32, Entry>) -> Result<Dict, PdfError> {
    p.expect_keyword("xref").map_err(|_| xref_err("expected 'xref'"))?;
    loop {
        if p.at_keyword("trailer") {
            p.pos += "trailer".len();
            break;
        }
        let start = p.read_uint().map_err(|_| xref_err("bad subsection header"))? as u32;
        let count = p.read_uint().map_err(|_| xref_err("bad subsection header"))? as u32;
        for i in 0..count {
            let offset = p.read_uint().map_err(|_| xref_err("bad xref entry"))?;
            let _gen = p.read_uint().map_err(|_| xref_err("bad xref entry"))?;
            let kind = p.read_keyword();
            let entry = match kind {
                b"n" => Entry::InUse { offset: offset as usize },
                b"f" => Entry::Free,
                _ => return Err(xref_err("xref entry is neither 'n' nor 'f'")),
            };
            entries.entry(start + i).or_insert(entry);
        }
    }
    match p.parse_object().map_err(|_| xref_err("unreadable trailer"))? {
        PdfObject::Dictionary(d) => Ok(d),
        _ => Err(xref_err("trailer is not a dictionary")),
    }
}

fn read_stream(data: &[u8], offset: usize, entries: &mut BTreeMap<u32, Entry>) -> Result<Dict, PdfError> {
    let (_, obj) = Parser::new(data, offset)
        .indirect()
        .map_err(|_| xref_err(format!("no cross-reference section at offset {offset}")))?;
    let PdfObject::Stream(s) = obj else {
        return Err(xref_err("cross-reference object is not a stream"));
    };
    if s.dict.name("Type") != Some(b"XRef") {
        return Err(xref_err("cross-reference stream lacks /Type /XRef"));
    }
    let w: Vec<usize> = match s.dict.get("W") {
        Some(PdfObject::Array(a)) if a.len() == 3 => a
            .iter()
            .map(|x| match x {
                PdfObject::Integer(n) if (0..=8).contains(n) => Ok(*n as usize),
                _ => Err(xref_err("bad /W entry")),
            })
            .collect::<Result<_, _>>()?,
        _ => return Err(xref_err("missing /W")),
    };
    let size = s.dict.int("Size").ok_or_else(|| xref_err("missing /Size"))?;
    let index: Vec<i64> = match s.dict.get("Index") {
        Some(PdfObject::Array(a)) => a
            .iter()
            .map(|x| match x {
                PdfObject::Integer(n) => Ok(*n),
                _ => Err(xref_err("bad /Index")),
            })
            .collect::<Result<_, _>>()?,
        _ => vec![0, size],
    };
    let body = decode_stream(&s)?;
    let row = w.iter().sum::<usize>();
    let field = |rec: &[u8], from: usize, width: usize| rec[from..from + width].iter().fold(0u64, |a, &b| (a << 8) | b as u64);
    let mut rows = body.chunks_exact(row.max(1));
    for pair in index.chunks(2) {
        let [start, count] = pair else { return Err(xref_err("odd /Index length")) };
        for i in 0..*count {
            let rec = rows.next().ok_or_else(|| xref_err("xref stream shorter than /Index"))?;
            let kind = if w[0] == 0 { 1 } else { field(rec, 0, w[0]) };
            let f2 = field(rec, w[0], w[1]) as usize;
            let f3 = field(rec, w[0] + w[1], w[2]) as usize;
            let entry = match kind {
                0 => Entry::Free,
                1 => Entry::InUse { offset: f2 },
                2 => Entry::Compressed { stream: f2 as u32, index: f3 },
                _ => continue,
            };
            entries.entry((start + i) as u32).or_insert(entry);
        }
    }
    Ok(s.dict)
}

fn startxref(data: &[u8]) -> Result<usize, PdfError> {
    let at = rfind(data, b"startxref").ok_or_else(|| xref_err("no startxref"))?;
    let mut p = Parser::new(data, at + "startxref".len());
    Ok(p.read_uint().map_err(|_| xref_err("bad startxref offset"))? as usize)
}

/// Decoded body of an object stream and its (object number, offset) table.
type ObjectStream = (Vec<u8>, Vec<(u32, usize)>);

fn load_object_stream(doc_objects: &BTreeMap<ObjectId, PdfObject>, num: u32) -> Result<ObjectStream, PdfError> {
    let stream = doc_objects
        .range((num, 0)..=(num, u16::MAX))
        .next()
        .map(|(_, o)| o)
        .ok_or_else(|| xref_err(format!("object stream {num} missing")))?;
    let PdfObject::Stream(s) = stream else {
        return Err(xref_err(format!("object {num} is not an object stream")));
    };
    let n = s.dict.int("N").ok_or_else(|| xref_err("object stream lacks /N"))? as usize;
    let first = s.dict.int("First").ok_or_else(|| xref_err("object stream lacks /First"))? as usize;
    let body = decode_stream(s)?;
    let mut p = Parser::new(&body, 0);
    let mut header = Vec::with_capacity(n);
    for _ in 0..n {
        let obj = p.read_uint().map_err(|_| xref_err("bad object stream header"))? as u32;
        let off = p.read_uint().map_err(|_| xref_err("bad object stream header"))? as usize;
        header.push((obj, first + off));
    }
    Ok((body, header))
}

/// Loads every live object of the document.
pub fn parse_pdf(data: &[u8]) -> Result<PdfDocument, PdfError> {
    if !data.starts_with(b"%PDF-") {
        return Err(PdfError::Malformed {
            offset: 0,
            reason: "missing %PDF- header".into(),
        });
    }
    let version: String = data[5..]
        .iter()
        .take_while(|c| c.is_ascii_digit() || **c == b'.')
        .map(|&c| c as char)
        .collect();

    let mut entries = BTreeMap::new();
    let mut trailer = Dict::default();
    let mut visited = HashSet::new();
    let mut next = Some(startxref(data)?);
    let mut revisions = 0;
    while let Some(off) = next.take() {
        if off >= data.len() || !visited.insert(off) {
            if revisions == 0 {
                return Err(xref_err("startxref points outside the file"));
            }
            break;
        }
        revisions += 1;
        let mut p = Parser::new(data, off);
        let section = if p.at_keyword("xref") {
            let t = read_classic(&mut p, &mut entries)?;
            if let Some(stm) = t.int("XRefStm") {
                read_stream(data, stm as usize, &mut entries)?;
            }
            t
        } else {
            read_stream(data, off, &mut entries)?
        };
        next = section.int("Prev").map(|p| p as usize);
        for (k, v) in section.0 {
            if !trailer.0.iter().any(|(tk, _)| *tk == k) {
                trailer.0.push((k, v));
            }
        }
    }
    if trailer.get("Encrypt").is_some() {
        return Err(PdfError::EncryptedDocument);
    }

    let mut objects = BTreeMap::new();
    for (&num, entry) in &entries {
        if let Entry::InUse { offset } = *entry {
            if num == 0 {
                continue;
            }
            let (id, obj) = Parser::new(data, offset)
                .indirect()
                .map_err(|e| xref_err(format!("object {num} at offset {offset}: {e}")))?;
            if id.0 != num {
                return Err(xref_err(format!("xref says object {num} is at {offset}, found {}", id.0)));
            }
            objects.insert(id, obj);
        }
    }
    let mut by_stream: BTreeMap<u32, Vec<(u32, usize)>> = BTreeMap::new();
    for (&num, entry) in &entries {
        if let Entry::Compressed { stream, index } = *entry {
            by_stream.entry(stream).or_default().push((num, index));
        }
    }
    for (stream, wanted) in by_stream {
        let (body, header) = load_object_stream(&objects, stream)?;
        for (num, index) in wanted {
            let &(hnum, at) = header
                .get(index)
                .ok_or_else(|| xref_err(format!("object {num} not in object stream {stream}")))?;
            if hnum != num {
                return Err(xref_err(format!("object stream {stream} index {index} holds {hnum}, not {num}")));
            }
            let obj = Parser::new(&body, at).parse_object()?;
            objects.insert((num, 0), obj);
        }
    }
    Ok(PdfDocument {
        version,
        objects,
        trailer,
        revisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_up_predictor() {
        // two rows of 3 columns, filter type 2 (Up)
        let data = [2, 1, 2, 3, 2, 1, 1, 1];
        assert_eq!(apply_png_predictor(&data, 3, 1).unwrap(), vec![1, 2, 3, 2, 3, 4]);
    }
}
