//! PDF object model.

pub type ObjectId = (u32, u16);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdfString {
    pub bytes: Vec<u8>,
    pub hex: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dict(pub Vec<(Vec<u8>, PdfObject)>);

impl Dict {
    pub fn get(&self, key: &str) -> Option<&PdfObject> {
        self.0.iter().find(|(k, _)| k == key.as_bytes()).map(|(_, v)| v)
    }

    pub fn remove(&mut self, key: &str) -> Option<PdfObject> {
        let i = self.0.iter().position(|(k, _)| k == key.as_bytes())?;
        Some(self.0.remove(i).1)
    }

    pub fn set(&mut self, key: &str, value: PdfObject) {
        match self.0.iter_mut().find(|(k, _)| k == key.as_bytes()) {
            Some(slot) => slot.1 = value,
            None => self.0.push((key.as_bytes().to_vec(), value)),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = String> + '_ {
        self.0.iter().map(|(k, _)| String::from_utf8_lossy(k).into_owned())
    }

    pub fn name(&self, key: &str) -> Option<&[u8]> {
        match self.get(key) {
            Some(PdfObject::Name(n)) => Some(n),
            _ => None,
        }
    }

    pub fn int(&self, key: &str) -> Option<i64> {
        match self.get(key) {
            Some(PdfObject::Integer(n)) => Some(*n),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdfStream {
    pub dict: Dict,
    /// Encoded bytes exactly as stored in the file.
    pub data: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PdfObject {
    Null,
    Boolean(bool),
    Integer(i64),
    /// Kept as the source lexeme so re-serialization is exact.
    Real(String),
    String(PdfString),
    Name(Vec<u8>),
    Array(Vec<PdfObject>),
    Dictionary(Dict),
    Stream(PdfStream),
    Reference(ObjectId),
}

impl PdfObject {
    /// Dictionary of a dictionary or of a stream.
    pub fn dict(&self) -> Option<&Dict> {
        match self {
            PdfObject::Dictionary(d) => Some(d),
            PdfObject::Stream(s) => Some(&s.dict),
            _ => None,
        }
    }

    pub fn dict_mut(&mut self) -> Option<&mut Dict> {
        match self {
            PdfObject::Dictionary(d) => Some(d),
            PdfObject::Stream(s) => Some(&mut s.dict),
            _ => None,
        }
    }

    pub fn reference(&self) -> Option<ObjectId> {
        match self {
            PdfObject::Reference(r) => Some(*r),
            _ => None,
        }
    }

    /// Calls `f` on every reference inside this object.
    pub fn for_each_ref(&self, f: &mut impl FnMut(ObjectId)) {
        match self {
            PdfObject::Reference(r) => f(*r),
            PdfObject::Array(a) => a.iter().for_each(|o| o.for_each_ref(f)),
            PdfObject::Dictionary(d) | PdfObject::Stream(PdfStream { dict: d, .. }) => {
                d.0.iter().for_each(|(_, o)| o.for_each_ref(f))
            }
            _ => {}
        }
    }

    pub fn map_refs(&mut self, f: &impl Fn(ObjectId) -> Option<ObjectId>) {
        match self {
            PdfObject::Reference(r) => match f(*r) {
                Some(n) => *r = n,
                None => *self = PdfObject::Null,
            },
            PdfObject::Array(a) => a.iter_mut().for_each(|o| o.map_refs(f)),
            PdfObject::Dictionary(d) | PdfObject::Stream(PdfStream { dict: d, .. }) => {
                d.0.iter_mut().for_each(|(_, o)| o.map_refs(f))
            }
            _ => {}
        }
    }
}

/// Decodes a PDF text string: UTF-16BE or UTF-8 with BOM, else PDFDocEncoding
/// (approximated as Latin-1).
pub fn text_string(b: &[u8]) -> String {
    if let Some(rest) = b.strip_prefix(&[0xFE, 0xFF]) {
        let units: Vec<u16> = rest.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
        return String::from_utf16_lossy(&units);
    }
    if let Some(rest) = b.strip_prefix(&[0xEF, 0xBB, 0xBF]) {
        return String::from_utf8_lossy(rest).into_owned();
    }
    b.iter().map(|&c| c as char).collect()
}
