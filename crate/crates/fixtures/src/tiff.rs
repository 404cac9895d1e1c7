//! Minimal big-endian TIFF writer for EXIF payloads.

pub enum Val {
    Ascii(String),
    Short(u16),
    Long(u32),
    Rationals(Vec<(u32, u32)>),
    /// Offset of another IFD in the same list (ExifIFD, GPS IFD).
    Pointer(usize),
}

impl Val {
    fn kind_count(&self) -> (u16, u32) {
        match self {
            Val::Ascii(s) => (2, s.len() as u32 + 1),
            Val::Short(_) => (3, 1),
            Val::Long(_) | Val::Pointer(_) => (4, 1),
            Val::Rationals(r) => (5, r.len() as u32),
        }
    }

    fn size(&self) -> usize {
        match self {
            Val::Ascii(s) => s.len() + 1,
            Val::Short(_) => 2,
            Val::Long(_) | Val::Pointer(_) => 4,
            Val::Rationals(r) => r.len() * 8,
        }
    }
}

pub struct Ifd {
    entries: Vec<(u16, Val)>,
    next: Option<usize>,
    thumbnail: Option<Vec<u8>>,
}

impl Ifd {
    pub fn new(entries: Vec<(u16, Val)>) -> Self {
        Ifd {
            entries,
            next: None,
            thumbnail: None,
        }
    }

    /// Chains this IFD to another one (IFD0 to IFD1).
    pub fn next(mut self, i: usize) -> Self {
        self.next = Some(i);
        self
    }

    /// Adds JPEGInterchangeFormat/Length tags pointing at `jpeg`.
    pub fn thumbnail(mut self, jpeg: Vec<u8>) -> Self {
        self.thumbnail = Some(jpeg);
        self
    }

    fn len(&self) -> usize {
        let n = self.entries.len() + if self.thumbnail.is_some() { 2 } else { 0 };
        let data: usize = self.entries.iter().map(|(_, v)| v.size()).filter(|&s| s > 4).map(|s| s + s % 2).sum();
        2 + 12 * n + 4 + data
    }
}

pub fn build(ifds: &[Ifd]) -> Vec<u8> {
    let mut offsets = Vec::new();
    let mut at = 8;
    for i in ifds {
        offsets.push(at);
        at += i.len();
    }
    let mut thumb_at = Vec::new();
    for i in ifds {
        thumb_at.push(at);
        at += i.thumbnail.as_ref().map_or(0, Vec::len);
    }

    let mut out = b"MM\0\x2a\0\0\0\x08".to_vec();
    for (idx, ifd) in ifds.iter().enumerate() {
        let mut entries: Vec<(u16, Val)> = ifd
            .entries
            .iter()
            .map(|(t, v)| {
                let v = match v {
                    Val::Ascii(s) => Val::Ascii(s.clone()),
                    Val::Short(x) => Val::Short(*x),
                    Val::Long(x) => Val::Long(*x),
                    Val::Rationals(r) => Val::Rationals(r.clone()),
                    Val::Pointer(p) => Val::Long(offsets[*p] as u32),
                };
                (*t, v)
            })
            .collect();
        if let Some(t) = &ifd.thumbnail {
            entries.push((0x0201, Val::Long(thumb_at[idx] as u32)));
            entries.push((0x0202, Val::Long(t.len() as u32)));
        }
        entries.sort_by_key(|(t, _)| *t);
        let mut data_at = offsets[idx] + 2 + 12 * entries.len() + 4;
        let mut data = Vec::new();
        out.extend((entries.len() as u16).to_be_bytes());
        for (tag, v) in &entries {
            let (kind, count) = v.kind_count();
            out.extend(tag.to_be_bytes());
            out.extend(kind.to_be_bytes());
            out.extend(count.to_be_bytes());
            let mut raw = Vec::new();
            match v {
                Val::Ascii(s) => {
                    raw.extend(s.as_bytes());
                    raw.push(0);
                }
                Val::Short(x) => raw.extend(x.to_be_bytes()),
                Val::Long(x) => raw.extend(x.to_be_bytes()),
                Val::Rationals(r) => r.iter().for_each(|(n, d)| {
                    raw.extend(n.to_be_bytes());
                    raw.extend(d.to_be_bytes());
                }),
                Val::Pointer(_) => unreachable!(),
            }
            if raw.len() <= 4 {
                raw.resize(4, 0);
                out.extend(raw);
            } else {
                out.extend((data_at as u32).to_be_bytes());
                if raw.len() % 2 == 1 {
                    raw.push(0);
                }
                data_at += raw.len();
                data.extend(raw);
            }
        }
        let next = ifd.next.map_or(0, |n| offsets[n] as u32);
        out.extend(next.to_be_bytes());
        out.extend(data);
    }
    for ifd in ifds {
        if let Some(t) = &ifd.thumbnail {
            out.extend(t);
        }
    }
    out
}
