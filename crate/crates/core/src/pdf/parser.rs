//! Tokenizer and object parser.

use super::object::{Dict, ObjectId, PdfObject, PdfStream, PdfString};
use super::PdfError;

const MAX_DEPTH: usize = 256;

fn is_ws(c: u8) -> bool {
    matches!(c, 0 | 9 | 10 | 12 | 13 | 32)
}

fn is_delim(c: u8) -> bool {
    matches!(c, b'(' | b')' | b'<' | b'>' | b'[' | b']' | b'{' | b'}' | b'/' | b'%')
}

fn is_regular(c: u8) -> bool {
    !is_ws(c) && !is_delim(c)
}

pub struct Parser<'a> {
    pub data: &'a [u8],
    pub pos: usize,
}

impl<'a> Parser<'a> {
    pub fn new(data: &'a [u8], pos: usize) -> Self {
        Parser { data, pos }
    }

    fn err(&self, reason: impl Into<String>) -> PdfError {
        PdfError::Malformed {
            offset: self.pos as u64,
            reason: reason.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.data.get(self.pos).copied()
    }

    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if is_ws(c) {
                self.pos += 1;
            } else if c == b'%' {
                while let Some(c) = self.peek() {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    pub fn at_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let end = self.pos + kw.len();
        self.data.get(self.pos..end) == Some(kw.as_bytes())
            && self.data.get(end).is_none_or(|&c| !is_regular(c))
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), PdfError> {
        if self.at_keyword(kw) {
            self.pos += kw.len();
            Ok(())
        } else {
            Err(self.err(format!("expected '{kw}'")))
        }
    }

    fn regular_token(&mut self) -> &'a [u8] {
        let start = self.pos;
        while self.peek().is_some_and(is_regular) {
            self.pos += 1;
        }
        &self.data[start..self.pos]
    }

    pub fn read_uint(&mut self) -> Result<u64, PdfError> {
        self.skip_ws();
        let tok = self.regular_token();
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err("expected an unsigned integer"))
    }

    pub fn read_keyword(&mut self) -> &'a [u8] {
        self.skip_ws();
        self.regular_token()
    }

    pub fn parse_object(&mut self) -> Result<PdfObject, PdfError> {
        self.parse_depth(0)
    }

    fn parse_depth(&mut self, depth: usize) -> Result<PdfObject, PdfError> {
        if depth > MAX_DEPTH {
            return Err(self.err("objects nested too deeply"));
        }
        self.skip_ws();
        let c = self.peek().ok_or_else(|| self.err("unexpected end of data"))?;
        match c {
            b'/' => {
                self.pos += 1;
                Ok(PdfObject::Name(self.name_body()))
            }
            b'(' => self.literal_string(),
            b'<' if self.data.get(self.pos + 1) == Some(&b'<') => {
                self.pos += 2;
                let mut d = Dict::default();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(b'>') if self.data.get(self.pos + 1) == Some(&b'>') => {
                            self.pos += 2;
                            break;
                        }
                        Some(b'/') => {
                            self.pos += 1;
                            let k = self.name_body();
                            let v = self.parse_depth(depth + 1)?;
                            d.0.push((k, v));
                        }
                        _ => return Err(self.err("expected a name key in dictionary")),
                    }
                }
                Ok(PdfObject::Dictionary(d))
            }
            b'<' => self.hex_string(),
            b'[' => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(b']') => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(self.err("unterminated array")),
                        _ => items.push(self.parse_depth(depth + 1)?),
                    }
                }
                Ok(PdfObject::Array(items))
            }
            b'+' | b'-' | b'.' | b'0'..=b'9' => self.number(),
            _ => {
                let start = self.pos;
                match self.regular_token() {
                    b"true" => Ok(PdfObject::Boolean(true)),
                    b"false" => Ok(PdfObject::Boolean(false)),
                    b"null" => Ok(PdfObject::Null),
                    _ => {
                        self.pos = start;
                        Err(self.err("unexpected token"))
                    }
                }
            }
        }
    }

    fn number(&mut self) -> Result<PdfObject, PdfError> {
        let start = self.pos;
        let tok = self.regular_token();
        let s = std::str::from_utf8(tok).map_err(|_| self.err("bad number"))?;
        if s.contains('.') {
            if s.parse::<f64>().is_err() && s != "." && !s.ends_with('.') {
                return Err(self.err("bad real number"));
            }
            return Ok(PdfObject::Real(s.to_string()));
        }
        let n: i64 = s.parse().map_err(|_| {
            self.pos = start;
            self.err("bad integer")
        })?;
        // "num gen R"
        if n >= 0 && !s.starts_with('+') {
            let save = self.pos;
            self.skip_ws();
            let gen_tok = self.regular_token();
            let gen = std::str::from_utf8(gen_tok)
                .ok()
                .filter(|g| !g.is_empty() && g.bytes().all(|b| b.is_ascii_digit()))
                .and_then(|g| g.parse::<u16>().ok());
            if let Some(gen) = gen {
                self.skip_ws();
                if self.peek() == Some(b'R') && self.data.get(self.pos + 1).is_none_or(|&c| !is_regular(c)) {
                    self.pos += 1;
                    return Ok(PdfObject::Reference((n as u32, gen)));
                }
            }
            self.pos = save;
        }
        Ok(PdfObject::Integer(n))
    }

    fn name_body(&mut self) -> Vec<u8> {
        let raw = self.regular_token();
        let mut out = Vec::with_capacity(raw.len());
        let mut i = 0;
        while i < raw.len() {
            if raw[i] == b'#' && i + 2 < raw.len() && raw[i + 1..i + 3].iter().all(u8::is_ascii_hexdigit) {
                let hex = std::str::from_utf8(&raw[i + 1..i + 3]).unwrap();
                out.push(u8::from_str_radix(hex, 16).unwrap());
                i += 3;
                continue;
            }
            out.push(raw[i]);
            i += 1;
        }
        out
    }

    fn literal_string(&mut self) -> Result<PdfObject, PdfError> {
        self.pos += 1;
        let mut out = Vec::new();
        let mut depth = 1;
        loop {
            let c = self.peek().ok_or_else(|| self.err("unterminated string"))?;
            self.pos += 1;
            match c {
                b'(' => {
                    depth += 1;
                    out.push(c);
                }
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                    out.push(c);
                }
                b'\r' => {
                    if self.peek() == Some(b'\n') {
                        self.pos += 1;
                    }
                    out.push(b'\n');
                }
                b'\\' => {
                    let e = self.peek().ok_or_else(|| self.err("unterminated string"))?;
                    self.pos += 1;
                    match e {
                        b'n' => out.push(b'\n'),
                        b'r' => out.push(b'\r'),
                        b't' => out.push(b'\t'),
                        b'b' => out.push(8),
                        b'f' => out.push(12),
                        b'\r' => {
                            if self.peek() == Some(b'\n') {
                                self.pos += 1;
                            }
                        }
                        b'\n' => {}
                        b'0'..=b'7' => {
                            let mut v = (e - b'0') as u32;
                            for _ in 0..2 {
                                match self.peek() {
                                    Some(d @ b'0'..=b'7') => {
                                        v = v * 8 + (d - b'0') as u32;
                                        self.pos += 1;
                                    }
                                    _ => break,
                                }
                            }
                            out.push(v as u8);
                        }
                        other => out.push(other),
                    }
                }
                _ => out.push(c),
            }
        }
        Ok(PdfObject::String(PdfString { bytes: out, hex: false }))
    }

    fn hex_string(&mut self) -> Result<PdfObject, PdfError> {
        self.pos += 1;
        let mut digits = Vec::new();
        loop {
            let c = self.peek().ok_or_else(|| self.err("unterminated hex string"))?;
            self.pos += 1;
            match c {
                b'>' => break,
                c if c.is_ascii_hexdigit() => digits.push(c),
                c if is_ws(c) => {}
                _ => return Err(self.err("bad hex string")),
            }
        }
        if digits.len() % 2 == 1 {
            digits.push(b'0');
        }
        let bytes = digits
            .chunks(2)
            .map(|p| u8::from_str_radix(std::str::from_utf8(p).unwrap(), 16).unwrap())
            .collect();
        Ok(PdfObject::String(PdfString { bytes, hex: true }))
    }

    /// Parses `num gen obj ... endobj` at the current position.
    pub fn indirect(&mut self) -> Result<(ObjectId, PdfObject), PdfError> {
        let num = self.read_uint()?;
        let gen = self.read_uint()?;
        self.expect_keyword("obj")?;
        let obj = self.parse_object()?;
        let obj = match obj {
            PdfObject::Dictionary(dict) if self.at_keyword("stream") => {
                self.pos += "stream".len();
                match self.peek() {
                    Some(b'\r') => {
                        self.pos += 1;
                        if self.peek() == Some(b'\n') {
                            self.pos += 1;
                        }
                    }
                    Some(b'\n') => self.pos += 1,
                    _ => {}
                }
                let data = self.stream_body(&dict)?;
                PdfObject::Stream(PdfStream { dict, data })
            }
            other => other,
        };
        Ok(((num as u32, gen as u16), obj))
    }

    fn stream_body(&mut self, dict: &Dict) -> Result<Vec<u8>, PdfError> {
        let start = self.pos;
        if let Some(len) = dict.int("Length").filter(|&l| l >= 0).map(|l| l as usize) {
            if let Some(end) = start.checked_add(len).filter(|&e| e <= self.data.len()) {
                let mut p = Parser::new(self.data, end);
                if p.at_keyword("endstream") {
                    self.pos = p.pos + "endstream".len();
                    return Ok(self.data[start..end].to_vec());
                }
            }
        }
        let rel = find(&self.data[start..], b"endstream").ok_or_else(|| self.err("unterminated stream"))?;
        let mut end = start + rel;
        if end > start && self.data[end - 1] == b'\n' {
            end -= 1;
        }
        if end > start && self.data[end - 1] == b'\r' {
            end -= 1;
        }
        self.pos = start + rel + "endstream".len();
        Ok(self.data[start..end].to_vec())
    }
}

pub fn find(hay: &[u8], needle: &[u8]) -> Option<usize> {
    hay.windows(needle.len()).position(|w| w == needle)
}

pub fn rfind(hay: &[u8], needle: &[u8]) -> Option<usize> {
    hay.windows(needle.len()).rposition(|w| w == needle)
}
