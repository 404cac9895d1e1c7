//! Byte access and value rendering helpers.

pub(crate) const MAX_VALUE_CHARS: usize = 256;

pub(crate) fn be16(d: &[u8], at: usize) -> Option<u16> {
    d.get(at..at + 2).map(|b| u16::from_be_bytes([b[0], b[1]]))
}

pub(crate) fn be32(d: &[u8], at: usize) -> Option<u32> {
    d.get(at..at + 4).map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
}

pub(crate) fn le16(d: &[u8], at: usize) -> Option<u16> {
    d.get(at..at + 2).map(|b| u16::from_le_bytes([b[0], b[1]]))
}

pub(crate) fn le32(d: &[u8], at: usize) -> Option<u32> {
    d.get(at..at + 4).map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
}

pub(crate) fn le64(d: &[u8], at: usize) -> Option<u64> {
    d.get(at..at + 8).map(|b| u64::from_le_bytes(b.try_into().unwrap()))
}

/// Renders free text, truncated to 256 characters with a length note.
pub(crate) fn render_text(s: &str) -> String {
    let s = s.trim_end_matches('\0');
    let count = s.chars().count();
    if count <= MAX_VALUE_CHARS {
        return s.to_string();
    }
    let head: String = s.chars().take(MAX_VALUE_CHARS).collect();
    format!("{head}... ({count} chars)")
}

pub(crate) fn render_latin1(b: &[u8]) -> String {
    render_text(&b.iter().map(|&c| c as char).collect::<String>())
}

pub(crate) fn render_utf8_lossy(b: &[u8]) -> String {
    render_text(&String::from_utf8_lossy(b))
}

/// The length note used for opaque payloads.
pub(crate) fn binary_note(len: usize) -> String {
    format!("(Binary data {len} bytes)")
}

pub(crate) fn hex(b: &[u8]) -> String {
    let mut s = String::with_capacity(b.len() * 2);
    for byte in b {
        s.push_str(&format!("{byte:02x}"));
    }
    render_text(&s)
}

pub(crate) fn at(offset: usize) -> String {
    format!("@0x{offset:04X}")
}

/// Text with no NUL and no control bytes beyond ordinary whitespace.
pub(crate) fn is_plain_text(data: &[u8]) -> bool {
    match std::str::from_utf8(data) {
        Ok(s) => s
            .chars()
            .all(|c| !c.is_control() || matches!(c, '\n' | '\r' | '\t' | '\u{c}')),
        Err(_) => false,
    }
}

/// Civil date from days since 1970-01-01.
pub(crate) fn civil_from_days(days: i64) -> (i64, u32, u32) {
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    (if m <= 2 { y + 1 } else { y }, m, d)
}

pub(crate) fn render_unix_time(secs: i64) -> String {
    let (y, m, d) = civil_from_days(secs.div_euclid(86_400));
    let rem = secs.rem_euclid(86_400);
    format!(
        "{y:04}-{m:02}-{d:02} {:02}:{:02}:{:02}",
        rem / 3600,
        rem % 3600 / 60,
        rem % 60
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncates_long_text() {
        let long = "a".repeat(300);
        let r = render_text(&long);
        assert!(r.starts_with(&"a".repeat(256)));
        assert!(r.ends_with("(300 chars)"));
        assert_eq!(render_text("short"), "short");
    }

    #[test]
    fn unix_time_rendering() {
        assert_eq!(render_unix_time(0), "1970-01-01 00:00:00");
        // 2012-03-02 15:20:52 UTC
        assert_eq!(render_unix_time(1_330_701_652), "2012-03-02 15:20:52");
    }

    #[test]
    fn plain_text_detection() {
        assert!(is_plain_text(b"hello\nworld\t"));
        assert!(is_plain_text(b""));
        assert!(!is_plain_text(&[0, 1, 2, 0xff]));
        assert!(!is_plain_text(b"abc\0def"));
    }
}
