//! Binary netpbm decoding (PPM `P6` and PGM `P5`, maxval 255) and a matching
//! encoder. Header grammar: magic, whitespace-separated width/height/maxval
//! with `#` comments allowed between tokens, a single whitespace byte, then
//! the raw payload. Parse errors name the offending byte offset.

use std::path::{Path, PathBuf};

use crate::error::{Error, NetpbmErrorKind, Result};
use crate::imaging::RgbFrame;

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: PathBuf,
}

impl<'a> Parser<'a> {
    fn err(&self, offset: usize, kind: NetpbmErrorKind) -> Error {
        Error::Netpbm {
            path: self.path.clone(),
            offset,
            kind,
        }
    }

    fn malformed(&self, offset: usize, what: &str) -> Error {
        self.err(offset, NetpbmErrorKind::MalformedHeader(what.to_string()))
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Skips whitespace runs and `#` comments (to end of line).
    fn skip_separators(&mut self) {
        loop {
            match self.peek() {
                Some(b' ') | Some(b'\t') | Some(b'\r') | Some(b'\n') => self.pos += 1,
                Some(b'#') => {
                    while let Some(c) = self.peek() {
                        self.pos += 1;
                        if c == b'\n' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    /// Returns the parsed value and the byte offset of its first digit.
    fn read_number(&mut self, what: &str) -> Result<(u64, usize)> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u64 = 0;
        let mut digits = 0usize;
        while let Some(c) = self.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((c - b'0') as u64))
                .ok_or_else(|| self.malformed(start, &format!("{what} overflows")))?;
            digits += 1;
            self.pos += 1;
        }
        if digits == 0 {
            return Err(self.malformed(self.pos, &format!("expected decimal {what}")));
        }
        Ok((value, start))
    }
}

/// Decodes a binary PPM/PGM byte buffer. PGM gray bytes are replicated to
/// all three channels.
pub fn decode(bytes: &[u8], path: impl AsRef<Path>) -> Result<RgbFrame> {
    let mut p = Parser {
        bytes,
        pos: 0,
        path: path.as_ref().to_path_buf(),
    };

    let channels = match bytes.get(..2) {
        Some(b"P6") => 3usize,
        Some(b"P5") => 1usize,
        _ => return Err(p.err(0, NetpbmErrorKind::BadMagic)),
    };
    p.pos = 2;

    let (width, w_off) = p.read_number("width")?;
    let (height, h_off) = p.read_number("height")?;
    if width == 0 || width > u32::MAX as u64 {
        return Err(p.malformed(w_off, &format!("width {width} out of range")));
    }
    if height == 0 || height > u32::MAX as u64 {
        return Err(p.malformed(h_off, &format!("height {height} out of range")));
    }

    let (maxval, m_off) = p.read_number("maxval")?;
    if maxval != 255 {
        return Err(p.err(m_off, NetpbmErrorKind::UnsupportedMaxval(maxval)));
    }

    // exactly one whitespace byte between the header and the payload
    match p.peek() {
        Some(b' ') | Some(b'\t') | Some(b'\r') | Some(b'\n') => p.pos += 1,
        _ => return Err(p.malformed(p.pos, "expected single whitespace before payload")),
    }

    // width/height fit in u32, so only the channel factor can overflow u64
    let expected = width as u128 * height as u128 * channels as u128;
    let available = (bytes.len() - p.pos) as u64;
    if (available as u128) < expected {
        return Err(p.err(
            bytes.len(),
            NetpbmErrorKind::TruncatedPayload {
                expected: expected.min(u64::MAX as u128) as u64,
                actual: available,
            },
        ));
    }
    let payload = &bytes[p.pos..p.pos + expected as usize];

    let data = if channels == 3 {
        payload.to_vec()
    } else {
        let mut rgb = Vec::with_capacity(payload.len() * 3);
        for &g in payload {
            rgb.extend_from_slice(&[g, g, g]);
        }
        rgb
    };
    RgbFrame::new(width as u32, height as u32, data)
}

/// Reads and decodes one image file.
pub fn decode_image(path: impl AsRef<Path>) -> Result<RgbFrame> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode(&bytes, path)
}

/// Encodes a frame as binary PPM (`P6`, maxval 255).
pub fn encode_p6(frame: &RgbFrame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend_from_slice(frame.data());
    out
}

/// Encodes 8-bit gray pixels as binary PGM (`P5`, maxval 255).
pub fn encode_p5(width: u32, height: u32, gray: &[u8]) -> Vec<u8> {
    assert_eq!(gray.len(), width as usize * height as usize);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(gray);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::NetpbmErrorKind as Kind;

    fn kind_of(err: Error) -> (usize, Kind) {
        match err {
            Error::Netpbm { offset, kind, .. } => (offset, kind),
            other => panic!("expected netpbm error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_p6_parses() {
        let bytes = b"P6\n2 1\n255\n\x01\x02\x03\x04\x05\x06";
        let frame = decode(bytes, "test").unwrap();
        assert_eq!((frame.width(), frame.height()), (2, 1));
        assert_eq!(frame.pixel(0, 0), (1, 2, 3));
        assert_eq!(frame.pixel(1, 0), (4, 5, 6));
    }

    #[test]
    fn p5_gray_replicates_channels() {
        let bytes = b"P5\n1 1\n255\n\x80";
        let frame = decode(bytes, "test").unwrap();
        assert_eq!(frame.pixel(0, 0), (128, 128, 128));
    }

    #[test]
    fn comments_between_tokens_are_ignored() {
        let plain = b"P6\n2 2\n255\n\x00\x01\x02\x03\x04\x05\x06\x07\x08\x09\x0a\x0b";
        let commented =
            b"P6\n# gimp writes these\n2 # width\n 2\n# and a maxval\n255\n\x00\x01\x02\x03\x04\x05\x06\x07\x08\x09\x0a\x0b";
        assert_eq!(decode(commented, "a").unwrap(), decode(plain, "b").unwrap());
    }

    #[test]
    fn crlf_and_tab_separators() {
        let bytes = b"P6\r\n2\t1\r\n255\n\x01\x02\x03\x04\x05\x06";
        assert!(decode(bytes, "test").is_ok());
    }

    #[test]
    fn bad_magic_reports_offset_zero() {
        let (offset, kind) = kind_of(decode(b"P3\n1 1\n255\n...", "t").unwrap_err());
        assert_eq!(offset, 0);
        assert_eq!(kind, Kind::BadMagic);
    }

    #[test]
    fn missing_token_is_malformed_header() {
        let (_, kind) = kind_of(decode(b"P6\n2 2\n", "t").unwrap_err());
        assert!(matches!(kind, Kind::MalformedHeader(_)));
    }

    #[test]
    fn unsupported_maxval_names_its_offset() {
        let bytes = b"P6\n1 1\n65535\n\x00\x00";
        let (offset, kind) = kind_of(decode(bytes, "t").unwrap_err());
        assert_eq!(kind, Kind::UnsupportedMaxval(65535));
        assert_eq!(offset, 7);
        assert_eq!(&bytes[offset..offset + 5], b"65535");
    }

    #[test]
    fn truncated_payload_reports_counts() {
        let (_, kind) = kind_of(decode(b"P6\n2 2\n255\n\x00\x01\x02", "t").unwrap_err());
        assert_eq!(kind, Kind::TruncatedPayload { expected: 12, actual: 3 });
    }

    #[test]
    fn zero_dimension_is_rejected() {
        let (_, kind) = kind_of(decode(b"P6\n0 2\n255\n", "t").unwrap_err());
        assert!(matches!(kind, Kind::MalformedHeader(_)));
    }

    #[test]
    fn trailing_bytes_are_ignored() {
        let bytes = b"P5\n1 1\n255\n\x10\ntrailing junk";
        let frame = decode(bytes, "t").unwrap();
        assert_eq!(frame.pixel(0, 0), (16, 16, 16));
    }

    #[test]
    fn huge_dimensions_do_not_allocate() {
        let bytes = b"P6\n4000000000 4000000000\n255\n\x00";
        let (_, kind) = kind_of(decode(bytes, "t").unwrap_err());
        assert!(matches!(kind, Kind::TruncatedPayload { .. }));
    }

    #[test]
    fn encode_decode_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(97);
        for _ in 0..20 {
            let w = rng.gen_range(1..20);
            let h = rng.gen_range(1..20);
            let frame = RgbFrame::from_fn(w, h, |_, _| (rng.gen(), rng.gen(), rng.gen()));
            assert_eq!(decode(&encode_p6(&frame), "t").unwrap(), frame);
        }
    }

    #[test]
    fn decode_image_missing_file_is_io_error() {
        let err = decode_image("/nonexistent/never/there.ppm").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert_eq!(err.exit_code(), 1);
    }
}
