//! 8-bit grayscale image files: binary PGM (P5) and PNG.
//!
//! Saving rounds to the nearest integer and clamps to `[0, 255]`, so any
//! image holding integer values in range survives a round trip exactly.

use std::fs;
use std::io::{BufWriter, Cursor};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if bytes.starts_with(b"P5") {
        decode_pgm(&bytes)
    } else if bytes.starts_with(PNG_MAGIC) {
        decode_png(&bytes)
    } else {
        Err(Error::UnsupportedFormat(path.display().to_string()))
    }
}

pub fn save_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let bytes = match ext.as_deref() {
        Some("pgm") => encode_pgm(img),
        Some("png") => encode_png(img)?,
        _ => return Err(Error::UnsupportedFormat(path.display().to_string())),
    };
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn quantize(img: &Image) -> Vec<u8> {
    img.data().iter().map(|v| v.round().clamp(0.0, 255.0) as u8).collect()
}

fn encode_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(quantize(img));
    out
}

fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let malformed = |reason: &str| Error::Malformed {
        kind: "PGM",
        reason: reason.to_string(),
    };
    // Header: magic, width, height, maxval, separated by whitespace with
    // optional `#` comments, then exactly one whitespace byte.
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(malformed("truncated header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed("bad header number"))?;
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(malformed("missing separator after header"));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if maxval == 0 || maxval > 255 {
        return Err(Error::UnsupportedFormat(format!("PGM maxval {maxval}")));
    }
    let pixels = bytes
        .get(pos..pos + width * height)
        .ok_or_else(|| malformed("truncated pixel data"))?;
    let scale = 255.0 / maxval as f64;
    Image::new(height, width, pixels.iter().map(|&p| p as f64 * scale).collect())
}

fn encode_png(img: &Image) -> Result<Vec<u8>> {
    let encoding = |e: png::EncodingError| Error::Malformed {
        kind: "PNG",
        reason: e.to_string(),
    };
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(BufWriter::new(&mut out), img.width() as u32, img.height() as u32);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header().map_err(encoding)?;
        writer.write_image_data(&quantize(img)).map_err(encoding)?;
    }
    Ok(out)
}

fn decode_png(bytes: &[u8]) -> Result<Image> {
    let decoding = |e: png::DecodingError| Error::Malformed {
        kind: "PNG",
        reason: e.to_string(),
    };
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = decoder.read_info().map_err(decoding)?;
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or(0)];
    let info = reader.next_frame(&mut buf).map_err(decoding)?;
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!(
            "PNG {:?} {:?} (grayscale 8-bit only)",
            info.color_type, info.bit_depth
        )));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    Image::new(h, w, buf[..w * h].iter().map(|&p| p as f64).collect())
}
