//! 8-bit binary PGM (`P5`) image files.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::Image;

/// `round(255 * v)` of the clamped value.
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn write_pgm(mut out: impl Write, img: &Image) -> Result<()> {
    write!(out, "P5\n{} {}\n255\n", img.width(), img.height())?;
    let bytes: Vec<u8> = img.pixels().iter().map(|&v| quantize(v)).collect();
    out.write_all(&bytes)?;
    Ok(())
}

pub fn save_pgm(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::with_capacity(img.len() + 16);
    write_pgm(&mut buf, img)?;
    std::fs::write(path, buf).map_err(Error::at_path(path))
}

/// Reads a `P5` file with maxval 255, scaling pixels back to `[0, 1]`.
pub fn read_pgm(mut input: impl Read) -> Result<Image> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated PGM header".into()));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    if fields[0] != "P5" {
        return Err(Error::Format(format!("expected P5 magic, found `{}`", fields[0])));
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Format(format!("bad PGM header field `{s}`")))
    };
    let (width, height, maxval) = (num(&fields[1])?, num(&fields[2])?, num(&fields[3])?);
    if maxval != 255 {
        return Err(Error::Format(format!("only maxval 255 is supported, found {maxval}")));
    }
    let raster = bytes.get(pos..).unwrap_or_default();
    if raster.len() < width * height {
        return Err(Error::Length {
            expected: width * height,
            found: raster.len(),
        });
    }
    let pixels = raster[..width * height].iter().map(|&b| b as f64 / 255.0).collect();
    Image::new(height, width, pixels)
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(Error::at_path(path))?;
    read_pgm(std::io::BufReader::new(file))
}

/// Places two equally tall images next to each other.
pub fn side_by_side(left: &Image, right: &Image) -> Result<Image> {
    crate::error::check_dim("side-by-side height", left.height(), right.height())?;
    let (h, wl, wr) = (left.height(), left.width(), right.width());
    let mut pixels = Vec::with_capacity(h * (wl + wr));
    for r in 0..h {
        pixels.extend_from_slice(&left.pixels()[r * wl..(r + 1) * wl]);
        pixels.extend_from_slice(&right.pixels()[r * wr..(r + 1) * wr]);
    }
    Image::new(h, wl + wr, pixels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_raster() {
        let img = Image::new(1, 3, vec![0.0, 0.5, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_pgm(&mut buf, &img).unwrap();
        assert_eq!(buf, b"P5\n3 1\n255\n\x00\x80\xff");
    }

    #[test]
    fn reread_within_one_level() {
        let pixels: Vec<f64> = (0..35).map(|i| (i as f64 * 0.0371) % 1.0).collect();
        let img = Image::new(5, 7, pixels).unwrap();
        let mut buf = Vec::new();
        write_pgm(&mut buf, &img).unwrap();
        let back = read_pgm(buf.as_slice()).unwrap();
        assert_eq!((back.height(), back.width()), (5, 7));
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn comments_and_errors() {
        let back = read_pgm(&b"P5\n# made by hand\n2 1\n255\n\x00\xff"[..]).unwrap();
        assert_eq!(back.pixels(), &[0.0, 1.0]);
        assert!(matches!(read_pgm(&b"P2\n2 1\n255\n\x00\xff"[..]), Err(Error::Format(_))));
        assert!(matches!(read_pgm(&b"P5\n2 2\n255\n\x00"[..]), Err(Error::Length { .. })));
        assert!(matches!(read_pgm(&b"P5\n2"[..]), Err(Error::Format(_))));
    }

    #[test]
    fn pairs() {
        let l = Image::filled(2, 1, 0.0);
        let r = Image::filled(2, 2, 1.0);
        let p = side_by_side(&l, &r).unwrap();
        assert_eq!(p.pixels(), &[0.0, 1.0, 1.0, 0.0, 1.0, 1.0]);
    }
}
