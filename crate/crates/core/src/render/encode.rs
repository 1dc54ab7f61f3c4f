use std::io::Write;
use std::path::Path;

use super::{ImageGrid, RenderError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Ppm,
    Png,
}

impl ImageFormat {
    /// From a file extension; anything but `.png` is written as PPM.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("png") => ImageFormat::Png,
            _ => ImageFormat::Ppm,
        }
    }
}

/// Encodes the RGB buffer of `grid`.
pub fn encode_image(grid: &ImageGrid, format: ImageFormat) -> Result<Vec<u8>, RenderError> {
    let mut out = Vec::with_capacity(grid.rgb.len() + 32);
    match format {
        ImageFormat::Ppm => {
            write!(out, "P6\n{} {}\n255\n", grid.width, grid.height)
                .map_err(|e| RenderError::Encode(e.to_string()))?;
            out.extend_from_slice(&grid.rgb);
        }
        ImageFormat::Png => {
            let mut enc = png::Encoder::new(&mut out, grid.width as u32, grid.height as u32);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc
                .write_header()
                .map_err(|e| RenderError::Encode(e.to_string()))?;
            writer
                .write_image_data(&grid.rgb)
                .map_err(|e| RenderError::Encode(e.to_string()))?;
            writer
                .finish()
                .map_err(|e| RenderError::Encode(e.to_string()))?;
        }
    }
    Ok(out)
}

/// Parses a binary PPM with maxval 255 into `(width, height, rgb)`.
pub fn decode_ppm(bytes: &[u8]) -> Option<(usize, usize, Vec<u8>)> {
    let mut fields = Vec::with_capacity(4);
    let mut i = 0;
    while fields.len() < 4 {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if start == i {
            return None;
        }
        fields.push(std::str::from_utf8(&bytes[start..i]).ok()?);
    }
    if fields[0] != "P6" || fields[3] != "255" {
        return None;
    }
    let w: usize = fields[1].parse().ok()?;
    let h: usize = fields[2].parse().ok()?;
    let data = bytes.get(i + 1..)?;
    (data.len() == 3 * w * h).then(|| (w, h, data.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::Metadata;

    fn grid() -> ImageGrid {
        ImageGrid {
            width: 2,
            height: 1,
            records: vec![crate::render::PixelRecord::MASKED; 2],
            rgb: vec![1, 2, 3, 4, 5, 6],
            metadata: Metadata::new(),
        }
    }

    #[test]
    fn ppm_round_trip() {
        let bytes = encode_image(&grid(), ImageFormat::Ppm).unwrap();
        assert!(bytes.starts_with(b"P6\n2 1\n255\n"));
        assert_eq!(decode_ppm(&bytes), Some((2, 1, vec![1, 2, 3, 4, 5, 6])));
    }

    #[test]
    fn png_signature() {
        let bytes = encode_image(&grid(), ImageFormat::Png).unwrap();
        assert_eq!(&bytes[..8], b"\x89PNG\r\n\x1a\n");
        assert_eq!(ImageFormat::from_path(Path::new("x.PNG")), ImageFormat::Png);
        assert_eq!(ImageFormat::from_path(Path::new("x.ppm")), ImageFormat::Ppm);
    }
}
