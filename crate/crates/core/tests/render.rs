use modmate::render::analysis::{downsample_majority, PixelClass};
use modmate::render::{
    decode_ppm, encode_image, render_julia_per11, render_limit_set, render_mset, ImageFormat,
    ImageGrid, Metadata, RenderOptions, Viewport,
};
use modmate::{Cap, Param, C64};
use sha2::{Digest, Sha256};

fn default_frame(px: usize) -> Viewport {
    Viewport::square(C64::new(0.15, 0.0), 4.4, px).unwrap()
}

fn golden() -> ImageGrid {
    let a = Param::from_parts(4.5, 0.0).unwrap();
    let opts = RenderOptions { max_iter: 500, workers: Some(2), ..Default::default() };
    render_limit_set(&a, &default_frame(64), &opts).unwrap()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn golden_render_hash() {
    let ppm = encode_image(&golden(), ImageFormat::Ppm).unwrap();
    let digest = hex(&Sha256::digest(&ppm));
    assert_eq!(digest, "7d190211583662f91721321b7316d4c47b2b39b04d9d2df3cc4573508efb4705");
    assert_eq!(ppm, encode_image(&golden(), ImageFormat::Ppm).unwrap());
}

#[test]
fn white_pixel_ppm_is_fourteen_bytes() {
    let grid = ImageGrid {
        width: 1,
        height: 1,
        records: Vec::new(),
        rgb: vec![255, 255, 255],
        metadata: Metadata::new(),
    };
    let ppm = encode_image(&grid, ImageFormat::Ppm).unwrap();
    assert_eq!(ppm, b"P6\n1 1\n255\n\xff\xff\xff");
    assert_eq!(ppm.len(), 14);
}

#[test]
fn png_decodes_to_ppm_pixels() {
    let grid = golden();
    let ppm = encode_image(&grid, ImageFormat::Ppm).unwrap();
    let (w, h, rgb) = decode_ppm(&ppm).unwrap();
    let png_bytes = encode_image(&grid, ImageFormat::Png).unwrap();
    let mut reader = png::Decoder::new(std::io::Cursor::new(png_bytes)).read_info().unwrap();
    let mut buf = vec![0; reader.output_buffer_size().unwrap()];
    let info = reader.next_frame(&mut buf).unwrap();
    assert_eq!((info.width as usize, info.height as usize), (w, h));
    assert_eq!(info.color_type, png::ColorType::Rgb);
    assert_eq!(&buf[..info.buffer_size()], &rgb[..]);
}

#[test]
fn tile_size_does_not_change_pixels() {
    let cap = Cap::new(C64::new(0.3, 0.8));
    let view = Viewport::new(C64::new(-0.2, 0.1), 5.0, 70, 45).unwrap();
    let base = RenderOptions { max_iter: 800, escape_radius: 50.0, workers: Some(3), ..Default::default() };
    let a = render_julia_per11(&cap, &view, &RenderOptions { tile_size: 32, ..base }).unwrap();
    let b = render_julia_per11(&cap, &view, &RenderOptions { tile_size: 128, ..base }).unwrap();
    assert_eq!(a.rgb, b.rgb);
    assert_eq!(a.records, b.records);
}

#[test]
fn resolution_consistency() {
    let a = Param::from_parts(4.5, 0.0).unwrap();
    let opts = RenderOptions { max_iter: 1000, ..Default::default() };
    let fine = render_limit_set(&a, &default_frame(1024), &opts).unwrap();
    let coarse = render_limit_set(&a, &default_frame(256), &opts).unwrap();
    let classes: Vec<PixelClass> = fine.records.iter().map(PixelClass::of).collect();
    let voted = downsample_majority(&classes, 1024, 1024, 4);
    let agree = voted
        .iter()
        .zip(&coarse.records)
        .filter(|(v, r)| **v == PixelClass::of(r))
        .count();
    let share = agree as f64 / voted.len() as f64;
    assert!(share >= 0.98, "agreement {share}");
}

#[test]
fn mset_is_mirror_symmetric() {
    let region = Viewport::new(C64::new(4.0, 0.0), 6.2, 90, 64).unwrap();
    let g = render_mset(&region, &RenderOptions { max_iter: 1000, ..Default::default() }).unwrap();
    for row in 0..g.height {
        for col in 0..g.width {
            assert_eq!(g.pixel(col, row), g.pixel(col, g.height - 1 - row));
        }
    }
}

#[test]
fn sidecar_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("golden.ppm");
    let grid = golden();
    std::fs::write(&image, encode_image(&grid, ImageFormat::Ppm).unwrap()).unwrap();
    let path = grid.metadata.write_sidecar(&image).unwrap();
    let back = Metadata::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(back, grid.metadata);
    assert_eq!(back.get("kind"), Some("limitset"));
    assert_eq!(back.get("a"), Some("4.5+0.0i"));
}
