//! Tile-parallel rasterisation of dynamical and parameter planes.
//!
//! Every pixel is a pure function of the render inputs and its own
//! coordinates. Tiles are computed on a private thread pool and copied into
//! the output in tile-index order, so the bytes never depend on the worker
//! count, the tile size or the schedule.

pub mod analysis;
mod cover;
mod encode;
mod metadata;
mod viewport;

use num_complex::Complex;
use rayon::prelude::*;
use thiserror::Error;

use crate::correspondence::{coordinate_change, Direction, Parameter, SpherePoint};
use crate::domains::StandardDomains;
use crate::dynamics::{
    classify_backward, classify_forward, critical_orbit_classify, AmbiguityPolicy,
    ClassifyOptions, Verdict,
};
use crate::per11::{classify_filled_julia, CapParameter, JuliaOptions};

pub use cover::{limit_set_cover, CoverOptions, LimitSetCover};
pub use encode::{decode_ppm, encode_image, ImageFormat};
pub use metadata::Metadata;
pub use viewport::{Plane, Viewport};

/// Environment variable read for the default worker count.
pub const WORKERS_ENV: &str = "MODMATE_WORKERS";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("invalid viewport: {0}")]
    InvalidViewport(&'static str),
    #[error("parameter a = {0} is outside the disc |a-4| <= 3 or equal to 1")]
    ParameterOutsideDisc(Complex<f64>),
    #[error("tile size must be positive")]
    InvalidTileSize,
    #[error("max_iter must be positive")]
    InvalidIterations,
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error("encoding failed: {0}")]
    Encode(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Palette {
    /// Black `Λₐ,₋`, dark gray `Λₐ,₊`, regular set from near-white to deep
    /// blue by log escape time.
    #[default]
    Classic,
    Gray,
}

impl Palette {
    pub fn name(&self) -> &'static str {
        match self {
            Palette::Classic => "classic",
            Palette::Gray => "gray",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "classic" => Some(Palette::Classic),
            "gray" | "grey" => Some(Palette::Gray),
            _ => None,
        }
    }

    const BACKWARD: [u8; 3] = [0, 0, 0];
    const FORWARD: [u8; 3] = [64, 64, 64];
    const AMBIGUOUS: [u8; 3] = [255, 0, 255];
    const MASKED: [u8; 3] = [176, 186, 200];

    fn escape(&self, steps: u32, max_iter: u32) -> [u8; 3] {
        let t = ((1.0 + steps as f64).ln() / (1.0 + max_iter.max(1) as f64).ln()).clamp(0.0, 1.0);
        let t = t.sqrt();
        let lerp = |from: f64, to: f64| (from + (to - from) * t).round() as u8;
        match self {
            Palette::Classic => [lerp(252.0, 16.0), lerp(252.0, 48.0), lerp(255.0, 150.0)],
            Palette::Gray => {
                let g = lerp(250.0, 110.0);
                [g, g, g]
            }
        }
    }

    pub fn colour(&self, record: &PixelRecord, max_iter: u32) -> [u8; 3] {
        let Some(primary) = record.primary else {
            return Self::MASKED;
        };
        if record.in_backward_set() {
            return Self::BACKWARD;
        }
        if record.in_forward_set() {
            return Self::FORWARD;
        }
        match (primary, record.secondary) {
            (Verdict::Ambiguous(_), _) | (_, Some(Verdict::Ambiguous(_))) => Self::AMBIGUOUS,
            (n, secondary) => {
                let m = secondary.map_or(n.steps(), |v| v.steps().max(n.steps()));
                self.escape(m, max_iter)
            }
        }
    }
}

/// Per-pixel classification. `primary` is `None` for masked pixels.
///
/// Limit-set renders carry the backward verdict (`Λₐ,₋`) as primary and
/// the forward verdict (`Λₐ,₊`) as secondary, plus whether the
/// inverse-iteration cover hit the pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PixelRecord {
    pub primary: Option<Verdict>,
    pub secondary: Option<Verdict>,
    pub cover_backward: bool,
    pub cover_forward: bool,
}

impl PixelRecord {
    pub const MASKED: PixelRecord = PixelRecord {
        primary: None,
        secondary: None,
        cover_backward: false,
        cover_forward: false,
    };

    pub fn single(v: Verdict) -> Self {
        Self { primary: Some(v), ..Self::MASKED }
    }

    pub fn bounded_backward(&self) -> bool {
        matches!(self.primary, Some(Verdict::Bounded(_)))
    }

    pub fn bounded_forward(&self) -> bool {
        matches!(self.secondary, Some(Verdict::Bounded(_)))
    }

    /// Escape time says bounded, or the cover hit the pixel.
    pub fn in_backward_set(&self) -> bool {
        self.bounded_backward() || self.cover_backward
    }

    pub fn in_forward_set(&self) -> bool {
        self.bounded_forward() || self.cover_forward
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderOptions {
    pub max_iter: u32,
    pub tile_size: usize,
    /// `None`: take [`WORKERS_ENV`] or the rayon default.
    pub workers: Option<usize>,
    pub palette: Palette,
    pub policy: AmbiguityPolicy,
    /// Escape radius for `Per₁(1)` renders.
    pub escape_radius: f64,
    /// Transversality margins below this flag a limit-set render as being
    /// in the tangent regime.
    pub tangent_threshold: f64,
    /// Overlay the inverse-iteration cover on limit-set renders.
    pub cover: bool,
    pub cover_nodes: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            tile_size: 64,
            workers: None,
            palette: Palette::Classic,
            policy: AmbiguityPolicy::Inner,
            escape_radius: 1e4,
            tangent_threshold: 1e-3,
            cover: true,
            cover_nodes: CoverOptions::default().max_nodes,
        }
    }
}

impl RenderOptions {
    fn classify(&self) -> ClassifyOptions {
        ClassifyOptions {
            max_iter: self.max_iter,
            policy: self.policy,
        }
    }

    fn validate(&self) -> Result<(), RenderError> {
        if self.tile_size == 0 {
            return Err(RenderError::InvalidTileSize);
        }
        if self.max_iter == 0 {
            return Err(RenderError::InvalidIterations);
        }
        Ok(())
    }

    fn worker_count(&self) -> usize {
        self.workers
            .or_else(|| std::env::var(WORKERS_ENV).ok()?.parse().ok())
            .filter(|&n| n > 0)
            .unwrap_or_else(rayon::current_num_threads)
    }
}

/// A rendered image: classifications, colours and the run description.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageGrid {
    pub width: usize,
    pub height: usize,
    pub records: Vec<PixelRecord>,
    pub rgb: Vec<u8>,
    pub metadata: Metadata,
}

impl ImageGrid {
    pub fn record(&self, col: usize, row: usize) -> &PixelRecord {
        &self.records[row * self.width + col]
    }

    pub fn pixel(&self, col: usize, row: usize) -> [u8; 3] {
        let i = 3 * (row * self.width + col);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }
}

/// Evaluates `pixel` over the viewport tile by tile.
fn rasterise<F>(
    width: usize,
    height: usize,
    opts: &RenderOptions,
    pixel: F,
) -> Result<Vec<PixelRecord>, RenderError>
where
    F: Fn(usize, usize) -> PixelRecord + Sync,
{
    opts.validate()?;
    let tile = opts.tile_size;
    let tiles_x = width.div_ceil(tile);
    let tiles_y = height.div_ceil(tile);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.worker_count())
        .build()
        .map_err(|e| RenderError::ThreadPool(e.to_string()))?;

    let tiles: Vec<(usize, Vec<PixelRecord>)> = pool.install(|| {
        (0..tiles_x * tiles_y)
            .into_par_iter()
            .map(|index| {
                let (tx, ty) = (index % tiles_x, index / tiles_x);
                let (x0, y0) = (tx * tile, ty * tile);
                let (x1, y1) = ((x0 + tile).min(width), (y0 + tile).min(height));
                let mut out = Vec::with_capacity((x1 - x0) * (y1 - y0));
                for row in y0..y1 {
                    for col in x0..x1 {
                        out.push(pixel(col, row));
                    }
                }
                (index, out)
            })
            .collect()
    });

    let mut records = vec![PixelRecord::MASKED; width * height];
    for (index, block) in tiles {
        let (tx, ty) = (index % tiles_x, index / tiles_x);
        let (x0, y0) = (tx * tile, ty * tile);
        let w = (x0 + tile).min(width) - x0;
        for (k, chunk) in block.chunks(w).enumerate() {
            let start = (y0 + k) * width + x0;
            records[start..start + w].copy_from_slice(chunk);
        }
    }
    Ok(records)
}

fn colourise(records: &[PixelRecord], palette: Palette, max_iter: u32) -> Vec<u8> {
    records
        .iter()
        .flat_map(|r| palette.colour(r, max_iter))
        .collect()
}

fn base_metadata(kind: &str, viewport: &Viewport, opts: &RenderOptions) -> Metadata {
    let mut m = Metadata::new();
    m.set("kind", kind);
    m.set("center", format_complex(viewport.centre));
    m.set("width", format!("{:e}", viewport.width));
    m.set("size", format!("{}x{}", viewport.width_px, viewport.height_px));
    m.set("plane", viewport.plane.name());
    m.set("max_iter", opts.max_iter.to_string());
    m.set("tile", opts.tile_size.to_string());
    m.set("palette", opts.palette.name());
    m.set("strict", (opts.policy == AmbiguityPolicy::Strict).to_string());
    m
}

/// `re+imi` with full round-trip precision.
pub fn format_complex(z: Complex<f64>) -> String {
    if z.im.is_sign_negative() {
        format!("{:?}-{:?}i", z.re, -z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

/// `Λₐ,₋` (black), `Λₐ,₊` (dark gray) and the regular set shaded by
/// escape time.
pub fn render_limit_set(
    a: &Parameter<f64>,
    viewport: &Viewport,
    opts: &RenderOptions,
) -> Result<ImageGrid, RenderError> {
    if !a.in_standard_disc() {
        return Err(RenderError::ParameterOutsideDisc(a.value()));
    }
    let s = StandardDomains::new(*a).map_err(|_| RenderError::ParameterOutsideDisc(a.value()))?;
    let copts = opts.classify();
    let cover = if opts.cover {
        Some(limit_set_cover(a, viewport, &CoverOptions { max_nodes: opts.cover_nodes })?)
    } else {
        None
    };
    let records = rasterise(viewport.width_px, viewport.height_px, opts, |col, row| {
        let p = SpherePoint::Finite(viewport.pixel_point(col, row));
        let z = match viewport.plane {
            Plane::Big => p,
            Plane::Small => coordinate_change(a, p, Direction::SmallToBig),
        };
        PixelRecord {
            primary: Some(classify_backward(&s, z, copts).verdict),
            secondary: Some(classify_forward(&s, z, copts).verdict),
            cover_backward: cover.as_ref().is_some_and(|c| c.backward.get(col, row)),
            cover_forward: cover.as_ref().is_some_and(|c| c.forward.get(col, row)),
        }
    })?;
    let margin = s.transversality_margin();
    let mut metadata = base_metadata("limitset", viewport, opts);
    metadata.set("cover", opts.cover.to_string());
    match &cover {
        Some(c) => {
            metadata.set("cover_nodes", c.nodes.to_string());
            metadata.set("cover_truncated", c.truncated.to_string());
        }
        None => metadata.set("cover_nodes", "off"),
    }
    metadata.set("a", format_complex(a.value()));
    metadata.set("transversality_margin", format!("{margin:e}"));
    metadata.set("tangent_regime", (margin < opts.tangent_threshold).to_string());
    Ok(ImageGrid {
        width: viewport.width_px,
        height: viewport.height_px,
        rgb: colourise(&records, opts.palette, opts.max_iter),
        records,
        metadata,
    })
}

/// The modular Mandelbrot set over a region of the `a`-plane, masked
/// outside `𝒟` and at `a = 1`. Bounded critical orbits are a numerical
/// approximation of membership.
pub fn render_mset(region: &Viewport, opts: &RenderOptions) -> Result<ImageGrid, RenderError> {
    let copts = opts.classify();
    let records = rasterise(region.width_px, region.height_px, opts, |col, row| {
        let a = region.pixel_point(col, row);
        let Ok(param) = Parameter::new(a) else {
            return PixelRecord::MASKED;
        };
        if !param.in_standard_disc() {
            return PixelRecord::MASKED;
        }
        match StandardDomains::new(param) {
            Ok(s) => PixelRecord::single(critical_orbit_classify(&s, copts).verdict),
            Err(_) => PixelRecord::MASKED,
        }
    })?;
    let mut metadata = base_metadata("mset", region, opts);
    metadata.set("approximation", "critical orbit of Z=-1 bounded in closed Delta_J");
    Ok(ImageGrid {
        width: region.width_px,
        height: region.height_px,
        rgb: colourise(&records, opts.palette, opts.max_iter),
        records,
        metadata,
    })
}

/// Filled Julia set `K_A` of `z ↦ z + 1/z + A`.
pub fn render_julia_per11(
    a: &CapParameter<f64>,
    viewport: &Viewport,
    opts: &RenderOptions,
) -> Result<ImageGrid, RenderError> {
    let jopts = JuliaOptions {
        max_iter: opts.max_iter,
        escape_radius: opts.escape_radius,
    };
    let records = rasterise(viewport.width_px, viewport.height_px, opts, |col, row| {
        let z = SpherePoint::Finite(viewport.pixel_point(col, row));
        PixelRecord::single(classify_filled_julia(a, z, jopts).verdict)
    })?;
    let mut metadata = base_metadata("julia", viewport, opts);
    metadata.set("A", format_complex(a.value));
    metadata.set("escape_radius", format!("{:e}", opts.escape_radius));
    Ok(ImageGrid {
        width: viewport.width_px,
        height: viewport.height_px,
        rgb: colourise(&records, opts.palette, opts.max_iter),
        records,
        metadata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(tile: usize, workers: usize) -> RenderOptions {
        RenderOptions {
            max_iter: 300,
            tile_size: tile,
            workers: Some(workers),
            ..Default::default()
        }
    }

    #[test]
    fn rasterise_places_tiles_correctly() {
        for (tile, workers) in [(1, 1), (3, 2), (7, 4), (64, 3)] {
            let recs = rasterise(13, 9, &opts(tile, workers), |c, r| {
                PixelRecord::single(Verdict::Escaped((r * 100 + c) as u32))
            })
            .unwrap();
            for r in 0..9 {
                for c in 0..13 {
                    assert_eq!(recs[r * 13 + c].primary, Some(Verdict::Escaped((r * 100 + c) as u32)));
                }
            }
        }
    }

    #[test]
    fn zero_tile_is_rejected() {
        let r = rasterise(4, 4, &opts(0, 1), |_, _| PixelRecord::MASKED);
        assert_eq!(r, Err(RenderError::InvalidTileSize));
    }

    #[test]
    fn limit_set_rejects_outside_disc() {
        let a = Parameter::from_parts(9.0, 0.0).unwrap();
        let v = Viewport::square(Complex::new(0.0, 0.0), 4.0, 8).unwrap();
        assert!(matches!(
            render_limit_set(&a, &v, &opts(8, 1)),
            Err(RenderError::ParameterOutsideDisc(_))
        ));
    }

    #[test]
    fn limit_set_tile_size_does_not_matter() {
        let a = Parameter::from_parts(4.565, 0.42).unwrap();
        let v = Viewport::square(Complex::new(0.5, 0.0), 6.0, 48).unwrap();
        let g1 = render_limit_set(&a, &v, &opts(32, 1)).unwrap();
        let g2 = render_limit_set(&a, &v, &opts(5, 4)).unwrap();
        assert_eq!(g1.rgb, g2.rgb);
        assert_eq!(g1.records, g2.records);
        assert_eq!(g1.metadata.get("tangent_regime"), Some("false"));
    }

    #[test]
    fn mset_masks_outside_disc_and_a_equal_one() {
        // 3×1 pixels centred on 1, 4, 7.5 along the real axis.
        let v = Viewport::new(Complex::new(4.25, 0.0), 9.75, 3, 1).unwrap();
        let g = render_mset(&v, &opts(2, 2)).unwrap();
        assert_eq!(g.records[0], PixelRecord::MASKED);
        assert!(g.records[1].primary.is_some());
        assert_eq!(g.records[2], PixelRecord::MASKED);
        assert_eq!(g.pixel(0, 0), Palette::MASKED);
    }

    #[test]
    fn julia_a0_is_left_half_plane() {
        let a = CapParameter::new(Complex::new(0.0, 0.0));
        let v = Viewport::square(Complex::new(0.0, 0.0), 4.0, 16).unwrap();
        let g = render_julia_per11(&a, &v, &opts(8, 2)).unwrap();
        for row in 0..16 {
            for col in 0..16 {
                let inside = v.pixel_point(col, row).re <= 0.0;
                assert_eq!(g.record(col, row).in_backward_set(), inside);
            }
        }
    }
}
