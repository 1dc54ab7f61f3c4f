//! Pixel-level analysis of rendered classification grids.

use std::collections::{BTreeMap, VecDeque};

use super::{ImageGrid, PixelRecord};

/// Coarse class of a pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PixelClass {
    Backward,
    Forward,
    Regular,
    Masked,
}

impl PixelClass {
    pub fn of(record: &PixelRecord) -> Self {
        if record.primary.is_none() {
            PixelClass::Masked
        } else if record.in_backward_set() {
            PixelClass::Backward
        } else if record.in_forward_set() {
            PixelClass::Forward
        } else {
            PixelClass::Regular
        }
    }
}

/// A boolean raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl Mask {
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                bits.push(f(col, row));
            }
        }
        Self { width, height, bits }
    }

    pub fn from_grid(grid: &ImageGrid, f: impl Fn(&PixelRecord) -> bool) -> Self {
        Self {
            width: grid.width,
            height: grid.height,
            bits: grid.records.iter().map(f).collect(),
        }
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    fn neighbours(&self, col: usize, row: usize, diagonal: bool) -> impl Iterator<Item = (usize, usize)> + '_ {
        const OFFSETS: [(isize, isize); 8] =
            [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (1, -1), (-1, 1), (1, 1)];
        let n = if diagonal { 8 } else { 4 };
        OFFSETS[..n].iter().filter_map(move |&(dx, dy)| {
            let c = col.checked_add_signed(dx)?;
            let r = row.checked_add_signed(dy)?;
            (c < self.width && r < self.height).then_some((c, r))
        })
    }

    /// 8-connected components as `(label per pixel, sizes)`; `0` marks
    /// unset pixels and component `k` has label `k + 1`.
    pub fn components(&self) -> (Vec<u32>, Vec<usize>) {
        let mut labels = vec![0u32; self.bits.len()];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.bits.len() {
            if !self.bits[start] || labels[start] != 0 {
                continue;
            }
            sizes.push(0);
            let label = sizes.len() as u32;
            labels[start] = label;
            queue.push_back(start);
            while let Some(i) = queue.pop_front() {
                sizes[label as usize - 1] += 1;
                for (c, r) in self.neighbours(i % self.width, i / self.width, true) {
                    let j = r * self.width + c;
                    if self.bits[j] && labels[j] == 0 {
                        labels[j] = label;
                        queue.push_back(j);
                    }
                }
            }
        }
        (labels, sizes)
    }

    /// Set pixels with a 4-neighbour that is unset.
    pub fn boundary(&self) -> Mask {
        Mask::from_fn(self.width, self.height, |col, row| {
            self.get(col, row) && self.neighbours(col, row, false).any(|(c, r)| !self.get(c, r))
        })
    }

    /// Whether a set pixel lies within Euclidean distance `radius` pixels of
    /// the fractional position `(x, y)`.
    pub fn near(&self, x: f64, y: f64, radius: f64) -> bool {
        let lo = |v: f64| (v - radius).floor().max(0.0) as usize;
        let (c0, r0) = (lo(x), lo(y));
        let c1 = ((x + radius).ceil().max(-1.0) as isize).min(self.width as isize - 1);
        let r1 = ((y + radius).ceil().max(-1.0) as isize).min(self.height as isize - 1);
        if c1 < 0 || r1 < 0 {
            return false;
        }
        (r0..=r1 as usize).any(|r| {
            (c0..=c1 as usize).any(|c| {
                let (dx, dy) = (c as f64 - x, r as f64 - y);
                self.get(c, r) && dx * dx + dy * dy <= radius * radius
            })
        })
    }
}

/// Pixels of `a` that are 8-adjacent to (or coincide with) a pixel of `b`.
pub fn contacts(a: &Mask, b: &Mask) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for row in 0..a.height {
        for col in 0..a.width {
            if a.get(col, row)
                && (b.get(col, row) || a.neighbours(col, row, true).any(|(c, r)| b.get(c, r)))
            {
                out.push((col, row));
            }
        }
    }
    out
}

/// Majority vote over `factor × factor` blocks; ties go to the smallest
/// value.
pub fn downsample_majority<T: Copy + Ord>(
    values: &[T],
    width: usize,
    height: usize,
    factor: usize,
) -> Vec<T> {
    assert!(factor > 0 && width.is_multiple_of(factor) && height.is_multiple_of(factor));
    let (w, h) = (width / factor, height / factor);
    let mut out = Vec::with_capacity(w * h);
    for by in 0..h {
        for bx in 0..w {
            let mut votes: BTreeMap<T, usize> = BTreeMap::new();
            for r in by * factor..(by + 1) * factor {
                for c in bx * factor..(bx + 1) * factor {
                    *votes.entry(values[r * width + c]).or_default() += 1;
                }
            }
            let best = votes.values().copied().max().unwrap_or(0);
            out.push(*votes.iter().find(|(_, &n)| n == best).map(|(k, _)| k).unwrap());
        }
    }
    out
}
