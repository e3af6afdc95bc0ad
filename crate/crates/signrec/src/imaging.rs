//! Frame rasters and the skin-filter chain: HSV conversion, color
//! thresholding, binary smoothing, largest-blob selection, masked grayscale
//! and bilinear resizing.

use crate::error::{Error, Result};

/// 8-bit RGB raster, row-major interleaved channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbFrame {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl RgbFrame {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::BadFrame {
                reason: format!("zero dimension {width}x{height}"),
            });
        }
        let expected = width as usize * height as usize * 3;
        if data.len() != expected {
            return Err(Error::BadFrame {
                reason: format!("rgb data length {} != {expected}", data.len()),
            });
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> (u8, u8, u8)) -> Self {
        assert!(width >= 1 && height >= 1);
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for y in 0..height {
            for x in 0..width {
                let (r, g, b) = f(x, y);
                data.extend_from_slice(&[r, g, b]);
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: u32, y: u32) -> (u8, u8, u8) {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        (self.data[i], self.data[i + 1], self.data[i + 2])
    }
}

/// One HSV pixel: hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsvPixel {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HsvFrame {
    width: u32,
    height: u32,
    data: Vec<HsvPixel>,
}

impl HsvFrame {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[HsvPixel] {
        &self.data
    }

    pub fn pixel(&self, x: u32, y: u32) -> HsvPixel {
        self.data[y as usize * self.width as usize + x as usize]
    }
}

/// One bit per pixel, row-major. `true` marks skin/hand pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, data: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::BadFrame {
                reason: format!("zero dimension {width}x{height}"),
            });
        }
        let expected = width as usize * height as usize;
        if data.len() != expected {
            return Err(Error::BadFrame {
                reason: format!("mask data length {} != {expected}", data.len()),
            });
        }
        Ok(Self { width, height, data })
    }

    pub fn zeros(width: u32, height: u32) -> Self {
        assert!(width >= 1 && height >= 1);
        Self {
            width,
            height,
            data: vec![false; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.data[y as usize * self.width as usize + x as usize] = v;
    }

    /// Number of set pixels.
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// Real-valued intensities in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayFrame {
    width: u32,
    height: u32,
    data: Vec<f64>,
}

impl GrayFrame {
    pub fn new(width: u32, height: u32, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::BadFrame {
                reason: format!("zero dimension {width}x{height}"),
            });
        }
        let expected = width as usize * height as usize;
        if data.len() != expected {
            return Err(Error::BadFrame {
                reason: format!("gray data length {} != {expected}", data.len()),
            });
        }
        if let Some(bad) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::BadFrame {
                reason: format!("intensity {bad} outside [0, 1]"),
            });
        }
        Ok(Self { width, height, data })
    }

    pub(crate) fn from_raw(width: u32, height: u32, data: Vec<f64>) -> Self {
        debug_assert!(data.len() == width as usize * height as usize);
        debug_assert!(data.iter().all(|v| (0.0..=1.0).contains(v)));
        Self { width, height, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// One row of intensities.
    pub fn row(&self, y: u32) -> &[f64] {
        let w = self.width as usize;
        let start = y as usize * w;
        &self.data[start..start + w]
    }
}

/// Inclusive HSV box for the skin filter. `h_min > h_max` denotes a hue
/// interval wrapping through 360 degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkinThresholds {
    pub h_min: f64,
    pub h_max: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl SkinThresholds {
    pub fn new(h_min: f64, h_max: f64, s_min: f64, s_max: f64, v_min: f64, v_max: f64) -> Result<Self> {
        if s_min > s_max || v_min > v_max {
            return Err(Error::ConfigInvalid {
                reason: format!(
                    "saturation/value bounds must be ordered: s [{s_min}, {s_max}], v [{v_min}, {v_max}]"
                ),
            });
        }
        Ok(Self { h_min, h_max, s_min, s_max, v_min, v_max })
    }

    pub fn contains(&self, p: HsvPixel) -> bool {
        let hue_ok = if self.h_min <= self.h_max {
            p.h >= self.h_min && p.h <= self.h_max
        } else {
            // wraps through 360
            p.h >= self.h_min || p.h <= self.h_max
        };
        hue_ok
            && p.s >= self.s_min
            && p.s <= self.s_max
            && p.v >= self.v_min
            && p.v <= self.v_max
    }
}

impl Default for SkinThresholds {
    fn default() -> Self {
        Self {
            h_min: 340.0,
            h_max: 50.0,
            s_min: 0.20,
            s_max: 0.68,
            v_min: 0.35,
            v_max: 1.0,
        }
    }
}

fn hsv_of(r: u8, g: u8, b: u8) -> HsvPixel {
    let r = r as f64 / 255.0;
    let g = g as f64 / 255.0;
    let b = b as f64 / 255.0;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;

    let mut h = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * ((g - b) / delta)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    if h < 0.0 {
        h += 360.0;
    }
    if h >= 360.0 {
        h = 0.0;
    }

    let s = if max == 0.0 { 0.0 } else { delta / max };
    HsvPixel { h, s, v: max }
}

/// Per-pixel hexcone RGB to HSV conversion. Achromatic pixels get hue 0.
pub fn rgb_to_hsv(frame: &RgbFrame) -> HsvFrame {
    let data = frame
        .data
        .chunks_exact(3)
        .map(|px| hsv_of(px[0], px[1], px[2]))
        .collect();
    HsvFrame {
        width: frame.width,
        height: frame.height,
        data,
    }
}

/// Marks every pixel whose HSV value lies inside `thr` (inclusive bounds,
/// hue tested with wraparound).
pub fn skin_mask(frame: &HsvFrame, thr: &SkinThresholds) -> BinaryMask {
    BinaryMask {
        width: frame.width,
        height: frame.height,
        data: frame.data.iter().map(|&p| thr.contains(p)).collect(),
    }
}

/// A pixel survives erosion only if its whole window is in bounds and set;
/// pixels outside the mask count as background.
fn erode(mask: &BinaryMask, radius: u32) -> BinaryMask {
    let r = radius as i64;
    let (w, h) = (mask.width as i64, mask.height as i64);
    let mut out = BinaryMask::zeros(mask.width, mask.height);
    for y in 0..h {
        'px: for x in 0..w {
            for dy in -r..=r {
                for dx in -r..=r {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h || !mask.get(nx as u32, ny as u32) {
                        continue 'px;
                    }
                }
            }
            out.set(x as u32, y as u32, true);
        }
    }
    out
}

fn dilate(mask: &BinaryMask, radius: u32) -> BinaryMask {
    let r = radius as i64;
    let (w, h) = (mask.width as i64, mask.height as i64);
    let mut out = BinaryMask::zeros(mask.width, mask.height);
    for y in 0..h {
        'px: for x in 0..w {
            for dy in -r..=r {
                for dx in -r..=r {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx >= 0 && ny >= 0 && nx < w && ny < h && mask.get(nx as u32, ny as u32) {
                        out.set(x as u32, y as u32, true);
                        continue 'px;
                    }
                }
            }
        }
    }
    out
}

/// Morphological opening followed by closing with a square structuring
/// element of side `2 * radius + 1`. Removes speckle, then fills pinholes.
pub fn smooth_mask(mask: &BinaryMask, radius: u32) -> BinaryMask {
    let opened = dilate(&erode(mask, radius), radius);
    erode(&dilate(&opened, radius), radius)
}

/// Keeps only the largest 8-connected component of set pixels. Ties go to
/// the component whose smallest row-major index is lowest; an empty mask
/// stays empty.
pub fn largest_component(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width as usize, mask.height as usize);
    let mut labels = vec![0u32; w * h];
    let mut next_label = 1u32;
    let mut best: Option<(u32, usize)> = None; // (label, size)
    let mut stack = Vec::new();

    for start in 0..w * h {
        if !mask.data[start] || labels[start] != 0 {
            continue;
        }
        let label = next_label;
        next_label += 1;
        let mut size = 0usize;
        labels[start] = label;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            size += 1;
            let (x, y) = (idx % w, idx / w);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let nidx = ny as usize * w + nx as usize;
                    if mask.data[nidx] && labels[nidx] == 0 {
                        labels[nidx] = label;
                        stack.push(nidx);
                    }
                }
            }
        }
        // Scan order visits components by ascending minimum row-major index,
        // so a strict comparison implements the tie-break.
        if best.is_none_or(|(_, best_size)| size > best_size) {
            best = Some((label, size));
        }
    }

    let mut out = BinaryMask::zeros(mask.width, mask.height);
    if let Some((label, _)) = best {
        for (i, &l) in labels.iter().enumerate() {
            if l == label {
                out.data[i] = true;
            }
        }
    }
    out
}

/// ITU-R 601 luma weights.
const LUMA_R: f64 = 0.299;
const LUMA_G: f64 = 0.587;
const LUMA_B: f64 = 0.114;

/// Grayscale intensity under the mask, zero elsewhere.
pub fn masked_gray(frame: &RgbFrame, mask: &BinaryMask) -> Result<GrayFrame> {
    if frame.width != mask.width || frame.height != mask.height {
        return Err(Error::DimensionMismatch {
            expected_w: frame.width,
            expected_h: frame.height,
            actual_w: mask.width,
            actual_h: mask.height,
        });
    }
    let data = frame
        .data
        .chunks_exact(3)
        .zip(&mask.data)
        .map(|(px, &on)| {
            if on {
                (LUMA_R * px[0] as f64 + LUMA_G * px[1] as f64 + LUMA_B * px[2] as f64) / 255.0
            } else {
                0.0
            }
        })
        .collect();
    Ok(GrayFrame::from_raw(frame.width, frame.height, data))
}

/// Bilinear resampling with pixel-center alignment. Source coordinates are
/// clamped to the border, and each axis interpolates in lerp form, so the
/// output never leaves the input's value range.
pub fn resize_bilinear(frame: &GrayFrame, out_w: u32, out_h: u32) -> GrayFrame {
    assert!(out_w >= 1 && out_h >= 1, "target dimensions must be at least 1x1");
    let (in_w, in_h) = (frame.width as usize, frame.height as usize);
    let mut data = Vec::with_capacity(out_w as usize * out_h as usize);
    for oy in 0..out_h as usize {
        let sy = ((oy as f64 + 0.5) * in_h as f64 / out_h as f64 - 0.5).clamp(0.0, (in_h - 1) as f64);
        let y0 = sy.floor() as usize;
        let y1 = (y0 + 1).min(in_h - 1);
        let fy = sy - y0 as f64;
        for ox in 0..out_w as usize {
            let sx =
                ((ox as f64 + 0.5) * in_w as f64 / out_w as f64 - 0.5).clamp(0.0, (in_w - 1) as f64);
            let x0 = sx.floor() as usize;
            let x1 = (x0 + 1).min(in_w - 1);
            let fx = sx - x0 as f64;

            let lerp = |a: f64, b: f64, t: f64| a + t * (b - a);
            let top = lerp(frame.data[y0 * in_w + x0], frame.data[y0 * in_w + x1], fx);
            let bottom = lerp(frame.data[y1 * in_w + x0], frame.data[y1 * in_w + x1], fx);
            data.push(lerp(top, bottom, fy));
        }
    }
    GrayFrame::from_raw(out_w, out_h, data)
}
