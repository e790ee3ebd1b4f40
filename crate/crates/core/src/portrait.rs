//! Phase portraits: each pixel is colored by the argument of `f` on the
//! HSV wheel (0 is red, then yellow, green, cyan, blue, magenta). The
//! index of an isolated exceptional point shows up as the number of times
//! the colors cycle around it.

use crate::error::{Error, Result};
use crate::function::HarmonicMapping;
use crate::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_3, PI, TAU};
use std::io::Write;
use std::path::Path;

pub const GRAY: [u8; 3] = [128, 128, 128];
pub const BLACK: [u8; 3] = [0, 0, 0];
/// `|f|` below this paints the pixel gray.
pub const DEGENERATE_MODULUS: f64 = 1e-300;
/// Marker disk radius as a fraction of the smaller image dimension.
pub const MARKER_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lower_left: Complex,
    pub upper_right: Complex,
    pub width_px: usize,
    pub height_px: usize,
}

impl Window {
    pub fn new(
        lower_left: Complex,
        upper_right: Complex,
        width_px: usize,
        height_px: usize,
    ) -> Result<Self> {
        if !(upper_right.re > lower_left.re && upper_right.im > lower_left.im) {
            return Err(Error::InvalidWindow(
                "upper right corner must dominate the lower left".into(),
            ));
        }
        if width_px < 16 || height_px < 16 {
            return Err(Error::InvalidWindow("at least 16 pixels per side".into()));
        }
        Ok(Window {
            lower_left,
            upper_right,
            width_px,
            height_px,
        })
    }

    /// Square window `center ± half_width` with `px` pixels per side.
    pub fn square(center: Complex, half_width: f64, px: usize) -> Result<Self> {
        let d = Complex::new(half_width, half_width);
        Window::new(center - d, center + d, px, px)
    }

    /// Complex coordinate of the center of pixel `(col, row)`; row 0 is the
    /// top of the image.
    pub fn pixel_to_point(&self, col: usize, row: usize) -> Complex {
        let span = self.upper_right - self.lower_left;
        Complex::new(
            self.lower_left.re + (col as f64 + 0.5) / self.width_px as f64 * span.re,
            self.upper_right.im - (row as f64 + 0.5) / self.height_px as f64 * span.im,
        )
    }

    /// Pixel containing `z`, as fractional `(col, row)`.
    pub fn point_to_pixel(&self, z: Complex) -> (f64, f64) {
        let span = self.upper_right - self.lower_left;
        (
            (z.re - self.lower_left.re) / span.re * self.width_px as f64 - 0.5,
            (self.upper_right.im - z.im) / span.im * self.height_px as f64 - 0.5,
        )
    }
}

/// Row-major RGB8 image, top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
    /// Pixels painted gray because `f` vanished or was undefined.
    pub degenerate_pixels: usize,
}

impl Image {
    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Self {
        Image {
            width,
            height,
            pixels: vec![color; width * height],
            degenerate_pixels: 0,
        }
    }

    pub fn get(&self, col: usize, row: usize) -> [u8; 3] {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, color: [u8; 3]) {
        self.pixels[row * self.width + col] = color;
    }

    /// Binary PPM: `P6\n<w> <h>\n255\n` then RGB bytes.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }

    pub fn write_ppm(&self, path: &Path) -> std::io::Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        file.write_all(&self.to_ppm())?;
        file.flush()
    }
}

/// Full-saturation, full-value HSV color for the angle `arg`.
pub fn phase_color(arg: f64) -> [u8; 3] {
    let h = (arg / TAU).rem_euclid(1.0) * 6.0;
    let sector = (h.floor() as usize).min(5);
    let frac = h - sector as f64;
    let (r, g, b) = match sector {
        0 => (1.0, frac, 0.0),
        1 => (1.0 - frac, 1.0, 0.0),
        2 => (0.0, 1.0, frac),
        3 => (0.0, 1.0 - frac, 1.0),
        4 => (frac, 0.0, 1.0),
        _ => (1.0, 0.0, 1.0 - frac),
    };
    let q = |x: f64| (x * 255.0).round() as u8;
    [q(r), q(g), q(b)]
}

/// Hue angle in `(-π, π]` of an RGB color; `None` for grays (including
/// black and white).
pub fn color_phase(rgb: [u8; 3]) -> Option<f64> {
    let [r, g, b] = rgb.map(|c| c as f64 / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let chroma = max - min;
    if chroma == 0.0 {
        return None;
    }
    let h = if max == r {
        ((g - b) / chroma).rem_euclid(6.0)
    } else if max == g {
        (b - r) / chroma + 2.0
    } else {
        (r - g) / chroma + 4.0
    };
    let angle = h / 6.0 * TAU;
    Some(if angle > PI { angle - TAU } else { angle })
}

/// Domain coloring of an arbitrary function over `window`.
pub fn render_fn<F>(f: F, window: &Window, markers: &[Complex]) -> Image
where
    F: Fn(Complex) -> Result<Complex> + Sync,
{
    let (w, h) = (window.width_px, window.height_px);
    let rows: Vec<(Vec<[u8; 3]>, usize)> = (0..h)
        .into_par_iter()
        .map(|row| {
            let mut degenerate = 0;
            let pixels = (0..w)
                .map(|col| match f(window.pixel_to_point(col, row)) {
                    Ok(v) if v.is_finite() && v.norm() >= DEGENERATE_MODULUS => {
                        phase_color(v.arg())
                    }
                    _ => {
                        degenerate += 1;
                        GRAY
                    }
                })
                .collect();
            (pixels, degenerate)
        })
        .collect();
    let mut image = Image {
        width: w,
        height: h,
        pixels: Vec::with_capacity(w * h),
        degenerate_pixels: 0,
    };
    for (pixels, degenerate) in rows {
        image.pixels.extend(pixels);
        image.degenerate_pixels += degenerate;
    }
    let radius = (MARKER_FRACTION * w.min(h) as f64).max(1.0);
    for m in markers {
        draw_disk(&mut image, window.point_to_pixel(*m), radius, BLACK);
    }
    image
}

/// Phase portrait of `f = h - conj(z)`.
pub fn render(f: &HarmonicMapping, window: &Window, markers: &[Complex]) -> Image {
    render_fn(|z| f.eval(z), window, markers)
}

fn draw_disk(image: &mut Image, (cx, cy): (f64, f64), radius: f64, color: [u8; 3]) {
    let lo_c = (cx - radius).floor().max(0.0) as usize;
    let lo_r = (cy - radius).floor().max(0.0) as usize;
    let hi_c = ((cx + radius).ceil() as i64).min(image.width as i64 - 1);
    let hi_r = ((cy + radius).ceil() as i64).min(image.height as i64 - 1);
    if hi_c < 0 || hi_r < 0 {
        return;
    }
    for row in lo_r..=hi_r as usize {
        for col in lo_c..=hi_c as usize {
            let (dx, dy) = (col as f64 - cx, row as f64 - cy);
            if dx * dx + dy * dy <= radius * radius {
                image.set(col, row, color);
            }
        }
    }
}

/// Net number of counterclockwise hue cycles along the pixel circle of
/// radius `radius_px` around `center_px = (col, row)`.
pub fn color_cycle_count(
    image: &Image,
    center_px: (usize, usize),
    radius_px: usize,
) -> Result<i64> {
    let (cx, cy) = center_px;
    if radius_px == 0
        || cx < radius_px
        || cy < radius_px
        || cx + radius_px >= image.width
        || cy + radius_px >= image.height
    {
        return Err(Error::ColorCycle(
            "circle does not fit inside the image".into(),
        ));
    }
    let samples = (16 * radius_px).max(64);
    let mut pixels: Vec<(usize, usize)> = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = TAU * k as f64 / samples as f64;
        let col = (cx as f64 + radius_px as f64 * t.cos()).round() as usize;
        // rows grow downwards, so counterclockwise means decreasing row
        let row = (cy as f64 - radius_px as f64 * t.sin()).round() as usize;
        if pixels.last() != Some(&(col, row)) {
            pixels.push((col, row));
        }
    }
    if pixels.len() > 1 && pixels.first() == pixels.last() {
        pixels.pop();
    }
    let phases = pixels
        .iter()
        .map(|&(c, r)| {
            color_phase(image.get(c, r))
                .ok_or_else(|| Error::ColorCycle(format!("gray pixel at ({c}, {r})")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut total = 0.0;
    for k in 0..phases.len() {
        let next = phases[(k + 1) % phases.len()];
        let delta = (next - phases[k] + PI).rem_euclid(TAU) - PI;
        if delta.abs() >= FRAC_PI_3 {
            return Err(Error::ColorCycle(format!(
                "hue jumps by {delta:.3} rad near pixel {:?}; radius too small",
                pixels[k]
            )));
        }
        total += delta;
    }
    Ok((total / TAU).round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn hue_wheel_anchors() {
        assert_eq!(phase_color(0.0), [255, 0, 0]);
        assert_eq!(phase_color(TAU / 6.0), [255, 255, 0]);
        assert_eq!(phase_color(TAU / 3.0), [0, 255, 0]);
        assert_eq!(phase_color(PI), [0, 255, 255]);
        assert_eq!(phase_color(-TAU / 3.0), [0, 0, 255]);
        assert_eq!(phase_color(-TAU / 6.0), [255, 0, 255]);
    }

    #[test]
    fn hue_roundtrip() {
        for k in 0..360 {
            let a = (k as f64).to_radians() - PI + 1e-9;
            let back = color_phase(phase_color(a)).unwrap();
            let d = (back - a + PI).rem_euclid(TAU) - PI;
            assert!(d.abs() < 0.01, "{a} -> {back}");
        }
        assert_eq!(color_phase(GRAY), None);
        assert_eq!(color_phase(BLACK), None);
    }

    #[test]
    fn identity_portrait_orientation() {
        let w = Window::square(c(0.0, 0.0), 1.0, 64).unwrap();
        let img = render_fn(Ok, &w, &[]);
        // right edge of the middle row sits on the positive real axis
        assert_eq!(
            color_phase(img.get(63, 32)).map(|a| a.abs() < 0.1),
            Some(true)
        );
        // top center is arg pi/2: between green and cyan, hue increases counterclockwise
        let top = color_phase(img.get(32, 0)).unwrap();
        assert!((top - PI / 2.0).abs() < 0.1);
        assert_eq!(color_cycle_count(&img, (32, 32), 20).unwrap(), 1);
    }

    #[test]
    fn conj_cycles_clockwise() {
        let f = HarmonicMapping::parse("0").unwrap();
        let w = Window::square(c(0.0, 0.0), 1.0, 101).unwrap();
        let img = render(&f, &w, &[]);
        assert_eq!(color_cycle_count(&img, (50, 50), 20).unwrap(), -1);
    }

    #[test]
    fn constant_image_has_no_cycles() {
        let img = Image::filled(40, 40, [10, 200, 30]);
        assert_eq!(color_cycle_count(&img, (20, 20), 10).unwrap(), 0);
    }

    #[test]
    fn gray_and_out_of_bounds_are_errors() {
        let img = Image::filled(40, 40, GRAY);
        assert!(color_cycle_count(&img, (20, 20), 10).is_err());
        let img = Image::filled(40, 40, [255, 0, 0]);
        assert!(color_cycle_count(&img, (5, 20), 10).is_err());
    }

    #[test]
    fn poles_and_zeros_paint_gray_and_markers_black() {
        let f = HarmonicMapping::parse("1/z").unwrap();
        // pixel centers avoid the origin for even sizes; use odd size so one hits it
        let w = Window::square(c(0.0, 0.0), 1.0, 17).unwrap();
        let img = render(&f, &w, &[]);
        assert_eq!(img.get(8, 8), GRAY);
        assert_eq!(img.degenerate_pixels, 1);
        let img = render(&f, &w, &[c(0.5, 0.5)]);
        let (col, row) = w.point_to_pixel(c(0.5, 0.5));
        assert_eq!(img.get(col.round() as usize, row.round() as usize), BLACK);
    }

    #[test]
    fn ppm_header_and_size() {
        let img = Image::filled(16, 20, [1, 2, 3]);
        let bytes = img.to_ppm();
        assert!(bytes.starts_with(b"P6\n16 20\n255\n"));
        assert_eq!(bytes.len(), b"P6\n16 20\n255\n".len() + 16 * 20 * 3);
        assert_eq!(&bytes[bytes.len() - 3..], &[1, 2, 3]);
    }

    #[test]
    fn window_validation() {
        assert!(Window::new(c(0.0, 0.0), c(1.0, 0.0), 32, 32).is_err());
        assert!(Window::new(c(0.0, 0.0), c(1.0, 1.0), 8, 32).is_err());
    }
}
