//! Domain-colouring rasters of a series, written as binary PPM.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::series::{EvalOptions, SeriesSpec, DEFAULT_GUARD_EPS};

/// Evaluation tolerance used for every pixel.
pub const PIXEL_TOL: f64 = 1e-8;

pub const BLACK: [u8; 3] = [0, 0, 0];

/// Rectangle `[x0, x1] x [y0, y1]` of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let all_finite = [x0, x1, y0, y1].iter().all(|v| v.is_finite());
        if !all_finite || x0 >= x1 || y0 >= y1 {
            return Err(Error::InvalidArgument(format!(
                "window needs finite x0 < x1 and y0 < y1, got {x0},{x1},{y0},{y1}"
            )));
        }
        Ok(Window { x0, x1, y0, y1 })
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.x0, self.x1, self.y0, self.y1)
    }
}

/// Centre of pixel `(col, row)`; row 0 is the top edge `y1`.
pub fn pixel_center(window: &Window, width: u32, height: u32, col: u32, row: u32) -> Complex64 {
    let w = width as f64;
    let h = height as f64;
    let re = window.x0 + (col as f64 + 0.5) * (window.x1 - window.x0) / w;
    let im = window.y1 - (row as f64 + 0.5) * (window.y1 - window.y0) / h;
    Complex64::new(re, im)
}

/// HSV with every component in `[0, 1]` to 8-bit RGB.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let h6 = (h.rem_euclid(1.0)) * 6.0;
    let sector = (h6.floor() as i64).rem_euclid(6);
    let f = h6 - h6.floor();
    let p = v * (1.0 - s);
    let q = v * (1.0 - f * s);
    let t = v * (1.0 - (1.0 - f) * s);
    let (r, g, b) = match sector {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [r, g, b].map(|c| (c.clamp(0.0, 1.0) * 255.0).round() as u8)
}

/// Hue from the argument, brightness from the modulus.
pub fn color(f: Complex64) -> [u8; 3] {
    if !(f.re.is_finite() && f.im.is_finite()) {
        return BLACK;
    }
    let hue = (f.arg() + PI) / (2.0 * PI);
    let value = 1.0 - 1.0 / (1.0 + (1.0 + f.norm()).ln());
    hsv_to_rgb(hue, 1.0, value)
}

/// Guard radius of a pixel: half its diagonal, never below the evaluator's
/// default. A pixel is black when its footprint touches a pole.
pub fn pixel_guard(window: &Window, width: u32, height: u32) -> f64 {
    let dx = (window.x1 - window.x0) / width as f64;
    let dy = (window.y1 - window.y0) / height as f64;
    (0.5 * dx.hypot(dy)).max(DEFAULT_GUARD_EPS)
}

/// Colour of one point; black wherever evaluation is refused.
pub fn pixel_color(spec: &SeriesSpec, z: Complex64, guard_eps: f64) -> [u8; 3] {
    let opts = EvalOptions {
        tol: PIXEL_TOL,
        guard_eps,
        require_certified: false,
    };
    match spec.evaluate_at(z.into(), &opts) {
        Ok(r) => color(r.value),
        Err(_) => BLACK,
    }
}

/// Row-major RGB bytes, top row first.
pub fn render_rgb(spec: &SeriesSpec, window: &Window, width: u32, height: u32) -> Vec<u8> {
    let row_len = width as usize * 3;
    let guard = pixel_guard(window, width, height);
    let mut buf = vec![0u8; row_len * height as usize];
    buf.par_chunks_mut(row_len.max(1))
        .enumerate()
        .for_each(|(row, out)| {
            for col in 0..width {
                let z = pixel_center(window, width, height, col, row as u32);
                let c = pixel_color(spec, z, guard);
                out[col as usize * 3..col as usize * 3 + 3].copy_from_slice(&c);
            }
        });
    buf
}

/// Complete P6 file contents.
pub fn render_ppm(spec: &SeriesSpec, window: &Window, width: u32, height: u32) -> Result<Vec<u8>> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument(format!(
            "resolution must be positive, got {width}x{height}"
        )));
    }
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.extend(render_rgb(spec, window, width, height));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primary_hues() {
        assert_eq!(hsv_to_rgb(0.0, 1.0, 1.0), [255, 0, 0]);
        assert_eq!(hsv_to_rgb(1.0 / 3.0, 1.0, 1.0), [0, 255, 0]);
        assert_eq!(hsv_to_rgb(2.0 / 3.0, 1.0, 1.0), [0, 0, 255]);
        assert_eq!(hsv_to_rgb(1.0, 1.0, 1.0), [255, 0, 0]);
        assert_eq!(hsv_to_rgb(0.5, 0.0, 0.5), [128, 128, 128]);
    }

    #[test]
    fn colour_of_simple_values() {
        assert_eq!(color(Complex64::new(0.0, 0.0)), BLACK);
        // arg(-1) = pi gives hue 1, which wraps to red.
        let v = 1.0 - 1.0 / (1.0 + 2f64.ln());
        let level = (v * 255.0).round() as u8;
        assert_eq!(color(Complex64::new(-1.0, 0.0)), [level, 0, 0]);
        assert_eq!(color(Complex64::new(f64::NAN, 0.0)), BLACK);
    }

    #[test]
    fn pixel_centres() {
        let w = Window::new(-2.0, 2.0, -2.0, 2.0).unwrap();
        assert_eq!(
            pixel_center(&w, 64, 64, 0, 0),
            Complex64::new(-1.96875, 1.96875)
        );
        assert_eq!(
            pixel_center(&w, 64, 64, 63, 63),
            Complex64::new(1.96875, -1.96875)
        );
        assert_eq!(pixel_center(&w, 1, 1, 0, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn guard_covers_the_pixel() {
        let w = Window::new(-2.0, 2.0, -2.0, 2.0).unwrap();
        assert_eq!(pixel_guard(&w, 64, 64), 0.5 * 0.0625f64.hypot(0.0625));
        let tiny = Window::new(0.0, 1e-9, 0.0, 1e-9).unwrap();
        assert_eq!(pixel_guard(&tiny, 1, 1), DEFAULT_GUARD_EPS);
    }

    #[test]
    fn poles_inside_a_pixel_are_black() {
        let spec = SeriesSpec::fibonacci(4).unwrap();
        assert_eq!(pixel_color(&spec, Complex64::new(1.01, 0.0), 0.02), BLACK);
        assert_ne!(pixel_color(&spec, Complex64::new(1.01, 0.0), 1e-6), BLACK);
    }

    #[test]
    fn header_and_size() {
        let spec = SeriesSpec::fibonacci(4).unwrap();
        let w = Window::new(0.0, 1.0, 0.5, 1.5).unwrap();
        let ppm = render_ppm(&spec, &w, 3, 2).unwrap();
        assert!(ppm.starts_with(b"P6\n3 2\n255\n"));
        assert_eq!(ppm.len(), b"P6\n3 2\n255\n".len() + 18);
        assert!(render_ppm(&spec, &w, 0, 2).is_err());
        assert!(Window::new(1.0, 1.0, 0.0, 1.0).is_err());
    }
}
