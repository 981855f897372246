//! Normalized grayscale raster.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Row-major grayscale image with intensities in `[0, 1]`.
///
/// Pixel `(x, y)` has its center at continuous coordinate `(x, y)`; x grows
/// rightward and y downward, so the frame spans `[-0.5, width - 0.5]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage("zero dimension"));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidImage("pixel count does not match dimensions"));
        }
        if pixels.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidImage("intensity outside [0, 1]"));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    /// Contrast inversion `f -> 1 - f`.
    pub fn inverted(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|v| 1.0 - v).collect(),
        }
    }

    /// Circular shift: the pixel at `(x, y)` moves to `(x + dx, y + dy)` modulo the frame.
    pub fn shifted(&self, dx: isize, dy: isize) -> Self {
        let (w, h) = (self.width as isize, self.height as isize);
        let mut pixels = vec![0.0; self.pixels.len()];
        for y in 0..h {
            for x in 0..w {
                let nx = (x + dx).rem_euclid(w) as usize;
                let ny = (y + dy).rem_euclid(h) as usize;
                pixels[ny * self.width + nx] = self.pixels[(y * w + x) as usize];
            }
        }
        Self { width: self.width, height: self.height, pixels }
    }
}
