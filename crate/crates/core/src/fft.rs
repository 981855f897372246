//! Small complex FFT for the spectral derivative filters.
//!
//! Power-of-two lengths use an iterative radix-2 transform; every other length
//! goes through Bluestein's chirp-z reduction onto a power-of-two convolution.
//! Twiddles are evaluated directly (no recurrences) so the error stays at a few
//! ulps per stage.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // f64 has inherent methods once std is linked
use num_traits::Float;

pub(crate) struct Fft {
    len: usize,
    algo: Algo,
}

enum Algo {
    Radix2(Radix2),
    Bluestein {
        inner: Radix2,
        /// exp(-i pi k^2 / n) for k in 0..n
        chirp: Vec<Complex64>,
        /// spectrum of the conjugate chirp, zero padded and wrapped
        kernel: Vec<Complex64>,
    },
}

struct Radix2 {
    len: usize,
    /// exp(-2 pi i k / len) for k in 0..len/2
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    fn new(len: usize) -> Self {
        debug_assert!(len.is_power_of_two());
        let twiddles = (0..len / 2)
            .map(|k| {
                let a = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        Self { len, twiddles }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let n = self.len;
        debug_assert_eq!(buf.len(), n);
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let step = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let w = self.twiddles[k * step];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }
}

impl Fft {
    pub(crate) fn new(len: usize) -> Self {
        if len.is_power_of_two() {
            return Self { len, algo: Algo::Radix2(Radix2::new(len)) };
        }
        let padded = (2 * len - 1).next_power_of_two();
        let inner = Radix2::new(padded);
        // k^2 mod 2n keeps the phase argument small.
        let chirp: Vec<Complex64> = (0..len)
            .map(|k| {
                let k2 = ((k as u128 * k as u128) % (2 * len as u128)) as f64;
                let a = -PI * k2 / len as f64;
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); padded];
        kernel[0] = chirp[0].conj();
        for k in 1..len {
            kernel[k] = chirp[k].conj();
            kernel[padded - k] = chirp[k].conj();
        }
        inner.forward(&mut kernel);
        Self { len, algo: Algo::Bluestein { inner, chirp, kernel } }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    /// Unnormalized forward DFT: X[k] = sum_n x[n] exp(-2 pi i k n / N).
    pub(crate) fn forward(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        debug_assert_eq!(buf.len(), self.len);
        match &self.algo {
            Algo::Radix2(r) => r.forward(buf),
            Algo::Bluestein { inner, chirp, kernel } => {
                let m = inner.len;
                scratch.clear();
                scratch.resize(m, Complex64::new(0.0, 0.0));
                for (s, (x, c)) in scratch.iter_mut().zip(buf.iter().zip(chirp)) {
                    *s = x * c;
                }
                inner.forward(scratch);
                for (s, k) in scratch.iter_mut().zip(kernel) {
                    *s = (*s * k).conj();
                }
                // inverse via conjugation; the 1/m normalisation is folded below
                inner.forward(scratch);
                let norm = 1.0 / m as f64;
                for (x, (s, c)) in buf.iter_mut().zip(scratch.iter().zip(chirp)) {
                    *x = s.conj() * c * norm;
                }
            }
        }
    }

    /// Normalized inverse DFT (includes the 1/N factor).
    pub(crate) fn inverse(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        for v in buf.iter_mut() {
            *v = v.conj();
        }
        self.forward(buf, scratch);
        let norm = 1.0 / self.len as f64;
        for v in buf.iter_mut() {
            *v = v.conj() * norm;
        }
    }
}

/// Row/column 2-D transform over a row-major `width x height` buffer.
pub(crate) struct Fft2d {
    rows: Fft,
    cols: Fft,
}

impl Fft2d {
    pub(crate) fn new(width: usize, height: usize) -> Self {
        Self { rows: Fft::new(width), cols: Fft::new(height) }
    }

    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.apply(data, false);
    }

    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.apply(data, true);
    }

    fn apply(&self, data: &mut [Complex64], inverse: bool) {
        let (w, h) = (self.rows.len(), self.cols.len());
        debug_assert_eq!(data.len(), w * h);
        let mut scratch = Vec::new();
        for row in data.chunks_exact_mut(w) {
            if inverse {
                self.rows.inverse(row, &mut scratch);
            } else {
                self.rows.forward(row, &mut scratch);
            }
        }
        let mut column = vec![Complex64::new(0.0, 0.0); h];
        for x in 0..w {
            for y in 0..h {
                column[y] = data[y * w + x];
            }
            if inverse {
                self.cols.inverse(&mut column, &mut scratch);
            } else {
                self.cols.forward(&mut column, &mut scratch);
            }
            for y in 0..h {
                data[y * w + x] = column[y];
            }
        }
    }
}
