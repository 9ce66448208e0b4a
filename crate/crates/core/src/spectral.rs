//! Discrete Fourier transform along mode 3.
//!
//! Forward transforms are unnormalized; inverse transforms carry the `1/I3`
//! factor. Lengths that are powers of two use an iterative radix-2 kernel,
//! every other length goes through Bluestein's chirp-z reduction onto a
//! power-of-two convolution.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::math;
use crate::tensor::{Dims, Tensor3};

/// Absolute tolerance on the imaginary residual accepted by [`idft_mode3`],
/// applied relative to `max(1, peak magnitude)` of the output.
pub const IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
struct Radix2 {
    n: usize,
    /// `exp(-2πi k/n)` for `k < n/2`.
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let twiddles = (0..n / 2)
            .map(|k| {
                let (c, s) = math::unit_root(k, n);
                Complex64::new(c, -s)
            })
            .collect();
        Radix2 { n, twiddles }
    }

    /// In-place forward transform.
    fn forward(&self, buf: &mut [Complex64]) {
        let n = self.n;
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let u = buf[start + k];
                    let v = buf[start + k + half] * w;
                    buf[start + k] = u + v;
                    buf[start + k + half] = u - v;
                }
            }
            len <<= 1;
        }
    }
}

#[derive(Debug, Clone)]
struct Bluestein {
    n: usize,
    inner: Radix2,
    /// `exp(-iπ t²/n)` for `t < n`.
    chirp: Vec<Complex64>,
    /// Forward transform of the conjugate chirp, wrapped onto the inner length.
    kernel: Vec<Complex64>,
}

impl Bluestein {
    fn new(n: usize) -> Self {
        let m = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(m);
        // exp(-iπ t²/n) = exp(-2πi (t² mod 2n) / 2n)
        let chirp: Vec<Complex64> = (0..n)
            .map(|t| {
                let (c, s) = math::unit_root((t * t) % (2 * n), 2 * n);
                Complex64::new(c, -s)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for t in 1..n {
            kernel[t] = chirp[t].conj();
            kernel[m - t] = chirp[t].conj();
        }
        inner.forward(&mut kernel);
        Bluestein {
            n,
            inner,
            chirp,
            kernel,
        }
    }

    fn forward(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let m = self.inner.n;
        scratch.clear();
        scratch.resize(m, Complex64::new(0.0, 0.0));
        for t in 0..self.n {
            scratch[t] = buf[t] * self.chirp[t];
        }
        self.inner.forward(scratch);
        for (s, k) in scratch.iter_mut().zip(&self.kernel) {
            *s = (*s * k).conj();
        }
        // inverse via conjugation: ifft(x) = conj(fft(conj(x))) / m
        self.inner.forward(scratch);
        let scale = 1.0 / m as f64;
        for k in 0..self.n {
            buf[k] = scratch[k].conj() * scale * self.chirp[k];
        }
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Radix2(Radix2),
    Bluestein(Bluestein),
}

/// Reusable transform of a fixed length.
#[derive(Debug, Clone)]
pub struct FftPlan {
    kernel: Kernel,
    scratch: Vec<Complex64>,
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "transform length must be positive");
        let kernel = if n.is_power_of_two() {
            Kernel::Radix2(Radix2::new(n))
        } else {
            Kernel::Bluestein(Bluestein::new(n))
        };
        FftPlan {
            kernel,
            scratch: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        match &self.kernel {
            Kernel::Radix2(r) => r.n,
            Kernel::Bluestein(b) => b.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&mut self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len());
        match &self.kernel {
            Kernel::Radix2(r) => r.forward(buf),
            Kernel::Bluestein(b) => b.forward(buf, &mut self.scratch),
        }
    }

    /// Inverse transform in place, including the `1/n` factor.
    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        for v in buf.iter_mut() {
            *v = v.conj();
        }
        self.forward(buf);
        let scale = 1.0 / self.len() as f64;
        for v in buf.iter_mut() {
            *v = v.conj() * scale;
        }
    }
}

/// Complex image of a real tensor under the mode-3 DFT, stored with the same
/// tube-contiguous layout as [`Tensor3`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTensor3 {
    dims: Dims,
    data: Vec<Complex64>,
}

impl SpectralTensor3 {
    pub fn zeros(dims: Dims) -> Self {
        SpectralTensor3 {
            dims,
            data: vec![Complex64::new(0.0, 0.0); dims.len()],
        }
    }

    pub fn from_vec(dims: Dims, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                actual: data.len(),
            });
        }
        Ok(SpectralTensor3 { dims, data })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i1: usize, i2: usize, k: usize) -> Complex64 {
        self.data[self.dims.index(i1, i2, k)]
    }

    /// Frequency slice `k` as an `I1 x I2` matrix.
    pub fn slice(&self, k: usize) -> CMatrix {
        let d = self.dims;
        CMatrix::from_fn(d.i1, d.i2, |r, c| self.data[d.index(r, c, k)])
    }

    pub fn set_slice(&mut self, k: usize, m: &CMatrix) {
        let d = self.dims;
        assert_eq!((m.rows(), m.cols()), (d.i1, d.i2));
        for r in 0..d.i1 {
            for c in 0..d.i2 {
                self.data[d.index(r, c, k)] = m.get(r, c);
            }
        }
    }

    /// Fills slice `n - k` with the conjugate of slice `k` for every
    /// `1 <= k < n/2`, which is what the spectrum of a real tensor looks like.
    pub(crate) fn mirror_conjugate_half(&mut self) {
        let d = self.dims;
        let n = d.i3;
        for tube in self.data.chunks_exact_mut(n) {
            for k in (n / 2 + 1)..n {
                tube[k] = tube[n - k].conj();
            }
        }
    }

    /// Largest `|Â(k) - conj(Â(n-k))|` over all tubes.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.dims.i3;
        let mut worst = 0.0f64;
        for tube in self.data.chunks_exact(n) {
            worst = worst.max(tube[0].im.abs());
            for k in 1..n {
                worst = worst.max((tube[k] - tube[n - k].conj()).norm());
            }
        }
        worst
    }
}

/// Forward DFT of every tube.
pub fn dft_mode3(a: &Tensor3) -> SpectralTensor3 {
    let dims = a.dims();
    let mut plan = FftPlan::new(dims.i3);
    let mut data: Vec<Complex64> = a.as_slice().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let n = dims.i3;
    for tube in data.chunks_exact_mut(n) {
        plan.forward(tube);
        // pin the symmetry a real input implies, removing rounding noise
        tube[0].im = 0.0;
        if n.is_multiple_of(2) {
            tube[n / 2].im = 0.0;
        }
        for k in (n / 2 + 1)..n {
            tube[k] = tube[n - k].conj();
        }
    }
    SpectralTensor3 { dims, data }
}

/// Inverse DFT of every tube, returning the real part.
///
/// Fails if the imaginary residual exceeds [`IMAG_TOL`]·max(1, peak).
pub fn idft_mode3(s: &SpectralTensor3) -> Result<Tensor3> {
    let dims = s.dims;
    let mut plan = FftPlan::new(dims.i3);
    let mut buf = s.data.clone();
    for tube in buf.chunks_exact_mut(dims.i3) {
        plan.inverse(tube);
    }
    let mut peak = 0.0f64;
    let mut residual = 0.0f64;
    for v in &buf {
        peak = peak.max(v.re.abs());
        residual = residual.max(v.im.abs());
    }
    if !(residual <= IMAG_TOL * peak.max(1.0)) {
        return Err(Error::NotConjugateSymmetric { residual });
    }
    let data: Vec<f64> = buf.iter().map(|v| v.re).collect();
    Tensor3::from_vec(dims, data)
}
