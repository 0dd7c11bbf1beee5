//! Transfer-function estimation from sampled input/output records.
//!
//! The estimate is the plain spectral ratio `FFT(y) / FFT(u)` of a single
//! record. Bins where the input spectrum is below `1e-8` of its maximum carry
//! no information and are flagged invalid.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{domain, Error, Result};
use crate::modal_sim::SignalRecord;
use crate::scalar::{cabs, max, Real};

/// Input-magnitude floor relative to the spectrum maximum.
pub const COHERENCE_FLOOR: f64 = 1e-8;
/// Default FFT length.
pub const DEFAULT_NFFT: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    None,
    Hann,
}

impl Window {
    /// Window weights of length `n` (periodic Hann).
    pub fn weights<T: Real>(self, n: usize) -> Vec<T> {
        match self {
            Window::None => vec![T::one(); n],
            Window::Hann => (0..n)
                .map(|k| {
                    let x = T::two_pi() * T::from_usize_lossy(k) / T::from_usize_lossy(n);
                    T::lit(0.5) * (T::one() - x.cos())
                })
                .collect(),
        }
    }
}

/// Empirical transfer function on the non-negative FFT bins.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalTF<T> {
    /// `k * sample_rate / n_fft` for `k = 0..=n_fft/2`.
    pub frequencies: Vec<T>,
    /// Spectral ratio; zero where `valid` is false.
    pub h: Vec<Complex<T>>,
    pub valid: Vec<bool>,
    pub window: Window,
    pub n_fft: usize,
    pub sample_rate: T,
}

impl<T: Real> EmpiricalTF<T> {
    pub fn bin_width(&self) -> T {
        self.sample_rate / T::from_usize_lossy(self.n_fft)
    }

    pub fn magnitude(&self, k: usize) -> T {
        cabs(self.h[k])
    }
}

/// Full complex FFT of the first `n_fft` samples (zero-padded) after windowing.
pub fn spectrum<T: Real>(samples: &[T], n_fft: usize, window: Window) -> Vec<Complex<T>> {
    let w = window.weights::<T>(n_fft);
    let mut buf: Vec<Complex<T>> = (0..n_fft)
        .map(|k| Complex::new(samples.get(k).copied().unwrap_or_else(T::zero) * w[k], T::zero()))
        .collect();
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);
    buf
}

/// Spectral-ratio estimate over the first `n_fft` samples of both records.
pub fn estimate_tf<T: Real>(
    input: &SignalRecord<T>,
    output: &SignalRecord<T>,
    n_fft: usize,
    window: Window,
) -> Result<EmpiricalTF<T>> {
    estimate_tf_with(input, output, n_fft, window, false)
}

/// As [`estimate_tf`]; with `zero_pad` shorter records are padded with zeros.
pub fn estimate_tf_with<T: Real>(
    input: &SignalRecord<T>,
    output: &SignalRecord<T>,
    n_fft: usize,
    window: Window,
    zero_pad: bool,
) -> Result<EmpiricalTF<T>> {
    if n_fft < 2 || !n_fft.is_power_of_two() {
        return domain(format!("n_fft must be a power of two >= 2, got {n_fft}"));
    }
    if (input.sample_rate - output.sample_rate).abs() > T::lit(1e-9) * input.sample_rate {
        return domain(format!(
            "sample rates differ: input {} Hz, output {} Hz",
            input.sample_rate, output.sample_rate
        ));
    }
    if !zero_pad && (input.len() < n_fft || output.len() < n_fft) {
        return domain(format!(
            "records have {} and {} samples, fewer than n_fft = {n_fft}",
            input.len(),
            output.len()
        ));
    }
    let u = spectrum(&input.samples, n_fft, window);
    let y = spectrum(&output.samples, n_fft, window);
    let bins = n_fft / 2 + 1;
    let peak = u[..bins].iter().fold(T::zero(), |a, z| max(a, cabs(*z)));
    if peak == T::zero() {
        return Err(Error::Signal("input spectrum is identically zero".into()));
    }
    let floor = T::lit(COHERENCE_FLOOR) * peak;
    let mut h = Vec::with_capacity(bins);
    let mut valid = Vec::with_capacity(bins);
    for k in 0..bins {
        let ok = cabs(u[k]) >= floor;
        let ratio = if ok { y[k] / u[k] } else { Complex::new(T::zero(), T::zero()) };
        let ok = ok && ratio.re.is_finite() && ratio.im.is_finite();
        h.push(if ok { ratio } else { Complex::new(T::zero(), T::zero()) });
        valid.push(ok);
    }
    let df = input.sample_rate / T::from_usize_lossy(n_fft);
    Ok(EmpiricalTF {
        frequencies: (0..bins).map(|k| df * T::from_usize_lossy(k)).collect(),
        h,
        valid,
        window,
        n_fft,
        sample_rate: input.sample_rate,
    })
}

/// A resonance located on the empirical transfer function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T> {
    /// Frequency refined by a parabola through the three bins around the maximum.
    pub frequency_hz: T,
    pub magnitude: T,
    /// Index of the maximal bin.
    pub bin: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport<T> {
    /// Peaks sorted by frequency.
    pub peaks: Vec<Peak<T>>,
    /// Fewer local maxima than requested were found.
    pub shortfall: bool,
}

fn bin_range<T: Real>(tf: &EmpiricalTF<T>, f_min: T, f_max: T) -> Result<(usize, usize)> {
    let last = *tf.frequencies.last().expect("nonempty grid");
    if !(f_min >= T::zero() && f_min < f_max && f_max <= last) {
        return domain(format!("band [{f_min}, {f_max}] Hz is not inside the grid [0, {last}]"));
    }
    let df = tf.bin_width();
    let lo = (f_min / df).ceil().to_usize().unwrap_or(0);
    let hi = (f_max / df).floor().to_usize().unwrap_or(0).min(tf.frequencies.len() - 1);
    Ok((lo, hi))
}

/// Parabolic vertex offset (in bins) and height through `(−1, a), (0, b), (1, c)`.
fn parabola<T: Real>(a: T, b: T, c: T) -> (T, T) {
    let den = a - T::lit(2.0) * b + c;
    if den == T::zero() {
        return (T::zero(), b);
    }
    let delta = T::lit(0.5) * (a - c) / den;
    (delta, b - T::lit(0.25) * (a - c) * delta)
}

/// The `count` largest local maxima of `|H|` inside `[f_min, f_max]`.
pub fn find_modal_peaks<T: Real>(tf: &EmpiricalTF<T>, f_min: T, f_max: T, count: usize) -> Result<PeakReport<T>> {
    let (lo, hi) = bin_range(tf, f_min, f_max)?;
    let mut found = Vec::new();
    for k in lo.max(1)..=hi.min(tf.h.len().saturating_sub(2)) {
        if !(tf.valid[k - 1] && tf.valid[k] && tf.valid[k + 1]) {
            continue;
        }
        let (a, b, c) = (tf.magnitude(k - 1), tf.magnitude(k), tf.magnitude(k + 1));
        if b > a && b >= c {
            let (delta, height) = parabola(a, b, c);
            found.push(Peak {
                frequency_hz: (T::from_usize_lossy(k) + delta) * tf.bin_width(),
                magnitude: height,
                bin: k,
            });
        }
    }
    found.sort_by(|x, y| y.magnitude.partial_cmp(&x.magnitude).unwrap());
    let shortfall = found.len() < count;
    found.truncate(count);
    found.sort_by(|x, y| x.frequency_hz.partial_cmp(&y.frequency_hz).unwrap());
    Ok(PeakReport { peaks: found, shortfall })
}

/// Viscous damping `alpha = 2 pi Δf` from the half-power bandwidth around `peak_hz`.
///
/// The half-power band must span at least three bins; narrower peaks are not
/// resolved by the frequency grid and give a bandwidth error.
pub fn fit_damping<T: Real>(tf: &EmpiricalTF<T>, peak_hz: T) -> Result<T> {
    let df = tf.bin_width();
    let n = tf.h.len();
    let guess = (peak_hz / df).round().to_usize().filter(|&k| k < n);
    let Some(mut k) = guess else {
        return domain(format!("peak {peak_hz} Hz lies outside the grid"));
    };
    // climb to the local maximum
    loop {
        let up = k + 1 < n && tf.valid[k + 1] && tf.magnitude(k + 1) > tf.magnitude(k);
        let down = k > 0 && tf.valid[k - 1] && tf.magnitude(k - 1) > tf.magnitude(k);
        if up {
            k += 1;
        } else if down {
            k -= 1;
        } else {
            break;
        }
    }
    if !tf.valid[k] {
        return Err(Error::Bandwidth(format!("bin at {peak_hz} Hz is invalid")));
    }
    let peak = if k > 0 && k + 1 < n && tf.valid[k - 1] && tf.valid[k + 1] {
        parabola(tf.magnitude(k - 1), tf.magnitude(k), tf.magnitude(k + 1)).1
    } else {
        tf.magnitude(k)
    };
    let level = peak / T::lit(2.0).sqrt();

    let crossing = |from: usize, step: isize| -> Result<(T, usize)> {
        let mut i = from;
        let mut inside = 0;
        loop {
            let next = i as isize + step;
            if next < 0 || next as usize >= n || !tf.valid[next as usize] {
                return Err(Error::Bandwidth(format!(
                    "half-power point of the peak near {peak_hz:.4} Hz is not bracketed"
                )));
            }
            let j = next as usize;
            let (mi, mj) = (tf.magnitude(i), tf.magnitude(j));
            if mj < level {
                let frac = (mi - level) / (mi - mj);
                let f = tf.frequencies[i] + (tf.frequencies[j] - tf.frequencies[i]) * frac;
                return Ok((f, inside));
            }
            inside += 1;
            i = j;
        }
    };
    let (f_lo, left) = crossing(k, -1)?;
    let (f_hi, right) = crossing(k, 1)?;
    if left + right + 1 < 3 {
        return Err(Error::Bandwidth(format!(
            "half-power band of the peak near {peak_hz:.4} Hz is narrower than the bin spacing {df:.4} Hz"
        )));
    }
    Ok(T::two_pi() * (f_hi - f_lo))
}
