//! Time-domain response of the modal equations
//! `q_n'' + alpha q_n' + lambda_n q_n = F(t) W_n(s0) / (rho h ||W_n||^2)`
//! with output `y = sum_n q_n W_n,x1x1(c0)`.
//!
//! Each mode is a 2x2 LTI block discretized exactly under a zero-order hold
//! on the input, so results are exact for piecewise-constant forcing at any
//! step size. Initial conditions are zero.

use nalgebra::{Matrix2, Matrix3, Vector2};

use crate::error::{domain, Error, Result};
use crate::galerkin::ModalModel;
use crate::plate::PlateConfig;
use crate::scalar::Real;

/// Default cap on the number of samples a single simulation may produce.
pub const DEFAULT_MAX_SAMPLES: usize = 1 << 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalLabel {
    Input,
    Output,
}

/// Uniformly sampled real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalRecord<T> {
    pub sample_rate: T,
    pub samples: Vec<T>,
    pub label: SignalLabel,
}

impl<T: Real> SignalRecord<T> {
    pub fn new(sample_rate: T, samples: Vec<T>, label: SignalLabel) -> Result<Self> {
        if !(sample_rate > T::zero() && sample_rate.is_finite()) {
            return domain(format!("sample rate must be positive, got {sample_rate}"));
        }
        if samples.is_empty() {
            return domain("a signal needs at least one sample");
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return domain(format!("sample {i} is not finite"));
        }
        Ok(Self { sample_rate, samples, label })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of sample `k` in seconds.
    pub fn time(&self, k: usize) -> T {
        T::from_usize_lossy(k) / self.sample_rate
    }
}

/// Force applied at the actuator point.
#[derive(Debug, Clone, PartialEq)]
pub enum Excitation<T> {
    /// Rectangular pulse starting at `t = 0`; `width` in s, `amplitude` in N.
    Pulse { width: T, amplitude: T },
    /// Linear chirp from `f0` to `f1` Hz over the whole simulated duration.
    Chirp { f0: T, f1: T, amplitude: T },
    /// Recorded force samples; must share the simulation sample rate.
    Samples(SignalRecord<T>),
}

impl<T: Real> Excitation<T> {
    /// Pulse of 1 ms and 1 N.
    pub fn default_pulse() -> Self {
        Excitation::Pulse { width: T::lit(1e-3), amplitude: T::one() }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Excitation::Pulse { width, amplitude } => {
                if !(*width > T::zero()) || !amplitude.is_finite() {
                    return domain("pulse width must be positive and amplitude finite");
                }
            }
            Excitation::Chirp { f0, f1, amplitude } => {
                if !(*f0 >= T::zero() && f0 < f1) || !amplitude.is_finite() {
                    return domain("chirp needs 0 <= f0 < f1 and a finite amplitude");
                }
            }
            Excitation::Samples(_) => {}
        }
        Ok(())
    }

    /// Force samples held over each interval `[k/fs, (k+1)/fs)`.
    pub fn sample(&self, len: usize, sample_rate: T) -> Result<Vec<T>> {
        self.validate()?;
        let duration = T::from_usize_lossy(len) / sample_rate;
        Ok(match self {
            Excitation::Pulse { width, amplitude } => {
                let on = (*width * sample_rate).round().to_usize().unwrap_or(usize::MAX).max(1);
                (0..len).map(|k| if k < on { *amplitude } else { T::zero() }).collect()
            }
            Excitation::Chirp { f0, f1, amplitude } => {
                let rate = (*f1 - *f0) / duration;
                (0..len)
                    .map(|k| {
                        let t = T::from_usize_lossy(k) / sample_rate;
                        *amplitude * (T::two_pi() * (*f0 * t + rate * t * t * T::lit(0.5))).sin()
                    })
                    .collect()
            }
            Excitation::Samples(rec) => {
                if (rec.sample_rate - sample_rate).abs() > T::lit(1e-9) * sample_rate {
                    return domain(format!(
                        "excitation sampled at {} Hz but simulation runs at {} Hz",
                        rec.sample_rate, sample_rate
                    ));
                }
                (0..len).map(|k| rec.samples.get(k).copied().unwrap_or_else(T::zero)).collect()
            }
        })
    }
}

/// Simulation switches.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Include rigid-body modes (they drift under a net impulse when undamped).
    pub include_rigid: bool,
    pub max_samples: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { include_rigid: false, max_samples: DEFAULT_MAX_SAMPLES }
    }
}

/// Zero-order-hold discretization of one modal oscillator.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalBlock<T: Real> {
    pub lambda: T,
    /// State transition `exp(A dt)` for the state `(q, q')`.
    pub phi: Matrix2<T>,
    /// Input map `int_0^dt exp(A s) ds B`.
    pub gamma: Vector2<T>,
    /// Output weight on `q`.
    pub out: T,
}

impl<T: Real> ModalBlock<T> {
    /// Block for `q'' + alpha q' + lambda q = input_gain u`, `y = out q`.
    pub fn new(lambda: T, alpha: T, input_gain: T, out: T, dt: T) -> Self {
        let z = T::zero();
        let aug = Matrix3::new(z, T::one(), z, -lambda, -alpha, input_gain, z, z, z) * dt;
        let e = aug.exp();
        Self {
            lambda,
            phi: Matrix2::new(e[(0, 0)], e[(0, 1)], e[(1, 0)], e[(1, 1)]),
            gamma: Vector2::new(e[(0, 2)], e[(1, 2)]),
            out,
        }
    }

    #[inline]
    pub fn step(&self, state: &Vector2<T>, u: T) -> Vector2<T> {
        self.phi * state + self.gamma * u
    }
}

/// Discretized blocks for every simulated mode of `model`.
pub fn modal_blocks<T: Real>(
    model: &ModalModel<T>,
    config: &PlateConfig<T>,
    sample_rate: T,
    include_rigid: bool,
) -> Result<Vec<ModalBlock<T>>> {
    config.params.validate()?;
    let dt = T::one() / sample_rate;
    let rho_h = config.params.rho_h();
    model
        .modes
        .iter()
        .filter(|m| include_rigid || !m.rigid)
        .map(|m| {
            let gain = model.eval_mode_shape(m.index, (0, 0), config.s0)? / (rho_h * m.norm_sq);
            let out = model.eval_mode_shape(m.index, (2, 0), config.c0)?;
            Ok(ModalBlock::new(m.lambda, config.params.alpha, gain, out, dt))
        })
        .collect()
}

/// Simulates the sensor output for the given force excitation.
///
/// Returns the held force samples and the output samples, both
/// `round(duration * sample_rate)` long; output sample `k` is taken at
/// `t = k / fs` before input sample `k` is applied.
pub fn simulate<T: Real>(
    model: &ModalModel<T>,
    config: &PlateConfig<T>,
    excitation: &Excitation<T>,
    duration: T,
    sample_rate: T,
    options: &SimOptions,
) -> Result<(SignalRecord<T>, SignalRecord<T>)> {
    if !(duration > T::zero() && duration.is_finite()) {
        return domain("duration must be positive");
    }
    if !(sample_rate > T::zero() && sample_rate.is_finite()) {
        return domain("sample rate must be positive");
    }
    let len_f = (duration * sample_rate).round();
    let len = match len_f.to_usize() {
        Some(n) if n <= options.max_samples => n.max(1),
        _ => {
            return Err(Error::Resource(format!(
                "{len_f} samples requested, budget is {}",
                options.max_samples
            )))
        }
    };
    let force = excitation.sample(len, sample_rate)?;
    let blocks = modal_blocks(model, config, sample_rate, options.include_rigid)?;
    let mut output = vec![T::zero(); len];
    for block in &blocks {
        let mut x = Vector2::zeros();
        for (y, u) in output.iter_mut().zip(&force) {
            *y += block.out * x[0];
            x = block.step(&x, *u);
        }
        if !(x[0].is_finite() && x[1].is_finite()) {
            return Err(Error::Numerical(format!(
                "state of mode with lambda {} became non-finite",
                block.lambda
            )));
        }
    }
    Ok((
        SignalRecord::new(sample_rate, force, SignalLabel::Input)?,
        SignalRecord::new(sample_rate, output, SignalLabel::Output)?,
    ))
}
