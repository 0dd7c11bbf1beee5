use std::f64::consts::TAU;

use num_complex::Complex;
use orthoplate::modal_sim::{modal_blocks, SignalLabel};
use orthoplate::sysid::{estimate_tf_with, fit_damping};
use orthoplate::transfer::TfTerm;
use orthoplate::{
    build_modal_model, build_transfer, estimate_tf, find_modal_peaks, simulate, CrossCoupling, Excitation,
    ModalModel64, PlateConfig, PlateConfig64, SignalRecord, SimOptions, TransferFunction64, Window,
};

fn damped(alpha: f64) -> PlateConfig64 {
    let mut c = PlateConfig { coupling: CrossCoupling::Galerkin, ..PlateConfig::reference_free_plate() };
    c.params.alpha = alpha;
    c
}

fn elastic_set(model: &ModalModel64) -> Vec<usize> {
    model.elastic_modes().map(|m| m.index).collect()
}

#[test]
fn residue_linearity_and_additivity() {
    let config = damped(0.8);
    let model = build_modal_model(&config).unwrap();
    let tf = build_transfer(&model, &config, &[3, 4, 5]).unwrap();
    let mut scaled = tf.clone();
    for t in &mut scaled.terms {
        t.residue *= -2.5;
    }
    let bigger = build_transfer(&model, &config, &[3, 4, 5, 9]).unwrap();
    for f in [0.0, 7.0, 25.0, 60.0, 170.0] {
        let h = tf.eval_hz(f).unwrap();
        assert!((scaled.eval_hz(f).unwrap() - h * -2.5).norm() <= 1e-12 * h.norm());
        let added = bigger.term_value(&bigger.terms[3], Complex::new(0.0, TAU * f)).unwrap() / bigger.rho_h;
        assert!((bigger.eval_hz(f).unwrap() - h - added).norm() <= 1e-12 * h.norm().max(added.norm()));
    }
}

#[test]
fn real_coefficient_symmetry() {
    let config = damped(0.3);
    let model = build_modal_model(&config).unwrap();
    let tf = build_transfer(&model, &config, &elastic_set(&model)).unwrap();
    for w in [1.0, 50.0, 160.0, 523.0] {
        let pos = tf.eval(Complex::new(0.0, w)).unwrap();
        let neg = tf.eval(Complex::new(0.0, -w)).unwrap();
        assert!((neg - pos.conj()).norm() <= 1e-14 * pos.norm());
        assert!(pos.im * neg.im <= 0.0);
    }
}

fn single(lambda: f64, alpha: f64) -> TransferFunction64 {
    TransferFunction64 {
        terms: vec![TfTerm { mode: 0, residue: 1.0, lambda, norm_sq: 1.0 }],
        alpha,
        rho_h: 1.0,
        gain: 1.0,
        repeated: vec![],
    }
}

#[test]
fn magnitude_grows_near_poles() {
    for (lambda, alpha) in [(1.0e4, 0.5), (2.5e5, 1.0), (4.0e6, 2.0)] {
        let tf = single(lambda, alpha);
        let h0 = tf.eval(Complex::new(0.0, 0.0)).unwrap().norm();
        let disc = Complex::new(alpha * alpha - 4.0 * lambda, 0.0).sqrt();
        let pole = (Complex::new(-alpha, 0.0) + disc) * 0.5;
        let dir = pole / pole.norm();
        let ratio = |d: f64| tf.eval(pole + dir * (d * lambda.sqrt())).unwrap().norm() / h0;
        let (r6, r7) = (ratio(1e-6), ratio(1e-7));
        assert!(r6 > 1e5, "{r6}");
        assert!(r7 > 1e6, "{r7}");
        assert!((r7 / r6 - 10.0).abs() < 0.1);
    }
}

#[test]
fn zero_force_gives_zero_output() {
    let config = damped(1.0);
    let model = build_modal_model(&config).unwrap();
    let exc = Excitation::Pulse { width: 1e-3, amplitude: 0.0 };
    let (_, y) = simulate(&model, &config, &exc, 0.2, 5000.0, &SimOptions::default()).unwrap();
    assert!(y.samples.iter().all(|v| *v == 0.0));
}

#[test]
fn lti_scaling_and_superposition() {
    let config = damped(1.0);
    let model = build_modal_model(&config).unwrap();
    let opts = SimOptions::default();
    let run = |e: &Excitation<f64>| simulate(&model, &config, e, 0.3, 4000.0, &opts).unwrap().1.samples;
    let a = Excitation::Pulse { width: 2e-3, amplitude: 1.0 };
    let doubled = Excitation::Pulse { width: 2e-3, amplitude: 2.0 };
    let ya = run(&a);
    let scale = ya.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (x, y) in ya.iter().zip(run(&doubled)) {
        assert!((2.0 * x - y).abs() <= 1e-12 * scale);
    }
    let chirp = Excitation::Chirp { f0: 5.0, f1: 150.0, amplitude: 0.7 };
    let fa = a.sample(1200, 4000.0).unwrap();
    let fb = chirp.sample(1200, 4000.0).unwrap();
    let sum = SignalRecord::new(4000.0, fa.iter().zip(&fb).map(|(p, q)| p + q).collect(), SignalLabel::Input).unwrap();
    let yb = run(&chirp);
    let ys = run(&Excitation::Samples(sum));
    let scale = ys.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for ((s, p), q) in ys.iter().zip(&ya).zip(&yb) {
        assert!((s - p - q).abs() <= 1e-10 * scale);
    }
}

#[test]
fn modal_energy_decays_after_forcing_stops() {
    let config = damped(2.0);
    let model = build_modal_model(&config).unwrap();
    let fs = 2000.0;
    let blocks = modal_blocks(&model, &config, fs, false).unwrap();
    let on = 40;
    let energy = |states: &[nalgebra::Vector2<f64>]| -> f64 {
        states.iter().zip(&blocks).map(|(x, b)| x[1] * x[1] + b.lambda * x[0] * x[0]).sum()
    };
    let mut states = vec![nalgebra::Vector2::zeros(); blocks.len()];
    let mut prev = f64::INFINITY;
    for k in 0..4000 {
        let u = if k < on { 1.0 } else { 0.0 };
        for (x, b) in states.iter_mut().zip(&blocks) {
            *x = b.step(x, u);
        }
        if k >= on {
            let e = energy(&states);
            assert!(e <= prev * (1.0 + 1e-12), "step {k}");
            prev = e;
        }
    }
    assert!(prev > 0.0);
}

#[test]
fn impulse_envelope_decays_at_half_alpha() {
    let alpha = 3.0;
    let config = damped(alpha);
    let mut model = build_modal_model(&config).unwrap();
    model.modes.retain(|m| m.index == 4);
    let fs = 10_000.0;
    let (_, y) = simulate(&model, &config, &Excitation::Pulse { width: 1e-4, amplitude: 1.0 }, 2.0, fs, &SimOptions::default())
        .unwrap();
    let period = (fs / model.modes[0].frequency_hz) as usize;
    let peak = |from: usize| y.samples[from..from + period].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (t0, t1) = (0.2, 1.6);
    let ratio = peak((t1 * fs) as usize) / peak((t0 * fs) as usize);
    let expect = (-alpha * (t1 - t0) / 2.0).exp();
    assert!((ratio - expect).abs() < 0.01 * expect, "{ratio} vs {expect}");
}

#[test]
fn sinusoidal_steady_state_matches_transfer() {
    let config = damped(5.0);
    let model = build_modal_model(&config).unwrap();
    let set = elastic_set(&model);
    let tf = build_transfer(&model, &config, &set).unwrap();
    let fs = 20_000.0;
    for f in [12.0, 25.0, 55.0, 120.0] {
        let n = (6.0 * fs) as usize;
        let force: Vec<f64> = (0..n).map(|k| (TAU * f * k as f64 / fs).sin()).collect();
        let exc = Excitation::Samples(SignalRecord::new(fs, force, SignalLabel::Input).unwrap());
        let (_, y) = simulate(&model, &config, &exc, 6.0, fs, &SimOptions::default()).unwrap();
        let tail = &y.samples[(4.0 * fs) as usize..];
        let amp = tail.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let h = tf.eval_hz(f).unwrap().norm();
        assert!((amp - h).abs() < 1e-3 * h, "f = {f}: {amp} vs {h}");
    }
}

#[test]
fn oversized_request_is_a_resource_error() {
    let config = damped(1.0);
    let model = build_modal_model(&config).unwrap();
    let opts = SimOptions { max_samples: 1000, ..SimOptions::default() };
    let r = simulate(&model, &config, &Excitation::default_pulse(), 1.0, 30_000.0, &opts);
    assert!(matches!(r, Err(orthoplate::Error::Resource(_))));
}

fn long_round_trip(alpha: f64, window: Window) -> (ModalModel64, TransferFunction64, orthoplate::EmpiricalTF64) {
    let config = damped(alpha);
    let model = build_modal_model(&config).unwrap();
    let tf = build_transfer(&model, &config, &elastic_set(&model)).unwrap();
    let fs = 2000.0;
    let n = 1 << 17;
    let (u, y) = simulate(&model, &config, &Excitation::default_pulse(), n as f64 / fs, fs, &SimOptions::default())
        .unwrap();
    (model, tf, estimate_tf(&u, &y, n, window).unwrap())
}

#[test]
fn estimate_converges_to_transfer_function() {
    let (_, tf, est) = long_round_trip(1.0, Window::None);
    let mut worst = 0.0f64;
    for (k, f) in est.frequencies.iter().enumerate() {
        if *f < 5.0 || *f > 150.0 || !est.valid[k] {
            continue;
        }
        let h = tf.eval_hz(*f).unwrap().norm();
        worst = worst.max((est.h[k].norm() - h).abs() / h);
    }
    assert!(worst < 0.05, "max relative error {worst}");
}

#[test]
fn window_does_not_move_peaks() {
    let config = damped(2.0);
    let model = build_modal_model(&config).unwrap();
    let fs = 1000.0;
    let n = 1 << 16;
    // a pulse in the middle of the record, where the Hann window is near one
    let mut force = vec![0.0; n];
    force[n / 2..n / 2 + 2].fill(1.0);
    let exc = Excitation::Samples(SignalRecord::new(fs, force, SignalLabel::Input).unwrap());
    let (u, y) = simulate(&model, &config, &exc, n as f64 / fs, fs, &SimOptions::default()).unwrap();
    let plain = estimate_tf(&u, &y, n, Window::None).unwrap();
    let hann = estimate_tf(&u, &y, n, Window::Hann).unwrap();
    let a = find_modal_peaks(&plain, 20.0, 100.0, 2).unwrap();
    let b = find_modal_peaks(&hann, 20.0, 100.0, 2).unwrap();
    assert_eq!(a.peaks.len(), 2);
    assert_eq!(b.peaks.len(), 2);
    for (p, q) in a.peaks.iter().zip(&b.peaks) {
        assert!((p.frequency_hz - q.frequency_hz).abs() < plain.bin_width(), "{} vs {}", p.frequency_hz, q.frequency_hz);
    }
}

#[test]
fn doubling_alpha_doubles_estimate() {
    let estimate = |alpha: f64| {
        let (model, _, est) = long_round_trip(alpha, Window::None);
        fit_damping(&est, model.modes[4].frequency_hz).unwrap()
    };
    let (a, b) = (estimate(1.0), estimate(2.0));
    assert!((b / a - 2.0).abs() < 0.3, "{a} -> {b}");
}

#[test]
fn padded_estimate_accepts_short_records() {
    let config = damped(1.0);
    let model = build_modal_model(&config).unwrap();
    let (u, y) = simulate(&model, &config, &Excitation::default_pulse(), 0.5, 2000.0, &SimOptions::default()).unwrap();
    assert!(estimate_tf(&u, &y, 1024, Window::None).is_err());
    let est = estimate_tf_with(&u, &y, 1024, Window::None, true).unwrap();
    assert_eq!(est.frequencies.len(), 513);
    assert!(est.h.iter().all(|h| h.re.is_finite() && h.im.is_finite()));
}
