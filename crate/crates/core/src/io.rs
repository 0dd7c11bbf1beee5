//! CSV serialization of signals, frequency responses and modal tables.
//!
//! Numbers are written in scientific notation with 9 significant digits and
//! LF line endings.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::galerkin::ModalModel;
use crate::modal_sim::{SignalLabel, SignalRecord};
use crate::scalar::{cabs, carg, Real};
use crate::sysid::EmpiricalTF;
use crate::transfer::{principal_phase, ResponsePoint};

pub const SIGNAL_HEADER: &str = "time_s,value";
pub const RESPONSE_HEADER: &str = "frequency_hz,magnitude,phase_rad";
pub const EMPIRICAL_HEADER: &str = "frequency_hz,magnitude,phase_rad,valid";
pub const MODES_HEADER: &str = "index,lambda,frequency_hz,is_rigid_body";

/// Formats a value with 9 significant digits.
pub fn fmt_num<T: Real>(v: T) -> String {
    format!("{:.8e}", v.to_f64_lossy())
}

pub fn signal_csv<T: Real>(rec: &SignalRecord<T>) -> String {
    let mut out = String::with_capacity(32 * (rec.len() + 1));
    out.push_str(SIGNAL_HEADER);
    out.push('\n');
    for (k, v) in rec.samples.iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_num(rec.time(k)), fmt_num(*v));
    }
    out
}

fn parse_field<T: Real>(field: &str, row: usize, name: &str) -> Result<T> {
    let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
        row,
        message: format!("{name} `{}` is not a number", field.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse { row, message: format!("{name} is not finite") });
    }
    Ok(T::lit(v))
}

/// Non-empty lines with their 1-based row numbers.
fn rows(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// Parses a signal CSV.
///
/// With a `time_s,value` header the sample rate is taken from the time
/// column, which must be uniform. A raw single column of values (optionally
/// headed `value`) needs `sample_rate`.
pub fn parse_signal_csv<T: Real>(text: &str, sample_rate: Option<T>, label: SignalLabel) -> Result<SignalRecord<T>> {
    let mut it = rows(text).peekable();
    let Some(&(first_row, first)) = it.peek() else {
        return Err(Error::Parse { row: 1, message: "file is empty".into() });
    };
    let header: Vec<&str> = first.split(',').map(str::trim).collect();
    let timed = header == ["time_s", "value"];
    if timed || header == ["value"] {
        it.next();
    } else if header.len() != 1 || header[0].parse::<f64>().is_err() {
        return Err(Error::Parse {
            row: first_row,
            message: format!("expected header `{SIGNAL_HEADER}` or a single numeric column"),
        });
    }

    if !timed {
        let Some(fs) = sample_rate else {
            return domain("a single-column signal needs an explicit sample rate");
        };
        let mut samples = Vec::new();
        for (row, line) in it {
            if line.contains(',') {
                return Err(Error::Parse { row, message: "expected one column".into() });
            }
            samples.push(parse_field(line, row, "value")?);
        }
        return SignalRecord::new(fs, samples, label);
    }

    let mut times = Vec::new();
    let mut samples = Vec::new();
    let mut last_row = first_row;
    for (row, line) in it {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(Error::Parse { row, message: format!("expected 2 columns, found {}", fields.len()) });
        }
        times.push(parse_field::<T>(fields[0], row, "time_s")?);
        samples.push(parse_field(fields[1], row, "value")?);
        last_row = row;
    }
    let n = times.len();
    if n == 0 {
        return Err(Error::Parse { row: last_row, message: "no samples after the header".into() });
    }
    let fs = if n == 1 {
        sample_rate.ok_or_else(|| Error::Domain("a one-sample signal needs an explicit sample rate".into()))?
    } else {
        let span = times[n - 1] - times[0];
        if !(span > T::zero()) {
            return Err(Error::Parse { row: last_row, message: "time column is not increasing".into() });
        }
        let fs = T::from_usize_lossy(n - 1) / span;
        // written times carry 9 significant digits; recover integral rates exactly
        let rounded = fs.round();
        if (fs - rounded).abs() <= T::lit(1e-6) * fs {
            rounded
        } else {
            fs
        }
    };
    let dt = T::one() / fs;
    for (k, t) in times.iter().enumerate() {
        let expect = times[0] + T::from_usize_lossy(k) * dt;
        if (*t - expect).abs() > T::lit(1e-3) * dt + T::lit(1e-8) * t.abs() {
            return Err(Error::Parse {
                row: first_row + 1 + k,
                message: format!("time {t} breaks uniform sampling at {fs} Hz"),
            });
        }
    }
    SignalRecord::new(fs, samples, label)
}

pub fn response_csv<T: Real>(points: &[ResponsePoint<T>]) -> String {
    let mut out = String::from(RESPONSE_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(out, "{},{},{}", fmt_num(p.frequency_hz), fmt_num(p.magnitude), fmt_num(p.phase_rad));
    }
    out
}

pub fn empirical_tf_csv<T: Real>(tf: &EmpiricalTF<T>) -> String {
    let mut out = String::from(EMPIRICAL_HEADER);
    out.push('\n');
    for k in 0..tf.h.len() {
        let phase = if tf.valid[k] { principal_phase(carg(tf.h[k])) } else { T::zero() };
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_num(tf.frequencies[k]),
            fmt_num(cabs(tf.h[k])),
            fmt_num(phase),
            u8::from(tf.valid[k])
        );
    }
    out
}

pub fn modes_csv<T: Real>(model: &ModalModel<T>) -> String {
    let mut out = String::from(MODES_HEADER);
    out.push('\n');
    for m in &model.modes {
        let _ = writeln!(out, "{},{},{},{}", m.index, fmt_num(m.lambda), fmt_num(m.frequency_hz), m.rigid);
    }
    out
}

/// One row per matrix row, no header.
pub fn matrix_csv<T: Real>(m: &DMatrix<T>) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = m.row(r).iter().map(|v| fmt_num(*v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses a numeric table with the given header into rows of `f64`.
///
/// Columns holding `true`/`false` are read as 1 and 0.
pub fn parse_table(text: &str, header: &str) -> Result<Vec<Vec<f64>>> {
    let mut it = rows(text);
    let Some((row, first)) = it.next() else {
        return Err(Error::Parse { row: 1, message: "file is empty".into() });
    };
    if first.trim() != header {
        return Err(Error::Parse { row, message: format!("expected header `{header}`") });
    }
    let width = header.split(',').count();
    it.map(|(row, line)| {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != width {
            return Err(Error::Parse { row, message: format!("expected {width} columns, found {}", fields.len()) });
        }
        fields
            .iter()
            .map(|f| match *f {
                "true" => Ok(1.0),
                "false" => Ok(0.0),
                _ => f
                    .parse::<f64>()
                    .map_err(|_| Error::Parse { row, message: format!("`{f}` is not a number") }),
            })
            .collect()
    })
    .collect()
}
