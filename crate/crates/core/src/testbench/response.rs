use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chamber pressure and controlled flow sampled on a common clock.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResponseTrace {
    pub times: Vec<f64>,
    pub pressure_kpa: Vec<f64>,
    pub flow_ml_min: Vec<f64>,
}

impl ResponseTrace {
    pub fn push(&mut self, t: f64, pressure_kpa: f64, flow_ml_min: f64) {
        self.times.push(t);
        self.pressure_kpa.push(pressure_kpa);
        self.flow_ml_min.push(flow_ml_min);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionOptions {
    /// Desired driving pressure.
    pub target_kpa: f64,
    /// Relative band around the target.
    pub pressure_band: f64,
    pub flow_threshold_ml_min: f64,
    /// Consecutive in-band samples required to call a signal stable.
    pub stable_samples: usize,
}

impl ExtractionOptions {
    pub fn new(target_kpa: f64) -> Self {
        ExtractionOptions {
            target_kpa,
            pressure_band: 0.02,
            flow_threshold_ml_min: 5.0,
            stable_samples: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseEvents {
    /// Chamber pressure reached and stayed at the target.
    pub engaged_at: f64,
    /// Controlled flow reached and stayed below the threshold.
    pub blocked_at: f64,
    pub response_time: f64,
}

/// First index from which `inside` holds for `run` consecutive samples.
fn first_stable(len: usize, start: usize, run: usize, inside: impl Fn(usize) -> bool) -> Option<usize> {
    let mut count = 0;
    for i in start..len {
        if inside(i) {
            count += 1;
            if count >= run {
                return Some(i + 1 - count);
            }
        } else {
            count = 0;
        }
    }
    None
}

/// Time from driving-pressure engagement to the controlled flow settling
/// below the threshold.
pub fn extract_response_time(trace: &ResponseTrace, opts: &ExtractionOptions) -> Result<ResponseEvents> {
    let n = trace.len();
    if trace.pressure_kpa.len() != n || trace.flow_ml_min.len() != n {
        return Err(Error::InvalidSeries("trace columns differ in length".into()));
    }
    if opts.stable_samples == 0 {
        return Err(Error::InvalidConfig("stable_samples must be at least 1".into()));
    }
    let band = opts.pressure_band * opts.target_kpa.abs();
    let engaged = first_stable(n, 0, opts.stable_samples, |i| {
        (trace.pressure_kpa[i] - opts.target_kpa).abs() <= band
    })
    .ok_or(Error::EventNotFound("driving pressure never engaged"))?;
    let blocked = first_stable(n, engaged, opts.stable_samples, |i| {
        trace.flow_ml_min[i] <= opts.flow_threshold_ml_min
    })
    .ok_or(Error::EventNotFound("controlled flow never blocked"))?;
    let engaged_at = trace.times[engaged];
    let blocked_at = trace.times[blocked];
    Ok(ResponseEvents {
        engaged_at,
        blocked_at,
        response_time: blocked_at - engaged_at,
    })
}
