use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Reset instants on `[0, total_time]`.
///
/// Times are strictly increasing and lie in `(0, total_time]`. An empty list
/// means the actuator is never reset (used when resetting is modelled by
/// actuator dissipation instead).
#[derive(Debug, Clone, PartialEq)]
pub struct ResetSchedule {
    total_time: f64,
    reset_times: Vec<f64>,
}

/// One stretch of evolution between resets. The switching function is
/// evaluated at `(τ − start) / (end − start)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    /// Whether the actuator is reset at `end`.
    pub resets: bool,
}

impl Segment {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }
}

impl ResetSchedule {
    /// `n` equally spaced resets, the last one at `t`.
    pub fn uniform(n: usize, t: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("uniform schedule needs n >= 1".into()));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("total time must be positive, got {t}")));
        }
        let reset_times = (1..=n)
            .map(|k| if k == n { t } else { t * k as f64 / n as f64 })
            .collect();
        Ok(Self {
            total_time: t,
            reset_times,
        })
    }

    pub fn from_times(reset_times: Vec<f64>, total_time: f64) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "total time must be positive, got {total_time}"
            )));
        }
        if reset_times.iter().any(|&r| !(r > 0.0 && r <= total_time)) {
            return Err(Error::InvalidArgument(format!(
                "reset times must lie in (0, {total_time}]"
            )));
        }
        if reset_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("reset times must be strictly increasing".into()));
        }
        Ok(Self {
            total_time,
            reset_times,
        })
    }

    /// Continuous evolution over `[0, t]` with no resets.
    pub fn without_resets(t: f64) -> Result<Self> {
        Self::from_times(Vec::new(), t)
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn reset_times(&self) -> &[f64] {
        &self.reset_times
    }

    pub fn reset_count(&self) -> usize {
        self.reset_times.len()
    }

    /// Longest stretch between consecutive resets (or the ends of the run).
    pub fn max_gap(&self) -> f64 {
        self.segments().iter().map(Segment::len).fold(0.0, f64::max)
    }

    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(self.reset_times.len() + 1);
        let mut start = 0.0;
        for &r in &self.reset_times {
            out.push(Segment {
                start,
                end: r,
                resets: true,
            });
            start = r;
        }
        if start < self.total_time {
            out.push(Segment {
                start,
                end: self.total_time,
                resets: false,
            });
        }
        out
    }
}
