//! Angle and grid arguments. Angles are radians, written as plain numbers or as
//! multiples of pi: `0.3`, `pi`, `-pi/4`, `3pi/8`, `3*pi/8`.

use std::f64::consts::PI;

pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let value = match t.split_once("pi") {
        None => t
            .parse::<f64>()
            .map_err(|_| format!("invalid angle {s:?}"))?,
        Some((coeff, rest)) => {
            let coeff = coeff.trim().trim_end_matches('*').trim();
            let c = match coeff {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c
                    .parse::<f64>()
                    .map_err(|_| format!("invalid coefficient in {s:?}"))?,
            };
            let rest = rest.trim();
            let d = if rest.is_empty() {
                1.0
            } else {
                let den = rest
                    .strip_prefix('/')
                    .ok_or_else(|| format!("invalid angle {s:?}"))?;
                den.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("invalid denominator in {s:?}"))?
            };
            if d == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            c * PI / d
        }
    };
    if !value.is_finite() {
        return Err(format!("angle {s:?} is not finite"));
    }
    Ok(value)
}

/// `start:stop:steps`, inclusive at both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        qnd_core::metrics::linspace(self.start, self.stop, self.steps)
    }
}

pub fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, steps] = parts[..] else {
        return Err(format!("grid {s:?} is not start:stop:steps"));
    };
    let steps: usize = steps
        .trim()
        .parse()
        .map_err(|_| format!("invalid step count in {s:?}"))?;
    if steps < 2 {
        return Err(format!("grid needs at least 2 steps, got {steps}"));
    }
    Ok(GridSpec {
        start: parse_angle(start)?,
        stop: parse_angle(stop)?,
        steps,
    })
}
