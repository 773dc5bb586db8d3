//! Phase helpers shared by every module.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Wraps a phase onto `(-pi, pi]`. Values already in range are returned bit-for-bit.
pub fn wrap_phase(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

/// `cot(x / 2)`, exactly zero at `x = ±pi`.
pub fn cot_half(x: f64) -> f64 {
    if x.abs() == PI {
        0.0
    } else {
        let h = 0.5 * x;
        h.cos() / h.sin()
    }
}

/// `sin(x / 2)`, exactly one at `x = pi`.
pub(crate) fn sin_half(x: f64) -> f64 {
    if x == PI {
        1.0
    } else if x == -PI {
        -1.0
    } else {
        (0.5 * x).sin()
    }
}

/// Parses an angle given either in radians (`0.3`) or as a multiple of pi
/// (`pi`, `-pi/2`, `3pi/4`, `0.25pi`).
pub fn parse_angle(text: &str) -> Result<f64> {
    let s = text.trim().to_ascii_lowercase().replace(' ', "");
    let bad = || Error::Config(format!("cannot parse angle '{text}'"));
    let Some(pos) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| bad());
    };
    let (head, tail) = (&s[..pos], &s[pos + 2..]);
    let coeff = match head.trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let denom = if tail.is_empty() {
        1.0
    } else if let Some(d) = tail.strip_prefix('/') {
        d.parse::<f64>().map_err(|_| bad())?
    } else {
        return Err(bad());
    };
    if denom == 0.0 {
        return Err(bad());
    }
    Ok(coeff * PI / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_keeps_in_range_values() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert_eq!(wrap_phase(0.3), 0.3);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_phase(-5.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn cot_half_vanishes_at_pi() {
        assert_eq!(cot_half(PI), 0.0);
        assert_eq!(cot_half(-PI), 0.0);
        assert!((cot_half(PI / 2.0) - 1.0).abs() < 1e-15);
        assert_eq!(cot_half(-0.7), -cot_half(0.7));
    }

    #[test]
    fn parses_pi_multiples() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("0.5*pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("0.3").unwrap(), 0.3);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("banana").is_err());
    }
}
