//! Flag value parsers.

use num_complex::Complex64;

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i` (exponents allowed).
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex number".into());
    }
    let bad = || format!("cannot parse `{s}` as a complex number (expected e.g. 2.5-1i)");
    let Some(body) = t.strip_suffix('i') else {
        return match t.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(Complex64::new(re, 0.0)),
            _ => Err(bad()),
        };
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    let z = Complex64::new(re, im);
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(bad());
    }
    Ok(z)
}

/// A finite point or infinity (`None`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point(pub Option<Complex64>);

impl serde::Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Some(z) => z.serialize(s),
            None => s.serialize_str("inf"),
        }
    }
}

/// A complex number or `inf`.
pub fn parse_extended(s: &str) -> Result<Point, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => Ok(Point(None)),
        _ => parse_complex(s).map(|z| Point(Some(z))),
    }
}

/// `re_min,re_max,im_min,im_max`.
pub fn parse_window(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("window `{s}` needs four comma-separated numbers"));
    }
    let mut out = [0.0; 4];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| format!("bad number `{p}` in window"))?;
    }
    if !(out[0] < out[1] && out[2] < out[3]) {
        return Err(format!("window `{s}` must satisfy re_min < re_max and im_min < im_max"));
    }
    Ok(out)
}

/// `WIDTHxHEIGHT`.
pub fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("size `{s}` should look like 800x600"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width in `{s}`"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height in `{s}`"))?;
    if w == 0 || h == 0 {
        return Err("size must be positive".into());
    }
    Ok((w, h))
}
