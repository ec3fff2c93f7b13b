//! `re±imi` flag syntax.

use num_complex::Complex64;

fn real(s: &str, whole: &str) -> Result<f64, String> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s.parse::<f64>().map_err(|_| format!("cannot parse '{whole}' as a complex number")),
    }
}

/// Parses `0.5`, `0.5+0.1i`, `-2e-3-1.5i`, `0.3i`, `-i`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    let Some(body) = t.strip_suffix('i') else {
        let x = t.parse::<f64>().map_err(|_| format!("cannot parse '{s}' as a complex number"))?;
        return finite(Complex64::new(x, 0.0), s);
    };
    let bytes = body.as_bytes();
    // last sign that is neither leading nor part of an exponent
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let z = match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| format!("cannot parse '{s}' as a complex number"))?;
            Complex64::new(re, real(&body[k..], s)?)
        }
        None => Complex64::new(0.0, real(body, s)?),
    };
    finite(z, s)
}

fn finite(z: Complex64, s: &str) -> Result<Complex64, String> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.5+0.1i").unwrap(), Complex64::new(0.5, 0.1));
        assert_eq!(parse_complex("-2e-3-1.5i").unwrap(), Complex64::new(-2e-3, -1.5));
        assert_eq!(parse_complex("1e+2+3E-1i").unwrap(), Complex64::new(100.0, 0.3));
        assert_eq!(parse_complex("0.3i").unwrap(), Complex64::new(0.0, 0.3));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("2-i").unwrap(), Complex64::new(2.0, -1.0));
        assert!(parse_complex("0.5+").is_err());
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("inf").is_err());
    }
}
