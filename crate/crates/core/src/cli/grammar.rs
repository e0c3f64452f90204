//! Parsing of the flag mini-language.
//!
//! A port is `kind:param[:dim]` with `kind` one of `coherent`, `cat+`, `cat-`,
//! `squeezed`, `fock`. Complex parameters are `a+bi` (also `2i`, `-i`, `1.5`)
//! or polar `r@phase`.

use crate::fock::ModeSpec;
use crate::linalg::C64;

/// A port input as given on the command line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PortSpec {
    pub mode: ModeSpec,
    /// Fixed cutoff for this port, overriding `--dim` and the automatic choice.
    pub dim: Option<usize>,
}

pub fn parse_port(s: &str) -> Result<PortSpec, String> {
    let mut parts = s.split(':');
    let kind = parts.next().unwrap_or_default().trim();
    let param = parts
        .next()
        .ok_or_else(|| format!("`{s}`: expected kind:param[:dim]"))?
        .trim();
    let dim = parts
        .next()
        .map(|d| {
            d.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{s}`: bad dimension `{d}`"))
        })
        .transpose()?;
    if parts.next().is_some() {
        return Err(format!("`{s}`: too many fields"));
    }
    let mode = match kind {
        "coherent" => ModeSpec::Coherent(parse_complex(param)?),
        "cat+" => ModeSpec::EvenCat(parse_complex(param)?),
        "cat-" => ModeSpec::OddCat(parse_complex(param)?),
        "squeezed" => ModeSpec::Squeezed(parse_complex(param)?),
        "fock" => ModeSpec::Fock(
            param
                .parse()
                .map_err(|_| format!("`{param}`: fock needs a photon number"))?,
        ),
        other => {
            return Err(format!(
                "unknown state kind `{other}` (coherent, cat+, cat-, squeezed, fock)"
            ))
        }
    };
    Ok(PortSpec { mode, dim })
}

fn parse_real(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !x.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(x)
}

/// Imaginary coefficient of `s` without the trailing `i`; a bare sign means 1.
fn parse_imag(s: &str) -> Result<f64, String> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_real(s),
    }
}

pub fn parse_complex(s: &str) -> Result<C64, String> {
    let s = s.trim();
    if let Some((r, phase)) = s.split_once('@') {
        let r = parse_real(r)?;
        if r < 0.0 {
            return Err(format!("`{s}`: polar magnitude must be non-negative"));
        }
        return Ok(C64::from_polar(r, parse_real(phase)?));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(parse_real(s)?, 0.0));
    };
    // split at the last sign that is not leading and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(C64::new(parse_real(&body[..k])?, parse_imag(&body[k..])?)),
        None => Ok(C64::new(0.0, parse_imag(body)?)),
    }
}

/// `LO:HI` with `LO < HI`.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("`{s}`: expected LO:HI"))?;
    let (lo, hi) = (parse_real(lo.trim())?, parse_real(hi.trim())?);
    if lo >= hi {
        return Err(format!("`{s}`: empty range"));
    }
    Ok((lo, hi))
}

/// `N` for both ports or `NA,NB`.
pub fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let one = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("`{t}` is not a dimension"))
    };
    match s.split_once(',') {
        Some((a, b)) => Ok((one(a)?, one(b)?)),
        None => {
            let d = one(s)?;
            Ok((d, d))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(z: C64, re: f64, im: f64) -> bool {
        (z - C64::new(re, im)).norm() < 1e-15
    }

    #[test]
    fn complex_forms() {
        assert!(close(parse_complex("2i").unwrap(), 0.0, 2.0));
        assert!(close(parse_complex("i").unwrap(), 0.0, 1.0));
        assert!(close(parse_complex("-i").unwrap(), 0.0, -1.0));
        assert!(close(parse_complex("1.5").unwrap(), 1.5, 0.0));
        assert!(close(parse_complex("1-2i").unwrap(), 1.0, -2.0));
        assert!(close(parse_complex("-0.5+i").unwrap(), -0.5, 1.0));
        assert!(close(parse_complex("1e-3+2e+1i").unwrap(), 1e-3, 20.0));
        assert!(close(parse_complex("-1e-2i").unwrap(), 0.0, -1e-2));
        let p = parse_complex("2@1.5707963267948966").unwrap();
        assert!((p - C64::from_polar(2.0, FRAC_PI_2)).norm() < 1e-15);
        for bad in ["", "x", "1+", "2@", "-1@0", "1+2j", "nan", "inf"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn ports() {
        let p = parse_port("coherent:2i").unwrap();
        assert_eq!(p.mode, ModeSpec::Coherent(C64::new(0.0, 2.0)));
        assert_eq!(p.dim, None);
        assert_eq!(parse_port("fock:3:12").unwrap().dim, Some(12));
        assert!(matches!(
            parse_port("cat-:1").unwrap().mode,
            ModeSpec::OddCat(_)
        ));
        assert!(matches!(
            parse_port("squeezed:0.5@1").unwrap().mode,
            ModeSpec::Squeezed(_)
        ));
        for bad in [
            "coherent",
            "vacuum:0",
            "fock:1.5",
            "fock:2:x",
            "cat+:1:10:3",
        ] {
            assert!(parse_port(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn ranges_and_dims() {
        assert_eq!(parse_range("-1:2").unwrap(), (-1.0, 2.0));
        assert!(parse_range("2:1").is_err());
        assert!(parse_range("1").is_err());
        assert_eq!(parse_dims("20").unwrap(), (20, 20));
        assert_eq!(parse_dims("20,30").unwrap(), (20, 30));
        assert!(parse_dims("a").is_err());
    }
}
