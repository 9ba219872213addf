//! Flag-value parsers: complex scalars, parameter assignments and ε lists.

use anyhow::{anyhow, bail, Result};
use mdeq_core::numkit::Cx;

/// Parse a complex value: `re`, `re,im`, or the root-of-unity sugar
/// `exp:num/den` meaning e^{2πi·num/den}.
pub fn parse_complex(s: &str) -> Result<Cx> {
    let s = s.trim();
    if let Some(frac) = s.strip_prefix("exp:") {
        let (num, den) = frac
            .split_once('/')
            .ok_or_else(|| anyhow!("exp: expects num/den, got {frac}"))?;
        let num: f64 = num.trim().parse()?;
        let den: f64 = den.trim().parse()?;
        if den == 0.0 {
            bail!("exp: zero denominator");
        }
        return Ok(Cx::from_polar(1.0, 2.0 * std::f64::consts::PI * num / den));
    }
    match s.split_once(',') {
        Some((re, im)) => Ok(Cx::new(re.trim().parse()?, im.trim().parse()?)),
        None => Ok(Cx::new(s.parse()?, 0.0)),
    }
}

/// Parse `name=value` with a complex value.
pub fn parse_assignment(s: &str) -> Result<(String, Cx)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| anyhow!("expected name=value, got {s}"))?;
    Ok((name.trim().to_string(), parse_complex(value)?))
}

/// Parse an ε list: either a comma list `0.3,0.2,0.1` or a dyadic range
/// `2^-4..2^-10`. The result must be strictly decreasing and positive.
pub fn parse_eps_list(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let out: Vec<f64> = if let Some((lo, hi)) = s.split_once("..") {
        let pow = |t: &str| -> Result<i32> {
            let t = t.trim();
            let exp = t
                .strip_prefix("2^")
                .ok_or_else(|| anyhow!("range bounds must look like 2^-4, got {t}"))?;
            Ok(exp.parse()?)
        };
        let (a, b) = (pow(lo)?, pow(hi)?);
        if a < b {
            bail!("range must descend, e.g. 2^-4..2^-10");
        }
        (b..=a).rev().map(|k| 2.0_f64.powi(k)).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(Into::into))
            .collect::<Result<_>>()?
    };
    if out.is_empty() {
        bail!("empty eps list");
    }
    for w in out.windows(2) {
        if w[1] >= w[0] {
            bail!("eps list must be strictly decreasing");
        }
    }
    if out.iter().any(|e| *e <= 0.0) {
        bail!("eps values must be positive");
    }
    Ok(out)
}

/// Parse a convergence-order band `lo,hi`.
pub fn parse_band(s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| anyhow!("band expects lo,hi"))?;
    let (lo, hi) = (lo.trim().parse()?, hi.trim().parse()?);
    if lo > hi {
        bail!("band lower bound exceeds upper bound");
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("2").unwrap(), Cx::new(2.0, 0.0));
        assert_eq!(parse_complex("1.5,-0.5").unwrap(), Cx::new(1.5, -0.5));
        let eta = parse_complex("exp:1/3").unwrap();
        assert!((eta.powu(3) - Cx::new(1.0, 0.0)).norm() < 1e-14);
        assert!((eta - Cx::new(-0.5, 0.75_f64.sqrt())).norm() < 1e-14);
    }

    #[test]
    fn assignments_and_eps() {
        let (name, v) = parse_assignment("kappa=2").unwrap();
        assert_eq!(name, "kappa");
        assert_eq!(v, Cx::new(2.0, 0.0));

        assert_eq!(parse_eps_list("0.3,0.2,0.1").unwrap(), vec![0.3, 0.2, 0.1]);
        let dyadic = parse_eps_list("2^-4..2^-6").unwrap();
        assert_eq!(dyadic, vec![0.0625, 0.03125, 0.015625]);
        assert!(parse_eps_list("0.1,0.2").is_err());
    }
}
