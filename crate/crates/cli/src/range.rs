use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

/// Comma-separated values, e.g. `2,3,w*`.
pub fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let out = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| anyhow!("bad value {s:?}: {e}")))
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        bail!("empty list {text:?}");
    }
    Ok(out)
}

fn split_range(text: &str) -> Option<(&str, &str, &str)> {
    let mut parts = text.split(':');
    let r = (parts.next()?, parts.next()?, parts.next()?);
    parts.next().is_none().then_some(r)
}

/// `a:b:step` (inclusive) or a comma list.
pub fn parse_range_usize(text: &str) -> Result<Vec<usize>> {
    let Some((a, b, step)) = split_range(text) else {
        return parse_list(text);
    };
    let (a, b, step): (usize, usize, usize) = (
        a.trim().parse().context("range start")?,
        b.trim().parse().context("range end")?,
        step.trim().parse().context("range step")?,
    );
    if step == 0 || a > b {
        bail!("empty range {text:?}");
    }
    Ok((a..=b).step_by(step).collect())
}

/// `a:b:step` (inclusive, values rounded to 10 decimals) or a comma list.
pub fn parse_range_f64(text: &str) -> Result<Vec<f64>> {
    let Some((a, b, step)) = split_range(text) else {
        return parse_list(text);
    };
    let (a, b, step): (f64, f64, f64) = (
        a.trim().parse().context("range start")?,
        b.trim().parse().context("range end")?,
        step.trim().parse().context("range step")?,
    );
    if step.is_nan() || step <= 0.0 || a > b {
        bail!("empty range {text:?}");
    }
    let round = |v: f64| (v * 1e10).round() / 1e10;
    let mut out = Vec::new();
    for k in 0.. {
        let v = round(a + k as f64 * step);
        if v > b + 1e-9 {
            break;
        }
        out.push(v);
    }
    Ok(out)
}
