//! Value lists given on the command line: `a,b,c`, `lin:a:b:n` or `log:a:b:n`.

pub fn parse_list(spec: &str, allow_inf: bool) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    let values = if let Some(rest) = spec.strip_prefix("lin:") {
        let (a, b, n) = triple(rest)?;
        linspace(a, b, n)
    } else if let Some(rest) = spec.strip_prefix("log:") {
        let (a, b, n) = triple(rest)?;
        logspace(a, b, n)?
    } else {
        spec.split(',')
            .map(|s| number(s, allow_inf))
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(format!("empty list '{spec}'"));
    }
    Ok(values)
}

pub fn number(s: &str, allow_inf: bool) -> Result<f64, String> {
    let s = s.trim();
    let v: f64 = match s {
        "inf" | "+inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => s.parse().map_err(|_| format!("'{s}' is not a number"))?,
    };
    if v.is_nan() || (v.is_infinite() && !allow_inf) {
        return Err(format!("'{s}' must be finite"));
    }
    Ok(v)
}

fn triple(rest: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid '{rest}' needs the form start:stop:count"));
    }
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("'{}' is not a point count", parts[2]))?;
    if n == 0 {
        return Err("grid needs at least one point".into());
    }
    Ok((number(parts[0], false)?, number(parts[1], false)?, n))
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Same-sign bounds give a geometric progression. Bounds of opposite sign
/// give a grid mirrored through zero: n/2 points on each side, spaced
/// logarithmically in |r| between 1/m and m with m = max(|a|, |b|).
fn logspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>, String> {
    if a == 0.0 || b == 0.0 {
        return Err("log grid bounds must be nonzero".into());
    }
    let geometric =
        |lo: f64, hi: f64, n: usize| -> Vec<f64> { linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect() };
    if a.signum() == b.signum() {
        let s = a.signum();
        return Ok(geometric(a.abs(), b.abs(), n).into_iter().map(|v| s * v).collect());
    }
    if n < 2 || !n.is_multiple_of(2) {
        return Err("a log grid through zero needs an even point count".into());
    }
    let m = a.abs().max(b.abs());
    if m <= 1.0 {
        return Err("a log grid through zero needs max(|start|, |stop|) > 1".into());
    }
    let side = geometric(1.0 / m, m, n / 2);
    let mut out: Vec<f64> = side.iter().rev().map(|v| -v).collect();
    out.extend(side);
    if a > b {
        out.reverse();
    }
    Ok(out)
}
