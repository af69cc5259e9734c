use std::fmt::Write as _;

use octic::classify::SolutionReport;
use serde::Serialize;
use serde_json::Value;

/// Rounds to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .map(round12)
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits. Printing
/// uses the shortest round-trip form, so re-parsing reproduces the numbers.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report serializes");
    round_value(&mut v);
    serde_json::to_string_pretty(&v).expect("value prints") + "\n"
}

pub fn num(v: f64) -> String {
    format!("{}", round12(v))
}

fn vector(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| num(*v)).collect();
    format!("[{}]", parts.join(", "))
}

fn tag_name<T: Serialize>(t: &T) -> String {
    match serde_json::to_value(t) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => "?".into(),
    }
}

pub fn report_table(r: &SolutionReport) -> String {
    let k = &r.constants;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "n = {}   H1 = {}   H2 = {}   H3 = {}   H4 = {}   K = {}",
        r.dimension,
        num(k.h1),
        num(k.h2),
        num(k.h3),
        num(k.h4),
        num(k.k)
    );
    for b in &r.regions.bounded {
        let _ = writeln!(
            out,
            "region {:<5} ({}, {})   peak sigma = {}   |Phi| = {}",
            tag_name(&b.region),
            num(b.lo),
            num(b.hi),
            num(b.peak),
            num(b.peak_value.max(0.0).sqrt())
        );
    }
    let _ = writeln!(out, "region S_a+  ({}, inf)", num(r.regions.upper_lo));
    let _ = writeln!(
        out,
        "critical points: {}   ({})",
        r.count.count, r.count.case
    );
    out.push('\n');

    if r.manifolds.is_empty() {
        let rows: Vec<[String; 6]> = r
            .points
            .iter()
            .map(|p| {
                [
                    num(p.sigma),
                    vector(&p.x),
                    num(p.primal_value),
                    num(p.dual_value),
                    tag_name(&p.label),
                    tag_name(&p.region_tag),
                ]
            })
            .collect();
        table(
            &mut out,
            ["sigma", "x", "P(x)", "P^d(sigma)", "label", "region"],
            &rows,
        );
        if let Some(x) = &r.global_min.x {
            let _ = writeln!(
                out,
                "\nglobal minimizer {} with P = {}",
                vector(x),
                num(r.global_min.value)
            );
        }
    } else {
        let rows: Vec<[String; 6]> = r
            .manifolds
            .iter()
            .map(|m| {
                [
                    num(m.level_sigma),
                    num(m.y1_level),
                    vector(&m.center),
                    num(m.radius_squared),
                    num(m.primal_value),
                    if m.is_global_min {
                        "GLOBAL_MIN".into()
                    } else {
                        String::new()
                    },
                ]
            })
            .collect();
        table(
            &mut out,
            ["sigma", "y1", "center", "radius^2", "P", ""],
            &rows,
        );
        let _ = writeln!(out, "\nglobal minimum value {}", num(r.global_min.value));
    }
    for line in &r.rationale {
        let _ = writeln!(out, "note: {line}");
    }
    out
}

/// Left-aligned columns separated by two spaces.
pub fn table<const N: usize>(out: &mut String, header: [&str; N], rows: &[[String; N]]) {
    let mut width: [usize; N] = header.map(str::len);
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(header.to_vec()));
    for row in rows {
        let _ = writeln!(out, "{}", line(row.iter().map(String::as_str).collect()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_twelve_digits() {
        assert_eq!(round12(2.129875712345678), 2.12987571235);
        assert_eq!(round12(-1.0e-20 / 3.0), -3.33333333333e-21);
        assert_eq!(round12(0.5), 0.5);
    }

    #[test]
    fn rounded_json_is_a_fixed_point() {
        let v = vec![1.0 / 3.0, 2.0f64.sqrt(), 1e300 / 7.0];
        let first = to_json(&v);
        let back: Vec<f64> = serde_json::from_str(&first).unwrap();
        assert_eq!(to_json(&back), first);
    }
}
