//! Text rendering of phase-space tables.

use std::fmt::Write;

/// Renders a table over phase space as the usual diagram: the bottom-left
/// box is the point (0, 0), q grows to the right, p grows upward.
pub fn phase_space_diagram(values: &[f64], d: u32) -> String {
    let mut cells = vec![String::new(); values.len()];
    let mut width = 0;
    for (idx, v) in values.iter().enumerate() {
        let cell = trim_float(*v);
        width = width.max(cell.len());
        cells[idx] = cell;
    }

    let mut out = String::new();
    let rule = |out: &mut String| {
        out.push('+');
        for _ in 0..d {
            for _ in 0..width + 2 {
                out.push('-');
            }
            out.push('+');
        }
        out.push('\n');
    };
    rule(&mut out);
    for p in (0..d).rev() {
        out.push('|');
        for q in 0..d {
            let idx = (q * d + p) as usize;
            let _ = write!(out, " {:>width$} |", cells[idx], width = width);
        }
        out.push('\n');
        rule(&mut out);
    }
    out
}

fn trim_float(v: f64) -> String {
    // exact-looking numbers print compactly, the rest keep full precision
    let rounded = (v * 1e12).round() / 1e12;
    if (rounded - v).abs() < 1e-13 {
        let s = format!("{rounded}");
        if s.len() <= 9 {
            return s;
        }
    }
    format!("{v:.9e}")
}

pub fn check_line(name: &str, worst: f64, threshold: f64, pass: bool) -> String {
    format!(
        "{name:<28} worst {worst:>13.3e}  threshold {threshold:>9.1e}  {}",
        if pass { "PASS" } else { "FAIL" }
    )
}
