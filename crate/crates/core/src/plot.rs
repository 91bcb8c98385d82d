//! SVG renderings of constraint-value pairs and the CSV relationship matrix.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{EdgeLabel, RelationshipGraph};

const WIDTH: f64 = 400.0;
const HEIGHT: f64 = 400.0;
const LEFT_AXIS: f64 = 100.0;
const RIGHT_AXIS: f64 = 300.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 350.0;

/// Min-max scaling into `[lo, hi]`; a constant series maps to the midpoint.
fn scaler(values: &[f64], lo: f64, hi: f64) -> impl Fn(f64) -> f64 {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    move |v| {
        if range > 0.0 && range.is_finite() {
            lo + (v - min) / range * (hi - lo)
        } else {
            (lo + hi) / 2.0
        }
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
}

fn check_lengths(values_i: &[f64], values_j: &[f64], min: usize) -> Result<()> {
    if values_i.len() != values_j.len() {
        return Err(Error::Precondition(format!(
            "value lists differ in length ({} vs {})",
            values_i.len(),
            values_j.len()
        )));
    }
    if values_i.len() < min {
        return Err(Error::Precondition(format!(
            "plot needs at least {min} samples, got {}",
            values_i.len()
        )));
    }
    Ok(())
}

/// Two vertical axes with one line per sample. Larger values sit higher;
/// each axis is scaled independently.
pub fn render_parallel_coordinates(
    values_i: &[f64],
    values_j: &[f64],
    names: (&str, &str),
) -> Result<String> {
    check_lengths(values_i, values_j, 2)?;
    let yi = scaler(values_i, BOTTOM, TOP);
    let yj = scaler(values_j, BOTTOM, TOP);
    let mut out = String::new();
    header(&mut out, &format!("{} vs {}", names.0, names.1));
    for x in [LEFT_AXIS, RIGHT_AXIS] {
        let _ = writeln!(
            out,
            r#"<line class="axis" x1="{x}" y1="{TOP}" x2="{x}" y2="{BOTTOM}" stroke="black" stroke-width="2"/>"#
        );
    }
    for (x, name) in [(LEFT_AXIS, names.0), (RIGHT_AXIS, names.1)] {
        let _ = writeln!(
            out,
            r#"<text class="axis-label" x="{x}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
            BOTTOM + 25.0,
            escape(name)
        );
    }
    for (a, b) in values_i.iter().zip(values_j) {
        let _ = writeln!(
            out,
            r#"<line class="sample" x1="{LEFT_AXIS}" y1="{:.6}" x2="{RIGHT_AXIS}" y2="{:.6}" stroke="steelblue" stroke-opacity="0.5"/>"#,
            yi(*a),
            yj(*b)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Scatter plot of `(f_i, f_j)` per sample.
pub fn render_scatter(values_i: &[f64], values_j: &[f64], names: (&str, &str)) -> Result<String> {
    check_lengths(values_i, values_j, 1)?;
    let sx = scaler(values_i, TOP, WIDTH - TOP);
    let sy = scaler(values_j, BOTTOM, TOP);
    let mut out = String::new();
    header(&mut out, &format!("{} vs {}", names.0, names.1));
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{TOP}" y1="{BOTTOM}" x2="{}" y2="{BOTTOM}" stroke="black"/>"#,
        WIDTH - TOP
    );
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{TOP}" y1="{TOP}" x2="{TOP}" y2="{BOTTOM}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        BOTTOM + 30.0,
        escape(names.0)
    );
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="15" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 15 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(names.1)
    );
    for (a, b) in values_i.iter().zip(values_j) {
        let _ = writeln!(
            out,
            r#"<circle class="sample" cx="{:.6}" cy="{:.6}" r="3" fill="steelblue" fill-opacity="0.6"/>"#,
            sx(*a),
            sy(*b)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_parallel_coordinates_svg(
    values_i: &[f64],
    values_j: &[f64],
    names: (&str, &str),
    path: &Path,
) -> Result<()> {
    fs::write(
        path,
        render_parallel_coordinates(values_i, values_j, names)?,
    )?;
    Ok(())
}

pub fn emit_scatter_svg(
    values_i: &[f64],
    values_j: &[f64],
    names: (&str, &str),
    path: &Path,
) -> Result<()> {
    fs::write(path, render_scatter(values_i, values_j, names)?)?;
    Ok(())
}

fn matrix_cell(graph: &RelationshipGraph, i: usize, j: usize) -> String {
    if i == j {
        return "\u{2014}".to_string();
    }
    let Some(edge) = graph.edge(i, j) else {
        return EdgeLabel::Unknown.abbreviation().to_string();
    };
    let abbrev = edge.label.abbreviation();
    match (edge.label, edge.conflict_magnitude) {
        (EdgeLabel::TotalHarmony | EdgeLabel::TotalConflict | EdgeLabel::Mixed, Some(conflict)) => {
            format!("{abbrev},{conflict:.4}")
        }
        _ => abbrev.to_string(),
    }
}

/// `m × m` label matrix with a header row and a name column.
pub fn render_matrix_csv(graph: &RelationshipGraph) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let names = graph.names();
    let mut header = vec![String::new()];
    header.extend(names.iter().cloned());
    writer.write_record(&header).map_err(csv_error)?;
    for (i, name) in names.iter().enumerate() {
        let mut row = vec![name.clone()];
        row.extend((0..names.len()).map(|j| matrix_cell(graph, i, j)));
        writer.write_record(&row).map_err(csv_error)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

pub fn emit_matrix_csv(graph: &RelationshipGraph, path: &Path) -> Result<()> {
    fs::write(path, render_matrix_csv(graph)?)?;
    Ok(())
}
