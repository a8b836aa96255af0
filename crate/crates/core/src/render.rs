//! SVG, TikZ and JSON output of line diagrams. Output is a pure function of
//! its inputs. Internal coordinates keep y pointing up; SVG flips at render time.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagram::{Layout, LayoutJson};
use crate::error::{Error, Result};
use crate::lattice::ConceptLattice;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelMode {
    None,
    /// Full extent and intent at every node.
    Full,
    /// Each object at its object concept, each attribute at its attribute concept.
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Svg,
    Tikz,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svg" => Ok(Format::Svg),
            "tikz" => Ok(Format::Tikz),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format `{s}` (expected svg, tikz or json)"))),
        }
    }
}

impl FromStr for LabelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(LabelMode::None),
            "full" => Ok(LabelMode::Full),
            "reduced" => Ok(LabelMode::Reduced),
            _ => Err(Error::Config(format!("unknown label mode `{s}` (expected none, full or reduced)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderOptions {
    /// Pixels per layout unit (SVG) or centimetres per unit (TikZ).
    pub scale: f64,
    pub node_radius: f64,
    pub edge_width: f64,
    pub canvas_padding: f64,
    pub label_mode: LabelMode,
    pub format: Format,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            scale: 60.0,
            node_radius: 6.0,
            edge_width: 1.5,
            canvas_padding: 40.0,
            label_mode: LabelMode::Reduced,
            format: Format::Svg,
        }
    }
}

impl RenderOptions {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("scale", self.scale),
            ("node_radius", self.node_radius),
            ("edge_width", self.edge_width),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.canvas_padding >= 0.0 && self.canvas_padding.is_finite()) {
            return Err(Error::Config(format!("canvas_padding must be non-negative, got {}", self.canvas_padding)));
        }
        Ok(())
    }
}

/// Text above (attributes) and below (objects) each node.
fn labels(lat: &ConceptLattice, mode: LabelMode) -> Vec<(String, String)> {
    let ctx = lat.context();
    let mut out = vec![(String::new(), String::new()); lat.len()];
    match mode {
        LabelMode::None => {}
        LabelMode::Full => {
            for (i, c) in lat.concepts().iter().enumerate() {
                let join = |all: &[String], set: &crate::bitset::BitSet| {
                    set.iter().map(|k| all[k].as_str()).collect::<Vec<_>>().join(", ")
                };
                out[i] = (join(ctx.attributes(), &c.intent), join(ctx.objects(), &c.extent));
            }
        }
        LabelMode::Reduced => {
            let mut upper: Vec<Vec<&str>> = vec![Vec::new(); lat.len()];
            let mut lower: Vec<Vec<&str>> = vec![Vec::new(); lat.len()];
            for m in 0..ctx.num_attributes() {
                upper[lat.attribute_concept(m)].push(&ctx.attributes()[m]);
            }
            for g in 0..ctx.num_objects() {
                lower[lat.object_concept(g)].push(&ctx.objects()[g]);
            }
            for i in 0..lat.len() {
                out[i] = (upper[i].join(", "), lower[i].join(", "));
            }
        }
    }
    out
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn escape_tex(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\textbackslash{}"),
            '&' | '%' | '$' | '#' | '_' | '{' | '}' => {
                out.push('\\');
                out.push(ch);
            }
            '~' => out.push_str("\\textasciitilde{}"),
            '^' => out.push_str("\\textasciicircum{}"),
            _ => out.push(ch),
        }
    }
    out
}

/// Formats with fixed precision and no negative zero.
fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn render_svg(lat: &ConceptLattice, layout: &Layout, opts: &RenderOptions) -> String {
    let (lo, hi) = if layout.is_empty() { ([0.0, 0.0], [0.0, 0.0]) } else { layout.bounds() };
    let pad = opts.canvas_padding + opts.node_radius;
    let width = (hi[0] - lo[0]) * opts.scale + 2.0 * pad;
    let height = (hi[1] - lo[1]) * opts.scale + 2.0 * pad;
    let to_px = |p: [f64; 2]| [(p[0] - lo[0]) * opts.scale + pad, (hi[1] - p[1]) * opts.scale + pad];
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = num(width),
        h = num(height)
    );
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="{}">"#, num(opts.edge_width));
    for &(a, b) in lat.covers() {
        let (p, q) = (to_px(layout.points[a]), to_px(layout.points[b]));
        let _ = writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, num(p[0]), num(p[1]), num(q[0]), num(q[1]));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g fill="white" stroke="black" stroke-width="{}">"#, num(opts.edge_width));
    for (i, &p) in layout.points.iter().enumerate() {
        let p = to_px(p);
        let _ = writeln!(s, r#"<circle id="c{i}" cx="{}" cy="{}" r="{}"/>"#, num(p[0]), num(p[1]), num(opts.node_radius));
    }
    let _ = writeln!(s, "</g>");
    let labels = labels(lat, opts.label_mode);
    if opts.label_mode != LabelMode::None {
        let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="12" text-anchor="middle">"#);
        for (i, (up, down)) in labels.iter().enumerate() {
            let p = to_px(layout.points[i]);
            if !up.is_empty() {
                let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, num(p[0]), num(p[1] - opts.node_radius - 4.0), escape_xml(up));
            }
            if !down.is_empty() {
                let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, num(p[0]), num(p[1] + opts.node_radius + 14.0), escape_xml(down));
            }
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

fn render_tikz(lat: &ConceptLattice, layout: &Layout, opts: &RenderOptions) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r"\begin{{tikzpicture}}[x={}cm, y={}cm]", num(opts.scale / 60.0), num(opts.scale / 60.0));
    let _ = writeln!(
        s,
        r"  \tikzset{{concept/.style={{circle, draw, fill=white, inner sep=0pt, minimum size={}pt}}}}",
        num(2.0 * opts.node_radius)
    );
    let labels = labels(lat, opts.label_mode);
    for (i, p) in layout.points.iter().enumerate() {
        let (up, down) = &labels[i];
        let mut extra = Vec::new();
        if !up.is_empty() {
            extra.push(format!("label=above:{{{}}}", escape_tex(up)));
        }
        if !down.is_empty() {
            extra.push(format!("label=below:{{{}}}", escape_tex(down)));
        }
        let style = if extra.is_empty() { "concept".to_string() } else { format!("concept, {}", extra.join(", ")) };
        let _ = writeln!(s, r"  \node[{style}] (c{i}) at ({}, {}) {{}};", num(p[0]), num(p[1]));
    }
    for &(a, b) in lat.covers() {
        let _ = writeln!(s, r"  \draw[line width={}pt] (c{a}) -- (c{b});", num(opts.edge_width / 2.0));
    }
    s.push_str("\\end{tikzpicture}\n");
    s
}

/// Renders the diagram in the format chosen by `opts`.
pub fn render(lat: &ConceptLattice, layout: &Layout, opts: &RenderOptions) -> Result<String> {
    opts.validate()?;
    layout.check_matches(lat)?;
    if !layout.is_finite() {
        return Err(Error::LayoutMismatch("layout has non-finite coordinates".into()));
    }
    Ok(match opts.format {
        Format::Svg => render_svg(lat, layout, opts),
        Format::Tikz => render_tikz(lat, layout, opts),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&LayoutJson::from_layout(lat, layout))?;
            s.push('\n');
            s
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn two_chain_svg_draws_upper_node_higher() {
        let lat = ConceptLattice::from_context(&examples::two_chain());
        let mut points = vec![[0.0, 0.0]; 2];
        points[lat.top()] = [0.0, 1.0];
        let svg = render(&lat, &Layout::new(points), &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg.matches("<line").count(), 1);
        let cy = |i: usize| -> f64 {
            let tag = format!(r#"id="c{i}" cx=""#);
            let rest = &svg[svg.find(&tag).unwrap()..];
            let rest = &rest[rest.find("cy=\"").unwrap() + 4..];
            rest[..rest.find('"').unwrap()].parse().unwrap()
        };
        assert!(cy(lat.top()) < cy(lat.bottom()));
    }

    #[test]
    fn output_is_deterministic() {
        let lat = ConceptLattice::from_context(&examples::dwarf_planets());
        let layout = Layout::new((0..lat.len()).map(|i| [i as f64 * 0.5, i as f64]).collect());
        for format in [Format::Svg, Format::Tikz, Format::Json] {
            let opts = RenderOptions { format, ..RenderOptions::default() };
            assert_eq!(render(&lat, &layout, &opts).unwrap(), render(&lat, &layout, &opts).unwrap());
        }
    }

    #[test]
    fn tex_and_xml_escaping() {
        assert_eq!(escape_tex("a_b&c"), r"a\_b\&c");
        assert_eq!(escape_xml("<a&b>"), "&lt;a&amp;b&gt;");
        assert_eq!(num(-0.0001), "0.000");
    }
}
