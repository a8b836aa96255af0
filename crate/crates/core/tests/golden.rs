//! Frozen renderings of the projected dwarf-planets diagram.

use std::path::PathBuf;

use latflux_core::diagram::LayoutJson;
use latflux_core::render::{render, Format, RenderOptions};
use latflux_core::{ConceptLattice, FormalContext};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn check(format: Format, golden: &str) {
    let ctx = FormalContext::parse_cxt(&std::fs::read_to_string(fixture("dwarf_planets.cxt")).unwrap()).unwrap();
    let lat = ConceptLattice::from_context(&ctx);
    let json: LayoutJson = serde_json::from_str(&std::fs::read_to_string(fixture("fig3.json")).unwrap()).unwrap();
    let layout = json.to_layout(&lat).unwrap();
    let out = render(&lat, &layout, &RenderOptions { format, ..RenderOptions::default() }).unwrap();
    if std::env::var_os("LATFLUX_BLESS").is_some() {
        std::fs::write(fixture(golden), &out).unwrap();
    }
    assert_eq!(out, std::fs::read_to_string(fixture(golden)).unwrap());
}

#[test]
fn tikz_matches_golden() {
    check(Format::Tikz, "fig3.tikz");
}

#[test]
fn svg_matches_golden() {
    check(Format::Svg, "fig3.svg");
}
