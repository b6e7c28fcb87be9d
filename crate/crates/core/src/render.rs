//! SVG and ASCII pictures of orbits.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::config::{GlobalState, Letter};
use crate::engine::OrbitTrace;
use crate::error::TuredoError;
use crate::lattice::{Dim, Position};
use crate::leakage::{DividingPath, Rect};
use crate::rules::{Turedo, DIRECTIONS};

const CYCLE: [&str; 12] = [
    "#4363d8", "#e6194b", "#3cb44b", "#ffe119", "#f58231", "#911eb4", "#46f0f0", "#f032e6", "#bcf60c", "#008080",
    "#9a6324", "#800000",
];

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Palette {
    /// Letters cycle through a fixed list of twelve colours.
    #[default]
    Cycle,
    /// `0` green and `1` yellow, other letters as in `Cycle`.
    Figure1,
    /// Colours by letter name, falling back to `Cycle`.
    Custom(BTreeMap<String, String>),
}

impl Palette {
    pub fn named(name: &str) -> Result<Palette, TuredoError> {
        match name {
            "default" | "cycle" => Ok(Palette::Cycle),
            "figure1" => Ok(Palette::Figure1),
            _ => Err(TuredoError::Render(format!("unknown palette {name:?}"))),
        }
    }

    pub fn color(&self, t: &Turedo, l: Letter) -> String {
        let name = t.letter_name(l);
        let fallback = CYCLE[l.0 as usize % CYCLE.len()].to_string();
        match self {
            Palette::Cycle => fallback,
            Palette::Figure1 => match name {
                "0" => "#2e9e44".into(),
                "1" => "#f2d024".into(),
                _ => fallback,
            },
            Palette::Custom(m) => m.get(name).cloned().unwrap_or(fallback),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOptions {
    pub cell_px: u32,
    pub palette: Palette,
    pub draw_head_path: bool,
    pub overlay_path: Option<DividingPath>,
    pub overlay_blocks: Option<Position>,
    /// Allows 3D input, drawn as one group per z-slice.
    pub layered: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            cell_px: 12,
            palette: Palette::Cycle,
            draw_head_path: true,
            overlay_path: None,
            overlay_blocks: None,
            layered: false,
        }
    }
}

fn bounds<'a>(points: impl Iterator<Item = &'a Position>) -> Option<(Position, Position)> {
    let mut it = points.peekable();
    let first = **it.peek()?;
    let (mut lo, mut hi) = (first.coords().to_vec(), first.coords().to_vec());
    for p in it {
        for (i, v) in p.coords().iter().enumerate() {
            lo[i] = lo[i].min(*v);
            hi[i] = hi[i].max(*v);
        }
    }
    Some((Position::from_slice(&lo).ok()?, Position::from_slice(&hi).ok()?))
}

fn direction_of(t: &Turedo, state: &str) -> Option<usize> {
    (t.dim() == Dim::Two).then(|| DIRECTIONS.iter().position(|d| *d == state)).flatten()
}

struct Frame {
    lo: Position,
    hi: Position,
    cell: i64,
    /// Vertical offset of the slice in pixels.
    dy: i64,
}

impl Frame {
    fn px(&self, p: &Position) -> (i64, i64) {
        ((p.x() - self.lo.x()) * self.cell, (self.hi.y() - p.y()) * self.cell + self.dy)
    }

    fn center(&self, p: &Position) -> (f64, f64) {
        let (x, y) = self.px(p);
        (x as f64 + self.cell as f64 / 2.0, y as f64 + self.cell as f64 / 2.0)
    }

    fn width(&self) -> i64 {
        (self.hi.x() - self.lo.x() + 1) * self.cell
    }

    fn height(&self) -> i64 {
        (self.hi.y() - self.lo.y() + 1) * self.cell
    }
}

/// Draws the final configuration of `trace`, the head trajectory from
/// `seed.head` and a marker on the final head.
pub fn render_svg(t: &Turedo, seed: &GlobalState, trace: &OrbitTrace, opts: &RenderOptions) -> Result<String, TuredoError> {
    if opts.cell_px < 1 {
        return Err(TuredoError::Render("cell_px must be at least 1".into()));
    }
    let three = seed.dim() == Dim::Three;
    if three && !opts.layered {
        return Err(TuredoError::Render("3D orbits need the layered option".into()));
    }
    let fin = &trace.final_state;
    let path = trace.head_path(&seed.head);
    let mut pts: Vec<Position> = fin.config.iter().map(|(p, _)| *p).chain(path.iter().copied()).collect();
    if let Some(dp) = &opts.overlay_path {
        pts.extend(dp.spine.iter().copied());
    }
    let (lo, hi) = bounds(pts.iter()).expect("head path is never empty");
    let margin = if three { Position::p3(1, 1, 0) } else { Position::p2(1, 1) };
    let (lo, hi) = (lo - margin, hi + margin);
    let cell = opts.cell_px as i64;
    let slices: Vec<i64> = if three { (lo.z()..=hi.z()).collect() } else { vec![0] };
    let gap = if three { cell } else { 0 };
    let base = Frame { lo, hi, cell, dy: 0 };
    let slice_h = base.height() + gap;
    let total_h = slice_h * slices.len() as i64 - gap;
    let w = base.width();

    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{total_h}" viewBox="0 0 {w} {total_h}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{total_h}" fill="white"/>"#).unwrap();
    let sorted = fin.config.sorted();
    let stroke = (cell as f64 / 6.0).max(0.5);
    for (k, z) in slices.iter().enumerate() {
        let f = Frame { lo, hi, cell, dy: k as i64 * slice_h };
        let in_slice = |p: &Position| !three || p.z() == *z;
        if three {
            writeln!(s, r#"<g id="z{z}">"#).unwrap();
        } else {
            writeln!(s, "<g>").unwrap();
        }
        writeln!(s, r##"<g class="cells" stroke="#dddddd" stroke-width="0.5">"##).unwrap();
        for (p, l) in sorted.iter().filter(|(p, _)| in_slice(p)) {
            let (x, y) = f.px(p);
            writeln!(s, r#"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{}"/>"#, opts.palette.color(t, *l))
                .unwrap();
        }
        writeln!(s, "</g>").unwrap();
        if let Some(b) = opts.overlay_blocks {
            writeln!(s, r##"<g class="blocks" stroke="#888888" stroke-width="1">"##).unwrap();
            let (bx, by) = (b.x().max(1), b.y().max(1));
            for x in lo.x()..=hi.x() + 1 {
                if x.rem_euclid(bx) == 0 {
                    let px = (x - lo.x()) * cell;
                    writeln!(s, r#"<line x1="{px}" y1="{}" x2="{px}" y2="{}"/>"#, f.dy, f.dy + f.height()).unwrap();
                }
            }
            for y in lo.y()..=hi.y() + 1 {
                if y.rem_euclid(by) == 0 {
                    let py = (hi.y() + 1 - y) * cell + f.dy;
                    writeln!(s, r#"<line x1="0" y1="{py}" x2="{w}" y2="{py}"/>"#).unwrap();
                }
            }
            writeln!(s, "</g>").unwrap();
        }
        if let Some(dp) = &opts.overlay_path {
            writeln!(s, r##"<g class="divider" fill="none" stroke="#d00000" stroke-width="{stroke}">"##).unwrap();
            for x in lo.x()..=hi.x() {
                for y in lo.y()..=hi.y() {
                    let p = Position::p2(x, y);
                    if dp.contains(&p) {
                        let (px, py) = f.px(&p);
                        writeln!(s, r#"<rect x="{px}" y="{py}" width="{cell}" height="{cell}"/>"#).unwrap();
                    }
                }
            }
            writeln!(s, "</g>").unwrap();
        }
        if opts.draw_head_path {
            // Split the trajectory into runs that stay in this slice.
            let mut runs: Vec<Vec<&Position>> = vec![Vec::new()];
            for p in &path {
                if in_slice(p) {
                    runs.last_mut().expect("non-empty").push(p);
                } else if !runs.last().expect("non-empty").is_empty() {
                    runs.push(Vec::new());
                }
            }
            for run in runs.iter().filter(|r| !r.is_empty()) {
                let pts: Vec<String> = run
                    .iter()
                    .map(|p| {
                        let (x, y) = f.center(p);
                        format!("{x},{y}")
                    })
                    .collect();
                writeln!(
                    s,
                    r#"<polyline class="trajectory" fill="none" stroke="black" stroke-width="{stroke}" points="{}"/>"#,
                    pts.join(" ")
                )
                .unwrap();
            }
        }
        if in_slice(&fin.head) {
            let (cx, cy) = f.center(&fin.head);
            let r = cell as f64 * 0.4;
            match direction_of(t, t.state_name(fin.state)) {
                Some(k) => {
                    // Triangle pointing along the held direction.
                    let pts: Vec<String> = [(1.0, 0.0), (-0.7, 0.7), (-0.7, -0.7)]
                        .iter()
                        .map(|(a, b)| {
                            let ang = std::f64::consts::FRAC_PI_2 * k as f64;
                            let (c, sn) = (ang.cos(), ang.sin());
                            let (x, y) = (a * c - b * sn, a * sn + b * c);
                            format!("{:.3},{:.3}", cx + r * x, cy - r * y)
                        })
                        .collect();
                    writeln!(s, r##"<polygon class="head" fill="#d00000" points="{}"/>"##, pts.join(" ")).unwrap();
                }
                None => {
                    writeln!(s, r##"<circle class="head" cx="{cx}" cy="{cy}" r="{r}" fill="#d00000"/>"##).unwrap();
                }
            }
        }
        writeln!(s, "</g>").unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    Ok(s)
}

/// Number of vertices of the trajectory polylines in an SVG document.
pub fn polyline_vertices(svg: &str) -> usize {
    svg.lines()
        .filter(|l| l.contains("class=\"trajectory\""))
        .filter_map(|l| l.split("points=\"").nth(1))
        .map(|rest| rest.split('"').next().unwrap_or("").split_whitespace().count())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AsciiOptions {
    pub blocks: Option<Position>,
    pub color: bool,
}

/// Whether ANSI colour is allowed by the environment (`TUREDO_COLOR=0`
/// disables it).
pub fn color_from_env() -> bool {
    std::env::var("TUREDO_COLOR").map(|v| v != "0").unwrap_or(true)
}

/// Bounding box of a state with one cell of margin.
pub fn default_bbox(s: &GlobalState) -> Rect {
    let (lo, hi) = bounds(s.config.iter().map(|(p, _)| p).chain(std::iter::once(&s.head))).expect("head");
    Rect { min: Position::p2(lo.x() - 1, lo.y() - 1), max: Position::p2(hi.x() + 1, hi.y() + 1) }
}

fn head_glyph(t: &Turedo, s: &GlobalState) -> char {
    match direction_of(t, t.state_name(s.state)) {
        Some(k) => DIRECTIONS[k].chars().next().expect("glyph"),
        None => '@',
    }
}

/// One character per cell, north at the top: `.` for blank, the first
/// character of each letter, and the head glyph.
pub fn render_ascii(t: &Turedo, s: &GlobalState, bbox: Rect, opts: &AsciiOptions) -> Result<String, TuredoError> {
    if s.dim() != Dim::Two {
        return Err(TuredoError::Render("ASCII output is planar".into()));
    }
    if bbox.min.x() > bbox.max.x() || bbox.min.y() > bbox.max.y() {
        return Err(TuredoError::Render("empty bounding box".into()));
    }
    let (bx, by) = opts.blocks.map(|b| (b.x().max(1), b.y().max(1))).unwrap_or((0, 0));
    let mut out = String::new();
    let rule_line = |out: &mut String| {
        for x in bbox.min.x()..=bbox.max.x() {
            if bx > 0 && x.rem_euclid(bx) == 0 && x != bbox.min.x() {
                out.push('+');
            }
            out.push('-');
        }
        out.push('\n');
    };
    for y in (bbox.min.y()..=bbox.max.y()).rev() {
        for x in bbox.min.x()..=bbox.max.x() {
            if bx > 0 && x.rem_euclid(bx) == 0 && x != bbox.min.x() {
                out.push('|');
            }
            let p = Position::p2(x, y);
            let cell = s.config.get(&p);
            let (ch, letter) = if p == s.head {
                (head_glyph(t, s), None)
            } else {
                match cell {
                    None => ('.', None),
                    Some(l) => (t.letter_name(l).chars().next().unwrap_or('?'), Some(l)),
                }
            };
            match (opts.color, letter) {
                (true, Some(l)) => write!(out, "\x1b[{}m{ch}\x1b[0m", 31 + l.0 % 6).unwrap(),
                (true, None) if p == s.head => write!(out, "\x1b[1m{ch}\x1b[0m").unwrap(),
                _ => out.push(ch),
            }
        }
        out.push('\n');
        if by > 0 && y.rem_euclid(by) == 0 && y != bbox.min.y() {
            rule_line(&mut out);
        }
    }
    Ok(out)
}

/// Convenience: the final state of a trace in its default box.
pub fn render_trace_ascii(t: &Turedo, trace: &OrbitTrace, opts: &AsciiOptions) -> Result<String, TuredoError> {
    render_ascii(t, &trace.final_state, default_bbox(&trace.final_state), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Configuration, StateId};
    use crate::engine::run;
    use crate::zoo::spiral_xor;

    fn p(x: i64, y: i64) -> Position {
        Position::p2(x, y)
    }

    #[test]
    fn empty_trace_marks_one_cell() {
        let t = spiral_xor().compile().unwrap();
        let s = GlobalState::single_head(Dim::Two, t.state("↑").unwrap());
        let tr = run(&t, &s, 0);
        let svg = render_svg(&t, &s, &tr, &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("class=\"head\"").count(), 1);
        assert_eq!(polyline_vertices(&svg), 1);
    }

    #[test]
    fn spiral_polyline_has_len_plus_one_vertices() {
        let t = spiral_xor().compile().unwrap();
        let s = GlobalState::single_head(Dim::Two, t.state("↑").unwrap());
        let tr = run(&t, &s, 200);
        let opts = RenderOptions { palette: Palette::Figure1, ..Default::default() };
        let svg = render_svg(&t, &s, &tr, &opts).unwrap();
        assert_eq!(polyline_vertices(&svg), 201);
        assert_eq!(svg, render_svg(&t, &s, &tr, &opts).unwrap());
        assert!(svg.contains("#2e9e44"));
    }

    #[test]
    fn ascii_examples() {
        let t = spiral_xor().compile().unwrap();
        let s = GlobalState::new(Configuration::new(), p(9, 9), StateId(0));
        let bbox = Rect { min: p(-1, -1), max: p(1, 1) };
        assert_eq!(render_ascii(&t, &s, bbox, &AsciiOptions::default()).unwrap(), "...\n...\n...\n");
        let c: Configuration = [(p(0, 0), t.letter("1").unwrap())].into_iter().collect();
        let s = GlobalState::new(c, p(9, 9), StateId(0));
        assert_eq!(render_ascii(&t, &s, bbox, &AsciiOptions::default()).unwrap(), "...\n.1.\n...\n");
    }

    #[test]
    fn ascii_block_gridlines() {
        let t = spiral_xor().compile().unwrap();
        let s = GlobalState::new(Configuration::new(), p(9, 9), StateId(0));
        let bbox = Rect { min: p(0, 0), max: p(5, 5) };
        let opts = AsciiOptions { blocks: Some(p(3, 3)), color: false };
        let out = render_ascii(&t, &s, bbox, &opts).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "...|...");
        assert_eq!(lines[3], "---+---");
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn ascii_rejects_empty_box() {
        let t = spiral_xor().compile().unwrap();
        let s = GlobalState::single_head(Dim::Two, StateId(0));
        assert!(render_ascii(&t, &s, Rect { min: p(1, 0), max: p(0, 0) }, &AsciiOptions::default()).is_err());
    }

    #[test]
    fn head_glyph_is_direction() {
        let t = spiral_xor().compile().unwrap();
        let s = GlobalState::single_head(Dim::Two, t.state("←").unwrap());
        let out = render_ascii(&t, &s, Rect { min: p(0, 0), max: p(0, 0) }, &AsciiOptions::default()).unwrap();
        assert_eq!(out, "←\n");
    }
}
