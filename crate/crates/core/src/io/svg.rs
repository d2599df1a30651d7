//! SVG renderings of gate and cell layouts.
//!
//! Tiles are shaded by clock zone, darker for later phases, and occupied
//! tiles repeat their clock number in the bottom-right corner.

use std::fmt::Write as _;

use crate::layout::{Dir, GateLayout, Layer, Tile};
use crate::network::Op;
use crate::techmap::{CellKind, CellLayout};

const TILE: u32 = 60;
const CELL: u32 = 12;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn shade(clock: Option<u8>, phases: u8) -> String {
    match clock {
        None => "#ffffff".into(),
        Some(z) => {
            let step = 150 / u32::from(phases.max(1));
            let v = 240 - step * u32::from(z);
            format!("#{v:02x}{v:02x}{v:02x}")
        }
    }
}

fn header(s: &mut String, w: u32, h: u32, title: &str) {
    let _ = write!(
        s,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <title>{}</title>\n",
        escape(title)
    );
}

/// Point on the edge of a tile of size `size` at `(ox, oy)`, or its centre.
fn anchor(ox: u32, oy: u32, size: u32, side: Option<Dir>) -> (u32, u32) {
    let (cx, cy) = (ox + size / 2, oy + size / 2);
    match side {
        None => (cx, cy),
        Some(Dir::N) => (cx, oy),
        Some(Dir::S) => (cx, oy + size),
        Some(Dir::W) => (ox, cy),
        Some(Dir::E) => (ox + size, cy),
    }
}

pub fn gate_layout_svg(layout: &GateLayout) -> String {
    let (w, h) = (layout.width() * TILE, layout.height() * TILE);
    let phases = layout.scheme().phases;
    let mut s = String::new();
    header(&mut s, w, h, layout.name());
    let net = layout.network();
    s.push_str("<g class=\"grid\">\n");
    for t in layout.all_tiles() {
        let _ = writeln!(
            s,
            "<rect class=\"tile\" x=\"{}\" y=\"{}\" width=\"{TILE}\" height=\"{TILE}\" fill=\"{}\" stroke=\"#999999\"/>",
            t.x * TILE,
            t.y * TILE,
            shade(layout.clock(t), phases)
        );
    }
    s.push_str("</g>\n");

    // port sides of vertex tiles, so stubs reach the tile edges
    let mut stubs: Vec<(Tile, Dir)> = Vec::new();
    if let Ok(routes) = layout.routes() {
        for r in routes {
            if let (Some(t), Some(d)) = (r.source, r.out_side()) {
                stubs.push((t, d));
            }
            if let (Some(t), Some(d)) = (r.target, r.in_side()) {
                stubs.push((t, d));
            }
        }
    }
    for t in layout.occupied_tiles() {
        let (ox, oy) = (t.x * TILE, t.y * TILE);
        let _ = writeln!(s, "<g class=\"occupied\">");
        for seg in layout.wires_at(t) {
            let (x1, y1) = anchor(ox, oy, TILE, Some(seg.entry));
            let (x2, y2) = anchor(ox, oy, TILE, Some(seg.exit));
            let (cx, cy) = anchor(ox, oy, TILE, None);
            let dash = if seg.layer == Layer::Crossing {
                " stroke-dasharray=\"4 2\""
            } else {
                ""
            };
            let _ = writeln!(
                s,
                "<path class=\"wire\" d=\"M{x1},{y1} L{cx},{cy} L{x2},{y2}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"3\"{dash}/>"
            );
        }
        if let Some(v) = layout.vertex_at(t) {
            let (cx, cy) = anchor(ox, oy, TILE, None);
            for &(_, d) in stubs.iter().filter(|(st, _)| *st == t) {
                let (x, y) = anchor(ox, oy, TILE, Some(d));
                let _ = writeln!(
                    s,
                    "<line class=\"wire\" x1=\"{x}\" y1=\"{y}\" x2=\"{cx}\" y2=\"{cy}\" stroke=\"#000000\" stroke-width=\"3\"/>"
                );
            }
            let op = net.op(v);
            let (fill, text) = match op {
                Op::Pi | Op::Po => ("#cfe2ff", escape(&net.vertex(v).label)),
                Op::Fanout => ("#ffe8a3", "F".into()),
                _ => ("#ffffff", op.name().to_uppercase()),
            };
            let _ = writeln!(
                s,
                "<circle class=\"gate\" cx=\"{cx}\" cy=\"{cy}\" r=\"{}\" fill=\"{fill}\" stroke=\"#000000\"/>",
                TILE / 4
            );
            let _ = writeln!(
                s,
                "<text class=\"op\" x=\"{cx}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{text}</text>",
                cy + 4
            );
        }
        if let Some(z) = layout.clock(t) {
            let latch = layout.latch(t);
            let label = if latch > 0 {
                format!("{z}+{latch}")
            } else {
                z.to_string()
            };
            let _ = writeln!(
                s,
                "<text class=\"clock\" x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{label}</text>",
                ox + TILE - 3,
                oy + TILE - 3
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

pub fn cell_layout_svg(cells: &CellLayout) -> String {
    let (w, h) = (cells.width.max(1) * CELL, cells.height.max(1) * CELL);
    let mut s = String::new();
    header(&mut s, w, h, &cells.name);
    let _ = writeln!(
        s,
        "<rect class=\"background\" x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>"
    );
    for (p, c) in cells.cells() {
        let fill = match c.kind {
            CellKind::Normal => shade(Some(c.clock), cells.phases),
            CellKind::Input => "#3b7dd8".into(),
            CellKind::Output => "#e0b000".into(),
            CellKind::Const0 | CellKind::Const1 => "#e07000".into(),
        };
        let inset = if p.layer > 0 { 3 } else { 1 };
        let _ = write!(
            s,
            "<rect class=\"cell\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\" stroke=\"#333333\"",
            p.x * CELL + inset,
            p.y * CELL + inset,
            CELL - 2 * inset,
            CELL - 2 * inset
        );
        if p.layer > 0 {
            s.push_str(" fill-opacity=\"0.6\"");
        }
        match &c.label {
            Some(l) => {
                let _ = writeln!(s, "><title>{}</title></rect>", escape(l));
            }
            None => s.push_str("/>\n"),
        }
    }
    s.push_str("</svg>\n");
    s
}
