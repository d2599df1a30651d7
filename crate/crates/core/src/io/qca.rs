//! QCADesigner 2.x design files.
//!
//! Cells sit on a 20 nm pitch, are 18 nm wide and carry four 5 nm dots at
//! the corners of a 9 nm square. Ground cells go to the main cell layer,
//! crossing-layer cells to a second cell layer in crossover mode.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::techmap::{Cell, CellKind, CellLayout, CellPos};

pub const QCA_VERSION: &str = "2.000000";
const PITCH: f64 = 20.0;
const CELL: f64 = 18.0;
const DOT: f64 = 5.0;
const DOT_OFFSET: f64 = 4.5;
const ELECTRON: f64 = 1.602176e-19;

#[derive(Debug, Error)]
pub enum QcaError {
    #[error("cannot access QCA file: {0}")]
    Io(#[from] std::io::Error),
    #[error("cell layout is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

fn object(s: &mut String, x: f64, y: f64, w: f64, h: f64, rgb: (u32, u32, u32)) {
    let _ = write!(
        s,
        "[TYPE:QCADDesignObject]\nx={x:.6}\ny={y:.6}\nbSelected=FALSE\n\
         clr.red={}\nclr.green={}\nclr.blue={}\n\
         bounding_box.xWorld={:.6}\nbounding_box.yWorld={:.6}\n\
         bounding_box.cxWorld={w:.6}\nbounding_box.cyWorld={h:.6}\n\
         [#TYPE:QCADDesignObject]\n",
        rgb.0,
        rgb.1,
        rgb.2,
        x - w / 2.0,
        y - h / 2.0,
    );
}

/// Dot charges for a polarization: +1 fills the top-right and bottom-left
/// dots, -1 the other diagonal, 0 spreads half an electron over each.
fn charges(pol: i8) -> [f64; 4] {
    let full = ELECTRON;
    match pol {
        1 => [0.0, full, 0.0, full],
        -1 => [full, 0.0, full, 0.0],
        _ => [full / 2.0; 4],
    }
}

fn write_cell(s: &mut String, pos: CellPos, cell: &Cell) {
    let x = f64::from(pos.x) * PITCH;
    let y = f64::from(pos.y) * PITCH;
    let (function, pol, rgb) = match cell.kind {
        CellKind::Normal => ("QCAD_CELL_NORMAL", 0, clock_colour(cell.clock)),
        CellKind::Input => ("QCAD_CELL_INPUT", 0, (0, 0, 65535)),
        CellKind::Output => ("QCAD_CELL_OUTPUT", 0, (65535, 65535, 0)),
        CellKind::Const0 => ("QCAD_CELL_FIXED", -1, (65535, 32768, 0)),
        CellKind::Const1 => ("QCAD_CELL_FIXED", 1, (65535, 32768, 0)),
    };
    let mode = if pos.layer == 0 {
        "QCAD_CELL_MODE_NORMAL"
    } else {
        "QCAD_CELL_MODE_CROSSOVER"
    };
    s.push_str("[TYPE:QCADCell]\n");
    object(s, x, y, CELL, CELL, rgb);
    let _ = write!(
        s,
        "cell_options.cxCell={CELL:.6}\ncell_options.cyCell={CELL:.6}\n\
         cell_options.dot_diameter={DOT:.6}\ncell_options.clock={}\n\
         cell_options.mode={mode}\ncell_function={function}\nnumber_of_dots=4\n",
        cell.clock
    );
    let offsets = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
    for ((dx, dy), q) in offsets.into_iter().zip(charges(pol)) {
        let _ = write!(
            s,
            "[TYPE:CELL_DOT]\nx={:.6}\ny={:.6}\ndiameter={DOT:.6}\ncharge={q:e}\n\
             spin=0.000000\npotential=0.000000\n[#TYPE:CELL_DOT]\n",
            x + dx * DOT_OFFSET,
            y + dy * DOT_OFFSET,
        );
    }
    if let Some(label) = &cell.label {
        s.push_str("[TYPE:QCADLabel]\n[TYPE:QCADStretchyObject]\n");
        object(s, x, y - PITCH, PITCH * 2.0, PITCH, (0, 0, 65535));
        let _ = write!(s, "[#TYPE:QCADStretchyObject]\npsz={label}\n[#TYPE:QCADLabel]\n");
    }
    s.push_str("[#TYPE:QCADCell]\n");
}

fn clock_colour(clock: u8) -> (u32, u32, u32) {
    match clock % 4 {
        0 => (0, 65535, 0),
        1 => (65535, 0, 65535),
        2 => (0, 65535, 65535),
        _ => (65535, 65535, 65535),
    }
}

pub fn to_qca(cells: &CellLayout) -> Result<String, QcaError> {
    if cells.is_empty() {
        return Err(QcaError::Empty);
    }
    let mut s = String::new();
    let _ = write!(
        s,
        "[VERSION]\nqcadesigner_version={QCA_VERSION}\n[#VERSION]\n[TYPE:DESIGN]\n"
    );
    s.push_str("[TYPE:QCADLayer]\ntype=0\nstatus=1\npszDescription=Substrate\n[#TYPE:QCADLayer]\n");
    for layer in 0..cells.layers() {
        let description = if layer == 0 {
            "Main Cell Layer".to_string()
        } else {
            format!("Crossing Layer {layer}")
        };
        let _ = write!(s, "[TYPE:QCADLayer]\ntype=1\nstatus=0\npszDescription={description}\n");
        for (pos, cell) in cells.cells().filter(|(p, _)| p.layer == layer) {
            write_cell(&mut s, pos, cell);
        }
        s.push_str("[#TYPE:QCADLayer]\n");
    }
    s.push_str("[TYPE:QCADLayer]\ntype=2\nstatus=0\npszDescription=Drawing Layer\n[#TYPE:QCADLayer]\n");
    s.push_str("[#TYPE:DESIGN]\n");
    Ok(s)
}

pub fn write_qca(cells: &CellLayout, path: &Path) -> Result<(), QcaError> {
    std::fs::write(path, to_qca(cells)?)?;
    Ok(())
}

#[derive(Default)]
struct PendingCell {
    x: Option<f64>,
    y: Option<f64>,
    clock: Option<u8>,
    function: Option<String>,
    label: Option<String>,
    charges: Vec<f64>,
}

/// Reads a design back into cells. Width and height are the extent of the
/// cells found; the layout name is taken from `name`.
pub fn from_qca(text: &str, name: &str) -> Result<CellLayout, QcaError> {
    let err = |line: usize, message: &str| QcaError::Format {
        line,
        message: message.to_string(),
    };
    let mut stack: Vec<&str> = Vec::new();
    let mut cell_layer: Option<u8> = None;
    let mut cell_layers = 0u8;
    let mut pending: Option<PendingCell> = None;
    let mut found: Vec<(CellPos, Cell)> = Vec::new();
    let mut version = None;

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(tag) = line.strip_prefix("[#").and_then(|l| l.strip_suffix(']')) {
            let open = stack.pop().ok_or_else(|| err(ln, "unbalanced closing tag"))?;
            if open != tag {
                return Err(err(ln, "mismatched closing tag"));
            }
            match tag {
                "TYPE:QCADLayer" => {
                    cell_layer = None;
                }
                "TYPE:QCADCell" => {
                    let c = pending.take().ok_or_else(|| err(ln, "cell without body"))?;
                    let layer = cell_layer.ok_or_else(|| err(ln, "cell outside a cell layer"))?;
                    let (x, y) = c.x.zip(c.y).ok_or_else(|| err(ln, "cell without position"))?;
                    let clock = c.clock.ok_or_else(|| err(ln, "cell without clock"))?;
                    let kind = match c.function.as_deref() {
                        Some("QCAD_CELL_NORMAL") => CellKind::Normal,
                        Some("QCAD_CELL_INPUT") => CellKind::Input,
                        Some("QCAD_CELL_OUTPUT") => CellKind::Output,
                        Some("QCAD_CELL_FIXED") => {
                            if c.charges.len() != 4 {
                                return Err(err(ln, "fixed cell needs four dots"));
                            }
                            // +1 puts the charge on dots 1 and 3
                            let p = (c.charges[1] + c.charges[3]) - (c.charges[0] + c.charges[2]);
                            if p > 0.0 {
                                CellKind::Const1
                            } else {
                                CellKind::Const0
                            }
                        }
                        _ => return Err(err(ln, "unknown cell function")),
                    };
                    let to_index = |v: f64| {
                        let k = (v / PITCH).round();
                        (k >= 0.0 && (v - k * PITCH).abs() < 1e-6).then_some(k as u32)
                    };
                    let pos = CellPos {
                        x: to_index(x).ok_or_else(|| err(ln, "cell off the grid"))?,
                        y: to_index(y).ok_or_else(|| err(ln, "cell off the grid"))?,
                        layer,
                    };
                    found.push((
                        pos,
                        Cell {
                            kind,
                            clock,
                            label: c.label,
                        },
                    ));
                }
                _ => {}
            }
            continue;
        }
        if let Some(tag) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            stack.push(tag);
            if tag == "TYPE:QCADCell" {
                if pending.is_some() {
                    return Err(err(ln, "nested cell"));
                }
                pending = Some(PendingCell::default());
            }
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| err(ln, "expected key=value"))?;
        let top = stack.last().copied().unwrap_or("");
        let parent = stack.len().checked_sub(2).map(|i| stack[i]).unwrap_or("");
        match (top, key) {
            ("VERSION", "qcadesigner_version") => version = Some(value.to_string()),
            ("TYPE:QCADLayer", "type") => {
                let t: u32 = value.parse().map_err(|_| err(ln, "bad layer type"))?;
                if t == 1 {
                    cell_layer = Some(cell_layers);
                    cell_layers += 1;
                }
            }
            ("TYPE:QCADDesignObject", "x") if parent == "TYPE:QCADCell" => {
                pending.as_mut().expect("inside a cell").x = Some(value.parse().map_err(|_| err(ln, "bad x"))?);
            }
            ("TYPE:QCADDesignObject", "y") if parent == "TYPE:QCADCell" => {
                pending.as_mut().expect("inside a cell").y = Some(value.parse().map_err(|_| err(ln, "bad y"))?);
            }
            ("TYPE:QCADCell", "cell_options.clock") => {
                pending.as_mut().expect("inside a cell").clock = Some(value.parse().map_err(|_| err(ln, "bad clock"))?);
            }
            ("TYPE:QCADCell", "cell_function") => {
                pending.as_mut().expect("inside a cell").function = Some(value.to_string());
            }
            ("TYPE:CELL_DOT", "charge") => {
                if let Some(c) = pending.as_mut() {
                    c.charges.push(value.parse().map_err(|_| err(ln, "bad charge"))?);
                }
            }
            ("TYPE:QCADLabel", "psz") => {
                if let Some(c) = pending.as_mut() {
                    c.label = Some(value.to_string());
                }
            }
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(err(text.lines().count(), "unclosed section"));
    }
    if version.is_none() {
        return Err(err(1, "missing version header"));
    }
    let width = found.iter().map(|(p, _)| p.x + 1).max().unwrap_or(0);
    let height = found.iter().map(|(p, _)| p.y + 1).max().unwrap_or(0);
    let phases = found.iter().map(|(_, c)| c.clock + 1).max().unwrap_or(4).max(4);
    let mut out = CellLayout::new(name, width, height, phases);
    for (p, c) in found {
        out.set(p, c);
    }
    Ok(out)
}

pub fn read_qca(path: &Path) -> Result<CellLayout, QcaError> {
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("qca");
    from_qca(&std::fs::read_to_string(path)?, name)
}
