//! Gate libraries: fixed-size cell blocks per tile configuration.
//!
//! Libraries are plain text so that new technologies need no code. A file
//! has a header (`library`, `size`, `crossing`, one `cell` line per
//! character) followed by blocks:
//!
//! ```text
//! block and rotatable
//! in W N
//! out E
//! ..x..
//! ..x..
//! xxxxx
//! ..0..
//! .....
//! end
//! ```
//!
//! A second matrix after a `layer` line describes the crossing layer. For
//! `crossing` blocks the first `in`/`out` sides belong to the ground wire
//! and the second to the crossing wire.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::Dir;
use crate::network::Op;

const QCA_ONE: &str = include_str!("../../data/qca_one.lib");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Normal,
    Input,
    Output,
    Const0,
    Const1,
}

impl CellKind {
    fn from_name(s: &str) -> Option<Option<CellKind>> {
        Some(match s {
            "empty" => None,
            "normal" => Some(CellKind::Normal),
            "input" => Some(CellKind::Input),
            "output" => Some(CellKind::Output),
            "const0" => Some(CellKind::Const0),
            "const1" => Some(CellKind::Const1),
            _ => return None,
        })
    }

    fn name(kind: Option<CellKind>) -> &'static str {
        match kind {
            None => "empty",
            Some(CellKind::Normal) => "normal",
            Some(CellKind::Input) => "input",
            Some(CellKind::Output) => "output",
            Some(CellKind::Const0) => "const0",
            Some(CellKind::Const1) => "const1",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockKind {
    Wire,
    Crossing,
    Vertex(Op),
}

impl BlockKind {
    fn parse(s: &str) -> Option<BlockKind> {
        match s {
            "wire" => Some(BlockKind::Wire),
            "crossing" => Some(BlockKind::Crossing),
            _ => Op::from_name(s).map(BlockKind::Vertex),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BlockKind::Wire => "wire",
            BlockKind::Crossing => "crossing",
            BlockKind::Vertex(op) => op.name(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossingStyle {
    /// The bridging wire sits on a second cell layer.
    Layered,
    /// Both wires share the ground layer.
    Coplanar,
}

/// `layers[l][y][x]`, row-major from the top-left cell.
pub type Matrix = Vec<Vec<Option<CellKind>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub kind: BlockKind,
    pub ins: Vec<Dir>,
    pub outs: Vec<Dir>,
    pub layers: Vec<Matrix>,
    pub rotatable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateLibrary {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub crossing: CrossingStyle,
    /// Character for each cell kind, in declaration order.
    pub alphabet: Vec<(char, Option<CellKind>)>,
    /// Blocks as written in the library file.
    pub blocks: Vec<Block>,
    variants: Vec<Block>,
}

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("cannot read library: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("block {index} ({kind}): {message}")]
    Invalid {
        index: usize,
        kind: &'static str,
        message: String,
    },
    #[error("unknown library '{0}'")]
    Unknown(String),
}

fn syntax(line: usize, message: impl Into<String>) -> LibraryError {
    LibraryError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_dirs(words: &[&str], line: usize) -> Result<Vec<Dir>, LibraryError> {
    words
        .iter()
        .map(|w| {
            let mut cs = w.chars();
            match (cs.next().and_then(Dir::from_letter), cs.next()) {
                (Some(d), None) => Ok(d),
                _ => Err(syntax(line, format!("bad side '{w}'"))),
            }
        })
        .collect()
}

/// Block-local position of the port cell on `side`.
pub fn port_cell(rows: usize, cols: usize, side: Dir) -> (usize, usize) {
    match side {
        Dir::N => (cols / 2, 0),
        Dir::S => (cols / 2, rows - 1),
        Dir::W => (0, rows / 2),
        Dir::E => (cols - 1, rows / 2),
    }
}

impl GateLibrary {
    pub fn qca_one() -> GateLibrary {
        GateLibrary::parse(QCA_ONE).expect("bundled library is valid")
    }

    /// A built-in name or a path to a library file.
    pub fn load(name_or_path: &str) -> Result<GateLibrary, LibraryError> {
        match name_or_path.to_ascii_lowercase().as_str() {
            "qca-one" | "qca_one" | "qcaone" => Ok(GateLibrary::qca_one()),
            _ => {
                let path = Path::new(name_or_path);
                if !path.exists() {
                    return Err(LibraryError::Unknown(name_or_path.to_string()));
                }
                GateLibrary::parse(&std::fs::read_to_string(path)?)
            }
        }
    }

    pub fn parse(text: &str) -> Result<GateLibrary, LibraryError> {
        let mut name = None;
        let mut size = None;
        let mut crossing = CrossingStyle::Layered;
        let mut alphabet: Vec<(char, Option<CellKind>)> = Vec::new();
        let mut blocks = Vec::new();
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        while let Some((ln, line)) = lines.next() {
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "library" if words.len() == 2 => name = Some(words[1].to_string()),
                "size" if words.len() == 3 => {
                    let r = words[1].parse::<usize>().map_err(|_| syntax(ln, "bad row count"))?;
                    let c = words[2].parse::<usize>().map_err(|_| syntax(ln, "bad column count"))?;
                    if r < 3 || c < 3 {
                        return Err(syntax(ln, "blocks need at least 3x3 cells"));
                    }
                    size = Some((r, c));
                }
                "crossing" if words.len() == 2 => {
                    crossing = match words[1] {
                        "layered" => CrossingStyle::Layered,
                        "coplanar" => CrossingStyle::Coplanar,
                        s => return Err(syntax(ln, format!("unknown crossing style '{s}'"))),
                    }
                }
                "cell" if words.len() == 3 => {
                    let mut cs = words[1].chars();
                    let c = match (cs.next(), cs.next()) {
                        (Some(c), None) => c,
                        _ => return Err(syntax(ln, "cell symbol must be one character")),
                    };
                    let kind = CellKind::from_name(words[2])
                        .ok_or_else(|| syntax(ln, format!("unknown cell kind '{}'", words[2])))?;
                    if alphabet.iter().any(|&(d, _)| d == c) {
                        return Err(syntax(ln, format!("symbol '{c}' declared twice")));
                    }
                    alphabet.push((c, kind));
                }
                "block" if (2..=3).contains(&words.len()) => {
                    let (rows, cols) = size.ok_or_else(|| syntax(ln, "size must precede blocks"))?;
                    let kind = BlockKind::parse(words[1])
                        .ok_or_else(|| syntax(ln, format!("unknown block kind '{}'", words[1])))?;
                    let rotatable = match words.get(2) {
                        None => false,
                        Some(&"rotatable") => true,
                        Some(w) => return Err(syntax(ln, format!("unknown block flag '{w}'"))),
                    };
                    let mut block = Block {
                        kind,
                        ins: Vec::new(),
                        outs: Vec::new(),
                        layers: vec![Vec::new()],
                        rotatable,
                    };
                    loop {
                        let (ln, line) = lines.next().ok_or_else(|| syntax(ln, "block lacks 'end'"))?;
                        let words: Vec<&str> = line.split_whitespace().collect();
                        match words[0] {
                            "in" => block.ins = parse_dirs(&words[1..], ln)?,
                            "out" => block.outs = parse_dirs(&words[1..], ln)?,
                            "layer" if words.len() == 1 => block.layers.push(Vec::new()),
                            "end" if words.len() == 1 => break,
                            _ => {
                                let row = line
                                    .chars()
                                    .map(|c| {
                                        alphabet
                                            .iter()
                                            .find(|&&(d, _)| d == c)
                                            .map(|&(_, k)| k)
                                            .ok_or_else(|| syntax(ln, format!("undeclared cell symbol '{c}'")))
                                    })
                                    .collect::<Result<Vec<_>, _>>()?;
                                if row.len() != cols {
                                    return Err(syntax(ln, format!("row has {} cells, expected {cols}", row.len())));
                                }
                                let layer = block.layers.last_mut().expect("at least one layer");
                                if layer.len() == rows {
                                    return Err(syntax(ln, format!("more than {rows} rows")));
                                }
                                layer.push(row);
                            }
                        }
                    }
                    if let Some(l) = block.layers.iter().find(|l| l.len() != rows) {
                        return Err(syntax(ln, format!("block has {} rows, expected {rows}", l.len())));
                    }
                    blocks.push(block);
                }
                _ => return Err(syntax(ln, format!("unexpected '{line}'"))),
            }
        }
        let name = name.ok_or_else(|| syntax(0, "missing 'library' line"))?;
        let (rows, cols) = size.ok_or_else(|| syntax(0, "missing 'size' line"))?;
        let mut lib = GateLibrary {
            name,
            rows,
            cols,
            crossing,
            alphabet,
            blocks,
            variants: Vec::new(),
        };
        lib.validate()?;
        lib.variants = lib.expand();
        Ok(lib)
    }

    fn validate(&self) -> Result<(), LibraryError> {
        for (index, b) in self.blocks.iter().enumerate() {
            let invalid = |message: String| LibraryError::Invalid {
                index,
                kind: b.kind.name(),
                message,
            };
            if b.rotatable && self.rows != self.cols {
                return Err(invalid("only square blocks can rotate".into()));
            }
            let mut sides: Vec<Dir> = b.ins.iter().chain(&b.outs).copied().collect();
            if b.kind == BlockKind::Crossing {
                if b.ins.len() != 2 || b.outs.len() != 2 {
                    return Err(invalid("crossings need two inputs and two outputs".into()));
                }
                let want = match self.crossing {
                    CrossingStyle::Layered => 2,
                    CrossingStyle::Coplanar => 1,
                };
                if b.layers.len() != want {
                    return Err(invalid(format!("{want} layer(s) expected for this crossing style")));
                }
            } else if b.layers.len() != 1 {
                return Err(invalid("only crossings have a second layer".into()));
            }
            let n = sides.len();
            sides.sort();
            sides.dedup();
            if sides.len() != n {
                return Err(invalid("a side is used twice".into()));
            }
            let (ins, outs) = match b.kind {
                BlockKind::Wire => (1, 1),
                BlockKind::Crossing => (2, 2),
                BlockKind::Vertex(Op::Po) => (1, 0),
                BlockKind::Vertex(Op::Fanout) => (1, 2),
                BlockKind::Vertex(op) => (op.arity(), 1),
            };
            if b.ins.len() != ins || b.outs.len() != outs {
                return Err(invalid(format!("expected {ins} input and {outs} output sides")));
            }
            for &side in &sides {
                let (x, y) = port_cell(self.rows, self.cols, side);
                if b.layers.iter().all(|l| l[y][x].is_none()) {
                    return Err(invalid(format!("no port cell on side {}", side.letter())));
                }
            }
            let cells = b.layers.iter().flatten().flatten().flatten();
            for &k in cells {
                let ok = match k {
                    CellKind::Normal => true,
                    CellKind::Input => b.kind == BlockKind::Vertex(Op::Pi),
                    CellKind::Output => b.kind == BlockKind::Vertex(Op::Po),
                    CellKind::Const0 | CellKind::Const1 => {
                        matches!(b.kind, BlockKind::Vertex(op) if !op.is_io() && op != Op::Fanout)
                    }
                };
                if !ok {
                    return Err(invalid(format!(
                        "{} cells are not allowed here",
                        CellKind::name(Some(k))
                    )));
                }
            }
        }
        Ok(())
    }

    fn transformed(&self, b: &Block, rot: usize, mirror: bool) -> Block {
        let n = self.cols;
        let dir = |mut d: Dir| {
            if mirror {
                d = d.mirror();
            }
            for _ in 0..rot {
                d = d.rotate_cw();
            }
            d
        };
        let point = |mut x: usize, mut y: usize| {
            if mirror {
                x = n - 1 - x;
            }
            for _ in 0..rot {
                (x, y) = (n - 1 - y, x);
            }
            (x, y)
        };
        let layers = b
            .layers
            .iter()
            .map(|m| {
                let mut out = vec![vec![None; n]; n];
                for (y, row) in m.iter().enumerate() {
                    for (x, &k) in row.iter().enumerate() {
                        let (nx, ny) = point(x, y);
                        out[ny][nx] = k;
                    }
                }
                out
            })
            .collect();
        Block {
            kind: b.kind,
            ins: b.ins.iter().map(|&d| dir(d)).collect(),
            outs: b.outs.iter().map(|&d| dir(d)).collect(),
            layers,
            rotatable: false,
        }
    }

    /// Every block under every symmetry it allows. The first block written
    /// for a configuration wins.
    fn expand(&self) -> Vec<Block> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for b in &self.blocks {
            let forms: Vec<Block> = if b.rotatable {
                (0..8).map(|i| self.transformed(b, i % 4, i >= 4)).collect()
            } else {
                vec![Block {
                    rotatable: false,
                    ..b.clone()
                }]
            };
            for f in forms {
                if seen.insert(Self::key(f.kind, &f.ins, &f.outs)) {
                    out.push(f);
                }
            }
        }
        out
    }

    /// Crossings keep their (ground, crossing) order; elsewhere port order
    /// carries no meaning.
    fn key(kind: BlockKind, ins: &[Dir], outs: &[Dir]) -> (BlockKind, Vec<Dir>, Vec<Dir>) {
        let (mut i, mut o) = (ins.to_vec(), outs.to_vec());
        if kind != BlockKind::Crossing {
            i.sort();
            o.sort();
        }
        (kind, i, o)
    }

    pub fn variants(&self) -> &[Block] {
        &self.variants
    }

    /// Finds the block for a tile whose known port sides are `ins` and
    /// `outs`. Blocks may add further sides for open ports.
    pub fn lookup(&self, kind: BlockKind, ins: &[Dir], outs: &[Dir]) -> Option<&Block> {
        if kind == BlockKind::Crossing {
            return self
                .variants
                .iter()
                .find(|b| b.kind == kind && b.ins == ins && b.outs == outs);
        }
        let exact = Self::key(kind, ins, outs);
        self.variants
            .iter()
            .find(|b| Self::key(b.kind, &b.ins, &b.outs) == exact)
            .or_else(|| {
                self.variants.iter().find(|b| {
                    b.kind == kind && ins.iter().all(|d| b.ins.contains(d)) && outs.iter().all(|d| b.outs.contains(d))
                })
            })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "library {}", self.name);
        let _ = writeln!(s, "size {} {}", self.rows, self.cols);
        let style = match self.crossing {
            CrossingStyle::Layered => "layered",
            CrossingStyle::Coplanar => "coplanar",
        };
        let _ = writeln!(s, "crossing {style}");
        for &(c, k) in &self.alphabet {
            let _ = writeln!(s, "cell {c} {}", CellKind::name(k));
        }
        let symbol = |k: Option<CellKind>| {
            self.alphabet
                .iter()
                .find(|&&(_, d)| d == k)
                .map(|&(c, _)| c)
                .expect("every used kind has a symbol")
        };
        let sides = |ds: &[Dir]| ds.iter().map(|d| d.letter().to_string()).collect::<Vec<_>>().join(" ");
        for b in &self.blocks {
            let flag = if b.rotatable { " rotatable" } else { "" };
            let _ = writeln!(s, "\nblock {}{flag}", b.kind.name());
            if !b.ins.is_empty() {
                let _ = writeln!(s, "in {}", sides(&b.ins));
            }
            if !b.outs.is_empty() {
                let _ = writeln!(s, "out {}", sides(&b.outs));
            }
            for (i, layer) in b.layers.iter().enumerate() {
                if i > 0 {
                    s.push_str("layer\n");
                }
                for row in layer {
                    s.extend(row.iter().map(|&k| symbol(k)));
                    s.push('\n');
                }
            }
            s.push_str("end\n");
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), LibraryError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Number of distinct configurations per block kind, for diagnostics.
    pub fn coverage(&self) -> BTreeMap<&'static str, usize> {
        let mut m = BTreeMap::new();
        for b in &self.variants {
            *m.entry(b.kind.name()).or_insert(0) += 1;
        }
        m
    }
}
