//! Store-based command shell.
//!
//! Networks, gate layouts and cell layouts each live in their own store.
//! Generator commands append to one store and make the new item current;
//! consumers read the current item of the store they need.

mod log;

pub use log::{Record, RunLog, StatsRecord};

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::Parser;
use thiserror::Error;

use fcn_core::clocking::ClockingScheme;
use fcn_core::exact::{exact_layout, ExactParams, Status};
use fcn_core::io::{cell_layout_svg, gate_layout_svg, write_qca};
use fcn_core::layout::{EnergyTable, GateLayout};
use fcn_core::network::{parse_verilog, LogicNetwork, Op};
use fcn_core::ortho::{ortho_layout, OrthoParams, ORTHO_OPS};
use fcn_core::techmap::{apply_library, CellLayout, GateLibrary, QCA_ONE_OPS};

/// Environment variable naming a program that `show` hands the SVG to.
pub const VIEWER_ENV: &str = "FCN_SVG_VIEWER";

#[derive(Debug, Error)]
pub enum ShellError {
    #[error("unknown command '{0}'")]
    Unknown(String),
    #[error("{0}")]
    Usage(String),
    #[error("no {0} in store")]
    EmptyStore(&'static str),
    #[error("{0}")]
    Failed(String),
    #[error("line {line}: {source}")]
    Script { line: usize, source: Box<ShellError> },
    #[error("cannot read script: {0}")]
    Io(#[from] std::io::Error),
}

fn failed(e: impl std::fmt::Display) -> ShellError {
    ShellError::Failed(e.to_string())
}

#[derive(Debug)]
pub struct Store<T> {
    items: Vec<T>,
    current: Option<usize>,
}

impl<T> Default for Store<T> {
    fn default() -> Self {
        Store {
            items: Vec::new(),
            current: None,
        }
    }
}

impl<T> Store<T> {
    pub fn push(&mut self, item: T) -> usize {
        self.items.push(item);
        self.current = Some(self.items.len() - 1);
        self.items.len() - 1
    }

    pub fn current(&self) -> Option<&T> {
        self.current.map(|i| &self.items[i])
    }

    pub fn current_index(&self) -> Option<usize> {
        self.current
    }

    pub fn set_current(&mut self, i: usize) -> bool {
        if i < self.items.len() {
            self.current = Some(i);
            true
        } else {
            false
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.items.iter()
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Quit,
}

#[derive(Parser, Debug)]
#[command(name = "read", no_binary_name = true, disable_help_flag = true)]
struct ReadArgs {
    file: PathBuf,
}

#[derive(Parser, Debug)]
#[command(name = "exact", no_binary_name = true, disable_help_flag = true)]
struct ExactArgs {
    /// Place PIs and POs on designated pin tiles.
    #[arg(short = 'i')]
    io: bool,
    /// Allow wire crossings.
    #[arg(short = 'x')]
    crossings: bool,
    /// Put pin tiles on the grid border.
    #[arg(short = 'b')]
    border: bool,
    /// Allow unbalanced (desynchronized) paths.
    #[arg(short = 'p')]
    desync: bool,
    /// Clocking scheme name, or open clocking when omitted.
    #[arg(short = 's', long = "scheme")]
    scheme: Option<String>,
    #[arg(long)]
    latches: bool,
    #[arg(long = "wire-limit")]
    wire_limit: Option<usize>,
    /// Whole-search budget in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Per grid size budget in seconds.
    #[arg(long = "instance-timeout")]
    instance_timeout: Option<f64>,
    #[arg(long = "upper-bound")]
    upper_bound: Option<u64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Parser, Debug)]
#[command(name = "ortho", no_binary_name = true, disable_help_flag = true)]
struct OrthoArgs {
    #[arg(long)]
    io: bool,
    #[arg(long)]
    border: bool,
}

#[derive(Parser, Debug)]
#[command(name = "cell", no_binary_name = true, disable_help_flag = true)]
struct CellArgs {
    #[arg(short = 'l', long = "library", default_value = "qca-one")]
    library: String,
}

#[derive(Parser, Debug)]
#[command(name = "file", no_binary_name = true, disable_help_flag = true)]
struct FileArgs {
    file: Option<PathBuf>,
}

#[derive(Parser, Debug)]
#[command(name = "show", no_binary_name = true, disable_help_flag = true)]
struct ShowArgs {
    /// Render the current cell layout instead of the gate layout.
    #[arg(short = 'c', long = "cell")]
    cell: bool,
    file: Option<PathBuf>,
}

#[derive(Parser, Debug)]
#[command(name = "ps", no_binary_name = true, disable_help_flag = true)]
struct PsArgs {
    #[arg(short = 'g')]
    gate: bool,
    #[arg(short = 'c')]
    cell: bool,
    #[arg(short = 'n')]
    network: bool,
}

#[derive(Parser, Debug)]
#[command(name = "store", no_binary_name = true, disable_help_flag = true)]
struct StoreArgs {
    #[arg(short = 'n')]
    network: bool,
    #[arg(short = 'g')]
    gate: bool,
    #[arg(short = 'c')]
    cell: bool,
    /// Make the item with this index current.
    #[arg(long = "set")]
    set: Option<usize>,
}

const HELP: &str = "\
read <file.v>          parse a netlist into the network store
exact [-i -x -b -p -s <scheme>] [--latches] [--wire-limit N] [--timeout S]
      [--instance-timeout S] [--upper-bound A] [--threads N]
ortho [--io] [--border] heuristic layout on 2ddwave4
cell [-l <library>]     map the current gate layout to cells
qca [file.qca]          write the current cell layout for QCADesigner
show [-c] [file.svg]    render the current gate (or cell) layout
ps [-g | -c | -n]       print statistics
save [file.json]        write the current gate layout
load <file.json>        read a gate layout
store [-n | -g | -c] [--set I]  list a store or select its current item
help, quit";

/// Splits a command line into words; double quotes group words.
fn tokenize(line: &str) -> Result<Vec<String>, ShellError> {
    let mut words = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut any = false;
    for c in line.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                any = true;
            }
            c if c.is_whitespace() && !quoted => {
                if any {
                    words.push(std::mem::take(&mut cur));
                    any = false;
                }
            }
            c => {
                cur.push(c);
                any = true;
            }
        }
    }
    if quoted {
        return Err(ShellError::Usage("unterminated quote".into()));
    }
    if any {
        words.push(cur);
    }
    Ok(words)
}

fn parse<P: Parser>(args: &[String]) -> Result<P, ShellError> {
    P::try_parse_from(args).map_err(|e| ShellError::Usage(e.to_string().trim_end().to_string()))
}

fn secs(s: Option<f64>) -> Result<Option<Duration>, ShellError> {
    s.map(|s| Duration::try_from_secs_f64(s).map_err(|_| ShellError::Usage(format!("bad duration {s}"))))
        .transpose()
}

pub struct Shell {
    pub networks: Store<Arc<LogicNetwork>>,
    pub layouts: Store<GateLayout>,
    pub cells: Store<CellLayout>,
    pub log: RunLog,
    energy: EnergyTable,
    base: PathBuf,
    viewer: Option<String>,
}

impl Default for Shell {
    fn default() -> Self {
        Shell::new(".")
    }
}

impl Shell {
    /// Relative paths in commands resolve against `base`.
    pub fn new(base: impl Into<PathBuf>) -> Self {
        Shell {
            networks: Store::default(),
            layouts: Store::default(),
            cells: Store::default(),
            log: RunLog::default(),
            energy: EnergyTable::qca_one(),
            base: base.into(),
            viewer: std::env::var(VIEWER_ENV).ok().filter(|v| !v.is_empty()),
        }
    }

    pub fn set_viewer(&mut self, viewer: Option<String>) {
        self.viewer = viewer;
    }

    fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    fn network(&self) -> Result<&Arc<LogicNetwork>, ShellError> {
        self.networks.current().ok_or(ShellError::EmptyStore("network"))
    }

    fn layout(&self) -> Result<&GateLayout, ShellError> {
        self.layouts.current().ok_or(ShellError::EmptyStore("gate layout"))
    }

    fn cell_layout(&self) -> Result<&CellLayout, ShellError> {
        self.cells.current().ok_or(ShellError::EmptyStore("cell layout"))
    }

    /// Default output file: the item name plus extension, with the store
    /// index appended after the first item so reruns do not overwrite.
    fn default_file(&self, name: &str, index: Option<usize>, ext: &str) -> PathBuf {
        let stem = match index {
            Some(i) if i > 0 => format!("{name}_{i}"),
            _ => name.to_string(),
        };
        self.base.join(format!("{stem}.{ext}"))
    }

    /// The network as a layout engine needs it: functions from `ops` only
    /// and fan-outs of degree at most 2.
    fn prepared(&self, ops: &[Op]) -> Result<LogicNetwork, ShellError> {
        self.network()?.lower_to(ops).substitute_fanouts(2).map_err(failed)
    }

    fn stats_record(&self, layout: &GateLayout) -> Result<(String, StatsRecord), ShellError> {
        let stats = layout.statistics(&self.energy).map_err(failed)?;
        Ok((stats.to_string(), StatsRecord::from(&stats)))
    }

    /// Runs one command line and returns what it prints.
    pub fn execute(&mut self, line: &str) -> Result<(Flow, String), ShellError> {
        let words = tokenize(line)?;
        let Some((cmd, args)) = words.split_first() else {
            return Ok((Flow::Continue, String::new()));
        };
        let start = Instant::now();
        let mut record = Record {
            cmd: line.trim().to_string(),
            name: None,
            stats: None,
            runtime_s: 0.0,
        };
        let mut out = String::new();
        match cmd.as_str() {
            "read" => {
                let a: ReadArgs = parse(args)?;
                let path = self.path(&a.file);
                let text = std::fs::read_to_string(&path).map_err(|e| failed(format!("{}: {e}", path.display())))?;
                let mut net = parse_verilog(&text).map_err(|e| failed(format!("{}: {e}", path.display())))?;
                if net.name().is_empty() {
                    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("net");
                    net.set_name(stem);
                }
                record.name = Some(net.name().to_string());
                self.networks.push(Arc::new(net));
            }
            "exact" => {
                let a: ExactArgs = parse(args)?;
                let scheme = match &a.scheme {
                    Some(s) => ClockingScheme::from_name(s).map_err(|e| ShellError::Usage(e.to_string()))?,
                    None => ClockingScheme::open(4),
                };
                let params = ExactParams {
                    scheme,
                    crossings: a.crossings,
                    io_pins: a.io || a.border,
                    border_io: a.border,
                    desync: a.desync,
                    latches: a.latches,
                    wire_limit: a.wire_limit,
                    timeout: secs(a.timeout)?,
                    instance_timeout: secs(a.instance_timeout)?,
                    upper_bound: a.upper_bound,
                    threads: a.threads.max(1),
                    ..ExactParams::default()
                };
                let net = self.prepared(&QCA_ONE_OPS)?;
                let result = exact_layout(&net, &params).map_err(failed)?;
                match (result.layout, result.status) {
                    (Some(layout), _) => {
                        let (_, stats) = self.stats_record(&layout)?;
                        record.name = Some(layout.name().to_string());
                        record.stats = Some(stats);
                        self.layouts.push(layout);
                    }
                    (None, Status::Timeout) => return Err(failed("exact: timed out before finding a layout")),
                    (None, _) => return Err(failed("exact: no layout within the area bound")),
                }
            }
            "ortho" => {
                let a: OrthoArgs = parse(args)?;
                let net = self.prepared(&ORTHO_OPS)?;
                let layout = ortho_layout(
                    &net,
                    &OrthoParams {
                        io_pins: a.io,
                        border: a.border,
                    },
                )
                .map_err(failed)?;
                let (_, stats) = self.stats_record(&layout)?;
                record.name = Some(layout.name().to_string());
                record.stats = Some(stats);
                self.layouts.push(layout);
            }
            "cell" => {
                let a: CellArgs = parse(args)?;
                let layout = self.layout()?;
                let spec = if Path::new(&a.library).exists() || a.library.contains(std::path::MAIN_SEPARATOR) {
                    self.path(Path::new(&a.library)).to_string_lossy().into_owned()
                } else {
                    a.library.clone()
                };
                let lib = GateLibrary::load(&spec).map_err(failed)?;
                let cells = apply_library(layout, &lib).map_err(failed)?;
                record.name = Some(cells.name.clone());
                self.cells.push(cells);
            }
            "qca" => {
                let a: FileArgs = parse(args)?;
                let cells = self.cell_layout()?;
                let file = match &a.file {
                    Some(f) => self.path(f),
                    None => self.default_file(&cells.name, self.cells.current_index(), "qca"),
                };
                write_qca(cells, &file).map_err(failed)?;
                record.name = Some(cells.name.clone());
                out.push_str(&format!("wrote {}\n", file.display()));
            }
            "show" => {
                let a: ShowArgs = parse(args)?;
                let (svg, name, index) = if a.cell {
                    let c = self.cell_layout()?;
                    (cell_layout_svg(c), c.name.clone(), self.cells.current_index())
                } else {
                    let l = self.layout()?;
                    (gate_layout_svg(l), l.name().to_string(), self.layouts.current_index())
                };
                let file = match &a.file {
                    Some(f) => self.path(f),
                    None => self.default_file(&name, index, "svg"),
                };
                std::fs::write(&file, svg).map_err(|e| failed(format!("{}: {e}", file.display())))?;
                record.name = Some(name);
                out.push_str(&format!("wrote {}\n", file.display()));
                if let Some(viewer) = &self.viewer {
                    // never wait for the viewer
                    if let Err(e) = std::process::Command::new(viewer).arg(&file).spawn() {
                        out.push_str(&format!("viewer '{viewer}' failed to start: {e}\n"));
                    }
                }
            }
            "ps" => {
                let a: PsArgs = parse(args)?;
                if a.gate {
                    let layout = self.layout()?;
                    let (line, stats) = self.stats_record(layout)?;
                    record.name = Some(layout.name().to_string());
                    record.stats = Some(stats);
                    out.push_str(&line);
                    out.push('\n');
                } else if a.cell {
                    let c = self.cell_layout()?;
                    record.name = Some(c.name.clone());
                    out.push_str(&format!(
                        "{}: {} x {} cells, {} cells on {} layer(s)\n",
                        c.name,
                        c.width,
                        c.height,
                        c.cell_count(),
                        c.layers()
                    ));
                } else {
                    let net = self.network()?;
                    let s = net.stats();
                    record.name = Some(net.name().to_string());
                    out.push_str(&format!(
                        "{}: vertices: {}, edges: {}, PIs: {}, POs: {}, fan-outs: {}\n",
                        net.name(),
                        s.vertex_count,
                        s.edge_count,
                        s.pi_count,
                        s.po_count,
                        s.fanout_count
                    ));
                }
            }
            "save" => {
                let a: FileArgs = parse(args)?;
                let layout = self.layout()?;
                let file = match &a.file {
                    Some(f) => self.path(f),
                    None => self.default_file(layout.name(), self.layouts.current_index(), "json"),
                };
                layout.save(&file).map_err(failed)?;
                record.name = Some(layout.name().to_string());
                out.push_str(&format!("wrote {}\n", file.display()));
            }
            "load" => {
                let a: ReadArgs = parse(args)?;
                let layout = GateLayout::load(&self.path(&a.file)).map_err(failed)?;
                record.name = Some(layout.name().to_string());
                self.layouts.push(layout);
            }
            "store" => {
                let a: StoreArgs = parse(args)?;
                let which = [a.network, a.gate, a.cell].iter().filter(|&&b| b).count();
                if which > 1 {
                    return Err(ShellError::Usage("store: choose one of -n, -g, -c".into()));
                }
                let names: Vec<String>;
                let (label, current) = if a.gate {
                    if let Some(i) = a.set {
                        if !self.layouts.set_current(i) {
                            return Err(failed(format!("store: no gate layout {i}")));
                        }
                    }
                    names = self.layouts.iter().map(|l| l.name().to_string()).collect();
                    ("gate layouts", self.layouts.current_index())
                } else if a.cell {
                    if let Some(i) = a.set {
                        if !self.cells.set_current(i) {
                            return Err(failed(format!("store: no cell layout {i}")));
                        }
                    }
                    names = self.cells.iter().map(|c| c.name.clone()).collect();
                    ("cell layouts", self.cells.current_index())
                } else {
                    if let Some(i) = a.set {
                        if !self.networks.set_current(i) {
                            return Err(failed(format!("store: no network {i}")));
                        }
                    }
                    names = self.networks.iter().map(|n| n.name().to_string()).collect();
                    ("networks", self.networks.current_index())
                };
                out.push_str(&format!("{label}: {}\n", names.len()));
                for (i, n) in names.iter().enumerate() {
                    let mark = if Some(i) == current { '*' } else { ' ' };
                    out.push_str(&format!("{mark} {i}: {n}\n"));
                }
            }
            "help" => out.push_str(HELP),
            "quit" | "exit" => return Ok((Flow::Quit, out)),
            other => return Err(ShellError::Unknown(other.to_string())),
        }
        record.runtime_s = start.elapsed().as_secs_f64();
        self.log.commands.push(record);
        Ok((Flow::Continue, out))
    }

    /// Runs commands in order and stops at the first failure, reporting
    /// its 1-based position. Blank entries and `#` comments are skipped.
    pub fn run_lines<'a>(
        &mut self,
        lines: impl IntoIterator<Item = &'a str>,
        out: &mut dyn std::io::Write,
    ) -> Result<(), ShellError> {
        for (i, line) in lines.into_iter().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match self.execute(line) {
                Ok((flow, text)) => {
                    out.write_all(text.as_bytes())?;
                    if flow == Flow::Quit {
                        break;
                    }
                }
                Err(e) => {
                    return Err(ShellError::Script {
                        line: i + 1,
                        source: Box::new(e),
                    })
                }
            }
        }
        Ok(())
    }

    pub fn run_script(&mut self, path: &Path, out: &mut dyn std::io::Write) -> Result<(), ShellError> {
        let text = std::fs::read_to_string(path)?;
        self.run_lines(text.lines(), out)
    }

    pub fn run_inline(&mut self, commands: &str, out: &mut dyn std::io::Write) -> Result<(), ShellError> {
        self.run_lines(commands.split(';'), out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer() {
        assert_eq!(tokenize(r#"read "a b.v"  x"#).unwrap(), ["read", "a b.v", "x"]);
        assert_eq!(tokenize("").unwrap(), Vec::<String>::new());
        assert!(tokenize(r#"read "a"#).is_err());
    }

    #[test]
    fn clustered_exact_flags() {
        let a: ExactArgs = parse(&tokenize("-ixbs 2ddwave4").unwrap()).unwrap();
        assert!(a.io && a.crossings && a.border && !a.desync);
        assert_eq!(a.scheme.as_deref(), Some("2ddwave4"));
        let a: ExactArgs = parse(&tokenize("-ps use").unwrap()).unwrap();
        assert!(a.desync && !a.io);
        assert_eq!(a.scheme.as_deref(), Some("use"));
    }

    #[test]
    fn empty_stores_fail_cleanly() {
        let mut sh = Shell::new(".");
        for (cmd, what) in [
            ("cell", "gate layout"),
            ("qca", "cell layout"),
            ("ortho", "network"),
            ("ps -g", "gate layout"),
        ] {
            let err = sh.execute(cmd).unwrap_err();
            assert_eq!(err.to_string(), format!("no {what} in store"), "{cmd}");
        }
        assert!(matches!(sh.execute("frobnicate"), Err(ShellError::Unknown(_))));
        assert!(matches!(sh.execute("ortho --bogus"), Err(ShellError::Usage(_))));
        assert!(sh.log.commands.is_empty());
    }
}
