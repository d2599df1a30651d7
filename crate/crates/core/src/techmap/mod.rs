//! Technology mapping of gate layouts to QCA cell layouts.

use crate::network::Op;

/// Vertex functions the QCA-ONE library provides tiles for.
pub const QCA_ONE_OPS: [Op; 9] = [
    Op::Pi,
    Op::Po,
    Op::And,
    Op::Or,
    Op::Not,
    Op::Maj,
    Op::Fanout,
    Op::Const0,
    Op::Const1,
];

mod cells;
mod library;

pub use cells::{apply_library, Cell, CellLayout, CellPos, TechmapError};
pub use library::{port_cell, Block, BlockKind, CellKind, CrossingStyle, GateLibrary, LibraryError, Matrix};
