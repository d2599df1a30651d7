//! File emitters: QCADesigner designs and SVG renderings.

mod qca;
mod svg;

pub use qca::{from_qca, read_qca, to_qca, write_qca, QcaError, QCA_VERSION};
pub use svg::{cell_layout_svg, gate_layout_svg};
