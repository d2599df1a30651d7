//! Physical design for field-coupled nanocomputing: logic networks, clocked
//! tile layouts, exact and heuristic placement and routing, and mapping to
//! QCA cells.

pub mod clocking;
pub mod exact;
pub mod io;
pub mod layout;
pub mod network;
pub mod ortho;
pub mod techmap;
