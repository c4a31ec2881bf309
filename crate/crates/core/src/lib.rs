//! Deciding whether a proper triangular plane graph admits an
//! area-universal rectangular layout, by growing a slant regular edge
//! labeling face by face.

pub mod backtrack;
pub mod cartogram;
pub mod error;
pub mod fixtures;
pub mod gadget;
pub mod graph;
pub mod growing;
pub mod layout;
pub mod oracle;
pub mod rel;

pub use error::{Error, Result};
pub use graph::{Corners, PlaneGraph, VertexId};
pub use layout::{Rect, RectLayout};
pub use rel::{EdgeSet, Rel};
