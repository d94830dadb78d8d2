//! CT slice stacks to watertight STL meshes.
//!
//! Slices are read from DICOM or PGM ([`dicom`], [`pgm`], [`mod@slice`]),
//! enhanced ([`enhance`]), thresholded and traced into contours
//! ([`segment`]), smoothed ([`smooth`]) and stitched layer by layer into a
//! closed surface ([`stitch`], [`delaunay`], [`mesh`]) that is written as STL
//! ([`stl`]). [`pipeline`] chains the stages; [`cli`] is the command line.

pub mod cli;
pub mod contour_io;
pub mod delaunay;
pub mod dicom;
pub mod enhance;
pub mod geometry;
pub mod mesh;
pub mod pgm;
pub mod phantom;
pub mod pipeline;
pub mod predicates;
pub mod segment;
pub mod slice;
pub mod smooth;
pub mod stitch;
pub mod stl;
