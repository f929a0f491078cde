//! Rupert passages and Nieuwland constants of rectangular boxes.
//!
//! Every generic shadow of a box `a ≤ b ≤ c` contains its `a × b` face in its
//! interior, so the box has a straight tunnel in every direction that is not
//! parallel to a face through which a congruent copy passes. The largest
//! homothet that passes is governed by the largest copy of the smallest face
//! that fits inside the box; the [`nieuwland`] module computes it through the
//! shadows.
//!
//! Modules:
//! - [`geom`]: vectors, rotations, convex polygons, containment, and the small
//!   LP for homothets.
//! - [`shadow`]: projection of an oriented box and its invariants.
//! - [`passage`]: corner squares, the face rectangle in every shadow, tunnels.
//! - [`cross_section`]: rectangles in tilted cross-sections of tubes, and the
//!   rectangle inside the box certifying a passage.
//! - [`nieuwland`]: numerical Nieuwland constants.
//! - [`verify`]: randomized property suites over all of the above.

pub mod cross_section;
pub mod error;
pub mod geom;
pub mod nieuwland;
pub mod passage;
pub mod sampling;
pub mod shadow;
pub mod verify;

pub use cross_section::{
    fold_cross_section, rect_in_parallelogram, theorem2_witness, FoldCase, FoldedParallelogram, PlanarQuad3D,
    Theorem2Witness,
};
pub use error::{Error, Result};
pub use geom::{
    convex_hull, largest_homothet_lp, polygon_area, Containment, ConvexPolygon, HomothetFit, Orientation,
    RectPlacement, Tolerances, Vec2, Vec3,
};
pub use nieuwland::{
    best_lambda_for_direction, nieuwland_constant, passes_through, DirectionFit, Incumbent, OptConfig, OptResult,
};
pub use passage::{
    build_passage, corner_square, corner_squares, face_rectangle_in_shadow, harden_to_interior, CornerSquare,
    PassageSpec,
};
pub use shadow::{
    cube_area_extent_identity, normal_sum_check, orientation_from_direction, project_box, shadow_along, BoxDims,
    Shadow, ShadowKind,
};
