//! Additive codes over finite fields and the finite geometry behind them.
//!
//! * [`field`]: table arithmetic in `F_{p^e}` and towers `F_q ⊆ F_{q^h}`.
//! * [`linalg`], [`packed`], [`geometry`]: matrices, packed vectors, subspaces and projective systems.
//! * [`code`]: additive codes, minimum distance, duality and quotients.
//! * [`bounds`]: Griesmer-type bounds for additive codes.
//! * [`construct`]: explicit MDS families.
//! * [`classify`]: isomorph-free generation of subspace-arcs.
//! * [`corpus`]: the embedded `[12, 5/2, 10]` arcs and codes over `F_9`.
//! * [`formats`]: the arc and code text formats.

pub mod bounds;
pub mod classify;
pub mod code;
pub mod construct;
pub mod corpus;
pub mod field;
pub mod formats;
pub mod geometry;
pub mod linalg;
pub mod packed;
