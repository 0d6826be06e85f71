//! Uniform-grid scalar fields over the box `[-1,1]^n` (`n` = 2 or 3), with
//! tensor-product cubic interpolation, sphere/ball quadrature, negativity-set
//! measures, the maximal-inscribed-radius functional and a thinness-class check.

mod classp;
mod grid;
mod io;
mod quad;
mod sets;

pub use classp::{check_class_p, detect_free_boundary, ClassPReport, Modulus};
pub use grid::{AnalyticField, Field, GridSpec, ScalarField};
pub use io::{dump_field, load_field, FieldHeader};
pub use quad::{ball_dirichlet, sphere_mean_sq, SphereQuadrature};
pub use sets::{max_radius_negative, negative_density, negativity_threshold};
