//! Lines, quasi-projections, localized rings and field reconstruction.

mod field;
mod lines;
mod projection;

pub use field::{almost_centralizer_in_g, is_prime_power, zilber_field, FieldFailure, FieldOutcome, FieldTable};
pub use lines::{
    find_lines, find_lines_in, gamma_images, gamma_images_in, localize_to_line, ore_witness, GammaImage,
    LineCertificate, LocalizedRings,
};
pub use projection::{decompose_lines, quasi_projection, surjectivity_defect, DecompositionReport};
