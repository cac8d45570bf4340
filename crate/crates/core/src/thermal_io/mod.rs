//! Case manifests, radiometric frames and synthetic phantoms.

mod frame;
mod manifest;
mod phantom;

pub use frame::{
    calibration_path, decode_pgm, encode_pgm, load_thermal_frame, parse_csv_frame, render_csv_frame,
    write_label_pgm, write_thermal_frame, Calibration,
};
pub use manifest::{load_manifest, parse_manifest, render_manifest, write_manifest, MANIFEST_COLUMNS, VIEW_SEPARATOR};
pub use phantom::{
    base_field, generate_cohort, generate_phantom, point_segment_distance, ClassProfile, CohortSpec, PhantomCase,
    PhantomSpec, PhantomTruth, PlantedAreola, PlantedHotspot, PlantedVessel,
};
