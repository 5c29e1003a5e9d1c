//! Sources, targets, measurement data and forward synthesis.

mod dipole;
mod measurement;
mod synth;

pub use dipole::{dipole_field, image_dipole, AmplitudeMode, CVec3, DipoleSource};
pub use measurement::{
    wavenumber, AntennaArray, FrequencySweep, ImagingMode, MeasurementSet, PointScatterer, SPEED_OF_LIGHT,
};
pub use synth::{add_leg_response, synthesize_radiation_data, synthesize_scattering_data};
