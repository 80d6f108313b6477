//! Metric geometry: variations with respect to the metric or other fields,
//! Euler densities, derivative ordering and Bianchi-identity simplification.

mod covds;
mod euler;
mod simplify;
mod variation;

pub use covds::{commute_adjacent, sort_covds};
pub use euler::{euler_density, euler_density_capped, EULER_DIM_CAP};
pub use simplify::{apply_contracted_bianchi, full_simplification};
pub use variation::{var_d, var_l, vary_metric};

use crate::error::{Error, Result};
use crate::expr::Session;

fn metric_name(session: &Session) -> Result<String> {
    session
        .metric_name()
        .map(str::to_string)
        .ok_or_else(|| Error::Invalid("no metric declared".into()))
}
