use super::brun::{brun_apply_pure, passthrough, BrunBoxConfig};
use crate::error::Result;
use crate::preparations::{in_past_light_cone, Preparation, SpacetimeEvent};
use crate::quantum::DensityOperator;

/// Classical record of the input's density matrix as fixed by data in the
/// box's past light cone. If every provenance record is inside the cone the
/// readout is the heralded state; otherwise it is the effective density.
/// The system itself passes through unchanged.
pub fn kent_readout(p: &Preparation, box_event: &SpacetimeEvent) -> (DensityOperator, Preparation) {
    let inside = p
        .provenance()
        .records()
        .iter()
        .all(|e| in_past_light_cone(e, box_event));
    let readout = if inside {
        p.operational_density().clone()
    } else {
        p.effective().clone()
    };
    (readout, p.clone())
}

/// Readout-then-re-prepare emulation of the Brun map: a pure readout is
/// re-prepared as the map's output, a mixed readout leaves the system alone.
pub(crate) fn kent_emulate(
    target: &BrunBoxConfig,
    readout: &DensityOperator,
    system: &DensityOperator,
) -> Result<DensityOperator> {
    if readout.is_pure() {
        brun_apply_pure(target, &readout.principal_ket())
    } else {
        passthrough(system)
    }
}
