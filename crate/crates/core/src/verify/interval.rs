use crate::error::Result;
use crate::measure::{check_cna, NaCaps};
use crate::urn::{interval_urn_measure, Binning, IntervalSpec, ThresholdSpec, UrnModel};
use crate::verdict::Verdict;

const NON_IID_NOTE: &str = "rows are not i.i.d.; a violation is a witness for the generalized-urn question, not against a theorem";

fn cna_of(model: &UrnModel, binning: &Binning, caps: &NaCaps, property: &str) -> Result<Verdict> {
    let mu = interval_urn_measure(model, binning)?;
    let mut v = check_cna(&mu, caps);
    v.property = property.into();
    Ok(if model.is_iid() { v } else { v.note(NON_IID_NOTE) })
}

/// CNA of the interval urn measure. Caps on the event enumeration turn into
/// an inconclusive verdict.
pub fn verify_interval_cna(model: &UrnModel, spec: &IntervalSpec, caps: &NaCaps) -> Result<Verdict> {
    cna_of(model, &spec.binning(), caps, "interval_cna")
}

/// CNA of the threshold urn measure.
pub fn verify_threshold_cna(model: &UrnModel, spec: &ThresholdSpec, caps: &NaCaps) -> Result<Verdict> {
    cna_of(model, &spec.binning(), caps, "threshold_cna")
}
