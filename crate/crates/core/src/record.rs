use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::api::ApiMetrics;
use crate::calls::ServiceImplCallMap;
use crate::error::{Error, Result};
use crate::services::InfraRole;
use crate::tiers::TierCounts;

/// One microservice at one release: 14 extracted metrics plus 9 derived
/// from them. Derived fields are filled by `derive_metrics`; until then they
/// are zero.
///
/// The serde names match the dataset column names, so the JSON-lines mirror
/// of the CSV falls out of the derive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroserviceRecord {
    pub system: String,
    pub release: String,
    pub service: String,
    pub infra_role: InfraRole,
    #[serde(rename = "codeSize")]
    pub code_size: u64,
    #[serde(rename = "entityNum")]
    pub entity_num: u64,
    #[serde(rename = "entityAttributeNum")]
    pub entity_attribute_num: u64,
    #[serde(rename = "aveEntityAttribute")]
    pub ave_entity_attribute: f64,
    #[serde(rename = "controllerNum")]
    pub controller_num: u64,
    #[serde(rename = "interfaceNum")]
    pub interface_num: u64,
    #[serde(rename = "abstractClassNum")]
    pub abstract_class_num: u64,
    #[serde(rename = "serviceClassNum")]
    pub service_class_num: u64,
    #[serde(rename = "dtoClassNum")]
    pub dto_class_num: u64,
    #[serde(rename = "APINum")]
    pub api_num: u64,
    #[serde(rename = "maxParamNum")]
    pub max_param_num: u64,
    #[serde(rename = "APIVersionSet")]
    pub api_version_set: BTreeSet<String>,
    #[serde(rename = "APIVersionNum")]
    pub api_version_num: u64,
    #[serde(rename = "serviceImplCall")]
    pub service_impl_call: BTreeMap<String, u64>,
    #[serde(rename = "serviceImplCallNum")]
    pub service_impl_call_num: u64,
    #[serde(rename = "serviceCall")]
    pub service_call: BTreeMap<String, u64>,
    #[serde(rename = "serviceCalled")]
    pub service_called: BTreeMap<String, u64>,
    #[serde(rename = "maxServiceCall")]
    pub max_service_call: u64,
    #[serde(rename = "serviceCallGate")]
    pub service_call_gate: u64,
    #[serde(rename = "serviceCallPer")]
    pub service_call_per: f64,
    #[serde(rename = "maxServiceCalled")]
    pub max_service_called: u64,
    #[serde(rename = "serviceCalledGate")]
    pub service_called_gate: u64,
    #[serde(rename = "serviceCalledPer")]
    pub service_called_per: f64,
}

/// Rounds to 4 fractional digits, half to even, matching the dataset's
/// decimal serialization. Derived decimals are stored already quantized so
/// the in-memory value and its serialized form are the same number.
pub fn quantize4(x: f64) -> f64 {
    format!("{x:.4}").parse().unwrap_or(x)
}

/// Copies the 14 extracted metrics into a record. Derived fields stay zero
/// until `derive_metrics` runs.
#[allow(clippy::too_many_arguments)]
pub fn assemble_record(
    system: &str,
    release: &str,
    service: &str,
    infra_role: InfraRole,
    code_size: u64,
    tiers: &TierCounts,
    api: &ApiMetrics,
    impl_calls: ServiceImplCallMap,
    service_call: BTreeMap<String, u64>,
    service_called: BTreeMap<String, u64>,
) -> MicroserviceRecord {
    MicroserviceRecord {
        system: system.to_string(),
        release: release.to_string(),
        service: service.to_string(),
        infra_role,
        code_size,
        entity_num: tiers.entity_num,
        entity_attribute_num: tiers.entity_attribute_num,
        ave_entity_attribute: 0.0,
        controller_num: tiers.controller_num,
        interface_num: tiers.interface_num,
        abstract_class_num: tiers.abstract_class_num,
        service_class_num: tiers.service_class_num,
        dto_class_num: tiers.dto_class_num,
        api_num: api.api_num,
        max_param_num: api.max_param_num,
        api_version_set: api.api_version_set.clone(),
        api_version_num: 0,
        service_impl_call: impl_calls.0,
        service_impl_call_num: 0,
        service_call,
        service_called,
        max_service_call: 0,
        service_call_gate: 0,
        service_call_per: 0.0,
        max_service_called: 0,
        service_called_gate: 0,
        service_called_per: 0.0,
    }
}

/// Fills the 9 derived metrics from the extracted ones. Idempotent.
/// `total_services` is the per-ratio denominator (business services in the
/// system at this release).
pub fn derive_metrics(record: &mut MicroserviceRecord, total_services: u64) -> Result<()> {
    if total_services == 0 {
        return Err(Error::Invalid(
            "total_services must be at least 1".to_string(),
        ));
    }
    record.api_version_num = record.api_version_set.len() as u64;
    record.ave_entity_attribute = if record.entity_num == 0 {
        0.0
    } else {
        quantize4(record.entity_attribute_num as f64 / record.entity_num as f64)
    };
    record.service_impl_call_num = record.service_impl_call.values().sum();

    record.max_service_call = record.service_call.values().copied().max().unwrap_or(0);
    record.service_call_gate = record.service_call.len() as u64;
    record.service_call_per = ratio(record.service_call_gate, total_services);

    record.max_service_called = record.service_called.values().copied().max().unwrap_or(0);
    record.service_called_gate = record.service_called.len() as u64;
    record.service_called_per = ratio(record.service_called_gate, total_services);
    Ok(())
}

/// gate/total clamped into [0,1]: external callees can push a gate above
/// the in-system service count.
fn ratio(gate: u64, total: u64) -> f64 {
    let r = quantize4(gate as f64 / total as f64);
    r.min(1.0)
}

/// Checks every structural invariant that is decidable from the record
/// alone. The per-ratio denominators are not recoverable, so the two `Per`
/// fields are only range-checked.
pub fn validate_record(r: &MicroserviceRecord) -> std::result::Result<(), String> {
    if r.system.is_empty() || r.release.is_empty() || r.service.is_empty() {
        return Err("system, release and service must be non-empty".into());
    }
    if r.api_version_num != r.api_version_set.len() as u64 {
        return Err(format!(
            "APIVersionNum {} != |APIVersionSet| {}",
            r.api_version_num,
            r.api_version_set.len()
        ));
    }
    if r.entity_num == 0 {
        if r.entity_attribute_num != 0 {
            return Err("entityAttributeNum nonzero with entityNum = 0".into());
        }
        if r.ave_entity_attribute != 0.0 {
            return Err("aveEntityAttribute nonzero with entityNum = 0".into());
        }
    } else {
        let expected = quantize4(r.entity_attribute_num as f64 / r.entity_num as f64);
        if (r.ave_entity_attribute - expected).abs() >= 1e-9 {
            return Err(format!(
                "aveEntityAttribute {} != {expected}",
                r.ave_entity_attribute
            ));
        }
    }
    if r.service_impl_call_num != r.service_impl_call.values().sum::<u64>() {
        return Err("serviceImplCallNum != sum of serviceImplCall".into());
    }
    check_map("serviceCall", &r.service_call)?;
    check_map("serviceCalled", &r.service_called)?;
    check_map("serviceImplCall", &r.service_impl_call)?;
    if r.max_service_call != r.service_call.values().copied().max().unwrap_or(0) {
        return Err("maxServiceCall != max of serviceCall".into());
    }
    if r.service_call_gate != r.service_call.len() as u64 {
        return Err("serviceCallGate != |serviceCall|".into());
    }
    if r.max_service_called != r.service_called.values().copied().max().unwrap_or(0) {
        return Err("maxServiceCalled != max of serviceCalled".into());
    }
    if r.service_called_gate != r.service_called.len() as u64 {
        return Err("serviceCalledGate != |serviceCalled|".into());
    }
    for (name, v) in [
        ("serviceCallPer", r.service_call_per),
        ("serviceCalledPer", r.service_called_per),
    ] {
        if !(0.0..=1.0).contains(&v) || !v.is_finite() {
            return Err(format!("{name} {v} outside [0,1]"));
        }
    }
    Ok(())
}

fn check_map(name: &str, map: &BTreeMap<String, u64>) -> std::result::Result<(), String> {
    for (k, v) in map {
        if k.is_empty() {
            return Err(format!("{name} has an empty key"));
        }
        if *v == 0 {
            return Err(format!("{name}[{k}] is 0"));
        }
    }
    Ok(())
}

/// Validates each record and the (system, release, service) uniqueness of
/// the whole set.
pub fn validate_records(records: &[MicroserviceRecord]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for r in records {
        validate_record(r).map_err(Error::Invalid)?;
        let key = (r.system.clone(), r.release.clone(), r.service.clone());
        if !seen.insert(key) {
            return Err(Error::Invalid(format!(
                "duplicate record for ({}, {}, {})",
                r.system, r.release, r.service
            )));
        }
    }
    Ok(())
}
