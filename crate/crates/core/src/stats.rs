use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::config::ExtractionConfig;
use crate::error::{Error, Result};
use crate::record::MicroserviceRecord;
use crate::services::InfraRole;

/// Identity of one dataset row.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RecordKey {
    pub system: String,
    pub release: String,
    pub service: String,
}

impl From<&MicroserviceRecord> for RecordKey {
    fn from(r: &MicroserviceRecord) -> Self {
        RecordKey {
            system: r.system.clone(),
            release: r.release.clone(),
            service: r.service.clone(),
        }
    }
}

impl std::fmt::Display for RecordKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}/{}", self.system, self.release, self.service)
    }
}

/// Five-number-style summary of one metric across the dataset.
///
/// Quartiles use the interpolation-free median-of-halves method: the sorted
/// sample is split at the median, the median itself belongs to neither half
/// when the count is odd, and q1/q3 are the medians of the halves. A single
/// sample is its own median and both quartiles. Outliers are the samples
/// outside the closed interval [q1 - 1.5*IQR, q3 + 1.5*IQR].
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary {
    pub metric_name: String,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
    pub outliers: Vec<(RecordKey, f64)>,
}

fn median_of(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

pub fn summarize_metric(name: &str, samples: &[(RecordKey, f64)]) -> Result<MetricSummary> {
    if samples.is_empty() {
        return Err(Error::Invalid(format!("no samples for metric `{name}`")));
    }
    let mut values: Vec<f64> = samples.iter().map(|(_, v)| *v).collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("metric values are finite"));
    let n = values.len();

    let median = median_of(&values);
    let (q1, q3) = if n == 1 {
        (median, median)
    } else {
        let lower = &values[..n / 2];
        let upper = &values[n.div_ceil(2)..];
        (median_of(lower), median_of(upper))
    };
    let iqr = q3 - q1;
    let lo = q1 - 1.5 * iqr;
    let hi = q3 + 1.5 * iqr;
    let mut outliers: Vec<(RecordKey, f64)> = samples
        .iter()
        .filter(|(_, v)| *v < lo || *v > hi)
        .cloned()
        .collect();
    outliers.sort_by(|a, b| (&a.0, a.1).partial_cmp(&(&b.0, b.1)).expect("finite"));

    Ok(MetricSummary {
        metric_name: name.to_string(),
        count: n,
        mean: values.iter().sum::<f64>() / n as f64,
        median,
        q1,
        q3,
        min: values[0],
        max: values[n - 1],
        outliers,
    })
}

/// The numeric metric columns of a record, in dataset column order. The
/// three collection-valued columns have no place in a distribution table.
pub fn numeric_metrics(r: &MicroserviceRecord) -> Vec<(&'static str, f64)> {
    vec![
        ("codeSize", r.code_size as f64),
        ("entityNum", r.entity_num as f64),
        ("entityAttributeNum", r.entity_attribute_num as f64),
        ("aveEntityAttribute", r.ave_entity_attribute),
        ("controllerNum", r.controller_num as f64),
        ("interfaceNum", r.interface_num as f64),
        ("abstractClassNum", r.abstract_class_num as f64),
        ("serviceClassNum", r.service_class_num as f64),
        ("dtoClassNum", r.dto_class_num as f64),
        ("APINum", r.api_num as f64),
        ("maxParamNum", r.max_param_num as f64),
        ("APIVersionNum", r.api_version_num as f64),
        ("serviceImplCallNum", r.service_impl_call_num as f64),
        ("maxServiceCall", r.max_service_call as f64),
        ("serviceCallGate", r.service_call_gate as f64),
        ("serviceCallPer", r.service_call_per),
        ("maxServiceCalled", r.max_service_called as f64),
        ("serviceCalledGate", r.service_called_gate as f64),
        ("serviceCalledPer", r.service_called_per),
    ]
}

/// Summaries for every numeric metric over the given records.
pub fn summarize_records(records: &[MicroserviceRecord]) -> Result<Vec<MetricSummary>> {
    if records.is_empty() {
        return Err(Error::Invalid("no records to summarize".to_string()));
    }
    let names: Vec<&'static str> = numeric_metrics(&records[0])
        .into_iter()
        .map(|(n, _)| n)
        .collect();
    let mut out = Vec::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        let samples: Vec<(RecordKey, f64)> = records
            .iter()
            .map(|r| (RecordKey::from(r), numeric_metrics(r)[i].1))
            .collect();
        out.push(summarize_metric(name, &samples)?);
    }
    Ok(out)
}

/// Box-plot data file: one line per metric, tab-separated, outliers last as
/// a comma-joined list.
pub fn render_box_data(summaries: &[MetricSummary]) -> String {
    let mut out = String::from("metric\tmin\tq1\tmedian\tq3\tmax\toutliers\n");
    for s in summaries {
        let outliers = s
            .outliers
            .iter()
            .map(|(_, v)| format!("{v}"))
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.metric_name, s.min, s.q1, s.median, s.q3, s.max, outliers
        );
    }
    out
}

/// A record tripping a granularity rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SmellFlag {
    pub key: RecordKey,
    pub rule_name: String,
    pub triggering_values: BTreeMap<String, u64>,
}

/// Demonstration heuristic for overly fine-grained services: a business
/// service whose entity, controller and API counts are all at or below
/// their thresholds. Thresholds are config-tunable and non-normative.
pub fn flag_nano_services(
    records: &[MicroserviceRecord],
    cfg: &ExtractionConfig,
) -> Vec<SmellFlag> {
    records
        .iter()
        .filter(|r| {
            r.infra_role == InfraRole::Business
                && r.entity_num <= cfg.nano_entity_max
                && r.controller_num <= cfg.nano_controller_max
                && r.api_num <= cfg.nano_api_max
        })
        .map(|r| SmellFlag {
            key: RecordKey::from(r),
            rule_name: "nano-service".to_string(),
            triggering_values: [
                ("entityNum".to_string(), r.entity_num),
                ("controllerNum".to_string(), r.controller_num),
                ("APINum".to_string(), r.api_num),
            ]
            .into_iter()
            .collect(),
        })
        .collect()
}
