use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::record::{validate_record, MicroserviceRecord};
use crate::services::InfraRole;

/// The dataset column set, fixed. Map- and set-valued metrics are encoded
/// as canonical compact JSON inside their cell (sorted keys), so the file
/// stays a single flat CSV.
pub const HEADER: [&str; 27] = [
    "system",
    "release",
    "service",
    "infra_role",
    "codeSize",
    "entityNum",
    "entityAttributeNum",
    "aveEntityAttribute",
    "controllerNum",
    "interfaceNum",
    "abstractClassNum",
    "serviceClassNum",
    "dtoClassNum",
    "APINum",
    "maxParamNum",
    "APIVersionSet",
    "APIVersionNum",
    "serviceImplCall",
    "serviceImplCallNum",
    "serviceCall",
    "serviceCalled",
    "maxServiceCall",
    "serviceCallGate",
    "serviceCallPer",
    "maxServiceCalled",
    "serviceCalledGate",
    "serviceCalledPer",
];

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("map/set cells always serialize")
}

fn row_fields(r: &MicroserviceRecord) -> Vec<String> {
    vec![
        r.system.clone(),
        r.release.clone(),
        r.service.clone(),
        r.infra_role.as_str().to_string(),
        r.code_size.to_string(),
        r.entity_num.to_string(),
        r.entity_attribute_num.to_string(),
        format!("{:.4}", r.ave_entity_attribute),
        r.controller_num.to_string(),
        r.interface_num.to_string(),
        r.abstract_class_num.to_string(),
        r.service_class_num.to_string(),
        r.dto_class_num.to_string(),
        r.api_num.to_string(),
        r.max_param_num.to_string(),
        json(&r.api_version_set),
        r.api_version_num.to_string(),
        json(&r.service_impl_call),
        r.service_impl_call_num.to_string(),
        json(&r.service_call),
        json(&r.service_called),
        r.max_service_call.to_string(),
        r.service_call_gate.to_string(),
        format!("{:.4}", r.service_call_per),
        r.max_service_called.to_string(),
        r.service_called_gate.to_string(),
        format!("{:.4}", r.service_called_per),
    ]
}

/// The dataset as CSV text: UTF-8, LF endings, rows sorted by
/// (system, release, service). Deterministic for a given record set.
pub fn render_dataset(records: &[MicroserviceRecord]) -> String {
    let mut sorted: Vec<&MicroserviceRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.system, &a.release, &a.service).cmp(&(&b.system, &b.release, &b.service))
    });

    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    wtr.write_record(HEADER).expect("in-memory write");
    for r in sorted {
        wtr.write_record(row_fields(r)).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8 by construction")
}

pub fn write_dataset(records: &[MicroserviceRecord], path: &Path) -> Result<()> {
    fs::write(path, render_dataset(records)).map_err(|e| Error::io(path, e))
}

/// Parses and validates a dataset file: exact header, well-formed cells,
/// per-record invariants, unique (system, release, service) triples.
/// Row numbers in errors count the header as row 1.
pub fn read_dataset(path: &Path) -> Result<Vec<MicroserviceRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());

    let headers = rdr.headers().map_err(|e| Error::Dataset {
        path: path.to_path_buf(),
        message: format!("unreadable header: {e}"),
    })?;
    let got: Vec<&str> = headers.iter().collect();
    if got != HEADER {
        return Err(Error::Dataset {
            path: path.to_path_buf(),
            message: header_mismatch(&got),
        });
    }

    let mut records = Vec::new();
    let mut seen: BTreeSet<(String, String, String)> = BTreeSet::new();
    for (i, row) in rdr.records().enumerate() {
        let rownum = i + 2;
        let fail = |message: String| Error::DatasetRow {
            path: path.to_path_buf(),
            row: rownum,
            message,
        };
        let row = row.map_err(|e| fail(format!("malformed row: {e}")))?;
        let record = parse_row(&row).map_err(fail)?;
        validate_record(&record).map_err(fail)?;
        let key = (
            record.system.clone(),
            record.release.clone(),
            record.service.clone(),
        );
        if !seen.insert(key) {
            return Err(fail(format!(
                "duplicate record for ({}, {}, {})",
                record.system, record.release, record.service
            )));
        }
        records.push(record);
    }
    Ok(records)
}

fn header_mismatch(got: &[&str]) -> String {
    for (i, want) in HEADER.iter().enumerate() {
        match got.get(i) {
            None => return format!("missing column `{want}`"),
            Some(g) if g != want => {
                return format!("column {} is `{g}`, expected `{want}`", i + 1)
            }
            _ => {}
        }
    }
    if got.len() > HEADER.len() {
        return format!("unknown extra column `{}`", got[HEADER.len()]);
    }
    "header mismatch".to_string()
}

fn parse_row(row: &csv::StringRecord) -> std::result::Result<MicroserviceRecord, String> {
    if row.len() != HEADER.len() {
        return Err(format!("expected {} fields, found {}", HEADER.len(), row.len()));
    }
    let cell = |i: usize| row.get(i).unwrap_or("");
    let int = |i: usize| {
        cell(i)
            .parse::<u64>()
            .map_err(|_| format!("`{}`: not an integer: `{}`", HEADER[i], cell(i)))
    };
    let dec = |i: usize| {
        cell(i)
            .parse::<f64>()
            .map_err(|_| format!("`{}`: not a decimal: `{}`", HEADER[i], cell(i)))
    };
    fn js<T: serde::de::DeserializeOwned>(name: &str, raw: &str) -> std::result::Result<T, String> {
        serde_json::from_str(raw).map_err(|e| format!("`{name}`: malformed JSON cell: {e}"))
    }

    Ok(MicroserviceRecord {
        system: cell(0).to_string(),
        release: cell(1).to_string(),
        service: cell(2).to_string(),
        infra_role: InfraRole::parse(cell(3))
            .ok_or_else(|| format!("`infra_role`: unknown value `{}`", cell(3)))?,
        code_size: int(4)?,
        entity_num: int(5)?,
        entity_attribute_num: int(6)?,
        ave_entity_attribute: dec(7)?,
        controller_num: int(8)?,
        interface_num: int(9)?,
        abstract_class_num: int(10)?,
        service_class_num: int(11)?,
        dto_class_num: int(12)?,
        api_num: int(13)?,
        max_param_num: int(14)?,
        api_version_set: js::<BTreeSet<String>>(HEADER[15], cell(15))?,
        api_version_num: int(16)?,
        service_impl_call: js::<BTreeMap<String, u64>>(HEADER[17], cell(17))?,
        service_impl_call_num: int(18)?,
        service_call: js::<BTreeMap<String, u64>>(HEADER[19], cell(19))?,
        service_called: js::<BTreeMap<String, u64>>(HEADER[20], cell(20))?,
        max_service_call: int(21)?,
        service_call_gate: int(22)?,
        service_call_per: dec(23)?,
        max_service_called: int(24)?,
        service_called_gate: int(25)?,
        service_called_per: dec(26)?,
    })
}

/// Concatenates per-release dataset files into one, enforcing global triple
/// uniqueness and the standard row order.
pub fn aggregate_releases(inputs: &[std::path::PathBuf], out: &Path) -> Result<()> {
    let mut all = Vec::new();
    let mut seen: BTreeMap<(String, String, String), std::path::PathBuf> = BTreeMap::new();
    for input in inputs {
        for record in read_dataset(input)? {
            let key = (
                record.system.clone(),
                record.release.clone(),
                record.service.clone(),
            );
            if let Some(first) = seen.get(&key) {
                return Err(Error::Dataset {
                    path: input.clone(),
                    message: format!(
                        "({}, {}, {}) already present in {}",
                        key.0,
                        key.1,
                        key.2,
                        first.display()
                    ),
                });
            }
            seen.insert(key, input.clone());
            all.push(record);
        }
    }
    write_dataset(&all, out)
}

/// JSON-lines mirror of the dataset: one object per record, dataset column
/// names as keys, same row order as the CSV.
pub fn render_jsonl(records: &[MicroserviceRecord]) -> String {
    let mut sorted: Vec<&MicroserviceRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.system, &a.release, &a.service).cmp(&(&b.system, &b.release, &b.service))
    });
    let mut out = String::new();
    for r in sorted {
        out.push_str(&serde_json::to_string(r).expect("records always serialize"));
        out.push('\n');
    }
    out
}

pub fn write_jsonl(records: &[MicroserviceRecord], path: &Path) -> Result<()> {
    fs::write(path, render_jsonl(records)).map_err(|e| Error::io(path, e))
}
