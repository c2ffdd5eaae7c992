use std::collections::BTreeSet;

use crate::config::ExtractionConfig;
use crate::java::{TypeDecl, Visibility};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HttpVerb {
    Get,
    Post,
    Put,
    Delete,
    Patch,
    /// `@RequestMapping` without a constrained method.
    Any,
}

const MAPPING_ANNOTATIONS: &[(&str, HttpVerb)] = &[
    ("RequestMapping", HttpVerb::Any),
    ("GetMapping", HttpVerb::Get),
    ("PostMapping", HttpVerb::Post),
    ("PutMapping", HttpVerb::Put),
    ("DeleteMapping", HttpVerb::Delete),
    ("PatchMapping", HttpVerb::Patch),
];

/// One exposed endpoint: a public controller method with a mapping
/// annotation. A method with several declared paths is still one API; the
/// first path represents it.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiInfo {
    pub controller_name: String,
    pub method_name: String,
    pub http_path: String,
    pub http_verbs: BTreeSet<HttpVerb>,
    pub param_count: u64,
    pub versions: BTreeSet<String>,
}

pub fn extract_apis(controllers: &[&TypeDecl], cfg: &ExtractionConfig) -> Vec<ApiInfo> {
    let mut out = Vec::new();
    for decl in controllers {
        // Only RequestMapping is legal at class level.
        let class_path = decl
            .annotations
            .iter()
            .find(|a| a.name == "RequestMapping")
            .and_then(mapping_path)
            .unwrap_or_default();
        for method in &decl.methods {
            if method.visibility != Visibility::Public {
                continue;
            }
            let mut verbs = BTreeSet::new();
            let mut method_path: Option<String> = None;
            for ann in &method.annotations {
                if let Some((_, verb)) = MAPPING_ANNOTATIONS.iter().find(|(n, _)| *n == ann.name) {
                    verbs.insert(*verb);
                    if method_path.is_none() {
                        method_path = mapping_path(ann);
                    }
                }
            }
            if verbs.is_empty() {
                continue;
            }
            let http_path = join_paths(&class_path, method_path.as_deref().unwrap_or(""));
            let versions = cfg
                .version_pattern
                .find_iter(&http_path)
                .map(|m| m.as_str().to_lowercase())
                .collect();
            out.push(ApiInfo {
                controller_name: decl.simple_name.clone(),
                method_name: method.name.clone(),
                http_path,
                http_verbs: verbs,
                param_count: method.parameters.len() as u64,
                versions,
            });
        }
    }
    out
}

fn mapping_path(ann: &crate::java::Annotation) -> Option<String> {
    ann.members
        .get("value")
        .or_else(|| ann.members.get("path"))
        .cloned()
}

/// Joins class-level and method-level mapping paths with exactly one `/`
/// between segments, collapsing any doubled slashes.
fn join_paths(class_path: &str, method_path: &str) -> String {
    let joined = match (class_path.is_empty(), method_path.is_empty()) {
        (true, true) => String::new(),
        (true, false) => method_path.to_string(),
        (false, true) => class_path.to_string(),
        (false, false) => format!(
            "{}/{}",
            class_path.trim_end_matches('/'),
            method_path.trim_start_matches('/')
        ),
    };
    collapse_slashes(&joined)
}

fn collapse_slashes(path: &str) -> String {
    let mut out = String::with_capacity(path.len());
    let mut prev_slash = false;
    for c in path.chars() {
        if c == '/' {
            if !prev_slash {
                out.push(c);
            }
            prev_slash = true;
        } else {
            out.push(c);
            prev_slash = false;
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ApiMetrics {
    pub api_num: u64,
    pub max_param_num: u64,
    pub api_version_set: BTreeSet<String>,
}

pub fn extract_api_metrics(apis: &[ApiInfo]) -> ApiMetrics {
    ApiMetrics {
        api_num: apis.len() as u64,
        max_param_num: apis.iter().map(|a| a.param_count).max().unwrap_or(0),
        api_version_set: apis.iter().flat_map(|a| a.versions.iter().cloned()).collect(),
    }
}
