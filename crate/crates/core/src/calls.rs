use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::config::ExtractionConfig;
use crate::diag::Diagnostic;
use crate::error::{Error, Result};
use crate::java::{Expr, SourceUnit, TypeDecl};

/// Marks URL segments whose value is not statically known: unresolvable
/// variables, cross-class constants, runtime data.
pub const PLACEHOLDER: &str = "{?}";

/// The REST client whose call sites are analyzed. Its reactive successor is
/// deliberately not followed; seeing one only produces a diagnostic.
pub const REST_CLIENT_TYPE: &str = "RestTemplate";
const WEBCLIENT_TYPE: &str = "WebClient";

/// Callee service name -> number of invocations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CallMap(pub BTreeMap<String, u64>);

impl CallMap {
    pub fn add(&mut self, callee: impl Into<String>) {
        let callee = callee.into();
        if callee.is_empty() {
            return;
        }
        *self.0.entry(callee).or_insert(0) += 1;
    }

    pub fn merge(&mut self, other: CallMap) {
        for (callee, n) in other.0 {
            *self.0.entry(callee).or_insert(0) += n;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }
}

/// "TypeName.methodName" -> number of controller-side invocations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ServiceImplCallMap(pub BTreeMap<String, u64>);

/// Names of fields declared with the REST client type.
pub fn find_rest_client_fields(decl: &TypeDecl) -> Vec<String> {
    decl.fields
        .iter()
        .filter(|f| f.type_name == REST_CLIENT_TYPE)
        .map(|f| f.name.clone())
        .collect()
}

pub fn find_webclient_fields(decl: &TypeDecl) -> Vec<String> {
    decl.fields
        .iter()
        .filter(|f| f.type_name == WEBCLIENT_TYPE)
        .map(|f| f.name.clone())
        .collect()
}

/// Service calls made from one method: every HTTP-call invocation on a REST
/// client field has its URL argument reduced to a string and matched for a
/// service-name host token. Resolution is confined to the declaring class;
/// anything beyond it reduces to a placeholder.
pub fn extract_rest_calls_in_method(
    decl: &TypeDecl,
    index: usize,
    cfg: &ExtractionConfig,
    diags: &mut Vec<Diagnostic>,
) -> CallMap {
    let mut map = CallMap::default();
    let Some(method) = decl.methods.get(index) else {
        return map;
    };
    let client_fields = find_rest_client_fields(decl);
    if client_fields.is_empty() {
        return map;
    }
    let bindings = method.binding_map();
    for call in &method.body_calls {
        let Some(receiver) = &call.receiver else {
            continue;
        };
        if !client_fields.contains(receiver) || !cfg.rest_client_methods.contains(&call.method_name)
        {
            continue;
        }
        let Some(url_expr) = call.arguments.first() else {
            continue;
        };
        let url = reduce_url_expression(url_expr, decl, &bindings);
        match match_service_name(&url, cfg) {
            Some(service) => map.add(service),
            None => diags.push(Diagnostic::info(
                format!("{}.{}", decl.simple_name, method.name),
                format!("request URL `{url}` has no service-name host"),
            )),
        }
    }
    map
}

/// All REST-client calls of a class, plus the WebClient blind-spot warning.
pub fn extract_rest_calls(
    decl: &TypeDecl,
    cfg: &ExtractionConfig,
    diags: &mut Vec<Diagnostic>,
) -> CallMap {
    if !find_webclient_fields(decl).is_empty() {
        diags.push(Diagnostic::warning(
            decl.simple_name.clone(),
            "WebClient field present; reactive HTTP calls are not analyzed",
        ));
    }
    let mut map = CallMap::default();
    for i in 0..decl.methods.len() {
        map.merge(extract_rest_calls_in_method(decl, i, cfg, diags));
    }
    map
}

const MAX_REDUCE_DEPTH: usize = 16;

/// Folds a URL expression into a plain string. String literals pass through;
/// variables are substituted from method-local bindings and then field
/// initializers; calls are substituted by the return expression of a
/// single-return method of the same class, with parameters bound to reduced
/// arguments. Whatever cannot be resolved becomes `{?}`. A depth bound and
/// a per-path visited set make the fold total even on cyclic definitions.
pub fn reduce_url_expression(
    expr: &Expr,
    ctx: &TypeDecl,
    bindings: &BTreeMap<String, Expr>,
) -> String {
    let mut visited = BTreeSet::new();
    reduce(expr, ctx, bindings, &mut visited, 0)
}

fn reduce(
    expr: &Expr,
    ctx: &TypeDecl,
    bindings: &BTreeMap<String, Expr>,
    visited: &mut BTreeSet<String>,
    depth: usize,
) -> String {
    if depth > MAX_REDUCE_DEPTH {
        return PLACEHOLDER.to_string();
    }
    match expr {
        Expr::StringLiteral(s) => s.clone(),
        Expr::Concat(l, r) => {
            let left = reduce(l, ctx, bindings, visited, depth + 1);
            let right = reduce(r, ctx, bindings, visited, depth + 1);
            format!("{left}{right}")
        }
        Expr::NameRef(name) => {
            let key = format!("v:{name}");
            if !visited.insert(key.clone()) {
                return PLACEHOLDER.to_string();
            }
            let result = if let Some(bound) = bindings.get(name) {
                reduce(bound, ctx, bindings, visited, depth + 1)
            } else if let Some(init) = ctx
                .fields
                .iter()
                .find(|f| &f.name == name)
                .and_then(|f| f.initializer.as_ref())
            {
                // Field initializers cannot see method locals.
                reduce(init, ctx, &BTreeMap::new(), visited, depth + 1)
            } else {
                PLACEHOLDER.to_string()
            };
            visited.remove(&key);
            result
        }
        Expr::Call(call) => {
            let key = format!("m:{}", call.method_name);
            if !visited.insert(key.clone()) {
                return PLACEHOLDER.to_string();
            }
            let result = (|| {
                let candidates: Vec<_> = ctx
                    .methods
                    .iter()
                    .filter(|m| m.name == call.method_name && m.return_expr.is_some())
                    .collect();
                let callee = candidates
                    .iter()
                    .find(|m| m.parameters.len() == call.arguments.len())
                    .or_else(|| candidates.first())?;
                let ret = callee.return_expr.as_ref()?;
                let params: BTreeMap<String, Expr> = callee
                    .parameters
                    .iter()
                    .zip(&call.arguments)
                    .map(|((pname, _), arg)| {
                        let value = reduce(arg, ctx, bindings, visited, depth + 1);
                        (pname.clone(), Expr::StringLiteral(value))
                    })
                    .collect();
                Some(reduce(ret, ctx, &params, visited, depth + 1))
            })()
            .unwrap_or_else(|| PLACEHOLDER.to_string());
            visited.remove(&key);
            result
        }
        Expr::Opaque => PLACEHOLDER.to_string(),
    }
}

/// Pulls the host token out of a reduced URL and accepts it iff the
/// service-name pattern matches the whole token. `http://x-service/p`
/// yields the token after `://`; URLs without a scheme use their first
/// `/`-delimited token.
pub fn match_service_name(url: &str, cfg: &ExtractionConfig) -> Option<String> {
    let token = match url.find("://") {
        Some(at) => {
            let rest = &url[at + 3..];
            let end = rest
                .find(|c: char| c == '/' || c.is_whitespace())
                .unwrap_or(rest.len());
            &rest[..end]
        }
        None => url.split('/').next().unwrap_or(""),
    };
    if token.is_empty() || token.contains(PLACEHOLDER) {
        return None;
    }
    cfg.matches_service_token(token).then(|| token.to_string())
}

/// FeignClient interfaces: type simple name -> target service name, taken
/// from the `value` member, else `name`. Clients whose target is not a
/// plain literal cannot be attributed and are skipped with a diagnostic.
pub fn extract_feign_targets(
    units: &[SourceUnit],
    diags: &mut Vec<Diagnostic>,
) -> BTreeMap<String, String> {
    let mut targets = BTreeMap::new();
    for unit in units {
        for decl in &unit.types {
            let Some(ann) = decl.annotations.iter().find(|a| a.name == "FeignClient") else {
                continue;
            };
            let target = ann
                .members
                .get("value")
                .or_else(|| ann.members.get("name"))
                .map(String::as_str)
                .unwrap_or("");
            if target.is_empty() {
                diags.push(Diagnostic::warning(
                    decl.simple_name.clone(),
                    "FeignClient without a literal value/name member; calls not attributed",
                ));
                continue;
            }
            targets.insert(decl.simple_name.clone(), target.to_string());
        }
    }
    targets
}

/// Counts invocations made through fields whose declared type is a known
/// Feign client interface.
pub fn count_feign_usage(
    units: &[SourceUnit],
    feign_targets: &BTreeMap<String, String>,
) -> CallMap {
    let mut map = CallMap::default();
    if feign_targets.is_empty() {
        return map;
    }
    for unit in units {
        for decl in &unit.types {
            let client_fields: BTreeMap<&str, &str> = decl
                .fields
                .iter()
                .filter_map(|f| {
                    feign_targets
                        .get(&f.type_name)
                        .map(|target| (f.name.as_str(), target.as_str()))
                })
                .collect();
            if client_fields.is_empty() {
                continue;
            }
            for method in &decl.methods {
                for call in &method.body_calls {
                    if let Some(receiver) = &call.receiver {
                        if let Some(target) = client_fields.get(receiver.as_str()) {
                            map.add(*target);
                        }
                    }
                }
            }
        }
    }
    map
}

/// Controller-to-service-implementation invocation counts, keyed
/// "DeclaredTypeName.methodName". A controller field qualifies when its
/// declared type is a ServiceImpl class itself, or an interface (declared in
/// this microservice) that a ServiceImpl implements.
pub fn extract_service_impl_calls(
    controllers: &[&TypeDecl],
    service_impls: &[&TypeDecl],
    units: &[SourceUnit],
) -> ServiceImplCallMap {
    let interfaces: BTreeSet<&str> = units
        .iter()
        .flat_map(|u| u.types.iter())
        .filter(|t| t.kind == crate::java::TypeKind::Interface)
        .map(|t| t.simple_name.as_str())
        .collect();

    let mut qualifying: BTreeSet<&str> = BTreeSet::new();
    for imp in service_impls {
        qualifying.insert(imp.simple_name.as_str());
        for sup in &imp.super_type_names {
            if interfaces.contains(sup.as_str()) {
                qualifying.insert(sup.as_str());
            }
        }
    }

    let mut map = ServiceImplCallMap::default();
    for ctrl in controllers {
        let service_fields: BTreeMap<&str, &str> = ctrl
            .fields
            .iter()
            .filter(|f| qualifying.contains(f.type_name.as_str()))
            .map(|f| (f.name.as_str(), f.type_name.as_str()))
            .collect();
        if service_fields.is_empty() {
            continue;
        }
        for method in &ctrl.methods {
            for call in &method.body_calls {
                if let Some(receiver) = &call.receiver {
                    if let Some(type_name) = service_fields.get(receiver.as_str()) {
                        *map.0
                            .entry(format!("{type_name}.{}", call.method_name))
                            .or_insert(0) += 1;
                    }
                }
            }
        }
    }
    map
}

/// Directed call graph over one system at one release.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SystemCallGraph {
    /// caller -> callee -> count. Rows exist only for callers with calls.
    pub service_call: BTreeMap<String, BTreeMap<String, u64>>,
    /// Exact transpose of `service_call`.
    pub service_called: BTreeMap<String, BTreeMap<String, u64>>,
}

/// Joins per-service call maps into the system graph. Callee names are
/// matched case-insensitively against the known (resolved) service names so
/// `http://USER-SERVICE/...` lands on `user-service`; unknown callees stay
/// verbatim and are reported as external.
pub fn build_system_call_graph(
    per_service: &BTreeMap<String, CallMap>,
    diags: &mut Vec<Diagnostic>,
) -> SystemCallGraph {
    let canonical: BTreeMap<String, &str> = per_service
        .keys()
        .map(|name| (name.to_lowercase(), name.as_str()))
        .collect();

    let mut graph = SystemCallGraph::default();
    for (caller, calls) in per_service {
        for (callee, &n) in &calls.0 {
            let resolved = match canonical.get(&callee.to_lowercase()) {
                Some(known) => known.to_string(),
                None => {
                    diags.push(Diagnostic::info(
                        caller.clone(),
                        format!("callee `{callee}` is not a service of this system"),
                    ));
                    callee.clone()
                }
            };
            *graph
                .service_call
                .entry(caller.clone())
                .or_default()
                .entry(resolved)
                .or_insert(0) += n;
        }
    }
    for (caller, row) in &graph.service_call {
        for (callee, &n) in row {
            *graph
                .service_called
                .entry(callee.clone())
                .or_default()
                .entry(caller.clone())
                .or_insert(0) += n;
        }
    }
    graph
}

/// Edge list `caller,callee,count`, one row per edge, sorted.
pub fn render_edge_csv(graph: &SystemCallGraph) -> String {
    let mut out = String::from("caller,callee,count\n");
    for (caller, row) in &graph.service_call {
        for (callee, n) in row {
            let _ = writeln!(out, "{caller},{callee},{n}");
        }
    }
    out
}

pub fn render_dot(graph: &SystemCallGraph) -> String {
    let mut out = String::from("digraph service_calls {\n");
    for (caller, row) in &graph.service_call {
        for (callee, n) in row {
            let _ = writeln!(out, "  \"{caller}\" -> \"{callee}\" [label=\"{n}\"];");
        }
    }
    out.push_str("}\n");
    out
}

pub fn write_graph_files(graph: &SystemCallGraph, base: &Path) -> Result<()> {
    let csv_path = base.with_extension("csv");
    let dot_path = base.with_extension("dot");
    std::fs::write(&csv_path, render_edge_csv(graph)).map_err(|e| Error::io(&csv_path, e))?;
    std::fs::write(&dot_path, render_dot(graph)).map_err(|e| Error::io(&dot_path, e))?;
    Ok(())
}
