use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::java::SourceUnit;
use crate::maven::ModuleNode;

/// What a Spring Boot module is for. Infrastructure modules (service
/// registries, API gateways, config servers, admin dashboards) are measured
/// like any other module but flagged so consumers can filter them out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfraRole {
    Business,
    Registry,
    Gateway,
    ConfigServer,
    OtherInfra,
}

impl InfraRole {
    pub fn as_str(self) -> &'static str {
        match self {
            InfraRole::Business => "business",
            InfraRole::Registry => "registry",
            InfraRole::Gateway => "gateway",
            InfraRole::ConfigServer => "config_server",
            InfraRole::OtherInfra => "other_infra",
        }
    }

    pub fn parse(s: &str) -> Option<InfraRole> {
        Some(match s {
            "business" => InfraRole::Business,
            "registry" => InfraRole::Registry,
            "gateway" => InfraRole::Gateway,
            "config_server" => InfraRole::ConfigServer,
            "other_infra" => InfraRole::OtherInfra,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct MicroserviceModule {
    pub module_path: PathBuf,
    pub artifact_id: String,
    pub dependencies: Vec<(String, String)>,
    pub service_name: String,
    pub infra_role: InfraRole,
}

/// A module is a microservice iff one of its sources declares a type
/// annotated `SpringBootApplication`. Shared libraries and aggregator
/// modules drop out here.
pub fn identify_microservices(
    tree: &ModuleNode,
    sources: &BTreeMap<PathBuf, Vec<SourceUnit>>,
) -> Vec<MicroserviceModule> {
    let mut out = Vec::new();
    for node in tree.walk() {
        let units = match sources.get(&node.path) {
            Some(u) => u,
            None => continue,
        };
        let is_app = units.iter().any(|u| {
            u.types
                .iter()
                .any(|t| t.annotations.iter().any(|a| a.name == "SpringBootApplication"))
        });
        if !is_app {
            continue;
        }
        out.push(MicroserviceModule {
            module_path: node.path.clone(),
            artifact_id: node.artifact_id.clone(),
            dependencies: node.dependencies.clone(),
            service_name: resolve_service_name(&node.path, &node.artifact_id),
            infra_role: classify_infrastructure_role(node, units),
        });
    }
    out
}

const REGISTRY_ANNOTATIONS: &[&str] = &["EnableEurekaServer"];
const GATEWAY_ANNOTATIONS: &[&str] = &["EnableZuulProxy", "EnableZuulServer"];
const CONFIG_ANNOTATIONS: &[&str] = &["EnableConfigServer"];
const OTHER_INFRA_ANNOTATIONS: &[&str] =
    &["EnableAdminServer", "EnableTurbine", "EnableZipkinServer"];

const REGISTRY_ARTIFACT_MARKS: &[&str] = &["eureka-server"];
const GATEWAY_ARTIFACT_MARKS: &[&str] = &["gateway"];
const CONFIG_ARTIFACT_MARKS: &[&str] = &["config-server"];
const OTHER_INFRA_ARTIFACT_MARKS: &[&str] = &["admin-starter-server", "zipkin-server", "turbine"];

/// Role detection from enabling annotations and dependency artifact ids.
/// Precedence when markers overlap: registry > gateway > config server >
/// other infrastructure > business.
pub fn classify_infrastructure_role(node: &ModuleNode, units: &[SourceUnit]) -> InfraRole {
    let has_annotation = |names: &[&str]| {
        units.iter().any(|u| {
            u.types
                .iter()
                .any(|t| t.annotations.iter().any(|a| names.contains(&a.name.as_str())))
        })
    };
    let has_dep = |marks: &[&str]| {
        node.dependencies
            .iter()
            .any(|(_, artifact)| marks.iter().any(|m| artifact.contains(m)))
    };

    if has_annotation(REGISTRY_ANNOTATIONS) || has_dep(REGISTRY_ARTIFACT_MARKS) {
        InfraRole::Registry
    } else if has_annotation(GATEWAY_ANNOTATIONS) || has_dep(GATEWAY_ARTIFACT_MARKS) {
        InfraRole::Gateway
    } else if has_annotation(CONFIG_ANNOTATIONS) || has_dep(CONFIG_ARTIFACT_MARKS) {
        InfraRole::ConfigServer
    } else if has_annotation(OTHER_INFRA_ANNOTATIONS) || has_dep(OTHER_INFRA_ARTIFACT_MARKS) {
        InfraRole::OtherInfra
    } else {
        InfraRole::Business
    }
}

/// Config files consulted for `spring.application.name`, in precedence
/// order. The first file that yields a name wins.
const CONFIG_FILES: &[&str] = &[
    "application.properties",
    "bootstrap.properties",
    "application.yml",
    "application.yaml",
    "bootstrap.yml",
    "bootstrap.yaml",
];

/// The name other services use to call this one. Falls back to the Maven
/// artifact id when no configuration declares a name.
pub fn resolve_service_name(module_path: &Path, artifact_id: &str) -> String {
    let resources = module_path.join("src/main/resources");
    for file in CONFIG_FILES {
        let path = resources.join(file);
        let Ok(text) = fs::read_to_string(&path) else {
            continue;
        };
        let name = if file.ends_with(".properties") {
            properties_lookup(&text, "spring.application.name")
        } else {
            yaml_lookup(&text)
        };
        if let Some(name) = name {
            let name = name.trim().to_string();
            if !name.is_empty() {
                return name;
            }
        }
    }
    artifact_id.trim().to_string()
}

fn properties_lookup(text: &str, wanted: &str) -> Option<String> {
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('!') {
            continue;
        }
        // .properties accepts both separators.
        let Some((key, value)) = line.split_once('=').or_else(|| line.split_once(':')) else {
            continue;
        };
        if key.trim() == wanted {
            return Some(value.trim().to_string());
        }
    }
    None
}

/// Looks in the first YAML document only; later documents are profile
/// overrides. Accepts both nested keys and the flattened dotted form.
fn yaml_lookup(text: &str) -> Option<String> {
    let first_doc = text.split("\n---").next().unwrap_or(text);
    let value: serde_yaml::Value = serde_yaml::from_str(first_doc).ok()?;
    let nested = value
        .get("spring")
        .and_then(|s| s.get("application"))
        .and_then(|a| a.get("name"))
        .and_then(|n| n.as_str());
    if let Some(n) = nested {
        return Some(n.to_string());
    }
    value
        .get("spring.application.name")
        .and_then(|n| n.as_str())
        .map(str::to_string)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::java::parse::parse_source;

    fn unit(src: &str) -> SourceUnit {
        parse_source(src, Path::new("App.java"))
    }

    fn node(artifact: &str, deps: &[(&str, &str)]) -> ModuleNode {
        ModuleNode {
            path: PathBuf::from(format!("/tmp/{artifact}")),
            artifact_id: artifact.to_string(),
            group_id: None,
            dependencies: deps
                .iter()
                .map(|(g, a)| (g.to_string(), a.to_string()))
                .collect(),
            children: Vec::new(),
            descriptor_missing: false,
        }
    }

    #[test]
    fn identification_requires_application_annotation() {
        let mut root = node("parent", &[]);
        root.children.push(node("svc", &[]));
        root.children.push(node("lib", &[]));
        let mut sources = BTreeMap::new();
        sources.insert(
            root.children[0].path.clone(),
            vec![unit("@SpringBootApplication class App {}")],
        );
        sources.insert(
            root.children[1].path.clone(),
            vec![unit("class Util {}")],
        );

        let found = identify_microservices(&root, &sources);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].artifact_id, "svc");
        assert_eq!(found[0].infra_role, InfraRole::Business);
    }

    #[test]
    fn registry_by_annotation_beats_gateway_by_dependency() {
        let n = node("mixed", &[("org.springframework.cloud", "spring-cloud-starter-gateway")]);
        let units = vec![unit("@SpringBootApplication @EnableEurekaServer class App {}")];
        assert_eq!(classify_infrastructure_role(&n, &units), InfraRole::Registry);
    }

    #[test]
    fn role_markers() {
        let plain = vec![unit("@SpringBootApplication class App {}")];
        let cases: &[(&str, InfraRole)] = &[
            ("spring-cloud-starter-netflix-eureka-server", InfraRole::Registry),
            ("spring-cloud-starter-netflix-eureka-client", InfraRole::Business),
            ("spring-cloud-starter-gateway", InfraRole::Gateway),
            ("spring-cloud-config-server", InfraRole::ConfigServer),
            ("spring-boot-admin-starter-server", InfraRole::OtherInfra),
            ("mysql-connector-java", InfraRole::Business),
        ];
        for (artifact, want) in cases {
            let n = node("m", &[("g", artifact)]);
            assert_eq!(classify_infrastructure_role(&n, &plain), *want, "{artifact}");
        }
        let zuul = vec![unit("@SpringBootApplication @EnableZuulProxy class App {}")];
        assert_eq!(classify_infrastructure_role(&node("m", &[]), &zuul), InfraRole::Gateway);
    }

    #[test]
    fn service_name_precedence() {
        let tmp = tempfile::tempdir().unwrap();
        let module = tmp.path();
        let res = module.join("src/main/resources");
        std::fs::create_dir_all(&res).unwrap();

        // No config: artifact id.
        assert_eq!(resolve_service_name(module, "art"), "art");

        // YAML nested form.
        std::fs::write(
            res.join("application.yml"),
            "spring:\n  application:\n    name: yml-name\n",
        )
        .unwrap();
        assert_eq!(resolve_service_name(module, "art"), "yml-name");

        // Properties beats YAML.
        std::fs::write(
            res.join("application.properties"),
            "# svc\nspring.application.name = props-name\n",
        )
        .unwrap();
        assert_eq!(resolve_service_name(module, "art"), "props-name");
    }

    #[test]
    fn yaml_multi_document_uses_first() {
        let tmp = tempfile::tempdir().unwrap();
        let res = tmp.path().join("src/main/resources");
        std::fs::create_dir_all(&res).unwrap();
        std::fs::write(
            res.join("bootstrap.yml"),
            "spring:\n  application:\n    name: first\n---\nspring:\n  application:\n    name: second\n",
        )
        .unwrap();
        assert_eq!(resolve_service_name(tmp.path(), "art"), "first");
    }

    #[test]
    fn yaml_flattened_key() {
        let tmp = tempfile::tempdir().unwrap();
        let res = tmp.path().join("src/main/resources");
        std::fs::create_dir_all(&res).unwrap();
        std::fs::write(res.join("application.yaml"), "spring.application.name: flat\n").unwrap();
        assert_eq!(resolve_service_name(tmp.path(), "art"), "flat");
    }

    #[test]
    fn properties_colon_separator() {
        assert_eq!(
            properties_lookup("spring.application.name: x-svc\n", "spring.application.name"),
            Some("x-svc".to_string())
        );
        // A separator-less line is skipped, not fatal.
        assert_eq!(
            properties_lookup("malformed\nspring.application.name=y\n", "spring.application.name"),
            Some("y".to_string())
        );
    }
}
