use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::api::{self, ApiMetrics};
use crate::calls::{self, CallMap, ServiceImplCallMap, SystemCallGraph};
use crate::catalog::{load_catalog, CatalogEntry};
use crate::config::ExtractionConfig;
use crate::dataset;
use crate::diag::Diagnostic;
use crate::error::{Error, Result};
use crate::java::{self, SourceUnit, TypeDecl};
use crate::maven;
use crate::record::{assemble_record, derive_metrics, MicroserviceRecord};
use crate::repo;
use crate::services::{identify_microservices, InfraRole, MicroserviceModule};
use crate::tiers::{self, TierCounts, TierRole};

#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyzeOptions {
    pub include_tests: bool,
}

/// Everything extracted from one checked-out working tree.
#[derive(Debug, Clone)]
pub struct TreeAnalysis {
    pub records: Vec<MicroserviceRecord>,
    pub graph: SystemCallGraph,
}

struct ServiceArtifacts {
    tier_counts: TierCounts,
    api_metrics: ApiMetrics,
    impl_calls: ServiceImplCallMap,
    code_size: u64,
}

/// Each module's sources roll up to its nearest enclosing microservice
/// module; modules outside every microservice (parent poms, shared
/// libraries) belong to no service.
fn nearest_service(services: &[(MicroserviceModule, String)], module: &Path) -> Option<usize> {
    services
        .iter()
        .enumerate()
        .filter(|(_, (ms, _))| module.starts_with(&ms.module_path))
        .max_by_key(|(_, (ms, _))| ms.module_path.components().count())
        .map(|(i, _)| i)
}

/// Analyzes one working tree: discovers the module tree, parses sources,
/// identifies microservices, and produces one complete record per
/// microservice plus the system call graph for this release.
pub fn analyze_tree(
    root: &Path,
    system: &str,
    release: &str,
    cfg: &ExtractionConfig,
    opts: AnalyzeOptions,
    diags: &mut Vec<Diagnostic>,
) -> Result<TreeAnalysis> {
    let tree = maven::discover_module_tree(root, diags)?;
    let module_paths: Vec<PathBuf> = tree.walk().iter().map(|m| m.path.clone()).collect();

    // A file belongs to the deepest module whose directory contains it,
    // so a submodule's sources are never double-counted by its parent.
    let mut files_by_module: BTreeMap<PathBuf, Vec<PathBuf>> = BTreeMap::new();
    for file in java::enumerate_source_files(root)? {
        if !opts.include_tests && java::is_test_source(&file) {
            continue;
        }
        let owner = module_paths
            .iter()
            .filter(|m| file.starts_with(m))
            .max_by_key(|m| m.components().count());
        if let Some(owner) = owner {
            files_by_module.entry(owner.clone()).or_default().push(file);
        }
    }

    let mut units_by_module: BTreeMap<PathBuf, Vec<SourceUnit>> = BTreeMap::new();
    let mut loc_by_module: BTreeMap<PathBuf, u64> = BTreeMap::new();
    for (module, files) in &files_by_module {
        for file in files {
            let unit = match java::parse::parse_source_unit(file, diags) {
                Ok(u) => u,
                Err(e) => {
                    diags.push(Diagnostic::warning(
                        file.display().to_string(),
                        format!("file skipped: {e}"),
                    ));
                    continue;
                }
            };
            units_by_module
                .entry(module.clone())
                .or_default()
                .push(unit);
            match java::loc::count_effective_lines(file) {
                Ok(n) => *loc_by_module.entry(module.clone()).or_default() += n,
                Err(e) => diags.push(Diagnostic::warning(
                    file.display().to_string(),
                    format!("line count skipped: {e}"),
                )),
            }
        }
    }

    let discovered = identify_microservices(&tree, &units_by_module);
    if discovered.is_empty() {
        diags.push(Diagnostic::info(
            system.to_string(),
            format!("no microservice modules found in {}", root.display()),
        ));
        return Ok(TreeAnalysis {
            records: Vec::new(),
            graph: SystemCallGraph::default(),
        });
    }

    // Resolved names key the dataset and the call graph, so duplicates
    // get a numeric suffix rather than silently merging two modules.
    let mut name_uses: BTreeMap<String, u32> = BTreeMap::new();
    let mut services: Vec<(MicroserviceModule, String)> = Vec::new();
    for ms in discovered {
        let uses = name_uses.entry(ms.service_name.clone()).or_insert(0);
        *uses += 1;
        let name = if *uses == 1 {
            ms.service_name.clone()
        } else {
            let renamed = format!("{}-{}", ms.service_name, uses);
            diags.push(Diagnostic::warning(
                ms.module_path.display().to_string(),
                format!(
                    "service name `{}` already used; recorded as `{renamed}`",
                    ms.service_name
                ),
            ));
            renamed
        };
        services.push((ms, name));
    }

    let mut units_for: Vec<Vec<SourceUnit>> = (0..services.len()).map(|_| Vec::new()).collect();
    let mut loc_for: Vec<u64> = vec![0; services.len()];
    for (module, units) in units_by_module {
        if let Some(idx) = nearest_service(&services, &module) {
            units_for[idx].extend(units);
            loc_for[idx] += loc_by_module.get(&module).copied().unwrap_or(0);
        }
    }

    let mut artifacts = Vec::with_capacity(services.len());
    let mut per_service_calls: BTreeMap<String, CallMap> = BTreeMap::new();
    for (idx, (_, name)) in services.iter().enumerate() {
        let units = &units_for[idx];
        let tier_counts = tiers::count_tier_metrics(units, cfg);

        let mut controllers: Vec<&TypeDecl> = Vec::new();
        let mut service_impls: Vec<&TypeDecl> = Vec::new();
        for unit in units {
            for decl in &unit.types {
                let roles = tiers::classify_type(decl, unit, cfg);
                if roles.contains(&TierRole::Controller) {
                    controllers.push(decl);
                }
                if roles.contains(&TierRole::ServiceImpl) {
                    service_impls.push(decl);
                }
            }
        }

        let apis = api::extract_apis(&controllers, cfg);
        let api_metrics = api::extract_api_metrics(&apis);
        let impl_calls = calls::extract_service_impl_calls(&controllers, &service_impls, units);

        let mut call_map = CallMap::default();
        for unit in units {
            for decl in &unit.types {
                call_map.merge(calls::extract_rest_calls(decl, cfg, diags));
            }
        }
        let feign_targets = calls::extract_feign_targets(units, diags);
        call_map.merge(calls::count_feign_usage(units, &feign_targets));
        per_service_calls.insert(name.clone(), call_map);

        artifacts.push(ServiceArtifacts {
            tier_counts,
            api_metrics,
            impl_calls,
            code_size: loc_for[idx],
        });
    }

    let business = services
        .iter()
        .filter(|(ms, _)| ms.infra_role == InfraRole::Business)
        .count() as u64;
    let total_services = if business > 0 {
        business
    } else {
        diags.push(Diagnostic::info(
            system.to_string(),
            format!(
                "no business-role services; call ratios use all {} discovered services",
                services.len()
            ),
        ));
        services.len() as u64
    };

    let graph = calls::build_system_call_graph(&per_service_calls, diags);

    let mut records = Vec::with_capacity(services.len());
    for ((ms, name), art) in services.iter().zip(artifacts) {
        let service_call = graph.service_call.get(name).cloned().unwrap_or_default();
        let service_called = graph.service_called.get(name).cloned().unwrap_or_default();
        let mut record = assemble_record(
            system,
            release,
            name,
            ms.infra_role,
            art.code_size,
            &art.tier_counts,
            &art.api_metrics,
            art.impl_calls,
            service_call,
            service_called,
        );
        derive_metrics(&mut record, total_services)?;
        records.push(record);
    }
    records.sort_by(|a, b| a.service.cmp(&b.service));

    Ok(TreeAnalysis { records, graph })
}

#[derive(Debug, Clone, Default)]
pub struct PipelineFlags {
    pub business_only: bool,
    pub include_tests: bool,
    pub emit_jsonl: bool,
    /// Directory receiving per-release call-graph CSV/DOT files.
    pub emit_graph: Option<PathBuf>,
    /// Concurrent systems; 0 picks the thread-pool default.
    pub jobs: usize,
}

#[derive(Debug, Clone)]
pub struct PipelineSummary {
    pub systems_total: usize,
    pub systems_failed: usize,
    pub releases_analyzed: usize,
    pub records_written: usize,
    pub diagnostics: Vec<Diagnostic>,
}

impl PipelineSummary {
    pub fn summary_line(&self) -> String {
        format!(
            "{} systems ({} failed), {} releases, {} records, {} diagnostics",
            self.systems_total,
            self.systems_failed,
            self.releases_analyzed,
            self.records_written,
            self.diagnostics.len()
        )
    }
}

/// Filesystem-safe stem for per-release output files.
pub fn sanitized_stem(system: &str, release: &str) -> String {
    format!("{system}-{release}")
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

type SystemOutcome = (Vec<(String, String, TreeAnalysis)>, Vec<Diagnostic>, bool);

/// Fetches and analyzes every catalog system at every release, then writes
/// the combined dataset. A failing system is logged and skipped; releases
/// analyzed before the failure are kept.
pub fn run_pipeline(
    catalog_path: &Path,
    workspace: &Path,
    out_path: &Path,
    cfg: &ExtractionConfig,
    flags: &PipelineFlags,
) -> Result<PipelineSummary> {
    let entries = load_catalog(catalog_path)?;
    std::fs::create_dir_all(workspace).map_err(|e| Error::io(workspace, e))?;

    let run_one = |entry: &CatalogEntry| -> SystemOutcome {
        let mut diags = Vec::new();
        let mut analyses = Vec::new();
        let outcome = (|| -> Result<()> {
            let repo_path = repo::fetch_repository(entry, workspace)?;
            for release in repo::list_releases(&repo_path)? {
                repo::checkout_release(&repo_path, &release)?;
                let analysis = analyze_tree(
                    &repo_path,
                    &entry.name,
                    &release.release_id,
                    cfg,
                    AnalyzeOptions {
                        include_tests: flags.include_tests,
                    },
                    &mut diags,
                )?;
                analyses.push((entry.name.clone(), release.release_id.clone(), analysis));
            }
            Ok(())
        })();
        let failed = if let Err(e) = outcome {
            diags.push(Diagnostic::warning(
                entry.name.clone(),
                format!("system skipped: {e}"),
            ));
            true
        } else {
            false
        };
        (analyses, diags, failed)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(flags.jobs)
        .build()
        .map_err(|e| Error::Invalid(format!("failed to build worker pool: {e}")))?;
    let results: Vec<SystemOutcome> =
        pool.install(|| entries.par_iter().map(run_one).collect());

    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    let mut releases_analyzed = 0;
    let mut systems_failed = 0;
    for (analyses, diags, failed) in results {
        diagnostics.extend(diags);
        systems_failed += usize::from(failed);
        for (system, release, analysis) in analyses {
            releases_analyzed += 1;
            if let Some(dir) = &flags.emit_graph {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                let base = dir.join(sanitized_stem(&system, &release));
                calls::write_graph_files(&analysis.graph, &base)?;
            }
            records.extend(analysis.records);
        }
    }

    if flags.business_only {
        records.retain(|r| r.infra_role == InfraRole::Business);
    }

    dataset::write_dataset(&records, out_path)?;
    // Reading back re-checks every record invariant on the bytes we wrote.
    let validated = dataset::read_dataset(out_path)?;
    if flags.emit_jsonl {
        dataset::write_jsonl(&records, &out_path.with_extension("jsonl"))?;
    }

    Ok(PipelineSummary {
        systems_total: entries.len(),
        systems_failed,
        releases_analyzed,
        records_written: validated.len(),
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::process::Command;

    fn write(root: &Path, rel: &str, content: &str) {
        let path = root.join(rel);
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(path, content).unwrap();
    }

    fn pom(artifact: &str, modules: &[&str]) -> String {
        let module_xml = if modules.is_empty() {
            String::new()
        } else {
            let items: String = modules
                .iter()
                .map(|m| format!("<module>{m}</module>"))
                .collect();
            format!("<modules>{items}</modules>")
        };
        format!(
            "<project><groupId>com.shop</groupId><artifactId>{artifact}</artifactId>{module_xml}</project>"
        )
    }

    /// Two business services (alpha calls beta once over HTTP) plus a
    /// registry module.
    fn build_fixture(root: &Path) {
        write(
            root,
            "pom.xml",
            &pom("parent", &["alpha-service", "beta-service", "registry"]),
        );

        write(root, "alpha-service/pom.xml", &pom("alpha-service", &[]));
        write(
            root,
            "alpha-service/src/main/resources/application.properties",
            "spring.application.name=alpha-service\n",
        );
        write(
            root,
            "alpha-service/src/main/java/com/shop/alpha/AlphaApp.java",
            "package com.shop.alpha;\n@SpringBootApplication\npublic class AlphaApp { }\n",
        );
        write(
            root,
            "alpha-service/src/main/java/com/shop/alpha/web/AlphaController.java",
            "package com.shop.alpha.web;\n\
             @RestController\n\
             public class AlphaController {\n\
                 private RestTemplate rest;\n\
                 @GetMapping(\"/api/v1/alpha\")\n\
                 public String fetch() {\n\
                     return rest.getForObject(\"http://beta-service/api/v1/beta\", String.class);\n\
                 }\n\
             }\n",
        );
        write(
            root,
            "alpha-service/src/test/java/com/shop/alpha/AlphaControllerTest.java",
            "package com.shop.alpha;\n\
             @RestController\n\
             public class AlphaControllerTest {\n\
                 @GetMapping(\"/test\")\n\
                 public String probe() { return \"ok\"; }\n\
             }\n",
        );

        write(root, "beta-service/pom.xml", &pom("beta-service", &[]));
        write(
            root,
            "beta-service/src/main/resources/application.properties",
            "spring.application.name=beta-service\n",
        );
        write(
            root,
            "beta-service/src/main/java/com/shop/beta/BetaApp.java",
            "package com.shop.beta;\n@SpringBootApplication\npublic class BetaApp { }\n",
        );
        write(
            root,
            "beta-service/src/main/java/com/shop/beta/web/BetaController.java",
            "package com.shop.beta.web;\n\
             @RestController\n\
             public class BetaController {\n\
                 @GetMapping(\"/api/v1/beta\")\n\
                 public String read() { return \"beta\"; }\n\
             }\n",
        );

        write(root, "registry/pom.xml", &pom("registry-server", &[]));
        write(
            root,
            "registry/src/main/java/com/shop/registry/RegistryApp.java",
            "package com.shop.registry;\n\
             @SpringBootApplication\n\
             @EnableEurekaServer\n\
             public class RegistryApp { }\n",
        );
    }

    fn analyze(root: &Path, opts: AnalyzeOptions) -> (TreeAnalysis, Vec<Diagnostic>) {
        let cfg = ExtractionConfig::default();
        let mut diags = Vec::new();
        let analysis = analyze_tree(root, "shop", "v1", &cfg, opts, &mut diags).unwrap();
        (analysis, diags)
    }

    #[test]
    fn analyzes_fixture_tree() {
        let dir = tempfile::tempdir().unwrap();
        build_fixture(dir.path());
        let (analysis, _) = analyze(dir.path(), AnalyzeOptions::default());

        let names: Vec<&str> = analysis.records.iter().map(|r| r.service.as_str()).collect();
        assert_eq!(names, ["alpha-service", "beta-service", "registry-server"]);

        let alpha = &analysis.records[0];
        assert_eq!(alpha.infra_role, InfraRole::Business);
        assert_eq!(alpha.controller_num, 1);
        assert_eq!(alpha.api_num, 1);
        assert_eq!(alpha.service_call, [("beta-service".to_string(), 1)].into_iter().collect());
        assert!(alpha.service_called.is_empty());
        assert!(alpha.code_size > 0);
        assert_eq!(alpha.api_version_set, ["v1".to_string()].into_iter().collect());
        // Two business services, alpha calls one of them.
        assert_eq!(alpha.service_call_gate, 1);
        assert_eq!(alpha.service_call_per, 0.5);

        let beta = &analysis.records[1];
        assert_eq!(beta.service_called, [("alpha-service".to_string(), 1)].into_iter().collect());

        let registry = &analysis.records[2];
        assert_eq!(registry.infra_role, InfraRole::Registry);
        assert_eq!(registry.api_num, 0);

        assert_eq!(analysis.graph.service_call.len(), 1);
    }

    #[test]
    fn test_sources_excluded_by_default() {
        let dir = tempfile::tempdir().unwrap();
        build_fixture(dir.path());

        let (default_run, _) = analyze(dir.path(), AnalyzeOptions::default());
        let (with_tests, _) = analyze(dir.path(), AnalyzeOptions { include_tests: true });

        let alpha = &default_run.records[0];
        let alpha_t = &with_tests.records[0];
        assert_eq!(alpha.controller_num, 1);
        assert_eq!(alpha_t.controller_num, 2);
        assert!(alpha_t.code_size > alpha.code_size);
        assert_eq!(alpha_t.api_num, 2);
    }

    #[test]
    fn empty_tree_yields_no_records() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "pom.xml", &pom("lonely", &[]));
        let (analysis, diags) = analyze(dir.path(), AnalyzeOptions::default());
        assert!(analysis.records.is_empty());
        assert!(diags.iter().any(|d| d.message.contains("no microservice modules")));
    }

    #[test]
    fn duplicate_service_names_get_suffixes() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "pom.xml", &pom("parent", &["a", "b"]));
        for module in ["a", "b"] {
            write(dir.path(), &format!("{module}/pom.xml"), &pom(module, &[]));
            write(
                dir.path(),
                &format!("{module}/src/main/resources/application.properties"),
                "spring.application.name=same-service\n",
            );
            write(
                dir.path(),
                &format!("{module}/src/main/java/com/x/App.java"),
                "package com.x;\n@SpringBootApplication\npublic class App { }\n",
            );
        }
        let (analysis, diags) = analyze(dir.path(), AnalyzeOptions::default());
        let names: Vec<&str> = analysis.records.iter().map(|r| r.service.as_str()).collect();
        assert_eq!(names, ["same-service", "same-service-2"]);
        assert!(diags.iter().any(|d| d.message.contains("already used")));
    }

    fn git(dir: &Path, args: &[&str]) {
        let out = Command::new("git")
            .arg("-C")
            .arg(dir)
            .args(["-c", "user.name=t", "-c", "user.email=t@example.com"])
            .args(args)
            .env("GIT_AUTHOR_DATE", "2020-01-01T00:00:00Z")
            .env("GIT_COMMITTER_DATE", "2020-01-01T00:00:00Z")
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "git {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }

    fn fixture_repo() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        build_fixture(dir.path());
        git(dir.path(), &["init", "--quiet"]);
        git(dir.path(), &["add", "."]);
        git(dir.path(), &["commit", "--quiet", "-m", "first"]);
        git(dir.path(), &["tag", "v1.0"]);
        // Second release adds one more API to beta.
        write(
            dir.path(),
            "beta-service/src/main/java/com/shop/beta/web/BetaController.java",
            "package com.shop.beta.web;\n\
             @RestController\n\
             public class BetaController {\n\
                 @GetMapping(\"/api/v1/beta\")\n\
                 public String read() { return \"beta\"; }\n\
                 @PostMapping(\"/api/v1/beta\")\n\
                 public String create(String body) { return body; }\n\
             }\n",
        );
        git(dir.path(), &["add", "."]);
        git(dir.path(), &["commit", "--quiet", "-m", "second"]);
        git(dir.path(), &["tag", "v2.0"]);
        dir
    }

    fn catalog_for(repos: &[(&str, &Path)]) -> tempfile::NamedTempFile {
        let mut body =
            String::from("name,git_url,service_number,multiple_tags,introduction,stars\n");
        for (name, path) in repos {
            body.push_str(&format!("{name},file://{},3,Yes,fixture,1\n", path.display()));
        }
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), body).unwrap();
        f
    }

    #[test]
    fn pipeline_covers_all_releases() {
        let origin = fixture_repo();
        let catalog = catalog_for(&[("shop", origin.path())]);
        let workspace = tempfile::tempdir().unwrap();
        let out = workspace.path().join("dataset.csv");

        let cfg = ExtractionConfig::default();
        let summary = run_pipeline(
            catalog.path(),
            &workspace.path().join("repos"),
            &out,
            &cfg,
            &PipelineFlags::default(),
        )
        .unwrap();

        assert_eq!(summary.systems_total, 1);
        assert_eq!(summary.systems_failed, 0);
        assert_eq!(summary.releases_analyzed, 2);
        assert_eq!(summary.records_written, 6);

        let records = dataset::read_dataset(&out).unwrap();
        assert_eq!(records.len(), 6);
        let v2_beta = records
            .iter()
            .find(|r| r.release == "v2.0" && r.service == "beta-service")
            .unwrap();
        assert_eq!(v2_beta.api_num, 2);
    }

    #[test]
    fn business_only_drops_infra_rows() {
        let origin = fixture_repo();
        let catalog = catalog_for(&[("shop", origin.path())]);
        let workspace = tempfile::tempdir().unwrap();
        let out = workspace.path().join("dataset.csv");

        let cfg = ExtractionConfig::default();
        let flags = PipelineFlags {
            business_only: true,
            emit_jsonl: true,
            emit_graph: Some(workspace.path().join("graphs")),
            ..PipelineFlags::default()
        };
        let summary = run_pipeline(
            catalog.path(),
            &workspace.path().join("repos"),
            &out,
            &cfg,
            &flags,
        )
        .unwrap();

        assert_eq!(summary.records_written, 4);
        let jsonl = std::fs::read_to_string(out.with_extension("jsonl")).unwrap();
        assert_eq!(jsonl.lines().count(), 4);
        assert!(workspace.path().join("graphs/shop-v1_0.csv").exists());
        assert!(workspace.path().join("graphs/shop-v2_0.dot").exists());
    }

    #[test]
    fn unreachable_system_is_skipped_not_fatal() {
        let origin = fixture_repo();
        let ghost = PathBuf::from("/nonexistent/ghost");
        let catalog = catalog_for(&[("shop", origin.path()), ("ghost", &ghost)]);
        let workspace = tempfile::tempdir().unwrap();
        let out = workspace.path().join("dataset.csv");

        let cfg = ExtractionConfig::default();
        let summary = run_pipeline(
            catalog.path(),
            &workspace.path().join("repos"),
            &out,
            &cfg,
            &PipelineFlags::default(),
        )
        .unwrap();

        assert_eq!(summary.systems_total, 2);
        assert_eq!(summary.systems_failed, 1);
        assert_eq!(summary.records_written, 6);
        assert!(summary
            .diagnostics
            .iter()
            .any(|d| d.scope == "ghost" && d.message.contains("skipped")));
    }

    #[test]
    fn empty_catalog_writes_empty_dataset() {
        let catalog = catalog_for(&[]);
        let workspace = tempfile::tempdir().unwrap();
        let out = workspace.path().join("dataset.csv");
        let cfg = ExtractionConfig::default();
        let summary = run_pipeline(
            catalog.path(),
            &workspace.path().join("repos"),
            &out,
            &cfg,
            &PipelineFlags::default(),
        )
        .unwrap();
        assert_eq!(summary.records_written, 0);
        assert!(out.exists());
    }
}
