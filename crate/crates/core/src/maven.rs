use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::diag::Diagnostic;
use crate::error::{Error, Result};

/// One Maven module. `children` follows `<modules>` declarations, so the
/// tree mirrors the aggregator layout of the repository.
#[derive(Debug, Clone)]
pub struct ModuleNode {
    pub path: PathBuf,
    pub artifact_id: String,
    pub group_id: Option<String>,
    /// `(group_id, artifact_id)` pairs from the `<dependencies>` section.
    pub dependencies: Vec<(String, String)>,
    pub children: Vec<ModuleNode>,
    /// Set when the module was declared by a parent but its own descriptor
    /// is missing or unreadable; such nodes are leaves.
    pub descriptor_missing: bool,
}

impl ModuleNode {
    /// The node and all descendants, pre-order.
    pub fn walk(&self) -> Vec<&ModuleNode> {
        let mut out = vec![self];
        for child in &self.children {
            out.extend(child.walk());
        }
        out
    }
}

/// Reads the module tree rooted at `root/pom.xml`. A missing or malformed
/// root descriptor is an error; broken descriptors further down degrade to
/// warnings so one bad submodule cannot hide the rest of the system.
pub fn discover_module_tree(root: &Path, diags: &mut Vec<Diagnostic>) -> Result<ModuleNode> {
    let pom = root.join("pom.xml");
    if !pom.is_file() {
        return Err(Error::Maven {
            path: root.to_path_buf(),
            message: "no pom.xml found".to_string(),
        });
    }
    let mut visited = BTreeSet::new();
    read_module(root, true, &mut visited, diags)
}

fn read_module(
    dir: &Path,
    is_root: bool,
    visited: &mut BTreeSet<PathBuf>,
    diags: &mut Vec<Diagnostic>,
) -> Result<ModuleNode> {
    let dir_name = || {
        dir.file_name()
            .map(|n| n.to_string_lossy().to_string())
            .unwrap_or_else(|| dir.display().to_string())
    };
    let pom = dir.join("pom.xml");
    let text = match fs::read_to_string(&pom) {
        Ok(t) => t,
        Err(e) if is_root => return Err(Error::io(&pom, e)),
        Err(_) => {
            diags.push(Diagnostic::warning(
                dir.display().to_string(),
                "declared module has no readable pom.xml",
            ));
            return Ok(missing_node(dir, dir_name()));
        }
    };
    let doc = match roxmltree::Document::parse(&text) {
        Ok(d) => d,
        Err(e) if is_root => {
            return Err(Error::Maven {
                path: pom,
                message: format!("malformed descriptor: {e}"),
            })
        }
        Err(e) => {
            diags.push(Diagnostic::warning(
                pom.display().to_string(),
                format!("malformed descriptor: {e}"),
            ));
            return Ok(missing_node(dir, dir_name()));
        }
    };

    let project = doc.root_element();
    let direct_text = |name: &str| {
        project
            .children()
            .find(|n| n.is_element() && n.tag_name().name() == name)
            .and_then(|n| n.text())
            .map(|t| t.trim().to_string())
            .filter(|t| !t.is_empty())
    };
    let artifact_id = direct_text("artifactId").unwrap_or_else(dir_name);
    // groupId is commonly inherited from <parent>.
    let group_id = direct_text("groupId").or_else(|| {
        project
            .children()
            .find(|n| n.is_element() && n.tag_name().name() == "parent")
            .and_then(|p| {
                p.children()
                    .find(|n| n.is_element() && n.tag_name().name() == "groupId")
            })
            .and_then(|n| n.text())
            .map(|t| t.trim().to_string())
    });

    let mut dependencies = Vec::new();
    if let Some(deps) = project
        .children()
        .find(|n| n.is_element() && n.tag_name().name() == "dependencies")
    {
        for dep in deps
            .children()
            .filter(|n| n.is_element() && n.tag_name().name() == "dependency")
        {
            let field = |name: &str| {
                dep.children()
                    .find(|n| n.is_element() && n.tag_name().name() == name)
                    .and_then(|n| n.text())
                    .map(|t| t.trim().to_string())
                    .unwrap_or_default()
            };
            dependencies.push((field("groupId"), field("artifactId")));
        }
    }

    let mut children = Vec::new();
    if let Some(modules) = project
        .children()
        .find(|n| n.is_element() && n.tag_name().name() == "modules")
    {
        for module in modules
            .children()
            .filter(|n| n.is_element() && n.tag_name().name() == "module")
        {
            let Some(rel) = module.text().map(str::trim).filter(|t| !t.is_empty()) else {
                continue;
            };
            let child_dir = dir.join(rel);
            let key = child_dir
                .canonicalize()
                .unwrap_or_else(|_| child_dir.clone());
            if !visited.insert(key) {
                diags.push(Diagnostic::warning(
                    child_dir.display().to_string(),
                    "module listed more than once; skipping repeat",
                ));
                continue;
            }
            children.push(read_module(&child_dir, false, visited, diags)?);
        }
    }

    Ok(ModuleNode {
        path: dir.to_path_buf(),
        artifact_id,
        group_id,
        dependencies,
        children,
        descriptor_missing: false,
    })
}

fn missing_node(dir: &Path, artifact_id: String) -> ModuleNode {
    ModuleNode {
        path: dir.to_path_buf(),
        artifact_id,
        group_id: None,
        dependencies: Vec::new(),
        children: Vec::new(),
        descriptor_missing: true,
    }
}
