use std::collections::{BTreeMap, BTreeSet};

use crate::config::ExtractionConfig;
use crate::java::{SourceUnit, TypeDecl, TypeKind};

/// Architectural roles a type can hold. Roles are independent sets, not a
/// partition: a `@Service` class under an `entity` package can be both
/// ServiceImpl and Entity. The one rejected combination is Controller plus
/// Entity, which is always a misclassified naming overlap; Controller wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TierRole {
    Controller,
    ServiceImpl,
    Interface,
    AbstractClass,
    Entity,
    Dto,
}

pub fn classify_type(
    decl: &TypeDecl,
    unit: &SourceUnit,
    cfg: &ExtractionConfig,
) -> BTreeSet<TierRole> {
    let mut roles = BTreeSet::new();
    let has_ann = |name: &str| decl.annotations.iter().any(|a| a.name == name);

    if has_ann("RestController") || has_ann("Controller") {
        roles.insert(TierRole::Controller);
    }
    if has_ann("Service") {
        roles.insert(TierRole::ServiceImpl);
    }
    if decl.kind == TypeKind::Interface {
        roles.insert(TierRole::Interface);
    }
    if decl.kind == TypeKind::Class {
        if decl.is_abstract {
            roles.insert(TierRole::AbstractClass);
        }
        let orm_annotated = decl
            .annotations
            .iter()
            .any(|a| cfg.entity_annotations.contains(&a.name));
        if orm_annotated
            && cfg.entity_package_pattern.is_match(&unit.package_path)
            && !roles.contains(&TierRole::Controller)
        {
            roles.insert(TierRole::Entity);
        }
        if cfg.dto_name_pattern.is_match(&decl.simple_name)
            || cfg.dto_package_pattern.is_match(&unit.package_path)
        {
            roles.insert(TierRole::Dto);
        }
    }
    roles
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TierCounts {
    pub entity_num: u64,
    pub entity_attribute_num: u64,
    pub controller_num: u64,
    pub interface_num: u64,
    pub abstract_class_num: u64,
    pub service_class_num: u64,
    pub dto_class_num: u64,
}

/// Counts tier roles across one microservice's source units.
///
/// Attribute counting covers non-static fields declared in the entity class
/// itself. With `include_inherited_entity_fields` on, fields of `extends`
/// ancestors are added too, but only when the ancestor is declared inside
/// the same module; base classes living in shared library modules are out
/// of reach by construction.
pub fn count_tier_metrics(units: &[SourceUnit], cfg: &ExtractionConfig) -> TierCounts {
    let mut counts = TierCounts::default();

    // Simple-name index for superclass lookups within the module.
    let by_name: BTreeMap<&str, &TypeDecl> = units
        .iter()
        .flat_map(|u| u.types.iter())
        .map(|t| (t.simple_name.as_str(), t))
        .collect();

    for unit in units {
        for decl in &unit.types {
            let roles = classify_type(decl, unit, cfg);
            for role in &roles {
                match role {
                    TierRole::Controller => counts.controller_num += 1,
                    TierRole::ServiceImpl => counts.service_class_num += 1,
                    TierRole::Interface => counts.interface_num += 1,
                    TierRole::AbstractClass => counts.abstract_class_num += 1,
                    TierRole::Entity => counts.entity_num += 1,
                    TierRole::Dto => counts.dto_class_num += 1,
                }
            }
            if roles.contains(&TierRole::Entity) {
                counts.entity_attribute_num += own_fields(decl);
                if cfg.include_inherited_entity_fields {
                    counts.entity_attribute_num += inherited_fields(decl, &by_name);
                }
            }
        }
    }
    counts
}

fn own_fields(decl: &TypeDecl) -> u64 {
    decl.fields.iter().filter(|f| !f.is_static).count() as u64
}

fn inherited_fields(decl: &TypeDecl, by_name: &BTreeMap<&str, &TypeDecl>) -> u64 {
    let mut total = 0;
    let mut seen = BTreeSet::new();
    seen.insert(decl.simple_name.as_str());
    let mut current = decl;
    while let Some(base) = current
        .super_type_names
        .first()
        .and_then(|n| by_name.get(n.as_str()))
    {
        if !seen.insert(base.simple_name.as_str()) {
            break;
        }
        total += own_fields(base);
        current = base;
    }
    total
}
