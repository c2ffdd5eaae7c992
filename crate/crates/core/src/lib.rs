//! Static analysis for Maven-based, Spring Cloud style microservice
//! repositories. The library walks a repository (or a whole catalog of
//! repositories across their tagged releases), identifies the Spring Boot
//! modules, and extracts per-service feature metrics: code size, layer
//! composition (entities, controllers, services, DTOs), REST API surface,
//! and the inter-service call graph recovered from RestTemplate URLs and
//! Feign clients. Results are written as one CSV row per service per
//! release.

pub mod api;
pub mod calls;
pub mod catalog;
pub mod config;
pub mod dataset;
pub mod diag;
pub mod error;
pub mod java;
pub mod maven;
pub mod pipeline;
pub mod record;
pub mod repo;
pub mod services;
pub mod stats;
pub mod tiers;

pub use config::ExtractionConfig;
pub use diag::{Diagnostic, Severity};
pub use error::{Error, Result};
pub use record::MicroserviceRecord;
