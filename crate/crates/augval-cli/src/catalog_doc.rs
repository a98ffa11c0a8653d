//! Catalog documents: one JSON file holding a field configuration and named
//! chains, families, limit augmentations, and maps.
//!
//! A selector `FILE#NAME` picks a named entry out of a catalog; a bare
//! `FILE` must contain the object itself. Entries inside a catalog may omit
//! their `field` (or a family prefix its `field`), inheriting the catalog's;
//! a limit augmentation may name a catalog family instead of inlining it.
//! Everything is schema-validated at load time, before any computation.

use std::fmt;
use std::fs;
use std::path::Path;

use serde_json::Value as Json;

use augval::limits::{ContinuousFamily, LimitAugmentation};
use augval::mobius::MobiusMap;
use augval::Chain;

/// A load-time problem: bad path, bad JSON, bad schema, or a dangling name.
#[derive(Debug)]
pub struct LoadError(pub String);

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn read_json(path: &str) -> Result<Json, LoadError> {
    let text = fs::read_to_string(path)
        .map_err(|e| LoadError(format!("cannot read `{path}`: {e}")))?;
    serde_json::from_str(&text).map_err(|e| LoadError(format!("`{path}`: {e}")))
}

fn is_catalog(doc: &Json) -> bool {
    ["chains", "families", "augmentations", "maps", "admissible"]
        .iter()
        .any(|k| doc.get(k).is_some())
}

fn split_selector(selector: &str) -> (&str, Option<&str>) {
    match selector.split_once('#') {
        Some((path, name)) => (path, Some(name)),
        None => (selector, None),
    }
}

/// Injects the catalog-level `field` into an entry that lacks one; for
/// families the prefix chain inherits it.
fn inherit_field(entry: &mut Json, field: &Json, section: &str) {
    let target = if section == "families" {
        entry.get_mut("prefix")
    } else if section == "augmentations" {
        entry
            .get_mut("family")
            .and_then(|f| if f.is_object() { f.get_mut("prefix") } else { None })
    } else {
        Some(entry)
    };
    if let Some(obj) = target {
        if obj.is_object() && obj.get("field").is_none() && !field.is_null() {
            obj["field"] = field.clone();
        }
    }
}

fn list_names(catalog: &Json, section: &str) -> Vec<String> {
    catalog
        .get(section)
        .and_then(Json::as_object)
        .map(|m| m.keys().cloned().collect())
        .unwrap_or_default()
}

/// Pulls the named entry out of a catalog, resolving field inheritance and
/// family name references.
fn resolve_entry(catalog: &Json, section: &str, name: &str, path: &str) -> Result<Json, LoadError> {
    let field = catalog.get("field").cloned().unwrap_or(Json::Null);
    let mut entry = catalog
        .get(section)
        .and_then(|s| s.get(name))
        .cloned()
        .ok_or_else(|| {
            LoadError(format!(
                "`{path}` has no entry `{name}` under `{section}` (available: {})",
                list_names(catalog, section).join(", ")
            ))
        })?;
    if section == "augmentations" {
        if let Some(fam_name) = entry.get("family").and_then(Json::as_str) {
            let fam_name = fam_name.to_string();
            let fam = resolve_entry(catalog, "families", &fam_name, path)?;
            entry["family"] = fam;
        }
    }
    inherit_field(&mut entry, &field, section);
    Ok(entry)
}

fn load_selected(selector: &str, section: &str) -> Result<Json, LoadError> {
    let (path, name) = split_selector(selector);
    let doc = read_json(path)?;
    match (is_catalog(&doc), name) {
        (true, Some(name)) => resolve_entry(&doc, section, name, path),
        (true, None) => Err(LoadError(format!(
            "`{path}` is a catalog; select an entry with `{path}#NAME` (available under `{section}`: {})",
            list_names(&doc, section).join(", ")
        ))),
        (false, Some(_)) => Err(LoadError(format!(
            "`{path}` is not a catalog; drop the `#NAME` selector"
        ))),
        (false, None) => Ok(doc),
    }
}

fn parse<T: serde::de::DeserializeOwned>(doc: Json, what: &str, selector: &str) -> Result<T, LoadError> {
    serde_json::from_value(doc).map_err(|e| LoadError(format!("{what} `{selector}`: {e}")))
}

pub fn load_chain(selector: &str) -> Result<Chain, LoadError> {
    parse(load_selected(selector, "chains")?, "chain", selector)
}

/// Parses a chain without the structural validation, so `validate` can
/// report violations instead of refusing the file.
pub fn load_chain_lenient(selector: &str) -> Result<Chain, String> {
    #[derive(serde::Deserialize)]
    struct StepD {
        phi: augval::Poly,
        gamma: augval::Value,
    }
    #[derive(serde::Deserialize)]
    struct FieldD {
        valuation: augval::BaseValuation,
    }
    #[derive(serde::Deserialize)]
    struct ChainD {
        field: FieldD,
        #[serde(default)]
        steps: Vec<StepD>,
    }
    let doc = load_selected(selector, "chains").map_err(|e| e.to_string())?;
    let d: ChainD =
        serde_json::from_value(doc).map_err(|e| format!("chain `{selector}`: {e}"))?;
    Ok(Chain {
        base: d.field.valuation,
        steps: d
            .steps
            .into_iter()
            .map(|s| augval::AugStep::new(s.phi, s.gamma))
            .collect(),
    })
}

pub fn load_family(selector: &str) -> Result<ContinuousFamily, LoadError> {
    parse(load_selected(selector, "families")?, "family", selector)
}

pub fn load_augmentation(selector: &str) -> Result<LimitAugmentation, LoadError> {
    parse(
        load_selected(selector, "augmentations")?,
        "limit augmentation",
        selector,
    )
}

pub fn load_map(selector: &str) -> Result<MobiusMap, LoadError> {
    parse(load_selected(selector, "maps")?, "map", selector)
}

pub fn load_poly_file(path: &str) -> Result<augval::Poly, LoadError> {
    parse(read_json(path)?, "polynomial", path)
}

pub fn load_ratfn_file(path: &str) -> Result<augval::RatFn, LoadError> {
    parse(read_json(path)?, "rational function", path)
}

pub fn load_poly_list(path: &str) -> Result<Vec<augval::Poly>, LoadError> {
    parse(read_json(path)?, "polynomial list", path)
}

pub fn load_rational_list(path: &str) -> Result<Vec<augval::Rat>, LoadError> {
    let doc = read_json(path)?;
    let strings: Vec<String> =
        serde_json::from_value(doc).map_err(|e| LoadError(format!("rational list `{path}`: {e}")))?;
    strings
        .iter()
        .map(|s| {
            s.trim()
                .parse::<augval::Rat>()
                .map_err(|_| LoadError(format!("rational list `{path}`: `{s}` is not a rational")))
        })
        .collect()
}

pub fn write_out(path: &Path, doc: &Json) -> Result<(), LoadError> {
    let text = serde_json::to_string_pretty(doc).expect("reports serialize");
    fs::write(path, text + "\n").map_err(|e| LoadError(format!("cannot write `{}`: {e}", path.display())))
}
