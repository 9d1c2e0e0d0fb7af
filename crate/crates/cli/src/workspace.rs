//! File loading and output: model stores, cases, ledgers, JSON emission.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

use liftac::featexpr::Universe;
use liftac::plmodel::{Fts, Model, ModelRef, ModelStore};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn emit<T: Serialize>(v: &T) -> Result<()> {
    print!("{}", to_json(v)?);
    Ok(())
}

pub fn read_fts(path: &Path) -> Result<Fts> {
    match read_json::<Model>(path)? {
        Model::Fts(m) => Ok(m),
        Model::Lts(_) => bail!(
            "{} holds a single product, not a product line",
            path.display()
        ),
    }
}

/// Splits `MODEL@VERSION`.
pub fn parse_ref(s: &str) -> Result<ModelRef> {
    match s.split_once('@') {
        Some((m, v)) if !m.is_empty() && !v.is_empty() => Ok(ModelRef::new(m, v)),
        _ => bail!("expected MODEL@VERSION, got `{s}`"),
    }
}

/// Loads every `MODEL@VERSION.json` file of `dir`.
pub fn load_store(dir: &Path) -> Result<ModelStore> {
    let mut store = ModelStore::new();
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading store {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    paths.sort();
    for p in paths {
        if p.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let r = parse_ref(stem).with_context(|| format!("store file {}", p.display()))?;
        store.insert(&r.model, &r.version, read_json(&p)?);
    }
    if store.ids().next().is_none() {
        bail!("store {} holds no models", dir.display());
    }
    Ok(store)
}

/// Writes `store` as a directory readable by [`load_store`].
pub fn save_store(store: &ModelStore, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (m, v) in store.ids() {
        let model = store.get(m, v)?;
        fs::write(dir.join(format!("{m}@{v}.json")), to_json(model)?)?;
    }
    Ok(())
}

/// The product line an assurance case ranges over: the named model, or the
/// first product-line model of the store.
pub fn universe_of(store: &ModelStore, named: Option<&str>) -> Result<Universe> {
    let r = match named {
        Some(s) => parse_ref(s)?,
        None => {
            let (m, v) = store
                .ids()
                .find(|(m, v)| {
                    store
                        .get(m, v)
                        .map(|x| x.as_fts().is_some())
                        .unwrap_or(false)
                })
                .context("store holds no product-line model")?;
            ModelRef::new(m.clone(), v.clone())
        }
    };
    Ok(store.fts(&r)?.feature_model().universe())
}
