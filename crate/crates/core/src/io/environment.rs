use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{Aabb, EnvironmentMap, Obstruction, Vec3};
use crate::propagation::MaterialProfile;

/// Environment file format version understood by this reader.
pub const ENVIRONMENT_VERSION: u64 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObstruction {
    id: String,
    material: String,
    vertices: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounds {
    min: [f64; 3],
    max: [f64; 3],
}

fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn field<'a>(root: &'a Value, name: &str) -> Result<&'a Value> {
    root.get(name)
        .ok_or_else(|| Error::schema(name, "missing required field"))
}

fn typed<T: for<'de> Deserialize<'de>>(v: &Value, path: &str) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::schema(path, e.to_string()))
}

/// Parses an environment map from JSON text.
///
/// ```json
/// { "version": 1,
///   "bounds": { "min": [0,0,0], "max": [20,10,3] },
///   "materials": [ { "name": "drywall", "reflection_loss_db": 6.1, "penetration_loss_db": 4.0 } ],
///   "obstructions": [ { "id": "w1", "material": "drywall", "vertices": [[0,0,0], [20,0,0], [20,0,3], [0,0,3]] } ] }
/// ```
pub fn parse_environment(text: &str) -> Result<EnvironmentMap> {
    let root: Value = serde_json::from_str(text)?;
    if !root.is_object() {
        return Err(Error::schema("$", "environment must be a JSON object"));
    }
    let version = field(&root, "version")?
        .as_u64()
        .ok_or_else(|| Error::schema("version", "must be a positive integer"))?;
    if version != ENVIRONMENT_VERSION {
        return Err(Error::schema(
            "version",
            format!("unsupported version {version}, expected {ENVIRONMENT_VERSION}"),
        ));
    }
    if let Some(obj) = root.as_object() {
        if let Some(k) = obj
            .keys()
            .find(|k| !matches!(k.as_str(), "version" | "bounds" | "materials" | "obstructions"))
        {
            return Err(Error::schema(k.as_str(), "unknown field"));
        }
    }

    let mut materials = BTreeMap::new();
    let mats = field(&root, "materials")?
        .as_array()
        .ok_or_else(|| Error::schema("materials", "must be an array"))?;
    for (i, m) in mats.iter().enumerate() {
        let path = format!("materials[{i}]");
        let profile: MaterialProfile = typed(m, &path)?;
        profile.validate().map_err(|e| Error::schema(&path, e.to_string()))?;
        if materials.insert(profile.name.clone(), profile).is_some() {
            return Err(Error::schema(path, "duplicate material name"));
        }
    }

    let obs = field(&root, "obstructions")?
        .as_array()
        .ok_or_else(|| Error::schema("obstructions", "must be an array"))?;
    let mut obstructions = Vec::with_capacity(obs.len());
    for (i, o) in obs.iter().enumerate() {
        let path = format!("obstructions[{i}]");
        let raw: RawObstruction = typed(o, &path)?;
        let verts = raw.vertices.into_iter().map(v3).collect();
        let ob = Obstruction::new(raw.id, raw.material, verts)
            .map_err(|e| Error::schema(format!("{path}.vertices"), e.to_string()))?;
        obstructions.push(ob);
    }

    let bounds = match root.get("bounds") {
        None | Some(Value::Null) => None,
        Some(b) => {
            let raw: RawBounds = typed(b, "bounds")?;
            let (lo, hi) = (v3(raw.min), v3(raw.max));
            if !(lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::schema("bounds", "min must not exceed max"));
            }
            Some(Aabb { min: lo, max: hi })
        }
    };
    EnvironmentMap::new(obstructions, materials, bounds)
}

pub fn read_environment(path: &Path) -> Result<EnvironmentMap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_environment(&text)
}

/// JSON text for an environment map, readable by [`parse_environment`].
pub fn environment_to_json(env: &EnvironmentMap) -> Result<String> {
    let obstructions: Vec<RawObstruction> = env
        .obstructions()
        .iter()
        .map(|o| RawObstruction {
            id: o.id.clone(),
            material: o.material_id.clone(),
            vertices: o.vertices().iter().map(|v| [v.x, v.y, v.z]).collect(),
        })
        .collect();
    let mut root = serde_json::Map::new();
    root.insert("version".into(), ENVIRONMENT_VERSION.into());
    if let Some(b) = env.bounds() {
        root.insert(
            "bounds".into(),
            serde_json::to_value(RawBounds {
                min: [b.min.x, b.min.y, b.min.z],
                max: [b.max.x, b.max.y, b.max.z],
            })?,
        );
    }
    root.insert(
        "materials".into(),
        serde_json::to_value(env.materials().values().collect::<Vec<_>>())?,
    );
    root.insert("obstructions".into(), serde_json::to_value(obstructions)?);
    Ok(serde_json::to_string_pretty(&Value::Object(root))? + "\n")
}
