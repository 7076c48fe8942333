//! JSON file formats shared by the command line front end and the FFI.
//!
//! Every output object may carry an extra `manifest` key; loaders ignore it.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::geometry::{GeomComplex, GeomPoint, GeometryTag};
use crate::subdivision::SubdividedComplex;

/// Reproducibility record embedded in every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub tool_version: String,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: Vec::new(),
            parameters: BTreeMap::new(),
            seed,
            outputs: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }
}

/// Subdivision file: the subdivided complex, its parent, and carriers as
/// `[child simplex, parent simplex]` pairs for every vertex and maximal
/// simplex of the child.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubdivisionFile {
    pub complex: Complex,
    pub parent: Complex,
    pub carrier: Vec<(Simplex, Simplex)>,
}

impl From<&SubdividedComplex> for SubdivisionFile {
    fn from(s: &SubdividedComplex) -> Self {
        let mut carrier: Vec<(Simplex, Simplex)> = s
            .vertex_carrier
            .iter()
            .map(|(v, c)| (Simplex::vertex(*v), c.clone()))
            .collect();
        for t in s.complex.maximal_simplexes() {
            if t.len() > 1 {
                let c = s.carrier(&t).expect("carriers of a built subdivision are complete");
                carrier.push((t, c));
            }
        }
        SubdivisionFile {
            complex: s.complex.clone(),
            parent: s.parent.clone(),
            carrier,
        }
    }
}

impl TryFrom<SubdivisionFile> for SubdividedComplex {
    type Error = Error;

    /// Vertex entries define the carriers; every other entry must agree with
    /// the carrier they induce.
    fn try_from(f: SubdivisionFile) -> Result<Self> {
        let mut vertex_carrier = BTreeMap::new();
        for (child, parent) in &f.carrier {
            if child.len() == 1 && vertex_carrier.insert(child.vertices()[0], parent.clone()).is_some() {
                return Err(Error::Input(format!("vertex {child} has two carriers")));
            }
        }
        let sub = SubdividedComplex {
            complex: f.complex,
            parent: f.parent,
            vertex_carrier,
        };
        sub.validate()?;
        for (child, parent) in &f.carrier {
            if child.len() > 1 && sub.carrier(child)? != *parent {
                return Err(Error::Carrier(format!("listed carrier of {child} is not {parent}")));
            }
        }
        Ok(sub)
    }
}

/// Geometric complex file: the complex format plus a geometry tag, vertex
/// coordinates and, for flat tori, the periods.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeomComplexFile {
    #[serde(flatten)]
    pub complex: Complex,
    pub geometry: GeometryTag,
    pub coordinates: BTreeMap<VertexId, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<Vec<f64>>,
}

impl From<&GeomComplex> for GeomComplexFile {
    fn from(g: &GeomComplex) -> Self {
        GeomComplexFile {
            complex: g.complex.clone(),
            geometry: g.tag,
            coordinates: g.coords.iter().map(|(v, p)| (*v, p.coords.clone())).collect(),
            periods: g.periods.clone(),
        }
    }
}

impl TryFrom<GeomComplexFile> for GeomComplex {
    type Error = Error;

    fn try_from(f: GeomComplexFile) -> Result<Self> {
        let coords = f
            .coordinates
            .into_iter()
            .map(|(v, c)| Ok((v, GeomPoint::new(f.geometry, c)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        if let Some(v) = coords.keys().find(|v| !f.complex.contains_vertex(**v)) {
            return Err(Error::Input(format!("coordinates given for unknown vertex {v}")));
        }
        match f.periods {
            Some(p) if f.geometry == GeometryTag::Euclidean => GeomComplex::torus(f.complex, coords, p),
            Some(_) => Err(Error::Input("periods are only meaningful for euclidean tori".into())),
            None => GeomComplex::new(f.complex, f.geometry, coords),
        }
    }
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

pub fn read_complex(path: &Path) -> Result<Complex> {
    read(path)
}

pub fn read_subdivision(path: &Path) -> Result<SubdividedComplex> {
    read::<SubdivisionFile>(path)?.try_into()
}

pub fn read_geom(path: &Path) -> Result<GeomComplex> {
    read::<GeomComplexFile>(path)?.try_into()
}

/// Serializes `value` with the manifest attached under `manifest`.
pub fn to_json_with_manifest<T: Serialize>(value: &T, manifest: &RunManifest) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    match &mut v {
        serde_json::Value::Object(map) => {
            map.insert("manifest".into(), serde_json::to_value(manifest)?);
        }
        other => {
            let inner = std::mem::take(other);
            *other = serde_json::json!({ "result": inner, "manifest": manifest });
        }
    }
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn write_with_manifest<T: Serialize>(path: &Path, value: &T, manifest: &RunManifest) -> Result<()> {
    fs::write(path, to_json_with_manifest(value, manifest)?)?;
    Ok(())
}
