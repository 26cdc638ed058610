//! Problem and extension files.
//!
//! A problem file lists the Taylor layers `A_{k,0}, A_{k,1}, …` of each radial
//! coefficient. Complex numbers are `[re, im]` pairs; a layer is an `N×N`
//! matrix given as a list of rows, or a bare pair when `cross_dim` is 1.
//!
//! ```json
//! {
//!   "name": "pb",
//!   "order": 2,
//!   "cross_dim": 1,
//!   "coefficients": [
//!     { "k": 0, "layers": [[0.25, 0], [1, 0]] },
//!     { "k": 2, "layers": [[1, 0]] }
//!   ]
//! }
//! ```

use discrete::ExtensionSpec;
use mellin_core::{CMat, ConeProblem, Cx, Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub name: Option<String>,
    pub order: usize,
    pub cross_dim: usize,
    /// Number of Taylor layers kept; defaults to the longest list given.
    #[serde(default)]
    pub taylor_depth: Option<usize>,
    pub coefficients: Vec<CoefficientEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientEntry {
    pub k: usize,
    pub layers: Vec<Layer>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Layer {
    Scalar([f64; 2]),
    Matrix(Vec<Vec<[f64; 2]>>),
}

impl Layer {
    fn to_matrix(&self, dim: usize) -> std::result::Result<CMat, String> {
        match self {
            Layer::Scalar(z) if dim == 1 => Ok(CMat::from_element(1, 1, Cx::new(z[0], z[1]))),
            Layer::Scalar(_) => Err(format!("a bare [re, im] pair is only allowed when cross_dim is 1, not {dim}")),
            Layer::Matrix(rows) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    let widths: Vec<usize> = rows.iter().map(|r| r.len()).collect();
                    return Err(format!(
                        "expected a {dim}x{dim} matrix, got {} rows of lengths {widths:?}",
                        rows.len()
                    ));
                }
                Ok(CMat::from_fn(dim, dim, |i, j| Cx::new(rows[i][j][0], rows[i][j][1])))
            }
        }
    }
}

/// Parses JSON, reporting the field path together with line and column of the first error.
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let at = if path == "." { String::new() } else { format!(" at field `{path}`") };
        Error::Validation(vec![format!("malformed {what} JSON{at}: {inner}")])
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Validation(vec![format!("cannot read {}: {e}", path.display())]))
}

impl ProblemFile {
    /// Every schema and ellipticity problem, not only the first.
    pub fn into_problem(self, fallback_name: &str) -> Result<ConeProblem> {
        let mut errs = Vec::new();
        let mut coeffs = Vec::new();
        for (i, entry) in self.coefficients.iter().enumerate() {
            let mut layers = Vec::new();
            for (j, layer) in entry.layers.iter().enumerate() {
                match layer.to_matrix(self.cross_dim) {
                    Ok(m) => layers.push(m),
                    Err(e) => errs.push(format!("coefficients[{i}] (k={}), layer {j}: {e}", entry.k)),
                }
            }
            if entry.layers.is_empty() {
                errs.push(format!("coefficients[{i}] (k={}) has no layers", entry.k));
            }
            coeffs.push((entry.k, layers));
        }
        let depth =
            self.taylor_depth.unwrap_or_else(|| self.coefficients.iter().map(|c| c.layers.len()).max().unwrap_or(1));
        let name = self.name.unwrap_or_else(|| fallback_name.to_string());
        match ConeProblem::new(name, self.order, self.cross_dim, depth, coeffs) {
            Ok(p) if errs.is_empty() => Ok(p),
            Ok(_) => Err(Error::Validation(errs)),
            Err(Error::Validation(more)) => {
                errs.extend(more);
                Err(Error::Validation(errs))
            }
            Err(e) => Err(e),
        }
    }
}

/// Reads and validates a problem file.
pub fn validate_problem(path: &Path) -> Result<ConeProblem> {
    let text = read(path)?;
    let file: ProblemFile = parse_json(&text, "problem")?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("problem");
    file.into_problem(stem)
}

/// Reads an extension file: `{"mode": "minimal" | "maximal" | "span", "basis": [...], "cutoff_radius": r}`,
/// with basis functions written as `{"terms": [{"sigma": [re, im], "coeffs": [[[re, im], …], …]}]}`.
pub fn load_extension(path: &Path) -> Result<ExtensionSpec> {
    let text = read(path)?;
    let ext: ExtensionSpec = parse_json(&text, "extension")?;
    ext.check_shape()?;
    Ok(ext)
}
