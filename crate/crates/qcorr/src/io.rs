//! JSON file formats used by the CLI and test fixtures.
//!
//! A state spec holds exactly one representation:
//!
//! ```json
//! {"n": 3, "theta": {"330": 1.0, "303": 0.707106781187}}
//! {"n": 3, "eta": {"001": 0.538553575924}}
//! {"n": 1, "matrix": [[0.88, 0.0], [0.0, 0.0], [0.0, 0.0], [0.12, 0.0]]}
//! ```
//!
//! Coordinate maps go from index string to value with omitted indices zero;
//! matrices are row-major (re, im) pairs of length 4^n. Numbers emitted here
//! are rounded to 12 significant digits so reports diff cleanly in CI.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::channels::CounterexampleReport;
use crate::coords::{eta_to_density, theta_to_density, EtaCoords, ThetaCoords};
use crate::correlations::{CorrelationReport, ProjectionSummary};
use crate::hermitian::DensityMatrix;
use crate::pauli::CMatrix;
use crate::{Error, Result};

/// Round to 12 significant digits; keeps emitted JSON stable across runs.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}")
        .parse()
        .expect("formatted float reparses")
}

/// One of the three state representations plus the party count.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Theta {
        party_count: usize,
        coords: BTreeMap<String, f64>,
    },
    Eta {
        party_count: usize,
        coords: BTreeMap<String, f64>,
    },
    Matrix {
        party_count: usize,
        entries: Vec<Complex64>,
    },
}

fn coord_map_from_json(value: &Value) -> Result<BTreeMap<String, f64>> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::InvalidSpec("coordinate map must be a JSON object".into()))?;
    let mut map = BTreeMap::new();
    for (key, v) in obj {
        let num = v
            .as_f64()
            .ok_or_else(|| Error::InvalidSpec(format!("coordinate {key:?} is not a number")))?;
        map.insert(key.clone(), num);
    }
    Ok(map)
}

impl StateSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        Self::from_json(&value)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidSpec("state spec must be a JSON object".into()))?;
        let party_count = obj
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidSpec("missing party count \"n\"".into()))?
            as usize;

        let present: Vec<&str> = ["theta", "eta", "matrix"]
            .into_iter()
            .filter(|k| obj.contains_key(*k))
            .collect();
        if present.len() != 1 {
            return Err(Error::InvalidSpec(format!(
                "expected exactly one of \"theta\", \"eta\", \"matrix\"; found {}",
                present.len()
            )));
        }

        match present[0] {
            "theta" => Ok(Self::Theta {
                party_count,
                coords: coord_map_from_json(&obj["theta"])?,
            }),
            "eta" => Ok(Self::Eta {
                party_count,
                coords: coord_map_from_json(&obj["eta"])?,
            }),
            _ => {
                let rows = obj["matrix"]
                    .as_array()
                    .ok_or_else(|| Error::InvalidSpec("\"matrix\" must be an array".into()))?;
                let mut entries = Vec::with_capacity(rows.len());
                for pair in rows {
                    let pair = pair
                        .as_array()
                        .filter(|a| a.len() == 2)
                        .ok_or_else(|| Error::InvalidSpec("matrix entry is not [re, im]".into()))?;
                    let re = pair[0].as_f64();
                    let im = pair[1].as_f64();
                    match (re, im) {
                        (Some(re), Some(im)) => entries.push(Complex64::new(re, im)),
                        _ => return Err(Error::InvalidSpec("matrix entry is not numeric".into())),
                    }
                }
                Ok(Self::Matrix {
                    party_count,
                    entries,
                })
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Self::Theta {
                party_count,
                coords,
            } => {
                json!({ "n": party_count, "theta": rounded_map(coords) })
            }
            Self::Eta {
                party_count,
                coords,
            } => {
                json!({ "n": party_count, "eta": rounded_map(coords) })
            }
            Self::Matrix {
                party_count,
                entries,
            } => json!({
                "n": party_count,
                "matrix": entries
                    .iter()
                    .map(|z| json!([round_sig(z.re), round_sig(z.im)]))
                    .collect::<Vec<_>>(),
            }),
        }
    }

    pub fn party_count(&self) -> usize {
        match self {
            Self::Theta { party_count, .. }
            | Self::Eta { party_count, .. }
            | Self::Matrix { party_count, .. } => *party_count,
        }
    }

    /// Materialize the spec as a validated density matrix.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self {
            Self::Theta {
                party_count,
                coords,
            } => theta_to_density(&ThetaCoords::from_map(*party_count, coords)?),
            Self::Eta {
                party_count,
                coords,
            } => eta_to_density(&EtaCoords::from_map(*party_count, coords)?),
            Self::Matrix {
                party_count,
                entries,
            } => {
                let dim = 1usize << *party_count;
                if entries.len() != dim * dim {
                    return Err(Error::InvalidSpec(format!(
                        "matrix has {} entries, expected {}",
                        entries.len(),
                        dim * dim
                    )));
                }
                let m = CMatrix::from_row_iterator(dim, dim, entries.iter().copied());
                DensityMatrix::new(m, *party_count)
            }
        }
    }

    pub fn from_theta(theta: &ThetaCoords) -> Self {
        Self::Theta {
            party_count: theta.party_count(),
            coords: theta.to_map(0.0),
        }
    }

    pub fn from_eta(eta: &EtaCoords) -> Self {
        Self::Eta {
            party_count: eta.party_count(),
            coords: eta.to_map(0.0),
        }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(rho.matrix()[(i, j)]);
            }
        }
        Self::Matrix {
            party_count: rho.party_count(),
            entries,
        }
    }
}

fn rounded_map(map: &BTreeMap<String, f64>) -> Value {
    Value::Object(
        map.iter()
            .map(|(k, &v)| (k.clone(), json!(round_sig(v))))
            .collect(),
    )
}

/// Correlation report as flat JSON: c2, c3, …, c_total, definition_gap,
/// projected entropies and per-projection diagnostics.
pub fn report_to_json(report: &CorrelationReport) -> Value {
    let mut obj = Map::new();
    obj.insert("n".into(), json!(report.party_count));
    for (k, v) in &report.c_k {
        obj.insert(format!("c{k}"), json!(round_sig(*v)));
    }
    obj.insert("c_total".into(), json!(round_sig(report.c_total)));
    if let Some(gap) = report.definition_gap {
        obj.insert("definition_gap".into(), json!(round_sig(gap)));
    }
    obj.insert(
        "projected_entropies".into(),
        Value::Object(
            report
                .projected_entropies
                .iter()
                .map(|(k, &v)| (k.to_string(), json!(round_sig(v))))
                .collect(),
        ),
    );
    obj.insert(
        "diagnostics".into(),
        serde_json::to_value(&report.diagnostics).expect("summaries serialize"),
    );
    Value::Object(obj)
}

/// Parse a report emitted by [`report_to_json`].
pub fn report_from_json(value: &Value) -> Result<CorrelationReport> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::InvalidSpec("report must be a JSON object".into()))?;
    let party_count =
        obj.get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidSpec("report is missing \"n\"".into()))? as usize;

    let mut c_k = BTreeMap::new();
    for (key, v) in obj {
        if let Some(k) = key.strip_prefix('c').and_then(|s| s.parse::<usize>().ok()) {
            let num = v
                .as_f64()
                .ok_or_else(|| Error::InvalidSpec(format!("{key} is not a number")))?;
            c_k.insert(k, num);
        }
    }
    let c_total = obj
        .get("c_total")
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::InvalidSpec("report is missing \"c_total\"".into()))?;
    let definition_gap = obj.get("definition_gap").and_then(Value::as_f64);

    let mut projected_entropies = BTreeMap::new();
    if let Some(Value::Object(map)) = obj.get("projected_entropies") {
        for (key, v) in map {
            let k = key
                .parse::<usize>()
                .map_err(|_| Error::InvalidSpec(format!("bad entropy key {key:?}")))?;
            let num = v
                .as_f64()
                .ok_or_else(|| Error::InvalidSpec(format!("entropy {key} is not a number")))?;
            projected_entropies.insert(k, num);
        }
    }

    let diagnostics: Vec<ProjectionSummary> = match obj.get("diagnostics") {
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|e| Error::InvalidSpec(format!("bad diagnostics: {e}")))?,
        None => Vec::new(),
    };

    Ok(CorrelationReport {
        party_count,
        c_k,
        c_total,
        projected_entropies,
        definition_gap,
        diagnostics,
    })
}

/// Counterexample report as JSON, states included in matrix form.
pub fn counterexample_to_json(report: &CounterexampleReport) -> Value {
    json!({
        "rho_initial": StateSpec::from_density(&report.rho_initial).to_json(),
        "rho_final": StateSpec::from_density(&report.rho_final).to_json(),
        "eta_final": rounded_map(&report.eta_final.to_map(1e-12)),
        "theta_final": rounded_map(&report.theta_final.to_map(1e-12)),
        "c3_before": round_sig(report.c3_before),
        "c3_after": round_sig(report.c3_after),
        "eta_errors": round_sig(report.eta_errors),
        "theta_errors": round_sig(report.theta_errors),
    })
}
