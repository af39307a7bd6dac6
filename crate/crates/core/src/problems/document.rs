//! Versioned JSON instance documents.
//!
//! Serialisation is canonical: field order is fixed and floats are written in
//! shortest round-trip form, so a given instance always produces the same
//! bytes and digest.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CflpData, Family, KMeansData, MaxcutData, MisData, ProblemData, ProblemInstance, QapData};
use crate::error::{Error, Result};
use crate::space::SolutionSpace;

pub const FORMAT_NAME: &str = "qwoa-instance";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub format: String,
    pub version: u32,
    pub family: Family,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub lambda_f: Vec<f64>,
    pub payload: Payload,
}

/// Family-specific arrays; matrices are row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Payload {
    Maxcut {
        edges: Vec<(usize, usize, f64)>,
    },
    Mis {
        edges: Vec<(usize, usize)>,
    },
    KMeans {
        dim: usize,
        points: Vec<f64>,
    },
    Cflp {
        opening_costs: Vec<f64>,
        transport_costs: Vec<f64>,
        demands: Vec<f64>,
        capacities: Vec<f64>,
        reference: Vec<usize>,
    },
    Qap {
        distances: Vec<f64>,
        flows: Vec<f64>,
    },
}

impl InstanceDocument {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        let payload = match &inst.data {
            ProblemData::Maxcut(d) => Payload::Maxcut { edges: d.edges.clone() },
            ProblemData::Mis(d) => Payload::Mis { edges: d.edges.clone() },
            ProblemData::KMeans(d) => Payload::KMeans {
                dim: d.dim(),
                points: d.points().to_vec(),
            },
            ProblemData::Cflp(d) => Payload::Cflp {
                opening_costs: d.opening_costs.clone(),
                transport_costs: d.transport_costs.clone(),
                demands: d.demands.clone(),
                capacities: d.capacities.clone(),
                reference: d.reference.clone(),
            },
            ProblemData::Qap(d) => Payload::Qap {
                distances: d.distances.clone(),
                flows: d.flows.clone(),
            },
        };
        InstanceDocument {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            family: inst.family,
            seed: inst.seed,
            n: inst.space.n(),
            k: inst.space.k(),
            lambda_f: inst.lambda_f.clone(),
            payload,
        }
    }

    pub fn into_instance(self) -> Result<ProblemInstance> {
        if self.format != FORMAT_NAME || self.version != FORMAT_VERSION {
            return Err(Error::Document(format!(
                "unsupported format {} v{}",
                self.format, self.version
            )));
        }
        let (n, k) = (self.n, self.k);
        let bad = |msg: String| Error::Document(msg);
        let check_len = |name: &str, len: usize, want: usize| {
            if len == want {
                Ok(())
            } else {
                Err(bad(format!("{name} has {len} entries, expected {want}")))
            }
        };
        let (space, data) = match (self.family, self.payload) {
            (Family::Maxcut, Payload::Maxcut { edges }) => {
                if edges.iter().any(|&(i, j, w)| i >= n || j >= n || i == j || !(w > 0.0)) {
                    return Err(bad("maxcut edge out of range or non-positive weight".into()));
                }
                (SolutionSpace::binary(n)?, ProblemData::Maxcut(MaxcutData { edges }))
            }
            (Family::Mis, Payload::Mis { edges }) => {
                if edges.iter().any(|&(i, j)| i >= n || j >= n || i == j) {
                    return Err(bad("MIS edge out of range".into()));
                }
                (SolutionSpace::binary(n)?, ProblemData::Mis(MisData { edges }))
            }
            (Family::KMeans, Payload::KMeans { dim, points }) => {
                check_len("points", points.len(), n * dim)?;
                (SolutionSpace::integer(n, k)?, ProblemData::KMeans(KMeansData::new(points, dim, k)?))
            }
            (
                Family::Cflp,
                Payload::Cflp {
                    opening_costs,
                    transport_costs,
                    demands,
                    capacities,
                    reference,
                },
            ) => {
                check_len("opening_costs", opening_costs.len(), k)?;
                check_len("transport_costs", transport_costs.len(), n * k)?;
                check_len("demands", demands.len(), n)?;
                check_len("capacities", capacities.len(), k)?;
                check_len("reference", reference.len(), n)?;
                let space = SolutionSpace::integer(n, k)?;
                space.validate(&reference)?;
                if capacities.iter().any(|&c| !(c > 0.0)) {
                    return Err(bad("capacities must be positive".into()));
                }
                let data = CflpData {
                    n,
                    k,
                    opening_costs,
                    transport_costs,
                    demands,
                    capacities,
                    reference,
                };
                (space, ProblemData::Cflp(data))
            }
            (Family::Qap, Payload::Qap { distances, flows }) => {
                check_len("distances", distances.len(), n * n)?;
                check_len("flows", flows.len(), n * n)?;
                (SolutionSpace::permutation(n)?, ProblemData::Qap(QapData { n, distances, flows }))
            }
            (family, _) => return Err(bad(format!("payload does not match family {family}"))),
        };
        ProblemInstance::new(self.family, space, self.seed, data, self.lambda_f)
    }

    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serialises");
        s.push('\n');
        s
    }
}

impl ProblemInstance {
    pub fn to_document(&self) -> InstanceDocument {
        InstanceDocument::from_instance(self)
    }

    pub fn to_json(&self) -> String {
        self.to_document().to_canonical_string()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDocument = serde_json::from_str(text)?;
        doc.into_instance()
    }

    /// SHA-256 of the canonical document, hex encoded.
    pub fn digest(&self) -> String {
        digest_hex(self.to_json().as_bytes())
    }
}

pub fn digest_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{generate_instance, SizeParams};

    #[test]
    fn round_trip_every_family() {
        for family in Family::ALL {
            let inst = generate_instance(family, SizeParams::new(5, 3), 4).unwrap();
            let text = inst.to_json();
            let back = ProblemInstance::from_json(&text).unwrap();
            assert_eq!(back, inst);
            assert_eq!(back.to_json(), text);
            assert_eq!(back.digest(), inst.digest());
        }
    }

    #[test]
    fn rejects_mismatched_payload() {
        let inst = generate_instance(Family::Qap, SizeParams::new(4, 4), 1).unwrap();
        let mut doc = inst.to_document();
        doc.family = Family::Maxcut;
        assert!(doc.into_instance().is_err());
        let mut doc = inst.to_document();
        doc.version = 99;
        assert!(doc.into_instance().is_err());
        let mut doc = inst.to_document();
        doc.n = 5;
        assert!(doc.into_instance().is_err());
    }
}
