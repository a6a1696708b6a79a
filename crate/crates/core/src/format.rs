//! On-disk JSON formats. Bit-strings are ASCII `0`/`1`, lowest degree (or
//! lowest column) first.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::FormatError;
use crate::linalg::BinMatrix;
use crate::netmodel::MulticastNetwork;
use crate::poly::BinPoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub id: usize,
    pub tail: String,
    pub head: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub nodes: Vec<String>,
    pub source: String,
    pub receivers: Vec<String>,
    pub edges: Vec<EdgeEntry>,
}

impl NetworkFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_network(&self) -> Result<MulticastNetwork, FormatError> {
        let edges: Vec<(usize, &str, &str)> = self
            .edges
            .iter()
            .map(|e| (e.id, e.tail.as_str(), e.head.as_str()))
            .collect();
        Ok(MulticastNetwork::new(
            &self.nodes,
            &self.source,
            &self.receivers,
            &edges,
        )?)
    }

    pub fn from_network(net: &MulticastNetwork) -> Self {
        NetworkFile {
            nodes: net.node_names().to_vec(),
            source: net.node_name(net.source()).to_string(),
            receivers: net
                .receivers()
                .iter()
                .map(|&t| net.node_name(t).to_string())
                .collect(),
            edges: net
                .edges()
                .iter()
                .map(|e| EdgeEntry {
                    id: e.id,
                    tail: net.node_name(e.tail).to_string(),
                    head: net.node_name(e.head).to_string(),
                })
                .collect(),
        }
    }
}

pub fn load_network(text: &str) -> Result<MulticastNetwork, FormatError> {
    NetworkFile::parse(text)?.to_network()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelEntry {
    pub d: usize,
    pub e: usize,
    pub poly: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    #[serde(rename = "L")]
    pub l: usize,
    pub delta: usize,
    pub modulus: String,
    pub kernels: Vec<KernelEntry>,
    #[serde(rename = "J_set")]
    pub j_set: Vec<usize>,
    #[serde(rename = "G")]
    pub g: Vec<String>,
    pub decoders: BTreeMap<String, Vec<String>>,
}

impl CodeFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn modulus_poly(&self) -> Result<BinPoly, FormatError> {
        parse_poly("modulus", &self.modulus)
    }

    /// Kernel polynomials keyed by `(d, e)`.
    pub fn kernel_map(&self) -> Result<BTreeMap<(usize, usize), BinPoly>, FormatError> {
        let mut out = BTreeMap::new();
        for k in &self.kernels {
            let p = parse_poly(&format!("kernel (e{}, e{})", k.d, k.e), &k.poly)?;
            if out.insert((k.d, k.e), p).is_some() {
                return Err(FormatError::Invalid(format!(
                    "duplicate kernel entry (e{}, e{})",
                    k.d, k.e
                )));
            }
        }
        Ok(out)
    }

    pub fn g_matrix(&self) -> Result<BinMatrix, FormatError> {
        let g = parse_matrix("G", &self.g, self.l)?;
        if g.rows() != self.j_set.len() {
            return Err(FormatError::Invalid(format!(
                "G has {} rows but J_set has {} entries",
                g.rows(),
                self.j_set.len()
            )));
        }
        Ok(g)
    }

    pub fn decoder(&self, receiver: &str, cols: usize) -> Result<Option<BinMatrix>, FormatError> {
        self.decoders
            .get(receiver)
            .map(|rows| parse_matrix(&format!("decoder {receiver}"), rows, cols))
            .transpose()
    }
}

fn parse_poly(field: &str, s: &str) -> Result<BinPoly, FormatError> {
    BinPoly::from_bitstring(s).map_err(|source| FormatError::Bits {
        field: field.to_string(),
        source,
    })
}

fn parse_matrix(field: &str, rows: &[String], cols: usize) -> Result<BinMatrix, FormatError> {
    if rows.is_empty() {
        return Ok(BinMatrix::zeros(0, cols));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != cols) {
        return Err(FormatError::Invalid(format!(
            "{field}: row of width {} where {cols} was expected",
            r.len()
        )));
    }
    BinMatrix::from_bitstrings(rows).map_err(|e| FormatError::Invalid(format!("{field}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks;

    #[test]
    fn network_file_round_trip() {
        for (name, text) in networks::BUNDLED {
            let file = NetworkFile::parse(text).unwrap();
            let net = file.to_network().unwrap();
            assert_eq!(NetworkFile::from_network(&net), file, "{name}");
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(NetworkFile::parse("{"), Err(FormatError::Json(_))));
        let code = CodeFile {
            l: 3,
            delta: 1,
            modulus: "11x".into(),
            kernels: vec![],
            j_set: vec![],
            g: vec![],
            decoders: BTreeMap::new(),
        };
        assert!(matches!(code.modulus_poly(), Err(FormatError::Bits { .. })));
    }

    #[test]
    fn code_file_round_trip() {
        let mut decoders = BTreeMap::new();
        decoders.insert("t".to_string(), vec!["10".to_string(), "01".to_string()]);
        let code = CodeFile {
            l: 7,
            delta: 1,
            modulus: "1101".into(),
            kernels: vec![KernelEntry { d: 1, e: 3, poly: "0100000".into() }],
            j_set: vec![1, 2, 4],
            g: vec!["1110100".into(), "0011101".into(), "0111010".into()],
            decoders,
        };
        let text = code.to_json();
        assert!(text.contains("\"J_set\""));
        let back = CodeFile::parse(&text).unwrap();
        assert_eq!(back, code);
        assert_eq!(back.g_matrix().unwrap().to_bitstrings(), code.g);
        assert_eq!(back.kernel_map().unwrap()[&(1, 3)], BinPoly::monomial(1));
    }
}
