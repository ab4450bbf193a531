//! Classic real-world networks used for the real-data evaluation.
//!
//! Only the karate club network ships with the crate. The others are read
//! from the directory named by `$SPECK_DATA_DIR`, as `<name>.txt` edge lists
//! or `<name>.gml` files (the GML subset understood here is `edge [ source
//! <id> target <id> ]`; everything else is ignored).

use std::io::{BufReader, Cursor};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{load_edge_list, parse_edge_list, EdgeListFile, Graph, SimplifyCounts};

pub const DATA_DIR_VAR: &str = "SPECK_DATA_DIR";

const KARATE: &str = include_str!("../data/karate.txt");

/// Published per-method estimates, in the order NB, BHm, BHmc, BHa, BHac.
pub type ReferenceRow = [usize; 5];

#[derive(Debug, Clone, Serialize)]
pub struct DatasetInfo {
    pub name: &'static str,
    pub title: &'static str,
    /// Node and edge counts of the usual public version (after
    /// simplification, before any component extraction).
    pub nodes: usize,
    pub edges: Option<usize>,
    /// Node count after restricting to the largest connected component.
    pub lcc_nodes: Option<usize>,
    /// Number of communities in the commonly cited ground truth.
    pub truth: Option<usize>,
    pub reference: ReferenceRow,
    /// SHA-256 of the bundled file.
    pub sha256: Option<&'static str>,
}

impl DatasetInfo {
    pub fn uses_lcc(&self) -> bool {
        self.lcc_nodes.is_some()
    }
}

pub const DATASETS: &[DatasetInfo] = &[
    DatasetInfo {
        name: "karate",
        title: "Karate club",
        nodes: 34,
        edges: Some(78),
        lcc_nodes: None,
        truth: Some(2),
        reference: [2, 2, 2, 2, 2],
        sha256: Some("ef9acb39b9454b61629210c730ccdd60688a065c6f0995502aef74ffa0c361c7"),
    },
    DatasetInfo {
        name: "dolphins",
        title: "Dolphins",
        nodes: 62,
        edges: Some(159),
        lcc_nodes: None,
        truth: Some(2),
        reference: [2, 2, 2, 2, 2],
        sha256: None,
    },
    DatasetInfo {
        name: "football",
        title: "College football",
        nodes: 115,
        edges: Some(613),
        lcc_nodes: None,
        truth: Some(12),
        reference: [10, 10, 10, 10, 10],
        sha256: None,
    },
    DatasetInfo {
        name: "polbooks",
        title: "Political books",
        nodes: 105,
        edges: Some(441),
        lcc_nodes: None,
        truth: Some(3),
        reference: [3, 3, 4, 4, 4],
        sha256: None,
    },
    DatasetInfo {
        name: "polblogs",
        title: "Political blogs",
        nodes: 1490,
        edges: None,
        lcc_nodes: Some(1222),
        truth: Some(2),
        reference: [8, 7, 8, 7, 8],
        sha256: None,
    },
];

pub fn info(name: &str) -> Result<&'static DatasetInfo> {
    DATASETS
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| Error::UnknownDataset(name.to_string()))
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", content = "path", rename_all = "lowercase")]
pub enum Source {
    Bundled,
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub info: &'static DatasetInfo,
    pub source: Source,
    pub sha256: String,
    /// Whether the checksum equals the pinned one; `None` when nothing is
    /// pinned.
    pub checksum_ok: Option<bool>,
    pub file: EdgeListFile,
}

pub fn karate() -> Result<EdgeListFile> {
    parse_edge_list(Cursor::new(KARATE))
}

/// Load a registered dataset, bundled or from `$SPECK_DATA_DIR`.
pub fn load(name: &str) -> Result<LoadedDataset> {
    let info = info(name)?;
    let (bytes, source) = if name == "karate" {
        (KARATE.as_bytes().to_vec(), Source::Bundled)
    } else {
        let path = locate(name).ok_or_else(|| Error::DatasetUnavailable {
            name: name.to_string(),
            file: format!("{name}.txt"),
        })?;
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        (bytes, Source::File(path))
    };
    let sha256 = sha256_hex(&bytes);
    let checksum_ok = info.sha256.map(|pinned| pinned == sha256);
    if checksum_ok == Some(false) {
        log::warn!("{name}: checksum {sha256} differs from the pinned version");
    }
    let is_gml = matches!(&source, Source::File(p) if p.extension().is_some_and(|e| e == "gml"));
    let file = if is_gml {
        parse_gml(&String::from_utf8_lossy(&bytes))?
    } else {
        parse_edge_list(BufReader::new(Cursor::new(bytes)))?
    };
    if file.graph.n() != info.nodes || info.edges.is_some_and(|m| m != file.graph.m()) {
        log::warn!(
            "{name}: loaded n = {}, m = {}; the reference version has n = {}{}",
            file.graph.n(),
            file.graph.m(),
            info.nodes,
            info.edges.map(|m| format!(", m = {m}")).unwrap_or_default()
        );
    }
    Ok(LoadedDataset {
        info,
        source,
        sha256,
        checksum_ok,
        file,
    })
}

/// Load an edge-list file, or a GML file when the extension is `.gml`.
pub fn load_file(path: impl AsRef<Path>) -> Result<EdgeListFile> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gml")) {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_gml(&text)
    } else {
        load_edge_list(path)
    }
}

fn locate(name: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(DATA_DIR_VAR)?;
    let dir = Path::new(&dir);
    ["txt", "gml"]
        .iter()
        .map(|ext| dir.join(format!("{name}.{ext}")))
        .find(|p| p.is_file())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Edges of a GML document: every `source`/`target` pair inside an
/// `edge [ ... ]` block. Node ids are relabeled in sorted order, like edge
/// lists.
pub fn parse_gml(text: &str) -> Result<EdgeListFile> {
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    let mut labels: Vec<u64> = Vec::new();
    let mut tokens = text.split_whitespace().peekable();
    let mut depth = 0usize;
    let mut edge_depth: Option<usize> = None;
    let mut node_depth: Option<usize> = None;
    let (mut source, mut target) = (None, None);
    let parse_id = |tok: Option<&str>, what: &str| -> Result<u64> {
        tok.and_then(|t| t.parse().ok()).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("GML {what} is not a non-negative integer"),
        })
    };
    while let Some(tok) = tokens.next() {
        match tok {
            "[" => depth += 1,
            "]" => {
                if edge_depth == Some(depth) {
                    match (source.take(), target.take()) {
                        (Some(s), Some(t)) => pairs.push((s, t)),
                        _ => {
                            return Err(Error::Parse {
                                line: 0,
                                message: "GML edge without source and target".into(),
                            })
                        }
                    }
                    edge_depth = None;
                }
                if node_depth == Some(depth) {
                    node_depth = None;
                }
                depth = depth.saturating_sub(1);
            }
            "edge" if tokens.peek() == Some(&"[") => edge_depth = Some(depth + 1),
            "node" if tokens.peek() == Some(&"[") => node_depth = Some(depth + 1),
            "source" if edge_depth == Some(depth) => source = Some(parse_id(tokens.next(), "source")?),
            "target" if edge_depth == Some(depth) => target = Some(parse_id(tokens.next(), "target")?),
            "id" if node_depth == Some(depth) => labels.push(parse_id(tokens.next(), "node id")?),
            _ => {}
        }
    }
    labels.extend(pairs.iter().flat_map(|&(a, b)| [a, b]));
    labels.sort_unstable();
    labels.dedup();
    if labels.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let index = |x: u64| labels.binary_search(&x).expect("label collected above");
    let (graph, counts): (Graph, SimplifyCounts) =
        Graph::simplify(pairs.iter().map(|&(a, b)| (index(a), index(b))), Some(labels.len()))?;
    Ok(EdgeListFile { graph, labels, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::degree_stats;

    #[test]
    fn karate_is_bundled_and_pinned() {
        let d = load("karate").unwrap();
        assert_eq!(d.checksum_ok, Some(true));
        assert_eq!((d.file.graph.n(), d.file.graph.m()), (34, 78));
        assert_eq!(d.file.labels, (1..=34).collect::<Vec<u64>>());
        assert!(d.file.graph.is_connected());
    }

    #[test]
    fn karate_degree_statistics() {
        let s = degree_stats(&karate().unwrap().graph).unwrap();
        // Σd = 156, Σd² = 1212.
        assert_eq!(s.d_tilde, 1212.0 / 156.0 - 1.0);
        assert_eq!(s.lambda_hat, 156.0 / 34.0);
        assert_eq!((s.min_degree, s.max_degree), (1, 17));
    }

    #[test]
    fn unknown_and_missing_datasets() {
        assert!(matches!(load("nope"), Err(Error::UnknownDataset(_))));
        if std::env::var_os(DATA_DIR_VAR).is_none() {
            assert!(matches!(load("dolphins"), Err(Error::DatasetUnavailable { .. })));
        }
    }

    #[test]
    fn registry_matches_reference_counts() {
        assert_eq!(info("polblogs").unwrap().lcc_nodes, Some(1222));
        assert_eq!(info("polbooks").unwrap().reference, [3, 3, 4, 4, 4]);
        assert!(DATASETS.iter().filter(|d| d.sha256.is_some()).all(|d| d.name == "karate"));
    }

    #[test]
    fn gml_subset() {
        let text = r#"
            graph [
              directed 0
              node [ id 10 label "a" ]
              node [ id 20 ]
              node [ id 30 ]
              node [ id 40 ]
              edge [ source 10 target 20 ]
              edge [ source 20 target 10 value 3 ]
              edge [ source 30 target 20 ]
            ]"#;
        let f = parse_gml(text).unwrap();
        assert_eq!(f.labels, vec![10, 20, 30, 40]);
        assert_eq!(f.graph.n(), 4);
        assert_eq!(f.graph.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(f.counts.duplicates, 1);
    }

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
