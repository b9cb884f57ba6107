//! Corpus directories: one dot file per graph plus a `manifest` file.

use std::fs;
use std::path::Path;

use lunes_core::graph::{export_dot, import_dot, Corpus, CorpusManifest, CorpusModel};

use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest";

pub fn write_corpus(dir: &Path, corpus: &Corpus) -> Result<()> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    for (k, g) in corpus.graphs.iter().enumerate() {
        let path = dir.join(Corpus::file_name(k));
        fs::write(&path, export_dot(g)).map_err(CliError::io(&path))?;
    }
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, corpus.manifest()).map_err(CliError::io(&path))
}

/// Loads the graphs listed by the manifest and checks them against it.
pub fn read_corpus(dir: &Path) -> Result<Corpus> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
    let manifest = CorpusManifest::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let (n, m) = (manifest.model.node_count(), manifest.model.edge_count());
    let mut graphs = Vec::with_capacity(manifest.count);
    for k in 0..manifest.count {
        let path = dir.join(Corpus::file_name(k));
        let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
        let imported = import_dot(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let g = imported.graph;
        if g.node_count() != n || g.edge_count() != m {
            return Err(CliError::usage(format!(
                "{}: {} nodes / {} edges, manifest says {n} / {m}",
                path.display(),
                g.node_count(),
                g.edge_count()
            )));
        }
        graphs.push(g);
    }
    let mappings = lunes_core::kv::parse_kv(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
        .into_iter()
        .filter_map(|(k, v)| {
            let idx = k.strip_prefix("mapping_")?.parse().ok()?;
            let labels = v.split(',').map(|s| s.parse().ok()).collect::<Option<Vec<u64>>>()?;
            Some((idx, labels))
        })
        .collect();
    Ok(Corpus { label: manifest.label, model: manifest.model, master_seed: manifest.master_seed, graphs, mappings })
}

/// Builds an imported corpus from external dot files.
pub fn import_corpus(label: &str, files: &[impl AsRef<Path>]) -> Result<Corpus> {
    let mut imported = Vec::with_capacity(files.len());
    for f in files {
        let path = f.as_ref();
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        imported.push(import_dot(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?);
    }
    Ok(Corpus::from_imported(label, imported)?)
}

pub fn model_from_flags(
    model: &str,
    n: Option<usize>,
    m: Option<usize>,
    m0: Option<usize>,
    m_attach: Option<usize>,
) -> Result<CorpusModel> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| CliError::usage(format!("model {model} needs --{flag}")));
    match model {
        "er" => Ok(CorpusModel::ErdosRenyi { n: need(n, "nodes")?, m: need(m, "edges")? }),
        "ba" => Ok(CorpusModel::BarabasiAlbert {
            n: need(n, "nodes")?,
            m0: need(m0, "m0")?,
            m_attach: need(m_attach, "m-attach")?,
        }),
        other => Err(CliError::usage(format!("unknown model `{other}` (expected er, ba or dot)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_directory() {
        let dir = tempfile::tempdir().unwrap();
        let c = Corpus::generate("t", CorpusModel::ErdosRenyi { n: 30, m: 50 }, 3, 4).unwrap();
        write_corpus(dir.path(), &c).unwrap();
        assert_eq!(read_corpus(dir.path()).unwrap(), c);
    }

    #[test]
    fn imported_mapping_survives() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("a.dot");
        fs::write(&src, "graph G {\n 10 -- 20;\n 20 -- 30;\n}\n").unwrap();
        let c = import_corpus("imp", &[&src]).unwrap();
        let out = dir.path().join("c");
        write_corpus(&out, &c).unwrap();
        let back = read_corpus(&out).unwrap();
        assert_eq!(back.mappings.get(&0), Some(&vec![10, 20, 30]));
        assert_eq!(back, c);
    }

    #[test]
    fn missing_graph_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let c = Corpus::generate("t", CorpusModel::ErdosRenyi { n: 10, m: 12 }, 2, 1).unwrap();
        write_corpus(dir.path(), &c).unwrap();
        fs::remove_file(dir.path().join("graph_001.dot")).unwrap();
        assert_eq!(read_corpus(dir.path()).unwrap_err().exit_code(), 1);
    }
}
