//! Input loading: listing files that name per-layer data files, resolved
//! relative to the listing's own directory, plus a digest of everything read.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use nonrank::{parse_multilayer, Manifest, MultiLayerNetwork, SimilarityMatrix};
use sha2::{Digest, Sha256};

use crate::AppError;

/// Everything read for one run: the layer names in input order, the loaded
/// per-layer similarity matrices, the network itself when edge lists were the
/// source, and a SHA-256 digest over all bytes read.
pub struct LoadedInput {
    pub layer_names: Vec<String>,
    pub matrices: Vec<SimilarityMatrix>,
    pub network: Option<MultiLayerNetwork>,
    pub digest: String,
}

fn read_file(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path).map_err(|source| {
        let path = path.display().to_string();
        if source.kind() == io::ErrorKind::NotFound {
            AppError::NotFound { path }
        } else {
            AppError::Io { path, source }
        }
    })
}

/// Resolve a listing entry against the directory containing the listing.
fn resolve(listing: &Path, entry: &str) -> PathBuf {
    match listing.parent() {
        Some(dir) => dir.join(entry),
        None => PathBuf::from(entry),
    }
}

/// Read the listing and every referenced file, in listing order, feeding the
/// digest as we go.
fn read_listing(path: &Path) -> Result<(Manifest, Vec<String>, String), AppError> {
    let listing_text = read_file(path)?;
    let manifest = Manifest::parse(&listing_text).map_err(|source| AppError::Listing {
        path: path.display().to_string(),
        source,
    })?;

    let mut hasher = Sha256::new();
    hasher.update(listing_text.as_bytes());
    let mut texts = Vec::with_capacity(manifest.layers.len());
    for entry in &manifest.layers {
        let text = read_file(&resolve(path, &entry.path))?;
        hasher.update(text.as_bytes());
        texts.push(text);
    }
    Ok((manifest, texts, hex::encode(hasher.finalize())))
}

/// Load a manifest of edge lists and derive per-layer similarities from
/// shortest paths.
pub fn load_edge_lists(path: &Path) -> Result<LoadedInput, AppError> {
    let (manifest, texts, digest) = read_listing(path)?;
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    let network = parse_multilayer(&manifest, &refs).map_err(|source| AppError::Listing {
        path: path.display().to_string(),
        source,
    })?;
    let matrices = nonrank::layer_similarities(&network)?;
    Ok(LoadedInput {
        layer_names: manifest.layers.iter().map(|e| e.name.clone()).collect(),
        matrices,
        network: Some(network),
        digest,
    })
}

/// Load a listing of pre-computed similarity CSVs. A roster directive makes
/// no sense here (labels come from the CSV headers) and is rejected.
pub fn load_matrices(path: &Path) -> Result<LoadedInput, AppError> {
    let (manifest, texts, digest) = read_listing(path)?;
    if !manifest.roster.is_empty() {
        return Err(AppError::RosterInMatrixListing {
            path: path.display().to_string(),
        });
    }
    let mut matrices = Vec::with_capacity(texts.len());
    for (entry, text) in manifest.layers.iter().zip(&texts) {
        let matrix = SimilarityMatrix::parse_csv(entry.name.clone(), text).map_err(|source| {
            AppError::Matrix {
                path: resolve(path, &entry.path).display().to_string(),
                source,
            }
        })?;
        matrices.push(matrix);
    }
    Ok(LoadedInput {
        layer_names: manifest.layers.iter().map(|e| e.name.clone()).collect(),
        matrices,
        network: None,
        digest,
    })
}
