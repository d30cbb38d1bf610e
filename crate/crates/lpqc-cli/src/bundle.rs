//! The code-bundle file format.
//!
//! A bundle records the base matrices a lifted-product code was built
//! from, plus the derived parameters for quick inspection. Loading
//! rebuilds the code from the bases and cross-checks the recorded
//! parameters, so a bundle cannot drift out of sync with its source;
//! embedded full matrices (`--full`) are likewise verified, they exist
//! for consumers that cannot rerun the construction.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use lpqc::base::QcBaseMatrix;
use lpqc::css::CssCode;
use lpqc::gf2::BinaryMatrix;
use lpqc::product::{build_general, build_symmetric, LpBasePair};

const CONSTRUCTION: &str = "lifted_product";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullMatrices {
    pub hx: BinaryMatrix,
    pub hz: BinaryMatrix,
    pub lx: BinaryMatrix,
    pub lz: BinaryMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeBundle {
    pub construction: String,
    pub symmetric: bool,
    pub n: usize,
    pub k: usize,
    pub base1: QcBaseMatrix,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub base2: Option<QcBaseMatrix>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub full: Option<FullMatrices>,
}

pub struct LoadedCode {
    pub bundle: CodeBundle,
    pub pair: LpBasePair,
    pub code: CssCode,
}

pub fn build_bundle(pair: &LpBasePair, code: &CssCode, embed_full: bool) -> CodeBundle {
    CodeBundle {
        construction: CONSTRUCTION.to_string(),
        symmetric: pair.symmetric,
        n: code.n_qubits(),
        k: code.k_logical(),
        base1: pair.source.0.clone(),
        base2: (!pair.symmetric).then(|| pair.source.1.clone()),
        full: embed_full.then(|| FullMatrices {
            hx: code.hx().clone(),
            hz: code.hz().clone(),
            lx: code.lx().clone(),
            lz: code.lz().clone(),
        }),
    }
}

pub fn load(path: &Path) -> Result<LoadedCode> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading bundle {}", path.display()))?;
    let bundle: CodeBundle = serde_json::from_str(&text)
        .with_context(|| format!("parsing bundle {}", path.display()))?;
    if bundle.construction != CONSTRUCTION {
        bail!(
            "bundle {} has construction {:?}; this tool builds {:?}",
            path.display(),
            bundle.construction,
            CONSTRUCTION
        );
    }
    let pair = if bundle.symmetric {
        if bundle.base2.is_some() {
            bail!("bundle {} is marked symmetric but carries a second base", path.display());
        }
        build_symmetric(&bundle.base1)
    } else {
        let base2 = bundle
            .base2
            .as_ref()
            .with_context(|| format!("bundle {} needs base2; it is not symmetric", path.display()))?;
        build_general(&bundle.base1, base2)?
    };
    let code = CssCode::from_lp_pair(&pair)?;
    if code.n_qubits() != bundle.n || code.k_logical() != bundle.k {
        bail!(
            "bundle {} records [[{}, {}]], rebuilding gives [[{}, {}]]",
            path.display(),
            bundle.n,
            bundle.k,
            code.n_qubits(),
            code.k_logical()
        );
    }
    if let Some(full) = &bundle.full {
        if full.hx != *code.hx() || full.hz != *code.hz() {
            bail!(
                "bundle {} embeds check matrices that disagree with its bases",
                path.display()
            );
        }
    }
    Ok(LoadedCode { bundle, pair, code })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workspace::{to_json, write_output};

    fn example_base() -> QcBaseMatrix {
        QcBaseMatrix::from_shift_rows(7, &[vec![1, 2, 4], vec![6, 5, 3]]).unwrap()
    }

    #[test]
    fn bundle_round_trips_through_disk() {
        let pair = build_symmetric(&example_base());
        let code = CssCode::from_lp_pair(&pair).unwrap();
        let bundle = build_bundle(&pair, &code, true);
        assert_eq!((bundle.n, bundle.k), (91, 11));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("code.json");
        write_output(&path, &to_json(&bundle).unwrap()).unwrap();
        let loaded = load(&path).unwrap();
        assert_eq!(loaded.bundle, bundle);
        assert_eq!(loaded.code.n_qubits(), 91);
        assert!(loaded.pair.symmetric);
    }

    #[test]
    fn tampered_parameters_are_rejected() {
        let pair = build_symmetric(&example_base());
        let code = CssCode::from_lp_pair(&pair).unwrap();
        let mut bundle = build_bundle(&pair, &code, false);
        bundle.k += 1;

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("code.json");
        write_output(&path, &to_json(&bundle).unwrap()).unwrap();
        let err = match load(&path) {
            Ok(_) => panic!("tampered bundle loaded"),
            Err(e) => e.to_string(),
        };
        assert!(err.contains("rebuilding gives"), "{err}");
    }
}
