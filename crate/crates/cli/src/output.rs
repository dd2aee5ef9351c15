//! Artifact files: CSV tables, JSON summaries, SVG plots and the manifest.
//!
//! Every file carries the config hash. CSV files start with a
//! `# config_hash=<hex>` comment line.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qchaos_core::crossover::SweepCurve;
use qchaos_core::levelstats::RatioHistogram;

use crate::spec::RunSpec;

pub const MANIFEST: &str = "manifest.txt";
pub const CONFIG: &str = "config.json";

/// Files produced by a run, kept in memory until the run succeeds.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub hash: String,
    files: BTreeMap<String, Vec<u8>>,
}

impl Artifacts {
    pub fn new(hash: String) -> Self {
        Self {
            hash,
            files: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.insert(name.into(), bytes);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.get(name).map(Vec::as_slice)
    }

    /// CSV with a hash comment line, a header and one row per record.
    pub fn add_csv(&mut self, name: impl Into<String>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut out = format!("# config_hash={}\n", self.hash).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        self.add(name, out);
        Ok(())
    }

    /// JSON object `{"config_hash": ..., <key>: value}`.
    pub fn add_json<T: Serialize>(&mut self, name: impl Into<String>, key: &str, value: &T) -> Result<()> {
        let mut map = serde_json::Map::new();
        map.insert("config_hash".into(), self.hash.clone().into());
        map.insert(key.into(), serde_json::to_value(value)?);
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(map))?;
        text.push('\n');
        self.add(name, text.into_bytes());
        Ok(())
    }

    pub fn add_sweep_csv(&mut self, name: impl Into<String>, curve: &SweepCurve) -> Result<()> {
        let rows: Vec<Vec<String>> = curve
            .points
            .iter()
            .map(|p| {
                vec![
                    num(p.j),
                    num(p.rbar),
                    num(p.rbar_se),
                    num(p.kl.d_poisson),
                    num(p.kl.d_goe),
                    num(p.beta),
                    num(p.gamma),
                    p.realizations.to_string(),
                ]
            })
            .collect();
        self.add_csv(
            name,
            &[
                "j",
                "rbar",
                "rbar_se",
                "dkl_p0",
                "dkl_p1",
                "beta",
                "gamma",
                "realizations",
            ],
            &rows,
        )
    }

    pub fn add_histogram_csv(&mut self, name: impl Into<String>, h: &RatioHistogram) -> Result<()> {
        let w = h.bin_width();
        let freq = h.frequencies();
        let rows: Vec<Vec<String>> = (0..h.n_bins())
            .map(|k| vec![num(k as f64 * w), num((k + 1) as f64 * w), num(freq[k])])
            .collect();
        self.add_csv(name, &["bin_lo", "bin_hi", "frequency"], &rows)
    }

    /// Writes every file, then `config.json` and the manifest.
    pub fn write(&self, dir: &Path, spec: &RunSpec, extra: &[(&str, String)]) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let config = ConfigFile {
            config_hash: self.hash.clone(),
            spec: spec.clone(),
        };
        let mut all = self.files.clone();
        all.insert(
            CONFIG.into(),
            (serde_json::to_string_pretty(&config)? + "\n").into_bytes(),
        );
        let mut manifest = format!("config_hash={}\nseed={}\n", self.hash, spec.seed);
        manifest += &format!("version={}\n", env!("CARGO_PKG_VERSION"));
        for (k, v) in extra {
            manifest += &format!("{k}={v}\n");
        }
        for (name, bytes) in &all {
            let path = dir.join(name);
            fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            manifest += &format!("file.{name}={}\n", sha256_hex(bytes));
        }
        fs::write(dir.join(MANIFEST), manifest)?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ConfigFile {
    pub config_hash: String,
    pub spec: RunSpec,
}

/// Shortest round-trip decimal form; NaN for missing values.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parses a flat `key=value` manifest.
pub fn read_manifest(text: &str) -> Result<BTreeMap<String, String>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (k, v) = l.split_once('=').with_context(|| format!("bad manifest line {l:?}"))?;
            Ok((k.to_string(), v.to_string()))
        })
        .collect()
}

#[derive(Debug)]
pub struct VerifyReport {
    pub config_hash: String,
    pub files_checked: usize,
}

/// Recomputes the config hash from `config.json`, then checks every listed
/// file's digest and embedded hash.
pub fn verify(dir: &Path) -> Result<VerifyReport> {
    let manifest = read_manifest(&fs::read_to_string(dir.join(MANIFEST)).context("reading manifest")?)?;
    let config: ConfigFile = serde_json::from_slice(&fs::read(dir.join(CONFIG)).context("reading config.json")?)?;
    let recomputed = config.spec.config_hash();
    ensure!(
        recomputed == config.config_hash,
        "config.json hash {} does not match its spec ({recomputed})",
        config.config_hash
    );
    let listed = manifest.get("config_hash").context("manifest lacks config_hash")?;
    ensure!(
        *listed == recomputed,
        "manifest hash {listed} differs from config hash {recomputed}"
    );
    let mut files_checked = 0;
    for (key, digest) in &manifest {
        let Some(name) = key.strip_prefix("file.") else {
            continue;
        };
        let bytes = fs::read(dir.join(name)).with_context(|| format!("reading {name}"))?;
        if sha256_hex(&bytes) != *digest {
            bail!("{name}: content digest mismatch");
        }
        let text = String::from_utf8_lossy(&bytes);
        ensure!(text.contains(&recomputed), "{name}: config hash not embedded");
        files_checked += 1;
    }
    ensure!(files_checked > 0, "manifest lists no files");
    Ok(VerifyReport {
        config_hash: recomputed,
        files_checked,
    })
}
