use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use charp_bundles::field::{is_prime, Field, FieldSpec};
use charp_bundles::model::BilinearFormA;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const SEED_ENV: &str = "CHARP_BUNDLES_SEED";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FormSource {
    Identity,
    Random,
    File { path: PathBuf },
}

/// Fully resolved run parameters; embedded in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub suite: Option<String>,
    pub n: usize,
    pub p: u32,
    pub a: u32,
    pub q: u64,
    pub k: u64,
    pub box_lo: i64,
    pub box_hi: i64,
    pub extension: u32,
    pub seed: u64,
    pub seed_source: String,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub form: FormSource,
}

pub struct RawArgs {
    pub n: usize,
    pub p: u32,
    pub a: u32,
    pub k: Option<u64>,
    pub box_half: i64,
    pub extension: Option<u32>,
    pub seed: Option<u64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub form_file: Option<PathBuf>,
    pub random_form: bool,
}

impl RunConfig {
    pub fn resolve(command: &str, suite: Option<String>, raw: RawArgs) -> Result<Self> {
        if !is_prime(raw.p as u64) {
            bail!("--p {} is not prime", raw.p);
        }
        if raw.n < 1 {
            bail!("--n must be at least 1");
        }
        if raw.box_half < 0 {
            bail!("--box must be non-negative");
        }
        let q = (raw.p as u64)
            .checked_pow(raw.a)
            .with_context(|| format!("{}^{} overflows", raw.p, raw.a))?;
        let k = raw.k.unwrap_or(1);
        if k < 1 || k > q {
            bail!("--k {k} must lie in [1, {q}]");
        }
        let extension = match raw.extension {
            Some(e) => FieldSpec::new(raw.p, e)?.e,
            None => FieldSpec::with_default_extension(raw.p)?.e,
        };
        let (seed, seed_source) = match raw.seed {
            Some(s) => (s, "flag".to_string()),
            None => match std::env::var(SEED_ENV) {
                Ok(v) => (
                    v.trim()
                        .parse()
                        .with_context(|| format!("{SEED_ENV}={v} is not an unsigned integer"))?,
                    format!("env:{SEED_ENV}"),
                ),
                Err(_) => (DEFAULT_SEED, "default".to_string()),
            },
        };
        if raw.form_file.is_some() && raw.random_form {
            bail!("--form-file and --random-form are exclusive");
        }
        let form = match (raw.form_file, raw.random_form) {
            (Some(path), _) => FormSource::File { path },
            (None, true) => FormSource::Random,
            (None, false) => FormSource::Identity,
        };
        if raw.format == Format::Csv && command != "table" {
            bail!("--format csv is only available for the table command");
        }
        Ok(Self {
            command: command.to_string(),
            suite,
            n: raw.n,
            p: raw.p,
            a: raw.a,
            q,
            k,
            box_lo: -raw.box_half,
            box_hi: raw.box_half,
            extension,
            seed,
            seed_source,
            format: raw.format,
            out: raw.out,
            form,
        })
    }

    pub fn field(&self) -> Result<Field> {
        Ok(Field::new(FieldSpec::new(self.p, self.extension)?)?)
    }

    pub fn twists(&self) -> Vec<(i64, i64)> {
        (self.box_lo..=self.box_hi)
            .flat_map(|s| (self.box_lo..=self.box_hi).map(move |t| (s, t)))
            .collect()
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }

    /// The bilinear form for `n`, read or generated as configured.
    pub fn form(&self, field: &Field) -> Result<BilinearFormA> {
        match &self.form {
            FormSource::Identity => Ok(BilinearFormA::identity(self.n)),
            FormSource::Random => Ok(BilinearFormA::random(self.n, field, &mut self.rng(0))),
            FormSource::File { path } => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let rows: Vec<Vec<u32>> =
                    serde_json::from_str(&text).with_context(|| format!("parsing {} as a JSON matrix", path.display()))?;
                if rows.len() != self.n + 1 {
                    bail!("form file has {} rows, expected {}", rows.len(), self.n + 1);
                }
                if rows.iter().flatten().any(|&v| v >= field.order()) {
                    bail!("form entries must be field elements below {}", field.order());
                }
                let form = BilinearFormA::from_rows(rows)?;
                form.check(field)?;
                Ok(form)
            }
        }
    }
}
