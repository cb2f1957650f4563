//! The subcommands, each split into a computation returning plain data and a
//! renderer producing the output file contents.

use std::path::{Path, PathBuf};

use bundlegsp::cover::{self, Cover};
use bundlegsp::denoise::{self, DenoiseRow};
use bundlegsp::graph::Graph;
use bundlegsp::spectral::{fourier_basis, moment_of, spectrum};
use bundlegsp::transform::{self, atom_norm_stats, cumulative_coherence, CoherenceMode};
use bundlegsp::{BundleDictionary, Error, Frame, GraphBundle};
use serde::Serialize;

use crate::config::{ExperimentConfig, LoadedConfig};
use crate::error::{CliError, Result};
use crate::landscape::{read_signal_csv, signal_to_csv, LandscapeGrid};
use crate::output::{fmt_f64, write_atomic, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    MakeBundle,
    Sweep,
    Spectra,
    Denoise,
    Dictionary,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::MakeBundle => "make-bundle",
            Command::Sweep => "sweep",
            Command::Spectra => "spectra",
            Command::Denoise => "denoise",
            Command::Dictionary => "dictionary",
        }
    }
}

/// One file produced by a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: PathBuf,
    pub contents: String,
}

/// Runs `command` and returns the files it would write.
pub fn render(command: Command, loaded: &LoadedConfig, out: &Path, seed: u64) -> Result<Vec<Artifact>> {
    let prov = Provenance::new(command.name(), &loaded.config, seed);
    let main = |contents| Artifact {
        path: out.to_path_buf(),
        contents,
    };
    Ok(match command {
        Command::MakeBundle => vec![main(render_bundle(&prov, &loaded.bundle_spec()?.build()?))],
        Command::Sweep => vec![main(render_sweep(&prov, &sweep(loaded)?))],
        Command::Spectra => vec![main(render_spectra(&prov, &spectra(loaded)?))],
        Command::Denoise => vec![main(render_denoise(&prov, &denoise_rows(loaded, seed)?))],
        Command::Dictionary => {
            let dict = dictionary(loaded)?;
            let mut files = vec![main(render_dictionary(&prov, &dict))];
            if let Some(p) = &loaded.config.dictionary.signal {
                let x = read_signal_csv(&loaded.resolve(p), dict.dim())?;
                let c = dict.analyze(&x)?;
                let mut coeffs = prov.csv_header();
                coeffs.push_str("set_index,base_atom_index,fiber_atom_index,value\n");
                for (idx, v) in c.iter() {
                    coeffs.push_str(&format!("{},{},{},{}\n", idx.set, idx.base, idx.fiber, fmt_f64(v)));
                }
                let mut recon = prov.csv_header();
                recon.push_str(&signal_to_csv(&dict.synthesize(&c)?));
                files.push(Artifact {
                    path: sibling(out, "coefficients"),
                    contents: coeffs,
                });
                files.push(Artifact {
                    path: sibling(out, "reconstruction"),
                    contents: recon,
                });
            }
            files
        }
    })
}

/// `dir/name.csv` ↦ `dir/name.<tag>.csv`.
pub fn sibling(out: &Path, tag: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match out.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}.{tag}.{ext}"),
        None => format!("{stem}.{tag}"),
    };
    out.with_file_name(name)
}

/// Renders and writes every artifact atomically; returns the written paths.
pub fn run(command: Command, loaded: &LoadedConfig, out: Option<&Path>, seed: Option<u64>) -> Result<Vec<PathBuf>> {
    let out = match (out, &loaded.config.output) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => loaded.resolve(p),
        (None, None) => {
            return Err(CliError::Config(
                "no output path: pass --out or set `output` in the config".into(),
            ))
        }
    };
    let seed = seed.unwrap_or(loaded.config.seed);
    let files = render(command, loaded, &out, seed)?;
    for f in &files {
        write_atomic(&f.path, f.contents.as_bytes())?;
    }
    Ok(files.into_iter().map(|f| f.path).collect())
}

// make-bundle

#[derive(Serialize)]
struct BundleDoc<'a> {
    #[serde(flatten)]
    provenance: &'a Provenance,
    base: &'a Graph,
    fiber: &'a Graph,
    voltages: Vec<bundlegsp::bundle::VoltageEntry>,
    total: &'a Graph,
    projection: &'a [usize],
    validation: ValidationDoc,
}

#[derive(Serialize)]
struct ValidationDoc {
    is_bundle: bool,
    projection_ok: bool,
    fiber_failures: Vec<usize>,
    star_failures: Vec<usize>,
}

pub fn render_bundle(prov: &Provenance, bundle: &GraphBundle) -> String {
    let report = bundle.validate();
    let doc = BundleDoc {
        provenance: prov,
        base: bundle.base(),
        fiber: bundle.fiber(),
        voltages: bundle
            .voltages()
            .entries()
            .into_iter()
            .filter(|e| e.perm.iter().enumerate().any(|(i, &p)| i != p))
            .collect(),
        total: bundle.total(),
        projection: bundle.projection().vertex_map(),
        validation: ValidationDoc {
            is_bundle: report.is_bundle(),
            projection_ok: report.projection_ok,
            fiber_failures: report.fiber_failures,
            star_failures: report.star_failures,
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("bundle serializes");
    s.push('\n');
    s
}

// sweep

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Ok,
    NotACover,
    NotTrivializable,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::NotACover => "not_a_cover",
            CellStatus::NotTrivializable => "not_trivializable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub stride: usize,
    pub reach: usize,
    pub status: CellStatus,
    pub coherence: Option<f64>,
    pub atom_norm_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub m: usize,
    pub vertex_count: usize,
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn cell(&self, stride: usize, reach: usize) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.stride == stride && c.reach == reach)
    }
}

/// `⌊√n⌋`.
pub fn default_sparsity(n: usize) -> usize {
    (n as f64).sqrt().floor() as usize
}

pub fn sweep(loaded: &LoadedConfig) -> Result<SweepResult> {
    let config = &loaded.config;
    let spec = loaded.bundle_spec()?;
    let bundle = spec.build()?;
    let order = spec.cycle_order(bundle.base());
    let base_dict = config.factor_basis.build(bundle.base())?;
    let fiber_dict = config.factor_basis.build(bundle.fiber())?;
    let n = bundle.total().vertex_count();
    let m = config.coherence_m.unwrap_or_else(|| default_sparsity(n));
    let mut cells = Vec::new();
    for &stride in &config.sweep.strides {
        for &reach in &config.sweep.reaches {
            let mut cell = SweepCell {
                stride,
                reach,
                status: CellStatus::Ok,
                coherence: None,
                atom_norm_std: None,
            };
            let built = cover::stride_reach_cover(bundle.base(), &order, stride, reach).and_then(|c| {
                let p = config_partition(config, &c)?;
                transform::build_dictionary(&bundle, &c, &p, &base_dict, &fiber_dict)
            });
            match built {
                Ok(dict) => {
                    cell.coherence = Some(cumulative_coherence(&dict, m, CoherenceMode::Normalized)?);
                    cell.atom_norm_std = Some(atom_norm_stats(&dict).1);
                }
                Err(Error::NotACover { .. }) => cell.status = CellStatus::NotACover,
                Err(Error::NonTrivializable(..)) => cell.status = CellStatus::NotTrivializable,
                Err(e) => return Err(e.into()),
            }
            cells.push(cell);
        }
    }
    Ok(SweepResult {
        m,
        vertex_count: n,
        cells,
    })
}

fn config_partition(config: &ExperimentConfig, c: &Cover) -> bundlegsp::Result<bundlegsp::PartitionOfUnity> {
    config.partition.build(c).map_err(|e| match e {
        CliError::Core(e) => e,
        other => Error::InvalidPartition(other.to_string()),
    })
}

pub fn render_sweep(prov: &Provenance, r: &SweepResult) -> String {
    let mut s = prov.csv_header();
    s.push_str(&format!("# vertices: {}\n# coherence_m: {}\n", r.vertex_count, r.m));
    s.push_str("stride,reach,status,coherence,atom_norm_std\n");
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for c in &r.cells {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            c.stride,
            c.reach,
            c.status.as_str(),
            opt(c.coherence),
            opt(c.atom_norm_std)
        ));
    }
    s
}

// spectra

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub k: u32,
    pub left: f64,
    pub right: f64,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectraReport {
    pub left_spectrum: Vec<f64>,
    pub right_spectrum: Vec<f64>,
    /// ℓ∞ distance of the sorted spectra; absent when the sizes differ.
    pub spectra_linf: Option<f64>,
    pub moments: Vec<MomentRow>,
    pub first_differing_moment: Option<u32>,
}

/// Relative tolerance for calling two moments equal.
pub const MOMENT_TOLERANCE: f64 = 1e-9;

pub fn compare_spectra(left: &Graph, right: &Graph, max_moment: u32) -> Result<SpectraReport> {
    let a = spectrum(left)?;
    let b = spectrum(right)?;
    let spectra_linf = (a.len() == b.len()).then(|| a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
    let moments: Vec<MomentRow> = (0..=max_moment)
        .map(|k| {
            let (l, r) = (moment_of(&a, k), moment_of(&b, k));
            MomentRow {
                k,
                left: l,
                right: r,
                equal: (l - r).abs() <= MOMENT_TOLERANCE * l.abs().max(r.abs()).max(1.0),
            }
        })
        .collect();
    let first_differing_moment = moments.iter().find(|m| !m.equal).map(|m| m.k);
    Ok(SpectraReport {
        left_spectrum: a,
        right_spectrum: b,
        spectra_linf,
        moments,
        first_differing_moment,
    })
}

pub fn spectra(loaded: &LoadedConfig) -> Result<SpectraReport> {
    let spec = loaded
        .config
        .spectra
        .as_ref()
        .ok_or_else(|| CliError::Config("config has no `spectra` section".into()))?;
    compare_spectra(&spec.left.build()?, &spec.right.build()?, spec.max_moment)
}

pub fn render_spectra(prov: &Provenance, r: &SpectraReport) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        #[serde(flatten)]
        provenance: &'a Provenance,
        #[serde(flatten)]
        report: &'a SpectraReport,
    }
    let mut s = serde_json::to_string_pretty(&Doc {
        provenance: prov,
        report: r,
    })
    .expect("report serializes");
    s.push('\n');
    s
}

// denoise

pub const BUNDLE_METHOD: &str = "bundle";
pub const FOURIER_METHOD: &str = "fourier";

/// Loads the landscape and compares the bundle dictionary of the config
/// against the Fourier basis of the total graph.
pub fn denoise_rows(loaded: &LoadedConfig, seed: u64) -> Result<Vec<DenoiseRow>> {
    let config = &loaded.config;
    let spec = config
        .denoise
        .as_ref()
        .ok_or_else(|| CliError::Config("config has no `denoise` section".into()))?;
    let bundle = loaded.bundle_spec()?.build()?;
    let path = loaded.resolve(&spec.landscape);
    let grid = LandscapeGrid::read_csv(&path, bundle.base().vertex_count(), bundle.fiber().vertex_count())?;
    let clean = grid.to_signal(&bundle)?;
    let dict = dictionary(loaded)?;
    let fourier = fourier_basis(bundle.total())?;
    let sigmas = match &spec.sigmas {
        Some(s) => s.clone(),
        None => denoise::default_sigma_grid(&clean, spec.sigma_count),
    };
    Ok(denoise::denoise_experiment(
        &clean,
        &[(BUNDLE_METHOD, &dict), (FOURIER_METHOD, &fourier)],
        &sigmas,
        spec.trials,
        seed,
        spec.rule.into(),
    )?)
}

pub fn render_denoise(prov: &Provenance, rows: &[DenoiseRow]) -> String {
    let mut s = prov.csv_header();
    s.push_str("method,sigma,mean_mse,std_mse,trials\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.method,
            fmt_f64(r.sigma),
            fmt_f64(r.mean_mse),
            fmt_f64(r.std_mse),
            r.trials
        ));
    }
    s
}

// dictionary

pub fn dictionary(loaded: &LoadedConfig) -> Result<BundleDictionary> {
    let config = &loaded.config;
    let spec = loaded.bundle_spec()?;
    let bundle = spec.build()?;
    let cover = config.cover.build(bundle.base(), &spec.cycle_order(bundle.base()))?;
    let partition = config.partition.build(&cover)?;
    Ok(transform::build_dictionary(
        &bundle,
        &cover,
        &partition,
        &config.factor_basis.build(bundle.base())?,
        &config.factor_basis.build(bundle.fiber())?,
    )?)
}

/// One row per total vertex, one column per atom tagged `U<set>_b<base>_f<fiber>`.
pub fn render_dictionary(prov: &Provenance, dict: &BundleDictionary) -> String {
    let mut s = prov.csv_header();
    s.push_str("vertex");
    for k in 0..dict.atom_count() {
        let idx = dict.index_of(k);
        s.push_str(&format!(",U{}_b{}_f{}", idx.set, idx.base, idx.fiber));
    }
    s.push('\n');
    let a = dict.atom_matrix();
    for v in 0..a.nrows() {
        s.push_str(&v.to_string());
        for k in 0..a.ncols() {
            s.push(',');
            s.push_str(&fmt_f64(a[(v, k)]));
        }
        s.push('\n');
    }
    s
}
