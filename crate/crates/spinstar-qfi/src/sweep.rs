//! Parameter sweeps: grids over (t, f, θ, q), disorder-averaged Monte Carlo
//! over coupling realizations, and plot-ready CSV/JSON output.
//!
//! Couplings are drawn once per realization index from a counter-based seed
//! mix, so every grid cell of a given realization shares the same coupling
//! set and any single realization can be reproduced in isolation. Cells are
//! evaluated in parallel; output ordering and aggregate statistics are
//! independent of the worker count.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{precision_finite, precision_thermodynamic, ObservableSpec};
use crate::oracle::{self, QUBIT_CAP};
use crate::qfi::{qfi_closed_form, qfi_thermodynamic};
use crate::spinstar::{
    coherence_factor, fragment_size_from_fraction, sample_couplings, CouplingSet,
    GaussianCouplingSpec, ModelPoint,
};

/// Quantities a sweep can evaluate per grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Closed-form fragment QFI.
    QfiClosed,
    /// Thermodynamic-limit QFI at f = |F|/N.
    QfiThermo,
    /// Exact-reference QFI (capped environment sizes only).
    QfiOracle,
    /// Finite-N precision of the A_q observable.
    PrecisionFinite,
    /// Thermodynamic-limit precision of A_q.
    PrecisionThermo,
    /// Full-environment coherence factor of the system qubit.
    Coherence,
}

pub const ALL_QUANTITIES: [Quantity; 6] = [
    Quantity::QfiClosed,
    Quantity::QfiThermo,
    Quantity::QfiOracle,
    Quantity::PrecisionFinite,
    Quantity::PrecisionThermo,
    Quantity::Coherence,
];

/// Time axis: an explicit list or a uniform range.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        points: usize,
    },
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            AxisSpec::List(v) => v.clone(),
            AxisSpec::Range {
                start,
                stop,
                points,
            } => {
                if *points == 1 {
                    return vec![*start];
                }
                let step = (stop - start) / (*points as f64 - 1.0);
                (0..*points).map(|i| start + step * i as f64).collect()
            }
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            AxisSpec::List(v) => v.is_empty(),
            AxisSpec::Range { points, .. } => *points == 0,
        }
    }
}

/// Grid axes. The fragment axis is given either as fractions `f` (converted
/// to spin counts by half-up rounding, logged per row) or directly as spin
/// counts `frag`; exactly one of the two must be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t: AxisSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frag: Option<Vec<usize>>,
    pub theta: Vec<f64>,
    #[serde(default = "default_q_axis")]
    pub q: Vec<f64>,
}

fn default_q_axis() -> Vec<f64> {
    vec![0.0]
}

/// Output destination and format; `path = None` means stdout.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Full sweep specification: environment size, coupling ensemble, grid,
/// realization count, seed and requested quantities.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_env: usize,
    pub realizations: usize,
    pub master_seed: u64,
    pub ensemble: GaussianCouplingSpec,
    pub grid: GridSpec,
    pub quantities: Vec<Quantity>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl SweepConfig {
    /// Parse a TOML configuration; unknown keys are errors.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| Error::config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Resolved fragment axis as (requested fraction, spin count) pairs.
    pub fn fragment_axis(&self) -> Vec<(f64, usize)> {
        match (&self.grid.f, &self.grid.frag) {
            (Some(fs), None) => fs
                .iter()
                .map(|&f| (f, fragment_size_from_fraction(f, self.n_env)))
                .collect(),
            (None, Some(sizes)) => sizes
                .iter()
                .map(|&k| (k as f64 / self.n_env as f64, k))
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_env == 0 {
            return Err(Error::config("n_env must be >= 1"));
        }
        if self.realizations == 0 {
            return Err(Error::config("realizations must be >= 1"));
        }
        if self.grid.t.is_empty() || self.grid.theta.is_empty() || self.grid.q.is_empty() {
            return Err(Error::config("all grid axes must be non-empty"));
        }
        for &t in &self.grid.t.values() {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::config(format!(
                    "grid.t must be finite and >= 0, got {t}"
                )));
            }
        }
        for &th in &self.grid.theta {
            if !th.is_finite() {
                return Err(Error::config(format!(
                    "grid.theta must be finite, got {th}"
                )));
            }
        }
        match (&self.grid.f, &self.grid.frag) {
            (Some(_), Some(_)) => {
                return Err(Error::config("give either grid.f or grid.frag, not both"))
            }
            (None, None) => return Err(Error::config("one of grid.f or grid.frag is required")),
            _ => {}
        }
        let frag_axis = self.fragment_axis();
        if frag_axis.is_empty() {
            return Err(Error::config("fragment axis must be non-empty"));
        }
        for &(f, k) in &frag_axis {
            if !(0.0..=1.0).contains(&f) || k > self.n_env {
                return Err(Error::config(format!(
                    "fragment entry (f = {f}, |F| = {k}) outside 0..N = {}",
                    self.n_env
                )));
            }
        }
        if self.quantities.is_empty() {
            return Err(Error::config("at least one quantity is required"));
        }
        for &q in &self.grid.q {
            ObservableSpec::new(q).map_err(|e| Error::config(format!("grid.q: {e}")))?;
        }
        if self.ensemble.jstd < 0.0 {
            return Err(Error::config("ensemble.jstd must be >= 0"));
        }
        if self.quantities.contains(&Quantity::QfiOracle) {
            if self.n_env + 1 > QUBIT_CAP {
                return Err(Error::config(format!(
                    "qfi_oracle needs n_env + 1 <= {QUBIT_CAP}, got {}",
                    self.n_env + 1
                )));
            }
            for &th in &self.grid.theta {
                let folded = crate::spinstar::fold_theta(th);
                if folded <= 0.0 || folded >= std::f64::consts::FRAC_PI_2 {
                    return Err(Error::config(format!(
                        "qfi_oracle needs 0 < theta < pi/2, got {th}"
                    )));
                }
            }
        }
        if self.quantities.contains(&Quantity::PrecisionThermo) && self.ensemble.jmean == 0.0 {
            return Err(Error::config(
                "precision_thermo is undefined for a zero-mean coupling ensemble",
            ));
        }
        Ok(())
    }
}

/// One output record: grid coordinates, realization index (-1 flags the
/// aggregate over realizations), seed provenance, timescale markers and the
/// requested quantities. `*_std` columns are populated on aggregate rows
/// only.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SweepRow {
    pub n_env: usize,
    pub t: f64,
    pub f: f64,
    pub frag: usize,
    pub theta: f64,
    pub q: f64,
    pub realization: i64,
    pub seed: Option<u64>,
    pub tau_f: Option<f64>,
    pub sqrt_n: f64,
    pub qfi_closed: Option<f64>,
    pub qfi_closed_std: Option<f64>,
    pub qfi_thermo: Option<f64>,
    pub qfi_thermo_std: Option<f64>,
    pub qfi_oracle: Option<f64>,
    pub qfi_oracle_std: Option<f64>,
    pub precision_finite: Option<f64>,
    pub precision_finite_std: Option<f64>,
    pub precision_thermo: Option<f64>,
    pub precision_thermo_std: Option<f64>,
    pub coherence: Option<f64>,
    pub coherence_std: Option<f64>,
}

impl SweepRow {
    pub fn get(&self, q: Quantity) -> Option<f64> {
        match q {
            Quantity::QfiClosed => self.qfi_closed,
            Quantity::QfiThermo => self.qfi_thermo,
            Quantity::QfiOracle => self.qfi_oracle,
            Quantity::PrecisionFinite => self.precision_finite,
            Quantity::PrecisionThermo => self.precision_thermo,
            Quantity::Coherence => self.coherence,
        }
    }

    fn set(&mut self, q: Quantity, v: f64) {
        match q {
            Quantity::QfiClosed => self.qfi_closed = Some(v),
            Quantity::QfiThermo => self.qfi_thermo = Some(v),
            Quantity::QfiOracle => self.qfi_oracle = Some(v),
            Quantity::PrecisionFinite => self.precision_finite = Some(v),
            Quantity::PrecisionThermo => self.precision_thermo = Some(v),
            Quantity::Coherence => self.coherence = Some(v),
        }
    }

    fn set_std(&mut self, q: Quantity, v: f64) {
        match q {
            Quantity::QfiClosed => self.qfi_closed_std = Some(v),
            Quantity::QfiThermo => self.qfi_thermo_std = Some(v),
            Quantity::QfiOracle => self.qfi_oracle_std = Some(v),
            Quantity::PrecisionFinite => self.precision_finite_std = Some(v),
            Quantity::PrecisionThermo => self.precision_thermo_std = Some(v),
            Quantity::Coherence => self.coherence_std = Some(v),
        }
    }
}

/// Counter-based seed mix (splitmix64 finalizer), so any realization is
/// reproducible in isolation from `(master_seed, index)`.
pub fn derive_seed(master_seed: u64, realization_index: u64) -> u64 {
    let mut z = master_seed.wrapping_add(
        realization_index
            .wrapping_add(1)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Cell {
    t: f64,
    f_requested: f64,
    frag: usize,
    theta: f64,
    q: f64,
}

fn evaluate_quantity(
    quantity: Quantity,
    cell: &Cell,
    couplings: &CouplingSet,
    config: &SweepConfig,
) -> Result<f64> {
    let j2 = config.ensemble.second_moment();
    let f_actual = cell.frag as f64 / config.n_env as f64;
    let value = match quantity {
        Quantity::QfiClosed => {
            let p = ModelPoint::new(cell.theta, cell.t, couplings, cell.frag)?;
            qfi_closed_form(&p).value
        }
        Quantity::QfiThermo => {
            if cell.frag == 0 {
                0.0
            } else {
                qfi_thermodynamic(cell.t, f_actual, j2)?.value
            }
        }
        Quantity::QfiOracle => {
            if cell.frag == 0 {
                0.0
            } else {
                oracle::oracle_qfi(cell.theta, cell.t, couplings, cell.frag)?.value
            }
        }
        Quantity::PrecisionFinite => {
            let p = ModelPoint::new(cell.theta, cell.t, couplings, cell.frag)?;
            precision_finite(&p, &ObservableSpec::new(cell.q)?).precision
        }
        Quantity::PrecisionThermo => {
            if cell.frag == 0 {
                0.0
            } else {
                let spec = ObservableSpec::new(cell.q)?;
                precision_thermodynamic(cell.theta, cell.t, f_actual, config.ensemble.jmean, &spec)?
                    .precision
            }
        }
        Quantity::Coherence => coherence_factor(cell.t, couplings),
    };
    Ok(value)
}

fn tau_f_marker(frag: usize, n_env: usize, j2: f64) -> Option<f64> {
    (frag > 0 && j2 > 0.0).then(|| {
        let f = frag as f64 / n_env as f64;
        1.0 / (2.0 * (f * j2).sqrt())
    })
}

/// Run a sweep: every grid cell evaluated for every realization, rows in
/// lexicographic order over (t, fragment, θ, q, realization), aggregate rows
/// (mean and population standard deviation, realization = -1) appended in
/// the same cell order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let j2 = config.ensemble.second_moment();
    let sqrt_n = (config.n_env as f64).sqrt();

    let seeds: Vec<u64> = (0..config.realizations)
        .map(|i| derive_seed(config.master_seed, i as u64))
        .collect();
    let coupling_sets: Vec<CouplingSet> = seeds
        .iter()
        .map(|&s| sample_couplings(&config.ensemble, config.n_env, s))
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for &t in &config.grid.t.values() {
        for &(f_requested, frag) in &config.fragment_axis() {
            for &theta in &config.grid.theta {
                for &q in &config.grid.q {
                    cells.push(Cell {
                        t,
                        f_requested,
                        frag,
                        theta,
                        q,
                    });
                }
            }
        }
    }

    let work: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.realizations).map(move |r| (c, r)))
        .collect();

    let rows: Vec<SweepRow> = work
        .par_iter()
        .map(|&(ci, ri)| -> Result<SweepRow> {
            let cell = &cells[ci];
            let mut row = SweepRow {
                n_env: config.n_env,
                t: cell.t,
                f: cell.f_requested,
                frag: cell.frag,
                theta: cell.theta,
                q: cell.q,
                realization: ri as i64,
                seed: Some(seeds[ri]),
                tau_f: tau_f_marker(cell.frag, config.n_env, j2),
                sqrt_n,
                ..SweepRow::default()
            };
            for &quantity in &config.quantities {
                row.set(
                    quantity,
                    evaluate_quantity(quantity, cell, &coupling_sets[ri], config)?,
                );
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut out = rows;
    let aggregates: Vec<SweepRow> = (0..cells.len())
        .map(|ci| {
            let cell = &cells[ci];
            let members = &out[ci * config.realizations..(ci + 1) * config.realizations];
            let mut agg = SweepRow {
                n_env: config.n_env,
                t: cell.t,
                f: cell.f_requested,
                frag: cell.frag,
                theta: cell.theta,
                q: cell.q,
                realization: -1,
                seed: None,
                tau_f: tau_f_marker(cell.frag, config.n_env, j2),
                sqrt_n,
                ..SweepRow::default()
            };
            for &quantity in &config.quantities {
                let vals: Vec<f64> = members.iter().filter_map(|r| r.get(quantity)).collect();
                let n = vals.len() as f64;
                let mean = vals.iter().sum::<f64>() / n;
                let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                agg.set(quantity, mean);
                agg.set_std(quantity, var.sqrt());
            }
            agg
        })
        .collect();
    out.extend(aggregates);
    Ok(out)
}

/// Thermodynamic-limit curves behind the QFI-versus-S_y comparison: the QFI
/// `4[1 - e^{-t²}]` and, per ratio r = τ_Y/τ_F, the S_y precision
/// `4/(1 + (r/t)²)`, on a t/τ_F grid over [0, 5] with τ_F = 1.
///
/// Realized through the standard thermodynamic evaluators at f = 1/4,
/// ⟨J²⟩ = ⟨J⟩² = 1 and sin2θ = 1/r, so the emitted rows stay consistent with
/// every invariant of the sweep schema. Ratios below 1 are rejected
/// (τ_F ≤ τ_Y always).
pub fn fig1b_curves(tau_ratios: &[f64]) -> Result<Vec<SweepRow>> {
    const F: f64 = 0.25;
    const J2: f64 = 1.0;
    const JMEAN: f64 = 1.0;
    const POINTS: usize = 200;

    let mut rows = Vec::new();
    for &ratio in tau_ratios {
        if !(ratio >= 1.0) {
            return Err(Error::Domain {
                parameter: "tau_ratio",
                value: ratio,
                constraint: "must be >= 1 (tau_F <= tau_Y always)",
            });
        }
        let theta = (1.0 / ratio).asin() / 2.0;
        for i in 0..POINTS {
            let t = 5.0 * i as f64 / (POINTS - 1) as f64;
            let qfi = qfi_thermodynamic(t, F, J2)?.value;
            let spec = ObservableSpec::s_y();
            let prec = precision_thermodynamic(theta, t, F, JMEAN, &spec)?.precision;
            let mut row = SweepRow {
                n_env: 0,
                t,
                f: F,
                frag: 0,
                theta,
                q: 0.0,
                realization: 0,
                seed: None,
                tau_f: Some(1.0),
                sqrt_n: 0.0,
                ..SweepRow::default()
            };
            row.set(Quantity::QfiThermo, qfi);
            row.set(Quantity::PrecisionThermo, prec);
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Named experiment presets reproducing the reference figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Thermodynamic QFI against S_y precision for τ_Y/τ_F ∈ {1, 2, 5}.
    Fig1b,
    /// Disorder-averaged QFI and precision over time, N ∈ {25, 50}, f = 0.2.
    Fig2,
    /// QFI heatmap over (f, t) at N = 30, single realization plus the
    /// thermodynamic surface, with τ_F(f) and √N marker columns.
    Fig3Heatmap,
    /// Redundancy plateau: QFI and precision against f at N = 30, t = 3,
    /// 2000 realizations, mean ± std.
    Plateau,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig1b => "fig1b",
            Preset::Fig2 => "fig2",
            Preset::Fig3Heatmap => "fig3-heatmap",
            Preset::Plateau => "plateau",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1b" => Ok(Preset::Fig1b),
            "fig2" => Ok(Preset::Fig2),
            "fig3-heatmap" => Ok(Preset::Fig3Heatmap),
            "plateau" => Ok(Preset::Plateau),
            other => Err(Error::config(format!(
                "unknown preset '{other}' (expected fig1b, fig2, fig3-heatmap or plateau)"
            ))),
        }
    }
}

fn reference_ensemble() -> GaussianCouplingSpec {
    GaussianCouplingSpec {
        jmean: 0.5,
        jstd: 0.5,
    }
}

/// Sweep configurations behind a preset (fig2 spans two environment sizes,
/// hence possibly several configs). Fig1b is grid-free and returns none.
pub fn preset_configs(preset: Preset, master_seed: u64) -> Vec<SweepConfig> {
    let quarter_pi = std::f64::consts::FRAC_PI_4;
    match preset {
        Preset::Fig1b => Vec::new(),
        Preset::Fig2 => [25usize, 50]
            .iter()
            .map(|&n| SweepConfig {
                n_env: n,
                realizations: 10,
                master_seed,
                ensemble: reference_ensemble(),
                grid: GridSpec {
                    t: AxisSpec::Range {
                        start: 0.0,
                        stop: 10.0,
                        points: 200,
                    },
                    f: Some(vec![0.2]),
                    frag: None,
                    theta: vec![quarter_pi],
                    q: vec![0.0],
                },
                quantities: vec![
                    Quantity::QfiClosed,
                    Quantity::QfiThermo,
                    Quantity::PrecisionFinite,
                    Quantity::PrecisionThermo,
                ],
                output: OutputSpec::default(),
            })
            .collect(),
        Preset::Fig3Heatmap => vec![SweepConfig {
            n_env: 30,
            realizations: 1,
            master_seed,
            ensemble: reference_ensemble(),
            grid: GridSpec {
                t: AxisSpec::Range {
                    start: 0.0,
                    stop: 10.0,
                    points: 200,
                },
                f: None,
                frag: Some((0..=30).collect()),
                theta: vec![quarter_pi],
                q: vec![0.0],
            },
            quantities: vec![Quantity::QfiClosed, Quantity::QfiThermo],
            output: OutputSpec::default(),
        }],
        Preset::Plateau => vec![SweepConfig {
            n_env: 30,
            realizations: 2000,
            master_seed,
            ensemble: reference_ensemble(),
            grid: GridSpec {
                t: AxisSpec::List(vec![3.0]),
                f: None,
                frag: Some((0..=30).collect()),
                theta: vec![quarter_pi],
                q: vec![0.0],
            },
            quantities: vec![
                Quantity::QfiClosed,
                Quantity::QfiThermo,
                Quantity::PrecisionFinite,
                Quantity::PrecisionThermo,
            ],
            output: OutputSpec::default(),
        }],
    }
}

/// Run a preset and return its rows.
pub fn run_preset(preset: Preset, master_seed: u64) -> Result<Vec<SweepRow>> {
    match preset {
        Preset::Fig1b => fig1b_curves(&[1.0, 2.0, 5.0]),
        _ => {
            let mut rows = Vec::new();
            for config in preset_configs(preset, master_seed) {
                rows.extend(run_sweep(&config)?);
            }
            Ok(rows)
        }
    }
}

/// Write rows as CSV: header row, UTF-8, '.' decimal separator, columns in
/// schema order. Empty cells stand for quantities that were not requested
/// (or std columns on non-aggregate rows).
pub fn write_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::config(format!("csv write: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Write rows as a JSON array of objects with the same field names as the
/// CSV columns.
pub fn write_json<W: Write>(rows: &[SweepRow], mut writer: W) -> Result<()> {
    let text = serde_json::to_string_pretty(rows)
        .map_err(|e| Error::config(format!("json write: {e}")))?;
    writer.write_all(text.as_bytes())?;
    writer.write_all(b"\n")?;
    Ok(())
}

/// Serialize rows to bytes in the requested format (used for byte-level
/// determinism checks as well as by the CLI).
pub fn render(rows: &[SweepRow], format: OutputFormat) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        OutputFormat::Csv => write_csv(rows, &mut buf)?,
        OutputFormat::Json => write_json(rows, &mut buf)?,
    }
    Ok(buf)
}
