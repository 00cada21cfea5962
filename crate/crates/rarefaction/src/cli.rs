//! Config files and the batch drivers behind the command-line tool.
//!
//! A config is a TOML document with optional sections; every key has a default,
//! unknown keys are rejected. Each driver writes its files into an output
//! directory together with `config.toml`, the fully resolved config, so a run can
//! be repeated bit for bit.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::acoustic_geometry::{trace_front, FanAcoustical, FrontGraph, IntegrationOptions};
use crate::data_construction::{self as dc, AnsatzReport};
use crate::error::{Error, Result};
use crate::gas_model::{GasLaw, PrimitiveState};
use crate::relative_entropy::{self as re, RelEntropyReport};
use crate::riemann1d::{self, WaveFan};
use crate::solver2d::{self, Perturbation, RunConfig, SchemeOrder};

/// Environment variable overriding the output directory of the config file.
pub const OUTPUT_DIR_ENV: &str = "OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GasSection {
    pub gamma: f64,
    pub k0: f64,
}

impl Default for GasSection {
    fn default() -> Self {
        Self { gamma: 2.0, k0: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub rho: f64,
    pub v1: f64,
    #[serde(default)]
    pub v2: f64,
}

impl StateSection {
    fn state(&self, side: &str) -> Result<PrimitiveState> {
        if !(self.rho > 0.0 && self.rho.is_finite()) || !self.v1.is_finite() || !self.v2.is_finite() {
            return Err(Error::Config(format!("[{side}] needs rho > 0 and finite velocities")));
        }
        Ok(PrimitiveState::new(self.rho, self.v1, self.v2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub nx1: usize,
    pub nx2: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub order: SchemeOrder,
    pub half_width: Option<f64>,
    pub allow_any_region: bool,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { nx1: 200, nx2: 16, cfl: 0.45, t_end: 0.5, order: SchemeOrder::First, half_width: None, allow_any_region: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PerturbationSection {
    pub epsilon: f64,
    pub width: f64,
    pub seed: u64,
}

impl Default for PerturbationSection {
    fn default() -> Self {
        Self { epsilon: 0.0, width: 0.5, seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<String>,
    /// Slice times for simulate2d (t_end is always written).
    pub times: Vec<f64>,
    /// solve1d: time of the sampled profile, none for no profile.
    pub profile_t: Option<f64>,
    pub profile_points: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: None, times: vec![0.1, 0.25], profile_t: None, profile_points: 401 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub delta: f64,
    pub order: usize,
    pub n_theta: usize,
    pub c0: f64,
    /// Levels in the slice dump.
    pub n_u: usize,
}

impl Default for DataSection {
    fn default() -> Self {
        Self { delta: 0.05, order: 4, n_theta: 32, c0: dc::DEFAULT_C0, n_u: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrontBackground {
    /// Exact front fan of the right state.
    Fan,
    /// Constant right state in acoustical coordinates centred at the origin.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrontSeed {
    /// f ≡ u0.
    Constant,
    /// H₀ from the two traces.
    H0,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrontsSection {
    pub background: FrontBackground,
    pub seed_curve: FrontSeed,
    pub u0: f64,
    pub n_rays: usize,
    pub t_end: f64,
    pub tol: f64,
}

impl Default for FrontsSection {
    fn default() -> Self {
        Self { background: FrontBackground::Fan, seed_curve: FrontSeed::Constant, u0: 0.3, n_rays: 16, t_end: 0.5, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyReference {
    /// Compare the run with itself.
    #[serde(rename = "self")]
    SelfRun,
    /// Compare with a finer run projected onto the run's grid.
    Fine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntropySection {
    pub reference: EntropyReference,
    /// Refinement factor of the fine reference.
    pub refine: usize,
}

impl Default for EntropySection {
    fn default() -> Self {
        Self { reference: EntropyReference::SelfRun, refine: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub gas: GasSection,
    pub left: StateSection,
    pub right: StateSection,
    pub grid: GridSection,
    pub perturbation: PerturbationSection,
    pub output: OutputSection,
    pub data: DataSection,
    pub fronts: FrontsSection,
    pub entropy: EntropySection,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            gas: GasSection::default(),
            left: StateSection { rho: 1.0, v1: -0.5, v2: 0.0 },
            right: StateSection { rho: 1.0, v1: 0.5, v2: 0.0 },
            grid: GridSection::default(),
            perturbation: PerturbationSection::default(),
            output: OutputSection::default(),
            data: DataSection::default(),
            fronts: FrontsSection::default(),
            entropy: EntropySection::default(),
        }
    }
}

pub fn parse_config(text: &str) -> Result<Config> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

impl Config {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn law(&self) -> Result<GasLaw> {
        GasLaw::new(self.gas.gamma, self.gas.k0).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn states(&self) -> Result<(PrimitiveState, PrimitiveState)> {
        Ok((self.left.state("left")?, self.right.state("right")?))
    }

    pub fn perturbation(&self) -> Result<Perturbation> {
        let p = &self.perturbation;
        if !(p.epsilon >= 0.0) || !(p.width > 0.0) {
            return Err(Error::Config("[perturbation] needs epsilon ≥ 0 and width > 0".into()));
        }
        Ok(Perturbation::seeded(p.epsilon, p.width, p.seed))
    }

    pub fn run_config(&self) -> Result<RunConfig> {
        let (l, r) = self.states()?;
        let g = &self.grid;
        if g.nx1 < 16 || g.nx2 == 0 {
            return Err(Error::Config("[grid] needs nx1 ≥ 16 and nx2 ≥ 1".into()));
        }
        let mut rc = RunConfig::region_iv(self.law()?, l, r, g.nx1, g.nx2, g.t_end);
        rc.perturbation = self.perturbation()?;
        rc.cfl = g.cfl;
        rc.order = g.order;
        rc.half_width = g.half_width;
        rc.allow_any_region = g.allow_any_region;
        rc.output_times = self.output.times.clone();
        rc.validate()?;
        Ok(rc)
    }
}

/// `--out` beats `OUTPUT_DIR`, which beats `[output] dir`; the fallback is `./out`.
pub fn output_dir(cli_out: Option<&Path>, cfg: &Config) -> PathBuf {
    if let Some(p) = cli_out {
        return p.to_path_buf();
    }
    if let Ok(p) = std::env::var(OUTPUT_DIR_ENV) {
        if !p.is_empty() {
            return PathBuf::from(p);
        }
    }
    PathBuf::from(cfg.output.dir.clone().unwrap_or_else(|| "out".into()))
}

fn prepare(out: &Path, cfg: &Config) -> Result<()> {
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("config.toml"), cfg.to_toml())?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// solve1d

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FanReport {
    pub region: String,
    pub left: PrimitiveState,
    pub middle: PrimitiveState,
    pub right: PrimitiveState,
    pub waves: [WaveSummary; 2],
    /// [C̄₀, H̄, H, C₀] speeds.
    pub speeds: [f64; 4],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveSummary {
    pub kind: String,
    pub left_speed: f64,
    pub right_speed: f64,
    /// |ρ_after − ρ_before|.
    pub strength: f64,
}

impl FanReport {
    pub fn of(fan: &WaveFan) -> Self {
        let w = |wv: &riemann1d::Wave, a: &PrimitiveState, b: &PrimitiveState| WaveSummary {
            kind: format!("{:?}", wv.kind),
            left_speed: wv.left_speed,
            right_speed: wv.right_speed,
            strength: (b.rho - a.rho).abs(),
        };
        Self {
            region: fan.region.label().to_string(),
            left: fan.left,
            middle: fan.middle,
            right: fan.right,
            waves: [w(&fan.wave1, &fan.left, &fan.middle), w(&fan.wave2, &fan.middle, &fan.right)],
            speeds: fan.speeds(),
        }
    }
}

/// Profile of the fan at time t on [−X, X] with X = 1.2·max|speed|·t: columns x1,rho,v1,v2.
pub fn fan_profile_csv(fan: &WaveFan, t: f64, n: usize) -> Result<String> {
    if !(t > 0.0) || n < 2 {
        return Err(Error::Config("profile needs t > 0 and at least 2 points".into()));
    }
    let s = fan.speeds().iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-3);
    let x_max = 1.2 * s * t;
    let mut out = String::from("x1,rho,v1,v2\n");
    for i in 0..n {
        let x = -x_max + 2.0 * x_max * i as f64 / (n - 1) as f64;
        let p = fan.sample(x / t);
        let _ = writeln!(out, "{},{},{},{}", x, p.rho, p.v1, p.v2);
    }
    Ok(out)
}

pub fn run_solve1d(cfg: &Config, out: &Path) -> Result<FanReport> {
    let law = cfg.law()?;
    let (l, r) = cfg.states()?;
    let fan = riemann1d::solve(&law, &l, &r)?;
    let rep = FanReport::of(&fan);
    prepare(out, cfg)?;
    write_json(&out.join("fan.json"), &rep)?;
    if let Some(t) = cfg.output.profile_t {
        std::fs::write(out.join("profile.csv"), fan_profile_csv(&fan, t, cfg.output.profile_points)?)?;
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// simulate2d

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub steps: usize,
    pub slice_times: Vec<f64>,
    pub mass_drift: f64,
    pub failure: Option<String>,
    /// Time of the last completed slice when the run aborted.
    pub failure_time: Option<f64>,
    pub min_rho: f64,
    pub max_plane_asymmetry: f64,
    pub max_vorticity: f64,
    /// L¹ distance of the final slice from the exact plane fan.
    pub l1_error_vs_fan: f64,
    pub fronts_separated: Option<bool>,
    pub fronts_monotone: Option<bool>,
    pub fronts_error: Option<String>,
    pub diagnostics: Vec<solver2d::SliceDiagnostics>,
}

fn gnuplot_script(last_slice: &str) -> String {
    format!(
        "# gnuplot script: front loci and the final density slice\n\
         set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set key top left\n\
         set output 'fronts.png'\n\
         set xlabel 't'\n\
         set ylabel 'x1'\n\
         plot 'fronts.csv' skip 1 using 1:3 with points title 'Cbar0', \\\n\
         \x20    '' skip 1 using 1:4 with points title 'Hbar', \\\n\
         \x20    '' skip 1 using 1:5 with points title 'H', \\\n\
         \x20    '' skip 1 using 1:6 with points title 'C0'\n\
         set output 'density.png'\n\
         set xlabel 'x1'\n\
         set ylabel 'x2'\n\
         set view map\n\
         splot '{last_slice}' skip 1 using 1:2:3 with points palette pointtype 5 pointsize 0.5 title 'rho'\n"
    )
}

pub fn run_simulate2d(cfg: &Config, out: &Path) -> Result<SimulationSummary> {
    let rc = cfg.run_config()?;
    let law = rc.law;
    let art = solver2d::run(&rc)?;
    prepare(out, cfg)?;
    let mut names = vec![];
    for f in &art.slices {
        let p = f.write_csv(out)?;
        names.push(p.file_name().unwrap().to_string_lossy().into_owned());
    }
    let last = art.slices.last().unwrap();
    let fan = riemann1d::solve(&law, &rc.left, &rc.right)?;
    let (mut sep, mut mono, mut ferr) = (None, None, None);
    match solver2d::extract_fronts(&law, &art.slices) {
        Ok(fs) => {
            std::fs::write(out.join("fronts.csv"), fs.to_csv())?;
            sep = Some(fs.slices.iter().skip(1).all(|s| s.separated));
            mono = Some(fs.monotone);
        }
        Err(e) => ferr = Some(e.to_string()),
    }
    match re::weak_strong_compare(&law, &art.slices, &art.slices) {
        Ok(rep) => write_json(&out.join("entropy.json"), &rep)?,
        Err(e) => write_json(&out.join("entropy.json"), &serde_json::json!({ "error": e.to_string() }))?,
    }
    std::fs::write(out.join("plot.gp"), gnuplot_script(names.last().unwrap()))?;
    let summary = SimulationSummary {
        steps: art.steps,
        slice_times: art.slices.iter().map(|f| f.t).collect(),
        mass_drift: art.mass_drift,
        failure_time: art.failure.as_ref().map(|_| last.t),
        failure: art.failure.clone(),
        min_rho: art.diagnostics.iter().fold(f64::INFINITY, |m, d| m.min(d.min_rho)),
        max_plane_asymmetry: art.diagnostics.iter().fold(0.0, |m, d| m.max(d.max_plane_asymmetry)),
        max_vorticity: art.diagnostics.iter().fold(0.0, |m, d| m.max(d.max_vorticity)),
        l1_error_vs_fan: solver2d::l1_error_vs_fan(last, &fan),
        fronts_separated: sep,
        fronts_monotone: mono,
        fronts_error: ferr,
        diagnostics: art.diagnostics,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// build-data

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedCurves {
    pub h0: Option<Vec<f64>>,
    pub h0bar: Option<Vec<f64>>,
    pub errors: Vec<String>,
}

pub fn run_build_data(cfg: &Config, out: &Path) -> Result<AnsatzReport> {
    let law = cfg.law()?;
    let (l, r) = cfg.states()?;
    let pert = cfg.perturbation()?;
    let d = &cfg.data;
    if !(d.delta > 0.0) || d.n_theta < 8 {
        return Err(Error::Config("[data] needs delta > 0 and n_theta ≥ 8".into()));
    }
    if d.order == 0 || d.order > dc::MAX_ORDER {
        return Err(Error::Config(format!("[data] order must be in 1..={}", dc::MAX_ORDER)));
    }
    let sd = dc::construct(&law, &r, &pert, d.delta, d.order, d.n_theta, d.c0)?;
    let rep = dc::verify_ansatz(&law, &sd.taylor, &sd.chart, pert.epsilon)?;
    prepare(out, cfg)?;
    std::fs::write(out.join("slice.csv"), dc::slice_csv(&sd.taylor, &sd.chart, d.n_u)?)?;
    write_json(&out.join("ansatz.json"), &rep)?;
    write_json(&out.join("taylor.json"), &sd.taylor)?;
    let tr = dc::Trace::of_side(&law, &r, &pert, true, d.n_theta)?;
    let tl = dc::Trace::of_side(&law, &l, &pert, false, d.n_theta)?;
    let grid = crate::spectral::grid(d.n_theta);
    let mut seeds = SeedCurves { h0: None, h0bar: None, errors: vec![] };
    match dc::h0(&law, &tr, &tl, sd.chart.u_star) {
        Ok(g) => seeds.h0 = Some(grid.iter().map(|&t| g.f(t)).collect()),
        Err(e) => seeds.errors.push(e.to_string()),
    }
    match dc::h0bar(&law, &tr, &tl, sd.chart.u_star) {
        Ok(g) => seeds.h0bar = Some(grid.iter().map(|&t| g.f(t)).collect()),
        Err(e) => seeds.errors.push(e.to_string()),
    }
    write_json(&out.join("seed_curves.json"), &seeds)?;
    Ok(rep)
}

// ---------------------------------------------------------------------------
// trace-fronts

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontsSummary {
    pub n_rays: usize,
    pub all_reached: bool,
    pub max_hamiltonian_drift: f64,
    /// max |u − f(α)| over every ray point: the distance to the ray surface C_f.
    pub max_u_deviation: f64,
    pub t_end: f64,
}

pub fn run_trace_fronts(cfg: &Config, out: &Path) -> Result<FrontsSummary> {
    let law = cfg.law()?;
    let (l, r) = cfg.states()?;
    let fr = &cfg.fronts;
    let c_r = law.c_of_rho(r.rho);
    let bg = match fr.background {
        FrontBackground::Fan => FanAcoustical::front_fan(&law, r.v1, c_r),
        FrontBackground::Constant => FanAcoustical::centred_constant(r.v1, c_r),
    };
    let graph = match fr.seed_curve {
        FrontSeed::Constant => FrontGraph::constant(fr.u0),
        FrontSeed::H0 => {
            let pert = cfg.perturbation()?;
            let n = cfg.data.n_theta;
            let tr = dc::Trace::of_side(&law, &r, &pert, true, n)?;
            let tl = dc::Trace::of_side(&law, &l, &pert, false, n)?;
            dc::h0(&law, &tr, &tl, dc::u_star(&law, c_r, cfg.data.c0))?
        }
    };
    if !(fr.t_end > 0.0) || !(fr.tol > 0.0) {
        return Err(Error::Config("[fronts] needs t_end > 0 and tol > 0".into()));
    }
    let opts = IntegrationOptions { tol: fr.tol, ..IntegrationOptions::default() };
    let surf = trace_front(&bg, &graph, fr.n_rays, fr.t_end, &opts)?;
    let mut drift = 0.0f64;
    let mut dev = 0.0f64;
    for ray in &surf.rays {
        drift = drift.max(ray.trajectory.hamiltonian_drift());
        let f = graph.f(ray.alpha);
        for p in &ray.trajectory.points {
            dev = dev.max((p.u - f).abs());
        }
    }
    prepare(out, cfg)?;
    std::fs::write(out.join("fronts.csv"), surf.to_csv())?;
    let summary = FrontsSummary {
        n_rays: fr.n_rays,
        all_reached: surf.all_reached(),
        max_hamiltonian_drift: drift,
        max_u_deviation: dev,
        t_end: fr.t_end,
    };
    write_json(&out.join("fronts_summary.json"), &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// verify-entropy

pub fn run_verify_entropy(cfg: &Config, out: &Path) -> Result<RelEntropyReport> {
    let rc = cfg.run_config()?;
    let law = rc.law;
    let a = solver2d::run(&rc)?;
    if let Some(f) = &a.failure {
        return Err(Error::Invalid(format!("run aborted: {f}")));
    }
    let report = match cfg.entropy.reference {
        EntropyReference::SelfRun => re::weak_strong_compare(&law, &a.slices, &a.slices)?,
        EntropyReference::Fine => {
            if cfg.entropy.refine < 2 {
                return Err(Error::Config("[entropy] refine must be ≥ 2".into()));
            }
            let mut fine = rc.clone();
            fine.nx1 *= cfg.entropy.refine;
            fine.nx2 *= cfg.entropy.refine;
            fine.half_width = Some(a.slices[0].grid.half_width);
            let b = solver2d::run(&fine)?;
            if let Some(f) = &b.failure {
                return Err(Error::Invalid(format!("run aborted: {f}")));
            }
            let target = a.slices[0].grid;
            let projected: Vec<_> = b.slices.iter().map(|f| re::project_to(f, target)).collect();
            re::weak_strong_compare(&law, &a.slices, &projected)?
        }
    };
    prepare(out, cfg)?;
    write_json(&out.join("entropy_report.json"), &report)?;
    Ok(report)
}
