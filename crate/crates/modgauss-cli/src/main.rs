//! Command-line driver: simulation, cumulant estimation, distance bounds,
//! sphere meshes, tail probabilities and figure tables.
//!
//! Every subcommand is deterministic given (options, seed); repeated runs
//! produce byte-identical CSV/JSON. Tables go to CSV (header row, '.'
//! decimal, 17 significant digits), scalar reports to single-line JSON on
//! stdout.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fs;
use std::path::PathBuf;

use modgauss::cumulants::{joint_cumulant, SampleSet};
use modgauss::depgraph::{check_mc_hypotheses, McModel};
use modgauss::largedev::{
    cue_sector_density, tail_probability_formula, tilted_mc_tail, LatticeAngularDensity,
    ResidueFunction, SectorRegion, SphericalSector, ToyModel, YLaw,
};
use modgauss::mesh::build_mesh;
use modgauss::models::circle::CircleWalkModel;
use modgauss::models::cue::sample_cue_logdet;
use modgauss::models::er::{ErdosRenyiModel, Motif};
use modgauss::models::lattice::LatticeWalkModel;
use modgauss::models::markov::MarkovModel;
use modgauss::models::sphere::SphereWalkModel;
use modgauss::numeric::spd::SpdMatrix;
use modgauss::numeric::RngStream;
use modgauss::smoothing::distance::{
    convex_distance_lower_bound, convex_distance_upper_bound, delta_box_halfwidth, delta_epsilon,
    gaussian_regularity_constant, ConvexFamily,
};
use modgauss::smoothing::fourier::FourierObject;

#[derive(Parser)]
#[command(name = "modgauss", version, about = "mod-Gaussian simulation and validation toolkit")]
struct Cli {
    /// Worker threads (default: MODGAUSS_THREADS env var, else all cores).
    /// Results are independent of this value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate a joint cumulant from a sample CSV or a simulated model
    Cumulants(CumulantsArgs),
    /// Check the method-of-cumulants hypotheses MC1-MC5 on an n grid
    McCheck(McCheckArgs),
    /// Smoothed Fourier distance and convex-distance bounds, samples vs N(0,K)
    Distance(DistanceArgs),
    /// Hypercubic facet mesh of the radius-b sphere: centers and measures
    Mesh(MeshArgs),
    /// Large-deviation tail formula cross-checked against tilted Monte Carlo
    Tailprob(TailprobArgs),
    /// Draw samples (or trajectories) from one of the example models
    Simulate(SimulateArgs),
    /// Tables of the loss-of-symmetry densities F(r, theta) and H(r, theta)
    Figure(FigureArgs),
}

#[derive(Args)]
struct CumulantsArgs {
    /// Sample CSV (header row, one observation per row)
    #[arg(long, conflicts_with = "model")]
    samples: Option<PathBuf>,
    /// Model to simulate instead of reading a CSV
    #[arg(long, value_enum)]
    model: Option<ModelName>,
    /// Model parameter JSON (see `simulate`)
    #[arg(long)]
    params: Option<PathBuf>,
    /// Number of simulated observations when --model is given
    #[arg(long, default_value_t = 2000)]
    count: u64,
    /// Cumulant order r; must equal the number of indices
    #[arg(long)]
    order: Option<usize>,
    /// Coordinate indices i1,..,ir (0-based, repeats allowed)
    #[arg(long, value_delimiter = ',', required = true)]
    indices: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct McCheckArgs {
    /// Model with closed-form mean/covariance: lattice, circle or markov
    #[arg(long, value_enum)]
    model: ModelName,
    /// Model parameter JSON (see `simulate`)
    #[arg(long)]
    params: Option<PathBuf>,
    /// Grid of sizes: n for lattice/markov, D for the circle walk
    #[arg(long, value_delimiter = ',', default_value = "10,40,160")]
    grid: Vec<u64>,
    /// Cumulant order v of the method
    #[arg(long, default_value_t = 4)]
    v: usize,
    /// Centering tolerance for MC1
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct DistanceArgs {
    /// Sample CSV (header row, one observation per row)
    #[arg(long)]
    samples: PathBuf,
    /// Reference covariance K as JSON (matrix, or {"matrix": [[..]]})
    #[arg(long)]
    gaussian: PathBuf,
    /// Smoothing parameter epsilon
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Convex test families for the lower bound
    #[arg(long, value_delimiter = ',', default_value = "halfspace")]
    families: Vec<FamilyName>,
    /// Gauss-Legendre nodes per axis for the Fourier box integral
    #[arg(long, default_value_t = 16)]
    nodes: usize,
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Subdivisions per cube edge
    #[arg(long, default_value_t = 8)]
    res: usize,
    /// Facet quadrature order for the measures
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TailprobArgs {
    /// toy (formula + tilted MC) or lattice (formula + plain MC)
    #[arg(long, value_enum, default_value_t = ModelName::Toy)]
    model: ModelName,
    /// Model parameter JSON (see `simulate`); defaults baked in otherwise
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value_t = 64.0)]
    tn: f64,
    /// Sector JSON: {"b": .., "kind": "angular"|"facet-cells", "data": ..}
    #[arg(long)]
    sector: Option<PathBuf>,
    /// Mesh resolution for the surface integral
    #[arg(long, default_value_t = 64)]
    res: usize,
    #[arg(long, default_value_t = 1_000_000)]
    mc_samples: u64,
    #[arg(long, default_value_t = 105)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    model: ModelName,
    /// Model parameter JSON; per-model defaults apply when omitted
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit one trajectory (row per step) instead of endpoint samples;
    /// lattice walk only
    #[arg(long, default_value_t = false)]
    trajectory: bool,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FigureArgs {
    /// H: CUE sector density ratio; F: lattice angular density
    #[arg(long, value_enum)]
    which: Which,
    #[arg(long, default_value_t = 0.8)]
    r: f64,
    /// Number of theta intervals on [0, pi]
    #[arg(long, default_value_t = 100)]
    grid: usize,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelName {
    Lattice,
    Circle,
    Sphere,
    Cue,
    Er,
    Markov,
    Toy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    #[value(alias = "F")]
    F,
    #[value(alias = "H")]
    H,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Halfspace,
    Ball,
    Box,
}

/// Parameter payloads for `--params`. Unknown fields are rejected so typos
/// surface instead of silently taking defaults.
#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ModelParams {
    #[serde(default)]
    d: Option<usize>,
    #[serde(default)]
    n: Option<u64>,
    #[serde(default, rename = "N")]
    n_big: Option<usize>,
    #[serde(default, rename = "D")]
    d_big: Option<usize>,
    #[serde(default)]
    lambda: Option<f64>,
    #[serde(default)]
    substeps: Option<usize>,
    #[serde(default)]
    p: Option<f64>,
    #[serde(default)]
    motifs: Option<Vec<MotifSpec>>,
    /// Markov transition matrix, row-stochastic
    #[serde(default, rename = "P")]
    transition: Option<Vec<Vec<f64>>>,
    /// Toy model: half-width of the uniform-cube perturbation
    #[serde(default)]
    half: Option<f64>,
}

#[derive(Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum MotifSpec {
    Named(String),
    Explicit { k: usize, edges: Vec<(usize, usize)> },
}

#[derive(Deserialize)]
struct SectorSpec {
    b: f64,
    kind: String,
    data: serde_json::Value,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("MODGAUSS_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .ok();
    match cli.cmd {
        Cmd::Cumulants(a) => cmd_cumulants(a),
        Cmd::McCheck(a) => cmd_mc_check(a),
        Cmd::Distance(a) => cmd_distance(a),
        Cmd::Mesh(a) => cmd_mesh(a),
        Cmd::Tailprob(a) => cmd_tailprob(a),
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Figure(a) => cmd_figure(a),
    }
}

fn load_params(path: &Option<PathBuf>) -> Result<ModelParams> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?)
        }
        None => Ok(serde_json::from_str("{}").unwrap()),
    }
}

fn read_sample_csv(path: &PathBuf) -> Result<SampleSet> {
    let mut rdr = csv::Reader::from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let dim = rdr.headers()?.len();
    let mut data = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != dim {
            bail!("ragged CSV row: {} fields, header has {}", rec.len(), dim);
        }
        for f in rec.iter() {
            data.push(f.trim().parse::<f64>().with_context(|| format!("bad number {f:?}"))?);
        }
    }
    if data.is_empty() {
        bail!("empty sample CSV");
    }
    Ok(SampleSet::new(dim, data))
}

fn motif_from_spec(spec: &MotifSpec, k: usize) -> Result<Motif> {
    match spec {
        MotifSpec::Named(name) => match name.as_str() {
            "edge" => Ok(Motif::edge_padded(k)),
            "triangle" => Ok(Motif::triangle_padded(k)),
            other => bail!("unknown motif name {other:?} (use edge, triangle, or {{k, edges}})"),
        },
        MotifSpec::Explicit { k, edges } => Ok(Motif::new(*k, edges.clone())?),
    }
}

fn check_circle_regime(m: &CircleWalkModel) {
    if !m.regime_ok() {
        eprintln!(
            "warning: circle walk outside the N^(1/3) = O(D) regime; \
             the limit covariance may be a poor description"
        );
    }
}

/// Draw `count` observations from a model as flat rows. Returns (dim,
/// column names, data).
fn simulate_rows(
    model: ModelName,
    p: &ModelParams,
    count: u64,
    seed: u64,
) -> Result<(usize, Vec<String>, Vec<f64>)> {
    let mut rng = RngStream::new(seed, 0).rng();
    let mut data = Vec::new();
    let (dim, cols) = match model {
        ModelName::Lattice => {
            let m = LatticeWalkModel::new(p.d.unwrap_or(2), p.n.unwrap_or(1024))?;
            for _ in 0..count {
                data.extend(m.sample_endpoint(&mut rng).iter().map(|&v| v as f64));
            }
            let d = p.d.unwrap_or(2);
            (d, (0..d).map(|i| format!("s{i}")).collect())
        }
        ModelName::Circle => {
            let m = CircleWalkModel::new(
                p.n_big.unwrap_or(2000),
                p.d_big.unwrap_or(50),
                p.lambda.unwrap_or(1.0),
            )?;
            check_circle_regime(&m);
            for _ in 0..count {
                data.extend(m.sample_sum(&mut rng));
            }
            (2, vec!["re".into(), "im".into()])
        }
        ModelName::Sphere => {
            let m = SphereWalkModel::new(
                p.n_big.unwrap_or(30),
                p.d_big.unwrap_or(3),
                p.lambda.unwrap_or(0.5),
                p.substeps.unwrap_or(8),
            )?;
            for _ in 0..count {
                data.extend(m.sample_sum(&mut rng));
            }
            (3, vec!["x".into(), "y".into(), "z".into()])
        }
        ModelName::Cue => {
            let n = p.n.unwrap_or(32) as usize;
            for _ in 0..count {
                data.extend(sample_cue_logdet(n, &mut rng));
            }
            (2, vec!["re".into(), "im".into()])
        }
        ModelName::Er => {
            let specs = p.motifs.clone().unwrap_or(vec![
                MotifSpec::Named("edge".into()),
                MotifSpec::Named("triangle".into()),
            ]);
            let k = specs
                .iter()
                .map(|s| match s {
                    MotifSpec::Named(_) => 3,
                    MotifSpec::Explicit { k, .. } => *k,
                })
                .max()
                .unwrap();
            let motifs: Vec<Motif> = specs
                .iter()
                .map(|s| motif_from_spec(s, k))
                .collect::<Result<_>>()?;
            let dim = motifs.len();
            let m = ErdosRenyiModel::new(p.n.unwrap_or(30) as usize, p.p.unwrap_or(0.3), motifs)?;
            for _ in 0..count {
                data.extend(m.sample_counts(&mut rng));
            }
            (dim, (0..dim).map(|i| format!("motif{i}")).collect())
        }
        ModelName::Markov => {
            let m = markov_from_params(p)?;
            let n = p.n.unwrap_or(512) as usize;
            let dim = m.dim();
            for _ in 0..count {
                data.extend(m.sample_empirical(n, &mut rng));
            }
            (dim, (0..dim).map(|i| format!("state{i}")).collect())
        }
        ModelName::Toy => {
            bail!("the toy model is driven through `tailprob`, not `simulate`")
        }
    };
    Ok((dim, cols, data))
}

fn markov_from_params(p: &ModelParams) -> Result<MarkovModel> {
    let rows = p.transition.clone().unwrap_or(vec![
        vec![0.50, 0.25, 0.25],
        vec![0.20, 0.60, 0.20],
        vec![0.25, 0.25, 0.50],
    ]);
    let s = rows.len();
    let flat: Vec<f64> = rows
        .iter()
        .flat_map(|r| {
            if r.len() != s {
                vec![f64::NAN; s]
            } else {
                r.clone()
            }
        })
        .collect();
    if flat.iter().any(|v| v.is_nan()) {
        bail!("transition matrix P must be square");
    }
    Ok(MarkovModel::new(DMatrix::from_row_slice(s, s, &flat))?)
}

fn write_csv(out: &Option<PathBuf>, header: &[String], rows: &[Vec<f64>]) -> Result<usize> {
    let mut buf = String::new();
    buf.push_str(&header.join(","));
    buf.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        buf.push_str(&line.join(","));
        buf.push('\n');
    }
    match out {
        Some(p) => fs::write(p, &buf).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{buf}"),
    }
    Ok(rows.len())
}

fn cmd_cumulants(a: CumulantsArgs) -> Result<()> {
    if let Some(r) = a.order {
        if r != a.indices.len() {
            bail!("--order {} disagrees with {} indices", r, a.indices.len());
        }
    }
    let set = match (&a.samples, a.model) {
        (Some(path), None) => read_sample_csv(path)?,
        (None, Some(model)) => {
            let p = load_params(&a.params)?;
            let (dim, _, data) = simulate_rows(model, &p, a.count, a.seed)?;
            SampleSet::new(dim, data)
        }
        _ => bail!("give exactly one of --samples or --model"),
    };
    if let Some(&bad) = a.indices.iter().find(|&&i| i >= set.dim) {
        bail!("index {bad} out of range for dimension {}", set.dim);
    }
    // plug-in moment estimate; bias is O(1/n) and not corrected
    let estimate = joint_cumulant(&set, &a.indices);
    println!(
        "{}",
        json!({"indices": a.indices, "estimate": estimate, "n": set.len(), "estimator": "plug-in"})
    );
    Ok(())
}

fn cmd_mc_check(a: McCheckArgs) -> Result<()> {
    if a.grid.len() < 3 {
        bail!("--grid needs at least 3 points");
    }
    let p = load_params(&a.params)?;
    let grid = a.grid.clone();
    let report = match a.model {
        ModelName::Lattice => {
            let d = p.d.unwrap_or(2);
            let probe = LatticeWalkModel::new(d, grid[0])?;
            let (_, _, _, _, k) = probe.mc_params();
            let model = McModel {
                name: "lattice".into(),
                v: a.v,
                k,
                n_grid: grid,
                params: Box::new(|n| (n as f64, 1.0, 1.0)),
                mean: Box::new(move |_| nalgebra::DVector::zeros(d)),
                cov: Box::new(move |n| DMatrix::identity(d, d) * (n as f64 / d as f64)),
                order_v_tensor: Some(Box::new(move |n| {
                    LatticeWalkModel::new(d, n).unwrap().cumulant_tensor(4)
                })),
            };
            check_mc_hypotheses(&model, a.tol)?
        }
        ModelName::Circle => {
            let lambda = p.lambda.unwrap_or(1.0);
            // fixed N when given; N = D^2 along the grid otherwise, so the
            // sparsity ratio D/N actually decreases
            let fixed_n = p.n_big;
            let n_of = move |d_big: usize| fixed_n.unwrap_or(d_big * d_big);
            for &d_big in &grid {
                check_circle_regime(&CircleWalkModel::new(
                    n_of(d_big as usize),
                    d_big as usize,
                    lambda,
                )?);
            }
            let k = modgauss::models::circle::limit_k(lambda);
            let model = McModel {
                name: "circle".into(),
                v: a.v,
                k,
                n_grid: grid,
                params: Box::new(move |d_big| {
                    let m =
                        CircleWalkModel::new(n_of(d_big as usize), d_big as usize, lambda).unwrap();
                    let (n, d) = m.graph_params();
                    (n, d, 1.0)
                }),
                mean: Box::new(|_| nalgebra::DVector::zeros(2)),
                cov: Box::new(move |d_big| {
                    CircleWalkModel::new(n_of(d_big as usize), d_big as usize, lambda)
                        .unwrap()
                        .exact_covariance()
                }),
                order_v_tensor: None,
            };
            check_mc_hypotheses(&model, a.tol)?
        }
        ModelName::Markov => {
            let m = markov_from_params(&p)?;
            let s = m.dim();
            let k = SpdMatrix::new(m.markov_k())?;
            let m2 = markov_from_params(&p)?;
            let model = McModel {
                name: "markov".into(),
                v: a.v,
                k,
                n_grid: grid,
                params: Box::new(|n| (n as f64, 1.0, 1.0)),
                mean: Box::new(move |_| nalgebra::DVector::zeros(s)),
                cov: Box::new(move |n| m2.exact_cov(n as usize)),
                order_v_tensor: None,
            };
            check_mc_hypotheses(&model, a.tol)?
        }
        _ => bail!("mc-check supports lattice, circle, markov"),
    };
    let pass = report.mc1_pass
        && report.mc3_pass
        && report.mc4_pass
        && report.mc5_pass.unwrap_or(true);
    println!(
        "{}",
        json!({
            "mc1_max_mean": report.mc1_max_mean,
            "mc1_pass": report.mc1_pass,
            "mc2_defects": report.mc2_defects,
            "mc2_exponent": report.mc2_exponent,
            "mc3_ratios": report.mc3_ratios,
            "mc3_pass": report.mc3_pass,
            "mc4_sup_a": report.mc4_sup_a,
            "mc4_pass": report.mc4_pass,
            "mc5_drift": report.mc5_drift,
            "mc5_pass": report.mc5_pass,
            "pass": pass,
        })
    );
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum KJson {
    Bare(Vec<Vec<f64>>),
    Wrapped { matrix: Vec<Vec<f64>> },
}

fn cmd_distance(a: DistanceArgs) -> Result<()> {
    let set = read_sample_csv(&a.samples)?;
    let d = set.dim;
    let text = fs::read_to_string(&a.gaussian)
        .with_context(|| format!("reading {}", a.gaussian.display()))?;
    let rows = match serde_json::from_str::<KJson>(&text)
        .with_context(|| format!("parsing {}", a.gaussian.display()))?
    {
        KJson::Bare(m) => m,
        KJson::Wrapped { matrix } => matrix,
    };
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        bail!("K must be {d}x{d} to match the samples");
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    let k = SpdMatrix::new(DMatrix::from_row_slice(d, d, &flat))?;
    let set = std::sync::Arc::new(set);
    let emp = FourierObject::Empirical(set.clone());
    let gauss = FourierObject::gaussian(k.clone(), d + 1);
    let delta = delta_epsilon(&emp, &gauss, a.eps, d, a.nodes)?;
    let constant = gaussian_regularity_constant(&k);
    let upper = convex_distance_upper_bound(delta, constant, a.eps, d).ok();
    let mut lower: f64 = 0.0;
    for fam in &a.families {
        let family = match fam {
            FamilyName::Halfspace => ConvexFamily::default_halfspaces(d),
            FamilyName::Ball => ConvexFamily::default_balls(d),
            FamilyName::Box => ConvexFamily::default_boxes(),
        };
        lower = lower.max(convex_distance_lower_bound(&set, &k, &family)?);
    }
    println!(
        "{}",
        json!({
            "lower_bound": lower,
            "delta_eps": delta,
            "upper_bound": upper,
            "R": delta_box_halfwidth(d, a.eps),
            "constant": constant,
            "eps": a.eps,
            "n": set.len(),
        })
    );
    Ok(())
}

fn cmd_mesh(a: MeshArgs) -> Result<()> {
    let mesh = build_mesh(a.dim, a.radius, a.res)?;
    let mut header: Vec<String> = vec!["facet".into()];
    header.extend((0..a.dim).map(|i| format!("c{i}")));
    header.push("measure".into());
    let rows: Vec<Vec<f64>> = mesh
        .facets
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut row = vec![i as f64];
            row.extend(f.center());
            row.push(f.measure(a.order));
            row
        })
        .collect();
    let n = write_csv(&a.out, &header, &rows)?;
    eprintln!(
        "{}",
        json!({"facets": n, "total_measure": mesh.total_measure(a.order)})
    );
    Ok(())
}

fn load_sector(path: &Option<PathBuf>, default_k: SpdMatrix) -> Result<SphericalSector> {
    let spec: SectorSpec = match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => SectorSpec {
            b: 1.0,
            kind: "angular".into(),
            data: json!([0.0, std::f64::consts::FRAC_PI_4]),
        },
    };
    let region = match spec.kind.as_str() {
        "angular" => {
            let ths: Vec<f64> = serde_json::from_value(spec.data)
                .map_err(|_| anyhow!("angular data must be [theta1, theta2]"))?;
            if ths.len() != 2 {
                bail!("angular data must be [theta1, theta2]");
            }
            SectorRegion::Angular { theta1: ths[0], theta2: ths[1] }
        }
        "facet-cells" => {
            #[derive(Deserialize)]
            struct Cells {
                m: usize,
                indices: Vec<usize>,
            }
            let c: Cells = serde_json::from_value(spec.data)
                .map_err(|_| anyhow!("facet-cells data must be {{m, indices}}"))?;
            let mut indices = c.indices;
            indices.sort_unstable();
            SectorRegion::FacetCells { m: c.m, indices }
        }
        other => bail!("unknown sector kind {other:?}"),
    };
    Ok(SphericalSector::new(spec.b, region, default_k)?)
}

/// Tilt direction: barycenter of the sector at radius b, pushed back to the
/// original coordinates.
fn sector_tilt(sector: &SphericalSector, m: usize) -> Result<Vec<f64>> {
    let d = sector.k.dim();
    let mesh = build_mesh(d, sector.b, m)?;
    let mut acc = vec![0.0; d];
    let mut hits = 0usize;
    for f in &mesh.facets {
        let c = f.center();
        if sector.region.contains(&c) {
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            for i in 0..d {
                acc[i] += c[i] / norm * sector.b;
            }
            hits += 1;
        }
    }
    if hits == 0 {
        bail!("sector region contains no facet centers at this resolution");
    }
    let sq = sector.k.sqrt();
    let mut h = vec![0.0; d];
    for i in 0..d {
        for j in 0..d {
            h[i] += sq[(i, j)] * acc[j] / hits as f64;
        }
    }
    Ok(h)
}

fn cmd_tailprob(a: TailprobArgs) -> Result<()> {
    let p = load_params(&a.params)?;
    match a.model {
        ModelName::Toy => {
            let d = p.d.unwrap_or(2);
            let model = ToyModel {
                t_n: a.tn,
                d,
                law: YLaw::UniformCube { half: p.half.unwrap_or(1.0) },
            };
            let sector = load_sector(&a.sector, SpdMatrix::identity(d))?;
            let mesh = build_mesh(d, sector.b, a.res)?;
            let centers: Vec<Vec<f64>> = mesh.facets.iter().map(|f| f.center()).collect();
            let values: Vec<f64> = centers.iter().map(|c| model.psi(c)).collect();
            let psi = ResidueFunction::Tabulated { points: centers, values };
            let formula = tail_probability_formula(a.tn, &sector, &psi, a.res)?;
            let h = sector_tilt(&sector, a.res)?;
            let t_n = a.tn;
            let sec = sector.clone();
            let event = move |x: &[f64]| {
                let s: Vec<f64> = x.iter().map(|v| v / t_n).collect();
                sec.contains(&s)
            };
            let (mc, se) = tilted_mc_tail(
                &model,
                &event,
                &h,
                a.mc_samples,
                RngStream::new(a.seed, 0),
            );
            println!(
                "{}",
                json!({"formula": formula, "mc_estimate": mc, "mc_stderr": se, "ratio": mc / formula})
            );
        }
        ModelName::Lattice => {
            let d = p.d.unwrap_or(2);
            let n = a.tn * a.tn;
            if (n.round() - n).abs() > 1e-9 || n <= 0.0 {
                bail!("lattice walk needs --tn = sqrt(n) for a whole number of steps n");
            }
            let model = LatticeWalkModel::new(d, n.round() as u64)?;
            let (_, _, _, _, k) = model.mc_params();
            let sector = load_sector(&a.sector, k)?;
            let formula = tail_probability_formula(a.tn, &sector, &model.residue(), a.res)?;
            // plain MC on the rescaled endpoint S_n / n^{3/4}
            let scale = (n.round()).powf(0.75);
            let mut rng = RngStream::new(a.seed, 0).rng();
            let mut hits = 0u64;
            for _ in 0..a.mc_samples {
                let s = model.sample_endpoint(&mut rng);
                let x: Vec<f64> = s.iter().map(|&v| v as f64 / scale).collect();
                if sector.contains(&x) {
                    hits += 1;
                }
            }
            let mc = hits as f64 / a.mc_samples as f64;
            let se = (mc * (1.0 - mc) / a.mc_samples as f64).sqrt();
            println!(
                "{}",
                json!({"formula": formula, "mc_estimate": mc, "mc_stderr": se, "ratio": mc / formula})
            );
        }
        _ => bail!("tailprob supports toy, lattice"),
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let p = load_params(&a.params)?;
    if a.trajectory {
        if a.model != ModelName::Lattice {
            bail!("--trajectory is available for the lattice walk");
        }
        let d = p.d.unwrap_or(2);
        let n = p.n.unwrap_or(1024);
        LatticeWalkModel::new(d, n)?;
        use rand::Rng;
        let mut rng = RngStream::new(a.seed, 0).rng();
        let mut pos = vec![0.0f64; d];
        let mut rows = Vec::with_capacity(n as usize + 1);
        rows.push(vec![0.0; d + 1]);
        for step in 1..=n {
            let axis = rng.gen_range(0..d);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            pos[axis] += sign;
            let mut row = vec![step as f64];
            row.extend(pos.iter().copied());
            rows.push(row);
        }
        let mut header: Vec<String> = vec!["step".into()];
        header.extend((0..d).map(|i| format!("s{i}")));
        let written = write_csv(&a.out, &header, &rows)?;
        eprintln!("{}", json!({"rows": written, "trajectory": true}));
        return Ok(());
    }
    let (dim, cols, data) = simulate_rows(a.model, &p, a.samples, a.seed)?;
    let rows: Vec<Vec<f64>> = data.chunks(dim).map(|c| c.to_vec()).collect();
    let written = write_csv(&a.out, &cols, &rows)?;
    eprintln!("{}", json!({"rows": written, "dim": dim}));
    Ok(())
}

fn cmd_figure(a: FigureArgs) -> Result<()> {
    if a.grid == 0 {
        bail!("--grid must be positive");
    }
    let mut rows = Vec::with_capacity(a.grid + 1);
    match a.which {
        Which::H => {
            for i in 0..=a.grid {
                let theta = std::f64::consts::PI * i as f64 / a.grid as f64;
                rows.push(vec![theta, cue_sector_density(a.r, theta)?]);
            }
        }
        Which::F => {
            let dens = LatticeAngularDensity::new(a.r);
            for i in 0..=a.grid {
                let theta = std::f64::consts::PI * i as f64 / a.grid as f64;
                rows.push(vec![theta, dens.eval(theta)]);
            }
        }
    }
    let name = match a.which {
        Which::H => "H",
        Which::F => "F",
    };
    let written = write_csv(&a.out, &["theta".into(), name.into()], &rows)?;
    eprintln!("{}", json!({"rows": written, "which": name, "r": a.r}));
    Ok(())
}
