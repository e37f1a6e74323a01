//! One function per subcommand. Each computes its outputs in memory and
//! returns them as a [`Run`]; nothing touches the disk until the caller
//! commits the whole set.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use qlgraph::entanglement::{
    grid_search, no_cloning_check, run_paper_ensemble, CloneTarget, CloneVerdict, EnsembleSummary,
    ExperimentConfig, PaperExperiment,
};
use qlgraph::io::{graph_from_json, graph_to_json, to_dot, to_graphml};
use qlgraph::kuramoto::{phases_to_gains, simulate as run_simulation, OscillatorEnsemble, SimConfig};
use qlgraph::product::{
    boolean_poset, cartesian_product_all, hypercube_check, optimized_product, quotient, zero_coupling_block_count,
};
use qlgraph::spectral::{emergent_state, graph_spectrum};
use qlgraph::su2::{jones_to_quaternion, quaternion_to_jones, quaternion_to_su2, JonesVector, Quaternion};
use qlgraph::{build_ql_bit, GainGraph, QlBit, QlBitSpec};

use crate::{CliError, Run};
use crate::manifest::Artifacts;

fn read_graph(path: &Path) -> Result<GainGraph, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    graph_from_json(&text).map_err(|e| match e {
        qlgraph::QlError::Json(j) => CliError::Parse(format!("{}: {j}", path.display())),
        other => CliError::Core(other),
    })
}

fn cjson(z: Complex64) -> serde_json::Value {
    json!({"re": z.re, "im": z.im})
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Vertices per subgraph.
    #[arg(long)]
    pub n: usize,
    /// Degree of each subgraph.
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub bias_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub bias_im: f64,
    /// Coupling edge probability.
    #[arg(long, default_value_t = 0.2)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "ql_bit.json")]
    pub out: PathBuf,
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long)]
    pub graphml: Option<PathBuf>,
}

pub fn build(a: &BuildArgs) -> Result<Run, CliError> {
    let spec = QlBitSpec::new(a.n, a.d, Complex64::new(a.bias_re, a.bias_im), a.p, a.seed);
    let bit = build_ql_bit(&spec)?;
    let mut arts = Artifacts::default();
    arts.add(&a.out, graph_to_json(&bit.graph));
    if let Some(p) = &a.dot {
        arts.add(p, to_dot(&bit.graph));
    }
    if let Some(p) = &a.graphml {
        arts.add(p, to_graphml(&bit.graph));
    }
    let mut summary = format!(
        "{} vertices, {} edges, {} coupling edges",
        bit.graph.n_vertices(),
        bit.graph.edge_count(),
        bit.coupling_edge_count()
    );
    if bit.uncoupled_vertex {
        summary.push_str("; warning: some vertex has no coupling edge");
    }
    Ok(Run {
        primary: a.out.clone(),
        artifacts: arts,
        params: json!({"spec": spec}),
        seeds: vec![a.seed],
        summary: Some(summary),
    })
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Eigenvalue CSV.
    #[arg(long, default_value = "spectrum.csv")]
    pub out: PathBuf,
    /// Emergent state JSON, projected on the label blocks.
    #[arg(long)]
    pub emergent: Option<PathBuf>,
    /// Histogram CSV of the eigenvalues.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
}

fn histogram_csv(values: &[f64], bins: usize) -> String {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let mut s = String::from("bin_low,bin_high,count\n");
    for (k, c) in counts.iter().enumerate() {
        let a = lo + k as f64 * width;
        s.push_str(&format!("{a:.12e},{:.12e},{c}\n", a + width));
    }
    s
}

pub fn spectrum(a: &SpectrumArgs) -> Result<Run, CliError> {
    if a.bins == 0 {
        return Err(CliError::Usage("--bins must be positive".into()));
    }
    let g = read_graph(&a.input)?;
    let spec = graph_spectrum(&g)?;
    let mut arts = Artifacts::default();
    arts.add(&a.out, spec.to_csv());
    let mut summary = format!(
        "{} eigenvalues, top {:.6}",
        spec.len(),
        spec.eigenvalues.first().copied().unwrap_or(f64::NAN)
    );
    if let Some(p) = &a.emergent {
        let (names, block_of) = g.blocks();
        let es = emergent_state(&g, &block_of)?;
        let mut v = es.to_json();
        v["blocks"] = json!(names);
        summary.push_str(&format!(", gap {:.3e}", es.gap));
        arts.add(p, pretty(&v));
    }
    if let Some(p) = &a.histogram {
        arts.add(p, histogram_csv(&spec.eigenvalues, a.bins));
    }
    Ok(Run {
        primary: a.out.clone(),
        artifacts: arts,
        params: json!({"input": a.input, "bins": a.bins}),
        seeds: vec![],
        summary: Some(summary),
    })
}

#[derive(Debug, Args)]
pub struct ProductArgs {
    /// Factor graphs, leftmost factor slowest in the vertex numbering.
    #[arg(long, num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    /// Optimized product: one fresh subgraph per block instead of full
    /// Cartesian copies. Inputs must be QL bits of equal size and degree.
    #[arg(long)]
    pub optimized: bool,
    /// Seed for the optimized product's subgraphs and coupling edges.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "product.json")]
    pub out: PathBuf,
    /// Descriptor JSON (factors, block labels, quotient check).
    #[arg(long)]
    pub descriptor: Option<PathBuf>,
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

pub fn product(a: &ProductArgs) -> Result<Run, CliError> {
    let graphs = a.inputs.iter().map(|p| read_graph(p)).collect::<Result<Vec<_>, _>>()?;
    let p = if a.optimized {
        let bits = graphs
            .into_iter()
            .zip(&a.inputs)
            .map(|(g, path)| {
                QlBit::from_graph(g).map_err(|e| CliError::Usage(format!("{}: not a QL bit: {e}", path.display())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        optimized_product(&bits, a.seed)?
    } else {
        let specs = graphs.iter().map(|g| QlBit::from_graph(g.clone()).ok().map(|b| b.spec)).collect();
        let refs: Vec<&GainGraph> = graphs.iter().collect();
        cartesian_product_all(&refs, specs)?
    };
    let qg = quotient(&p);
    let cube = hypercube_check(&qg, p.q);
    let mut arts = Artifacts::default();
    arts.add(&a.out, graph_to_json(&p.graph));
    if let Some(path) = &a.descriptor {
        let mut d = p.descriptor();
        d["quotient_edges"] = json!(qg.edges.iter().map(|&(x, y)| [&qg.labels[x], &qg.labels[y]]).collect::<Vec<_>>());
        d["hypercube"] = json!({
            "is_hypercube": cube.is_hypercube,
            "certificate": cube.certificate,
            "reason": cube.reason,
        });
        arts.add(path, pretty(&d));
    }
    if let Some(path) = &a.dot {
        arts.add(path, p.to_dot());
    }
    Ok(Run {
        primary: a.out.clone(),
        artifacts: arts,
        params: json!({"inputs": a.inputs, "optimized": a.optimized}),
        seeds: if a.optimized { vec![a.seed] } else { vec![] },
        summary: Some(format!(
            "{} vertices, {} edges, {} blocks, quotient {} a {}-cube",
            p.n_vertices(),
            p.graph.edge_count(),
            p.n_blocks(),
            if cube.is_hypercube { "is" } else { "is not" },
            p.q
        )),
    })
}

#[derive(Debug, Args)]
pub struct ConcurrenceArgs {
    /// paper-v1, paper-v2, paper-v3 or all.
    #[arg(long, default_value = "all")]
    pub experiment: String,
    /// Number of seeds; seed k is `seed_base + k`.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    #[arg(long, default_value_t = 60)]
    pub n: usize,
    #[arg(long, default_value_t = 40)]
    pub d: usize,
    #[arg(long, default_value_t = 0.2)]
    pub p: f64,
    /// Probability of each candidate extra edge (defaults to --p).
    #[arg(long)]
    pub extra_probability: Option<f64>,
    /// Overrides every variant's weight on inherited coupling edges.
    #[arg(long)]
    pub inherited_weight: Option<f64>,
    /// Ensemble summary CSV.
    #[arg(long, default_value = "concurrence.csv")]
    pub out: PathBuf,
    /// Per-seed reports as JSON.
    #[arg(long)]
    pub reports: Option<PathBuf>,
}

pub fn concurrence(a: &ConcurrenceArgs) -> Result<Run, CliError> {
    let variants: Vec<PaperExperiment> = if a.experiment == "all" {
        PaperExperiment::all().to_vec()
    } else {
        a.experiment
            .split(',')
            .map(|s| {
                PaperExperiment::parse(s.trim())
                    .ok_or_else(|| CliError::Usage(format!("unknown experiment {s:?}; use paper-v1, paper-v2, paper-v3 or all")))
            })
            .collect::<Result<_, _>>()?
    };
    if a.seeds == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let cfg = ExperimentConfig {
        n_per_subgraph: a.n,
        degree: a.d,
        coupling_probability: a.p,
        extra_probability: a.extra_probability.unwrap_or(a.p),
        inherited_weight: a.inherited_weight,
        ..ExperimentConfig::default()
    };
    let seeds: Vec<u64> = (0..a.seeds).map(|k| a.seed_base + k).collect();
    let summaries = run_paper_ensemble(&variants, &cfg, &seeds)?;
    let mut csv = String::from(EnsembleSummary::CSV_HEADER);
    csv.push('\n');
    for s in &summaries {
        csv.push_str(&s.csv_row());
        csv.push('\n');
    }
    let mut arts = Artifacts::default();
    arts.add(&a.out, csv.clone());
    if let Some(p) = &a.reports {
        let v: Vec<_> = summaries
            .iter()
            .map(|s| json!({"experiment": s.experiment.name(), "reports": s.reports.iter().map(|r| r.to_json()).collect::<Vec<_>>()}))
            .collect();
        arts.add(p, pretty(&json!(v)));
    }
    Ok(Run {
        primary: a.out.clone(),
        artifacts: arts,
        params: json!({"experiments": variants.iter().map(|v| v.name()).collect::<Vec<_>>(), "config": cfg}),
        seeds,
        summary: Some(csv.trim_end().to_string()),
    })
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 200.0)]
    pub tmax: f64,
    /// Pairwise coupling.
    #[arg(long = "K", default_value_t = 5.0, allow_negative_numbers = true)]
    pub k: f64,
    /// Four-index coupling; needs --simplex.
    #[arg(long = "Kprime", default_value_t = 0.0, allow_negative_numbers = true)]
    pub k_prime: f64,
    /// Seed for the initial phases and frequency offsets.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Frequency offsets are drawn from [-spread, spread] and centred.
    #[arg(long, default_value_t = 0.0)]
    pub spread: f64,
    #[arg(long, default_value_t = 10)]
    pub record_every: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub threshold: f64,
    /// JSON list of `[i, j, l, m]` tensor entries.
    #[arg(long)]
    pub simplex: Option<PathBuf>,
    /// Trajectory CSV.
    #[arg(long, default_value = "trajectory.csv")]
    pub out: PathBuf,
    #[arg(long, default_value = "sync_report.json")]
    pub report: PathBuf,
    /// Input graph with the final phases folded into its gains.
    #[arg(long)]
    pub gains: Option<PathBuf>,
}

pub fn simulate(a: &SimulateArgs) -> Result<Run, CliError> {
    let g = read_graph(&a.input)?;
    let mut e = OscillatorEnsemble::random(g.n_vertices(), a.spread, a.k, a.k_prime, a.seed)?;
    if let Some(p) = &a.simplex {
        let text = fs::read_to_string(p)?;
        let entries: Vec<[usize; 4]> =
            serde_json::from_str(&text).map_err(|err| CliError::Parse(format!("{}: {err}", p.display())))?;
        e = e.with_simplex(entries)?;
    } else if a.k_prime != 0.0 {
        return Err(CliError::Usage("--Kprime needs a --simplex tensor".into()));
    }
    let cfg = SimConfig {
        dt: a.dt,
        t_max: a.tmax,
        record_every: a.record_every,
        seed: a.seed,
        convergence_threshold: a.threshold,
        higher_order: a.simplex.is_some(),
    };
    let sim = run_simulation(&e, &g, &cfg)?;
    let mut arts = Artifacts::default();
    arts.add(&a.out, sim.trajectory_csv());
    arts.add(&a.report, pretty(&json!(sim.report)));
    if let Some(p) = &a.gains {
        let h = phases_to_gains(&g, &sim.final_state.thetas())?;
        arts.add(p, graph_to_json(&h));
    }
    Ok(Run {
        primary: a.out.clone(),
        artifacts: arts,
        params: json!({"input": a.input, "K": a.k, "Kprime": a.k_prime, "spread": a.spread, "config": cfg}),
        seeds: vec![a.seed],
        summary: Some(format!(
            "t = {}, r = {:.6}, block sd = {:?}{}",
            sim.report.t_final,
            sim.report.r,
            sim.report.block_sd,
            if sim.report.plateau { " (plateau)" } else { "" }
        )),
    })
}

#[derive(Debug, Args)]
pub struct NoCloningArgs {
    /// QL bit whose bias the copies should be turned into.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Bias rotation asked of the coupling edges, in grid steps.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub steps: i64,
    /// Random instances instead of an input graph.
    #[arg(long)]
    pub random: Option<usize>,
    /// Vertices per block for random instances.
    #[arg(long, default_value_t = 5)]
    pub block_size: usize,
    #[arg(long, default_value_t = 2)]
    pub blocks: usize,
    #[arg(long, default_value_t = 64)]
    pub resolution: i64,
    /// Also run the exhaustive grid search.
    #[arg(long)]
    pub grid: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "nocloning.json")]
    pub out: PathBuf,
}

fn verdict_json(target: &CloneTarget, grid: bool) -> Result<serde_json::Value, CliError> {
    let (sys, verdict) = no_cloning_check(target)?;
    let mut v = match &verdict {
        CloneVerdict::Feasible { phases } => json!({"verdict": "FEASIBLE", "phases": phases}),
        CloneVerdict::Infeasible { witness, weights, explanation } => json!({
            "verdict": "INFEASIBLE",
            "witness": witness.iter().map(|&k| sys.constraints[k].describe()).collect::<Vec<_>>(),
            "weights": weights,
            "explanation": explanation,
        }),
    };
    v["identity_target"] = json!(target.is_identity());
    v["constraints"] = json!(sys.constraints.len());
    if grid {
        let found = grid_search(&sys).is_some();
        v["grid_feasible"] = json!(found);
        v["grid_agrees"] = json!(found == verdict.is_feasible());
    }
    Ok(v)
}

pub fn nocloning(a: &NoCloningArgs) -> Result<Run, CliError> {
    let body = match (&a.input, a.random) {
        (Some(path), None) => {
            let bit = QlBit::from_graph(read_graph(path)?)
                .map_err(|e| CliError::Usage(format!("{}: not a QL bit: {e}", path.display())))?;
            let rot = Complex64::from_polar(1.0, TAU * a.steps as f64 / a.resolution as f64);
            let target = CloneTarget::from_ql_bit(&bit, bit.spec.coupling_bias * rot, a.blocks, a.resolution)?;
            verdict_json(&target, a.grid)?
        }
        (None, Some(count)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let t = CloneTarget::random(&mut rng, a.block_size, a.blocks, 0.3, a.resolution);
                out.push(verdict_json(&t, a.grid)?);
            }
            json!(out)
        }
        _ => return Err(CliError::Usage("give exactly one of --input and --random".into())),
    };
    let text = pretty(&body);
    let mut arts = Artifacts::default();
    arts.add(&a.out, text);
    let infeasible = text_count(&body, "INFEASIBLE");
    Ok(Run {
        primary: a.out.clone(),
        artifacts: arts,
        params: json!({"input": a.input, "steps": a.steps, "random": a.random, "block_size": a.block_size,
                       "blocks": a.blocks, "resolution": a.resolution, "grid": a.grid}),
        seeds: if a.random.is_some() { vec![a.seed] } else { vec![] },
        summary: Some(format!("{infeasible} infeasible")),
    })
}

fn text_count(v: &serde_json::Value, verdict: &str) -> usize {
    match v {
        serde_json::Value::Array(items) => items.iter().map(|x| text_count(x, verdict)).sum(),
        other => usize::from(other["verdict"] == verdict),
    }
}

#[derive(Debug, Args)]
pub struct PosetArgs {
    #[arg(long)]
    pub q: usize,
    /// Hasse diagram as DOT.
    #[arg(long)]
    pub hasse: Option<PathBuf>,
    #[arg(long, default_value = "poset.json")]
    pub out: PathBuf,
}

pub fn poset(a: &PosetArgs) -> Result<Run, CliError> {
    let p = boolean_poset(a.q)?;
    let covers = p.covers();
    let v = json!({
        "q": a.q,
        "elements": p.sets.iter().map(|&s| p.format_set(s)).collect::<Vec<_>>(),
        "ranks": p.sets.iter().map(|&s| p.rank(s)).collect::<Vec<_>>(),
        "covers": covers.iter().map(|&(x, y)| [p.format_set(x), p.format_set(y)]).collect::<Vec<_>>(),
        "relations": p.relations().len(),
        "zero_coupling_blocks": zero_coupling_block_count(a.q as u32)?,
    });
    let mut arts = Artifacts::default();
    arts.add(&a.out, pretty(&v));
    if let Some(h) = &a.hasse {
        arts.add(h, p.hasse_dot());
    }
    Ok(Run {
        primary: a.out.clone(),
        artifacts: arts,
        params: json!({"q": a.q}),
        seeds: vec![],
        summary: Some(format!("{} elements, {} cover relations", p.sets.len(), covers.len())),
    })
}

#[derive(Debug, Args)]
pub struct Su2Args {
    /// Jones vector `x_re x_im y_re y_im`.
    #[arg(long, num_args = 4, allow_negative_numbers = true, conflicts_with = "quaternion")]
    pub jones: Option<Vec<f64>>,
    /// Quaternion `a b c d`.
    #[arg(long, num_args = 4, allow_negative_numbers = true)]
    pub quaternion: Option<Vec<f64>>,
    #[arg(long, default_value = "su2.json")]
    pub out: PathBuf,
}

pub fn su2(a: &Su2Args) -> Result<Run, CliError> {
    let q = match (&a.jones, &a.quaternion) {
        (Some(j), None) => jones_to_quaternion(&JonesVector::new(Complex64::new(j[0], j[1]), Complex64::new(j[2], j[3]))?)?,
        (None, Some(q)) => Quaternion::new(q[0], q[1], q[2], q[3])?,
        _ => return Err(CliError::Usage("give one of --jones and --quaternion".into())),
    };
    let j = quaternion_to_jones(&q);
    let m = quaternion_to_su2(&q)?;
    let v = json!({
        "jones": {"x": cjson(j.x), "y": cjson(j.y)},
        "quaternion": [q.a, q.b, q.c, q.d],
        "su2": m.entries(),
        "unitarity_error": m.unitarity_error(),
        "det_error": m.det_error(),
    });
    let mut arts = Artifacts::default();
    arts.add(&a.out, pretty(&v));
    Ok(Run {
        primary: a.out.clone(),
        artifacts: arts,
        params: json!({"jones": a.jones, "quaternion": a.quaternion}),
        seeds: vec![],
        summary: Some(format!("quaternion ({}, {}, {}, {})", q.a, q.b, q.c, q.d)),
    })
}
