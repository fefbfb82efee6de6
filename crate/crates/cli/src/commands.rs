use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use log::info;
use serde::Deserialize;

use voxlabel::abstraction::{
    build_abstraction, AbstractionConfig, FootprintSpec, TransitionSystem,
};
use voxlabel::bench::{
    bench_abstraction_config, bench_grid, bernoulli_experiment, fit_scaling, generate_scenario,
    predicted_examined, preset_matrices, run_benchmark_matrices, BenchConfig, ScenarioConfig,
    MOVING_VEHICLE, NOT_NOMINAL_LANE,
};
use voxlabel::buchi::{ltl_to_buchi, run_monitor, MonitorNfa, Verdict};
use voxlabel::label::{
    apply_labels, DensePropMatrix, LabelEngine, LabelMatrix, LabeledEdge, LabeledSystem,
};
use voxlabel::ltl::{parse_ltl_extending, Alphabet, AlphabetSymbol};
use voxlabel::planner::{
    build_product, lane_change_instance, shortest_safe_path, SPLIT_LANE_FORMULA,
};
use voxlabel::workspace::{rasterize_box, AaBox, GridSpec, OccupancyBitset};

use crate::error::CliError;
use crate::settings::Settings;
use crate::{BenchArgs, BernoulliArgs, BuildArgs, LabelArgs, MonitorArgs, PlanArgs};

/// `println!` that reports a closed stdout as an I/O error instead of panicking.
macro_rules! say {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*)
            .map_err(|e| CliError::Io(format!("stdout: {e}")))?
    };
}

const NO_PATH_EXIT: u8 = 4;
const BAD_PREFIX_EXIT: u8 = 3;

fn required<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Input(format!("--{flag} is required")))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(path, e))
}

fn monitor_for(formula: &str, alphabet: &mut Alphabet) -> Result<MonitorNfa, CliError> {
    let f = parse_ltl_extending(formula, alphabet)?;
    Ok(MonitorNfa::new(ltl_to_buchi(&f, alphabet)?))
}

/// Reads a trace: one step per line, proposition names separated by commas.
fn read_trace(path: &Path) -> Result<Vec<Vec<String>>, CliError> {
    let mut steps = Vec::new();
    for line in open(path)?.lines() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        steps.push(
            line.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect(),
        );
    }
    Ok(steps)
}

pub fn monitor(s: &Settings, a: MonitorArgs) -> Result<ExitCode, CliError> {
    let formula: String = required(s.pick(a.formula, "formula")?, "formula")?;
    let trace_path: PathBuf = required(s.pick(a.trace, "trace")?, "trace")?;
    let steps = read_trace(&trace_path)?;
    let mut alphabet = Alphabet::default();
    for name in steps.iter().flatten() {
        if alphabet.id(name).is_none() {
            alphabet.insert(name)?;
        }
    }
    let m = monitor_for(&formula, &mut alphabet)?;
    let word = steps
        .iter()
        .map(|step| alphabet.symbol(step))
        .collect::<Result<Vec<AlphabetSymbol>, _>>()?;
    match run_monitor(&m, &word) {
        Verdict::BadPrefix(i) => {
            say!("BadPrefix {i}");
            Ok(ExitCode::from(BAD_PREFIX_EXIT))
        }
        Verdict::Undetermined => {
            say!("Undetermined");
            Ok(ExitCode::SUCCESS)
        }
    }
}

pub fn build(s: &Settings, a: BuildArgs) -> Result<ExitCode, CliError> {
    let seed: u64 = required(s.pick(a.seed, "seed")?, "seed")?;
    let output: PathBuf = required(s.pick(a.output, "output")?, "output")?;
    let samples = a.samples || s.raw("samples")?.unwrap_or(false);
    let mut cfg: AbstractionConfig<f64> = match s.raw("abstraction")? {
        Some(cfg) => cfg,
        None => {
            let edges = s.or(a.edges, "edges", 10_000)?;
            match s.or(a.preset, "preset", "loop".to_string())?.as_str() {
                "loop" => bench_abstraction_config(edges),
                "square" => AbstractionConfig {
                    target_edges: Some(edges),
                    ..AbstractionConfig::square(100.0, edges, 4)
                },
                other => {
                    return Err(CliError::Input(format!(
                        "unknown preset `{other}` (expected loop or square)"
                    )))
                }
            }
        }
    };
    if let Some(v) = s.pick(a.vertices, "vertices")? {
        cfg.vertex_count = v;
    }
    if let Some(k) = s.pick(a.neighbors, "neighbors")? {
        cfg.neighbors = k;
    }
    let sys = build_abstraction(&cfg, seed)?;
    info!(
        "built {} vertices, {} edges",
        sys.vertex_count(),
        sys.edge_count()
    );
    let mut w = create(&output)?;
    sys.write_to(&mut w, samples)?;
    finish(w, &output)?;
    say!("vertices {} edges {}", sys.vertex_count(), sys.edge_count());
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Deserialize)]
struct PropsFile {
    /// Workspace bounds, one `[lo, hi]` pair per axis.
    bounds: Vec<[f64; 2]>,
    propositions: Vec<PropDocument>,
}

#[derive(Debug, Deserialize)]
struct PropDocument {
    name: String,
    boxes: Vec<AaBox<f64>>,
}

fn read_props(
    path: &Path,
    depth: u32,
) -> Result<(GridSpec<f64>, Alphabet, Vec<OccupancyBitset>), CliError> {
    let doc: PropsFile = serde_json::from_reader(open(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let bounds: Vec<(f64, f64)> = doc.bounds.iter().map(|b| (b[0], b[1])).collect();
    let grid = GridSpec::new(&bounds, depth)?;
    let mut alphabet = Alphabet::default();
    let mut columns = Vec::new();
    for p in &doc.propositions {
        alphabet.insert(&p.name)?;
        let mut col = grid.empty_bitset()?;
        for b in &p.boxes {
            col.union_with(&rasterize_box(b, &grid)?)?;
        }
        columns.push(col);
    }
    Ok((grid, alphabet, columns))
}

fn read_system(path: &Path) -> Result<TransitionSystem<f64>, CliError> {
    Ok(TransitionSystem::read_from(open(path)?)?)
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn label(s: &Settings, a: LabelArgs, workers: Option<usize>) -> Result<ExitCode, CliError> {
    let system: PathBuf = required(s.pick(a.system, "system")?, "system")?;
    let output: PathBuf = required(s.pick(a.output, "output")?, "output")?;
    let depth = s.or(a.depth, "depth", 21)?;
    let footprint: FootprintSpec<f64> = s.raw("footprint")?.unwrap_or_default();
    let (grid, alphabet, columns) = match s.pick(a.props_file, "props_file")? {
        Some(path) => read_props(&path, depth)?,
        None => {
            let mut cfg: ScenarioConfig = s.raw("scenario")?.unwrap_or_default();
            if let Some(seed) = s.pick(a.seed, "seed")? {
                cfg.seed = seed;
            }
            let grid = bench_grid(depth)?;
            let sc = generate_scenario(&cfg, &grid, s.or(a.query, "query", 0)?)?;
            let alphabet = Alphabet::new(&[MOVING_VEHICLE, NOT_NOMINAL_LANE])?;
            (grid, alphabet, vec![sc.moving_vehicle, sc.not_nominal_lane])
        }
    };
    let sys = read_system(&system)?;
    let m = sys.swept_volumes::<u32>(&footprint, &grid)?;
    if let Some(csr) = s.pick(a.csr, "csr")? {
        let mut w = create(&csr)?;
        m.write_to(&mut w)?;
        finish(w, &csr)?;
    }
    let props = DensePropMatrix::from_bitsets(&columns)?;
    let labels = LabelEngine::new(workers)?.label_all(&m, &props)?;
    let mut w = create(&output)?;
    if is_csv(&output) {
        labels.write_csv(&alphabet, &mut w)?;
    } else {
        labels.write_to(&mut w)?;
    }
    finish(w, &output)?;
    for (j, name) in alphabet.names().iter().enumerate() {
        say!("{name} {} of {} edges", labels.count(j), labels.rows());
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Deserialize)]
struct GraphDocument {
    propositions: Vec<String>,
    vertices: usize,
    edges: Vec<GraphEdge>,
}

#[derive(Debug, Deserialize)]
struct GraphEdge {
    from: usize,
    to: usize,
    cost: f64,
    #[serde(default)]
    labels: Vec<String>,
}

fn read_graph(path: &Path) -> Result<LabeledSystem<f64>, CliError> {
    let doc: GraphDocument = serde_json::from_reader(open(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let alphabet = Alphabet::new(&doc.propositions)?;
    let edges = doc
        .edges
        .iter()
        .map(|e| {
            Ok(LabeledEdge {
                from: e.from,
                to: e.to,
                cost: e.cost,
                label: alphabet.symbol(&e.labels)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(LabeledSystem::new(alphabet, doc.vertices, edges)?)
}

fn parse_list<T: std::str::FromStr>(text: &str, flag: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| CliError::Input(format!("--{flag}: cannot parse `{t}`")))
        })
        .collect()
}

pub fn plan(s: &Settings, a: PlanArgs) -> Result<ExitCode, CliError> {
    let demo = a.demo || s.raw("demo")?.unwrap_or(false);
    let graph: Option<PathBuf> = s.pick(a.graph, "graph")?;
    let system: Option<PathBuf> = s.pick(a.system, "system")?;
    let (labeled, default_goal) = match (demo, graph, system) {
        (true, None, None) => (lane_change_instance(), Some("5".to_string())),
        (false, Some(g), None) => (read_graph(&g)?, None),
        (false, None, Some(sys)) => {
            let labels_path: PathBuf = required(s.pick(a.labels, "labels")?, "labels")?;
            let props = s.or(
                a.props,
                "props",
                format!("{MOVING_VEHICLE},{NOT_NOMINAL_LANE}"),
            )?;
            let alphabet = Alphabet::new(&parse_list::<String>(&props, "props")?)?;
            let labels = if is_csv(&labels_path) {
                LabelMatrix::read_csv(&alphabet, open(&labels_path)?)?
            } else {
                LabelMatrix::read_from(open(&labels_path)?)?
            };
            (apply_labels(&read_system(&sys)?, &labels, &alphabet)?, None)
        }
        _ => {
            return Err(CliError::Input(
                "give exactly one of --demo, --graph, --system".into(),
            ))
        }
    };
    let formula = s.or(a.formula, "formula", SPLIT_LANE_FORMULA.to_string())?;
    let start = s.or(a.start, "start", 0)?;
    let goal_text: String = required(s.pick(a.goal, "goal")?.or(default_goal), "goal")?;
    let goal: Vec<usize> = parse_list(&goal_text, "goal")?;
    let m = monitor_for(&formula, &mut Alphabet::default())?;
    let product = build_product(&labeled, &m, start)?;
    info!(
        "product has {} vertices, {} edges",
        product.vertices().len(),
        product.edge_count()
    );
    if let Some(dot) = s.pick(a.dot, "dot")? {
        std::fs::write(&dot, product.to_dot(&labeled)).map_err(|e| CliError::io(&dot, e))?;
    }
    match shortest_safe_path(&product, &goal)? {
        Some(path) => {
            let doc = path.to_document(&labeled);
            say!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("path documents serialize")
            );
            Ok(ExitCode::SUCCESS)
        }
        None => {
            say!("NoPath");
            Ok(ExitCode::from(NO_PATH_EXIT))
        }
    }
}

pub fn bench(s: &Settings, a: BenchArgs, workers: Option<usize>) -> Result<ExitCode, CliError> {
    let seed: u64 = required(s.pick(a.seed, "seed")?, "seed")?;
    let output: PathBuf = required(s.pick(a.output, "output")?, "output")?;
    let sizes: Vec<usize> = parse_list(
        &s.or(a.sizes, "sizes", "20000,40000,80000,160000".to_string())?,
        "sizes",
    )?;
    let depth = s.or(a.depth, "depth", 21)?;
    let queries = s.or(a.queries, "queries", 150)?;
    let mut scenario: ScenarioConfig = s.raw("scenario")?.unwrap_or_default();
    scenario.seed = seed;
    let footprint: FootprintSpec<f64> = s.raw("footprint")?.unwrap_or_default();
    let grid = bench_grid(depth)?;
    let matrices = preset_matrices(&sizes, seed, &footprint, &grid)?;
    info!(
        "swept {} transitions",
        sizes.iter().max().copied().unwrap_or(0)
    );
    let cfg = BenchConfig {
        queries,
        workers,
        warmup: 1,
    };
    let report = run_benchmark_matrices(&matrices, &scenario, &grid, &cfg)?;
    let mut w = create(&output)?;
    report
        .write_csv(&mut w)
        .map_err(|e| CliError::io(&output, e))?;
    finish(w, &output)?;
    say!(
        "{:>10} {:>18} {:>12} {:>12}",
        "size",
        "proposition",
        "mean_ms",
        "occupancy"
    );
    for r in &report.rows {
        say!(
            "{:>10} {:>18} {:>12.4} {:>12.6}",
            r.size,
            r.proposition,
            r.mean_ms,
            r.occupancy_prop
        );
    }
    if report.sizes().len() >= 3 {
        for name in [MOVING_VEHICLE, NOT_NOMINAL_LANE] {
            let fit = fit_scaling(&report, name)?;
            say!(
                "{name}: slope {:.3e} ms/transition, max residual {:.1}%",
                fit.slope,
                100.0 * fit.max_relative_residual()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn bernoulli(s: &Settings, a: BernoulliArgs) -> Result<ExitCode, CliError> {
    let trials = s.or(a.trials, "trials", 100_000)?;
    let length = s.or(a.length, "length", 1 << 21)?;
    let seed = s.or(a.seed, "seed", 0)?;
    let r = bernoulli_experiment(a.p_mot, a.p_pred, trials, length, seed)?;
    say!(
        "empirical {:.1} (std error {:.2}, {} trials)",
        r.mean,
        r.std_error,
        r.trials
    );
    say!("prediction {:.1}", predicted_examined(a.p_mot, a.p_pred));
    Ok(ExitCode::SUCCESS)
}
