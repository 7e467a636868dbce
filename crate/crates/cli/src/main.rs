//! `msup`: batch front-end over the microsupport library. JSON inputs in,
//! JSON reports (and optional SVG projections) out.
//!
//! Exit codes: 0 success, 1 input/usage error, 2 mathematical check
//! failed (reserved so CI can gate on verdicts).

mod svg;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use microsupport::cohoracle::{
    local_cohomology, probe_grid_1d,
    ssk_definition_test, SskOracle,
};
use microsupport::conic::{ConicSubset, CotangentPoint};
use microsupport::fixtures;
use microsupport::normalcone::{conormal0, conormal0_ball_test, BallTestParams};
use microsupport::pset::{LocallyClosedPolyhedralSet, PolyhedralSet};
use microsupport::rat::{self, parse_rat, rat, rat_i, QVec};
use microsupport::sample::sample_conic_subset;
use microsupport::sheaf::{perversity_check, ssk_from_strata, StratifiedSheafDescription};
use microsupport::sweep::{default_params_for, sweep_support_search, NeighborhoodSpec, SweepParams};
use microsupport::symplectic::expr::ScalarField;
use microsupport::symplectic::{
    poisson_bracket, strong_involutivity_demo, weak_involutivity_check, BracketVerdict,
};
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeMap;
use std::path::PathBuf;

/// Exit status for a failed mathematical check.
const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Parser)]
#[command(name = "msup", version, about = "polyhedral conormal cones and truncated microsupports")]
struct Cli {
    /// Seed for all sampling (identical config + seed reproduces output).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// 0-conormal cone of a closed polyhedral set.
    Conormal(ConormalArgs),
    /// Exterior-ball membership test at a point and covector.
    BallTest(BallTestArgs),
    /// Sweeping-cone search for an exterior-ball witness.
    Sweep(SweepArgs),
    /// Poisson bracket of two scalar fields.
    Poisson(PoissonArgs),
    /// Sampled weak-involutivity check on a conic set.
    Involutivity(InvolutivityArgs),
    /// Truncated microsupport of a stratified description.
    Ssk(SskArgs),
    /// Local cohomology ranks at a base point with an affine test function.
    Localcoh(LocalcohArgs),
    /// Perversity criterion for a description and its dual.
    Perversity(PerversityArgs),
    /// Built-in worked examples with self-checks.
    PaperExample(PaperExampleArgs),
    /// SVG projection of a conic descriptor.
    Plot(PlotArgs),
}

#[derive(Args)]
struct ConormalArgs {
    /// Polyhedral set (JSON file).
    #[arg(long)]
    set: PathBuf,
    /// Also write an SVG projection here.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct BallTestArgs {
    #[arg(long)]
    set: PathBuf,
    /// Base point, comma-separated rationals, e.g. "-1,0".
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Covector, comma-separated rationals.
    #[arg(long, allow_hyphen_values = true)]
    xi: String,
    /// Ball-test parameters (JSON file); defaults to the 2^-1..2^-20 grid.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    set: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, allow_hyphen_values = true)]
    xi: String,
    /// Sweep parameters (JSON file); defaults fit unit-scale data.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Half-width of the neighborhood window around the origin.
    #[arg(long, default_value = "4")]
    window: String,
}

#[derive(Args)]
struct PoissonArgs {
    /// First field, prefix or JSON expression.
    #[arg(long)]
    f: String,
    #[arg(long)]
    g: String,
    /// Ambient base dimension.
    #[arg(long, default_value_t = 2)]
    dim: usize,
}

#[derive(Args)]
struct InvolutivityArgs {
    /// Conic subset (JSON file), exact pieces and/or samples.
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    f: String,
    #[arg(long)]
    g: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Samples drawn per exact piece when the set carries none.
    #[arg(long, default_value_t = 120)]
    samples: usize,
}

#[derive(Args)]
struct SskArgs {
    /// Stratified description (JSON file).
    #[arg(long)]
    strata: PathBuf,
    #[arg(long)]
    k: i64,
}

#[derive(Args)]
struct LocalcohArgs {
    /// Locally closed polyhedral set (JSON file).
    #[arg(long)]
    set: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Affine test function vanishing at x, prefix or JSON expression.
    #[arg(long)]
    phi: String,
    #[arg(long, default_value = "1/4")]
    eps: String,
    #[arg(long, default_value = "1/8")]
    eps2: String,
}

#[derive(Args)]
struct PerversityArgs {
    #[arg(long)]
    f_desc: PathBuf,
    #[arg(long)]
    dual_desc: PathBuf,
    /// JSON object mapping stratum ids to complex codimensions.
    #[arg(long)]
    codims: PathBuf,
}

#[derive(Args)]
struct PaperExampleArgs {
    /// Which worked example: conormal | ssk | localcoh | remark | perversity.
    #[arg(long)]
    which: String,
}

#[derive(Args)]
struct PlotArgs {
    /// Conic subset (JSON file).
    #[arg(long)]
    conic: PathBuf,
    #[arg(long)]
    svg: PathBuf,
}

/// Echo of the effective run configuration, embedded in every report.
#[derive(Serialize, Default)]
struct RunConfig {
    command: String,
    seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    probe_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    svg: Option<String>,
    threads: usize,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_point(s: &str) -> anyhow::Result<QVec> {
    s.split(',')
        .map(|tok| parse_rat(tok).map_err(|e| anyhow!(e)))
        .collect()
}

fn emit(cli_out: &Option<PathBuf>, pretty: bool, value: &serde_json::Value) -> anyhow::Result<()> {
    let text = if pretty {
        serde_json::to_string_pretty(value)?
    } else {
        serde_json::to_string(value)?
    };
    match cli_out {
        Some(path) => std::fs::write(path, text + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn threads_from_env() -> usize {
    std::env::var("MSUP_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let seed = cli.seed;
    let mut exit = 0;
    let config = |command: &str| RunConfig {
        command: command.into(),
        seed,
        out: cli.out.as_ref().map(|p| p.display().to_string()),
        threads: threads_from_env(),
        ..RunConfig::default()
    };
    let with_inputs = |command: &str, paths: &[&PathBuf]| {
        let mut c = config(command);
        c.inputs = paths.iter().map(|p| p.display().to_string()).collect();
        c
    };
    let report: serde_json::Value = match &cli.command {
        Command::Conormal(args) => {
            let set: PolyhedralSet = read_json(&args.set)?;
            let cone = conormal0(&set)?;
            let mut cfg = with_inputs("conormal", &[&args.set]);
            if let Some(svg_path) = &args.svg {
                std::fs::write(svg_path, svg::render_conic(&cone))?;
                cfg.svg = Some(svg_path.display().to_string());
            }
            json!({
                "config": cfg,
                "descriptor": cone,
            })
        }
        Command::BallTest(args) => {
            let set: PolyhedralSet = read_json(&args.set)?;
            let x = parse_point(&args.x)?;
            let xi = parse_point(&args.xi)?;
            let params: BallTestParams = match &args.params {
                Some(p) => read_json(p)?,
                None => BallTestParams::default(),
            };
            let verdict = conormal0_ball_test(&set, &x, &xi, &params)?;
            json!({
                "config": with_inputs("ball-test", &[&args.set]),
                "x": args.x,
                "xi": args.xi,
                "member": verdict,
            })
        }
        Command::Sweep(args) => {
            let set: PolyhedralSet = read_json(&args.set)?;
            let x = parse_point(&args.x)?;
            let xi = parse_point(&args.xi)?;
            let params: SweepParams = match &args.params {
                Some(p) => read_json(p)?,
                None => default_params_for(&xi)?,
            };
            let half = parse_rat(&args.window).map_err(|e| anyhow!(e))?;
            let u = NeighborhoodSpec {
                base_window: microsupport::polyhedron::ConvexPolyhedron::box_window(
                    set.dim,
                    -half.clone(),
                    half,
                ),
            };
            let p = CotangentPoint::new(x, xi)?;
            let witness = sweep_support_search(&set, &p, &params, &u)?;
            if !witness.ball_test_passed {
                exit = EXIT_CHECK_FAILED;
            }
            json!({
                "config": with_inputs("sweep", &[&args.set]),
                "witness": witness,
            })
        }
        Command::Poisson(args) => {
            let f = ScalarField::parse(args.dim, &args.f)?;
            let g = ScalarField::parse(args.dim, &args.g)?;
            let bracket = poisson_bracket(&f, &g)?;
            let constant = bracket.constant_value().map(|c| rat::fmt_rat(&c));
            json!({
                "config": config("poisson"),
                "bracket": bracket,
                "constant": constant,
            })
        }
        Command::Involutivity(args) => {
            let set: ConicSubset = read_json(&args.set)?;
            let f = ScalarField::parse(set.dim, &args.f)?;
            let g = ScalarField::parse(set.dim, &args.g)?;
            let samples = match &set.samples {
                Some(s) if !s.is_empty() => s.clone(),
                _ => sample_conic_subset(&set, args.samples, seed)?,
            };
            let report = weak_involutivity_check(&samples, &f, &g, args.tol)?;
            if report.verdict != BracketVerdict::Pass {
                exit = EXIT_CHECK_FAILED;
            }
            let mut cfg = with_inputs("involutivity", &[&args.set]);
            cfg.tol = Some(args.tol);
            json!({
                "config": cfg,
                "report": report,
            })
        }
        Command::Ssk(args) => {
            let desc: StratifiedSheafDescription = read_json(&args.strata)?;
            let cone = ssk_from_strata(&desc, args.k)?;
            json!({
                "config": with_inputs("ssk", &[&args.strata]),
                "k": args.k,
                "descriptor": cone,
            })
        }
        Command::Localcoh(args) => {
            let set: LocallyClosedPolyhedralSet = read_json(&args.set)?;
            let x = parse_point(&args.x)?;
            let phi = ScalarField::parse(set.dim(), &args.phi)?;
            let eps = parse_rat(&args.eps).map_err(|e| anyhow!(e))?;
            let eps2 = parse_rat(&args.eps2).map_err(|e| anyhow!(e))?;
            let ranks = local_cohomology(&set, &x, &phi, &eps, &eps2)?;
            json!({
                "config": with_inputs("localcoh", &[&args.set]),
                "x": args.x,
                "ranks": ranks,
            })
        }
        Command::Perversity(args) => {
            let d_f: StratifiedSheafDescription = read_json(&args.f_desc)?;
            let d_dual: StratifiedSheafDescription = read_json(&args.dual_desc)?;
            let codims: BTreeMap<String, i64> = read_json(&args.codims)?;
            let verdict = perversity_check(&d_f, &d_dual, &codims)?;
            if !verdict {
                exit = EXIT_CHECK_FAILED;
            }
            json!({
                "config": with_inputs("perversity", &[&args.f_desc, &args.dual_desc, &args.codims]),
                "perverse": verdict,
            })
        }
        Command::PaperExample(args) => {
            let (value, ok) = run_example(&args.which, seed)?;
            if !ok {
                exit = EXIT_CHECK_FAILED;
            }
            value
        }
        Command::Plot(args) => {
            let set: ConicSubset = read_json(&args.conic)?;
            std::fs::write(&args.svg, svg::render_conic(&set))?;
            let mut cfg = with_inputs("plot", &[&args.conic]);
            cfg.svg = Some(args.svg.display().to_string());
            json!({
                "config": cfg,
                "svg": args.svg.display().to_string(),
            })
        }
    };
    emit(&cli.out, cli.pretty, &report)?;
    Ok(exit)
}

/// The bundled worked examples with exact self-checks.
fn run_example(which: &str, seed: u64) -> anyhow::Result<(serde_json::Value, bool)> {
    let cfg = |cmd: &str| RunConfig {
        command: format!("paper-example {cmd}"),
        seed,
        threads: threads_from_env(),
        ..RunConfig::default()
    };
    match which {
        "conormal" => {
            let computed = conormal0(&fixtures::half_plane_union())?;
            let expected = fixtures::half_plane_union_conormal();
            let ok = computed.set_eq(&expected)?;
            Ok((
                json!({
                    "config": cfg("conormal"),
                    "descriptor": computed,
                    "self_check": if ok { "match" } else { "mismatch" },
                }),
                ok,
            ))
        }
        "ssk" => {
            let d = fixtures::half_plane_union_strata();
            let s0 = ssk_from_strata(&d, 0)?;
            let s1 = ssk_from_strata(&d, 1)?;
            let ok0 = s0.set_eq(&conormal0(&fixtures::half_plane_union())?)?;
            let ok1 = s1.set_eq(&fixtures::half_plane_union_ss1())?;
            Ok((
                json!({
                    "config": cfg("ssk"),
                    "ss0": s0,
                    "ss1": s1,
                    "self_check": if ok0 && ok1 { "match" } else { "mismatch" },
                }),
                ok0 && ok1,
            ))
        }
        "localcoh" => {
            let s = microsupport::cohoracle::as_locally_closed(&fixtures::half_plane_union());
            let eps = rat(1, 4);
            let eps2 = rat(1, 8);
            let mut rows = Vec::new();
            let mut ok = true;
            type Regime = (&'static str, QVec, &'static str, Vec<(i64, usize)>);
            let cases: [Regime; 4] = [
                ("interior", vec![rat_i(1), rat_i(1)], "(- x1 1)", vec![]),
                ("ray-x", vec![rat_i(-1), rat_i(0)], "x2", vec![(0, 1)]),
                ("ray-y", vec![rat_i(0), rat_i(-1)], "x1", vec![(0, 1)]),
                ("origin", vec![rat_i(0), rat_i(0)], "(+ x1 x2)", vec![(1, 1)]),
            ];
            for (label, x, phi_src, expected) in cases {
                let phi = ScalarField::parse(2, phi_src)?;
                let ranks = local_cohomology(&s, &x, &phi, &eps, &eps2)?;
                let expected_map: BTreeMap<i64, usize> = expected.into_iter().collect();
                ok &= ranks.ranks == expected_map;
                rows.push(json!({
                    "regime": label,
                    "phi": phi_src,
                    "ranks": ranks,
                }));
            }
            Ok((
                json!({
                    "config": cfg("localcoh"),
                    "table": rows,
                    "self_check": if ok { "match" } else { "mismatch" },
                }),
                ok,
            ))
        }
        "remark" => {
            let s = fixtures::open_ray();
            let probes = probe_grid_1d(&rat_i(-2), &rat_i(2), 17);
            let map = ssk_definition_test(&s, 0, &probes)?;
            // batch route honoring MSUP_THREADS must agree with the map
            let oracle = SskOracle::new(&s)?;
            let batch = parallel_membership(&oracle, &probes, 0)?;
            let mut ok = true;
            for ((p, r), b) in probes.iter().zip(map.results.iter()).zip(batch.iter()) {
                let expected = p.fiber[0] == rat_i(0) && p.base[0] >= rat_i(0);
                let got = matches!(r.status, microsupport::cohoracle::ProbeStatus::In { .. });
                ok &= expected == got && got == *b;
            }
            let demo = strong_involutivity_demo(seed)?;
            ok &= demo.reproduced();
            Ok((
                json!({
                    "config": cfg("remark"),
                    "membership": map,
                    "demo": demo,
                    "self_check": if ok { "match" } else { "mismatch" },
                }),
                ok,
            ))
        }
        "perversity" => {
            let mut codims = BTreeMap::new();
            codims.insert("open".to_string(), 0i64);
            codims.insert("wall".to_string(), 1i64);
            let shifted = perversity_fixture(&[1]);
            let unshifted = perversity_fixture(&[0]);
            let ok_shifted = perversity_check(&shifted, &shifted, &codims)?;
            let ok_unshifted = !perversity_check(&unshifted, &unshifted, &codims)?;
            let ok = ok_shifted && ok_unshifted;
            Ok((
                json!({
                    "config": cfg("perversity"),
                    "shifted_is_perverse": ok_shifted,
                    "unshifted_is_perverse": !ok_unshifted,
                    "self_check": if ok { "match" } else { "mismatch" },
                }),
                ok,
            ))
        }
        other => Err(anyhow!(
            "unknown example {other:?}: use conormal | ssk | localcoh | remark | perversity"
        )),
    }
}

/// Plane stratified by a vertical line, with the wall stalk placed in the
/// given degrees.
fn perversity_fixture(wall_degrees: &[i64]) -> StratifiedSheafDescription {
    use microsupport::cone::ConvexCone;
    use microsupport::conic::ConicPiece;
    use microsupport::polyhedron::{ConvexPolyhedron, Halfspace};
    use microsupport::sheaf::StratumDatum;
    let line_poly = ConvexPolyhedron::new(
        2,
        vec![
            Halfspace::new(vec![rat_i(1), rat_i(0)], rat_i(0)),
            Halfspace::new(vec![rat_i(-1), rat_i(0)], rat_i(0)),
        ],
    )
    .unwrap();
    let line_set = PolyhedralSet::from_piece(line_poly.clone());
    let open = LocallyClosedPolyhedralSet::new(PolyhedralSet::full(2), line_set.clone()).unwrap();
    let wall = LocallyClosedPolyhedralSet::closed(line_set);
    StratifiedSheafDescription {
        dim: 2,
        strata: vec![
            StratumDatum {
                id: "open".into(),
                stratum: open,
                lambda: ConicSubset::zero_section(&PolyhedralSet::full(2)),
                degrees: [0i64].into_iter().collect(),
                rank_by_degree: None,
            },
            StratumDatum {
                id: "wall".into(),
                stratum: wall,
                lambda: ConicSubset::exact(
                    2,
                    vec![ConicPiece::new(
                        line_poly,
                        ConvexCone::subspace_orthogonal_to(2, &[vec![rat_i(0), rat_i(1)]]),
                    )
                    .unwrap()],
                )
                .unwrap(),
                degrees: wall_degrees.iter().copied().collect(),
                rank_by_degree: None,
            },
        ],
        covers_microsupport: true,
    }
}

/// Batch membership over worker threads; `MSUP_THREADS` controls the
/// worker count (the oracle cache is shared behind a mutex).
fn parallel_membership(
    oracle: &SskOracle<'_>,
    probes: &[CotangentPoint],
    k: i64,
) -> anyhow::Result<Vec<bool>> {
    let workers = threads_from_env().min(probes.len().max(1));
    if workers <= 1 {
        return probes
            .iter()
            .map(|p| Ok(oracle.membership(p, k)?.is_some()))
            .collect();
    }
    let chunk = probes.len().div_ceil(workers);
    let mut out = vec![false; probes.len()];
    std::thread::scope(|scope| -> anyhow::Result<()> {
        let mut handles = Vec::new();
        for (ci, probe_chunk) in probes.chunks(chunk).enumerate() {
            handles.push((
                ci,
                scope.spawn(move || -> microsupport::error::Result<Vec<bool>> {
                    probe_chunk
                        .iter()
                        .map(|p| Ok(oracle.membership(p, k)?.is_some()))
                        .collect()
                }),
            ));
        }
        for (ci, h) in handles {
            let values = h.join().map_err(|_| anyhow!("worker panicked"))??;
            out[ci * chunk..ci * chunk + values.len()].copy_from_slice(&values);
        }
        Ok(())
    })?;
    Ok(out)
}


