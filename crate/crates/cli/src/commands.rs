use std::fs;
use std::io::Write;
use std::path::Path;

use a2m_core::io::{
    a2m_json, detect_kind, history_json, parse_a2m, parse_triangulation, shape_distribution_json, to_pretty,
    tree_from_value, triangulation_from_value, triangulation_json, FormatError, TreeOrTriangulation,
};
use a2m_core::kingman::{
    consistency_test, convergence_experiment, history_to_tree, median_by_step, simulate, ConsistencyConfig,
    ConvergenceConfig,
};
use a2m_core::measure::{Measure, MeasureError};
use a2m_core::rng::{mix_seed, rng_from_seed};
use a2m_core::shape::{
    d_s_from_profiles, empirical_bpd_error, shape_distribution_exact, shape_distribution_mc, A2mSource, ProfileMethod,
    ShapeSource, Truncation,
};
use a2m_core::tree::{random_binary_tree, validate_branch_point_map, BranchPointTable};
use a2m_core::triangulation::{dual_tree, encode_tree, enumerate_triangulations, ComponentOrder, Face};
use a2m_core::{Rational, Scalar};
use serde_json::{json, Value};

use crate::{Cli, CliError, Command, KingmanCommand, Method, Mode, Order, ProfileArg, Sizes};

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write_out(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn mode_str(m: Mode) -> &'static str {
    match m {
        Mode::Rational => "rational",
        Mode::Float => "float",
    }
}

/// Resolved configuration: global flags plus command parameters.
fn config(cli: &Cli, command: &str, params: Value) -> Value {
    json!({
        "command": command,
        "seed": cli.seed,
        "jobs": cli.jobs,
        "mode": mode_str(cli.mode),
        "params": params,
    })
}

fn echo(cfg: &Value) {
    eprintln!("a2m {VERSION} config: {cfg}");
}

fn emit(cli: &Cli, cfg: Value, result: Value) -> Result<(), CliError> {
    let doc = json!({ "version": VERSION, "config": cfg, "result": result });
    write_out(cli, &to_pretty(&doc))
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Validate { file } => validate(cli, file),
        Command::Decode { file } => match cli.mode {
            Mode::Rational => decode::<Rational>(cli, file),
            Mode::Float => decode::<f64>(cli, file),
        },
        Command::Encode { file, root, order } => match cli.mode {
            Mode::Rational => encode::<Rational>(cli, file, *root, *order),
            Mode::Float => encode::<f64>(cli, file, *root, *order),
        },
        Command::ShapeDist { file, n, method, samples } => match cli.mode {
            Mode::Rational => shape_dist::<Rational>(cli, file, n, *method, *samples),
            Mode::Float => shape_dist::<f64>(cli, file, n, *method, *samples),
        },
        Command::Ds { files, m_max, budget, samples, method } => match cli.mode {
            Mode::Rational => ds::<Rational>(cli, files, *m_max, *budget, *samples, *method),
            Mode::Float => ds::<f64>(cli, files, *m_max, *budget, *samples, *method),
        },
        Command::Kingman { command } => kingman(cli, command),
        Command::BpdRate { file, leaves, p, trials } => bpd_rate(cli, file.as_deref(), *leaves, p, *trials),
        Command::Enumerate { n } => enumerate(cli, *n as usize),
    }
}

fn validate(cli: &Cli, file: &Path) -> Result<(), CliError> {
    let cfg = config(cli, "validate", json!({ "file": path_str(file) }));
    echo(&cfg);
    let text = read(file)?;
    let (kind, violations, total) = match detect_kind(&text) {
        Err(e) => ("unknown", vec![e.to_string()], 1),
        Ok(TreeOrTriangulation::Tree(v)) => {
            let has_nu = v.get("nu").is_some();
            match tree_from_value(v) {
                Err(e) => ("tree", vec![e.to_string()], 1),
                Ok(tree) => {
                    let report = validate_branch_point_map(&BranchPointTable::from_tree(&tree));
                    let mut list: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
                    let mut total = report.total;
                    if has_nu {
                        let parsed = match cli.mode {
                            Mode::Rational => parse_a2m::<Rational>(&text).map(|_| ()),
                            Mode::Float => parse_a2m::<f64>(&text).map(|_| ()),
                        };
                        if let Err(e) = parsed {
                            list.push(e.to_string());
                            total += 1;
                        }
                    }
                    ("tree", list, total)
                }
            }
        }
        Ok(TreeOrTriangulation::Triangulation(v)) => {
            let checked = match cli.mode {
                Mode::Rational => triangulation_violations::<Rational>(v),
                Mode::Float => triangulation_violations::<f64>(v),
            };
            match checked {
                Ok((list, total)) => ("triangulation", list, total),
                Err(e) => ("triangulation", vec![e.to_string()], 1),
            }
        }
    };
    for v in &violations {
        eprintln!("violation: {v}");
    }
    let result = json!({
        "kind": kind,
        "valid": total == 0,
        "violation_count": total,
        "violations": violations,
    });
    emit(cli, cfg, result)?;
    if total > 0 {
        return Err(CliError::Violations { count: total });
    }
    Ok(())
}

fn triangulation_violations<S: Scalar>(v: Value) -> Result<(Vec<String>, usize), FormatError> {
    let (t, k) = triangulation_from_value::<S>(v)?;
    let report = t.validate();
    let mut list: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
    let mut total = report.total;
    if k.arc_count() != t.n() {
        list.push(format!("arc measure has {} arcs, polygon has {} sides", k.arc_count(), t.n()));
        total += 1;
    }
    Ok((list, total))
}

fn face_json(f: &Face) -> Value {
    match f {
        Face::Triangle(t) => json!({ "triangle": t }),
        Face::Segment(a) => json!({ "segment": a }),
    }
}

fn decode<S: Scalar>(cli: &Cli, file: &Path) -> Result<(), CliError> {
    let cfg = config(cli, "decode", json!({ "file": path_str(file) }));
    echo(&cfg);
    let (t, k) = parse_triangulation::<S>(&read(file)?).map_err(invalid)?;
    let d = dual_tree(&t, &k).map_err(invalid)?;
    let result = json!({
        "tree": a2m_json(&d.chi),
        "faces": d.faces.iter().map(face_json).collect::<Vec<_>>(),
        "code": d.chi.canonical_code(),
    });
    emit(cli, cfg, result)
}

fn encode<S: Scalar>(cli: &Cli, file: &Path, root: u64, order: Order) -> Result<(), CliError> {
    let order_name = match order {
        Order::Smallest => "smallest",
        Order::Largest => "largest",
    };
    let cfg = config(cli, "encode", json!({ "file": path_str(file), "root": root, "order": order_name }));
    echo(&cfg);
    let chi = parse_a2m::<S>(&read(file)?).map_err(invalid)?;
    let order = match order {
        Order::Smallest => ComponentOrder::SmallestLeafFirst,
        Order::Largest => ComponentOrder::LargestLeafFirst,
    };
    let e = encode_tree(&chi, root, &order).map_err(invalid)?;
    let triangles: serde_json::Map<String, Value> =
        e.triangle_of_branch.iter().map(|(v, t)| (v.to_string(), json!(t))).collect();
    let result = json!({
        "triangulation": triangulation_json(&e.triangulation, &e.measure),
        "leaf_of_side": e.leaf_of_side,
        "triangle_of_branch": triangles,
    });
    emit(cli, cfg, result)
}

fn shape_dist<S: Scalar>(cli: &Cli, file: &Path, n: &[u32], method: Method, samples: u64) -> Result<(), CliError> {
    let mut params = json!({ "file": path_str(file), "n": n, "method": if method == Method::Exact { "exact" } else { "mc" } });
    if method == Method::Mc {
        params["samples"] = json!(samples);
    }
    let cfg = config(cli, "shape-dist", params);
    echo(&cfg);
    let chi = parse_a2m::<S>(&read(file)?).map_err(invalid)?;
    let result = match method {
        Method::Exact => shape_distribution_json(&shape_distribution_exact(&chi, n).map_err(invalid)?),
        Method::Mc => shape_distribution_json(
            &shape_distribution_mc(&chi, n, samples, cli.seed, cli.jobs as usize).map_err(invalid)?,
        ),
    };
    emit(cli, cfg, result)
}

fn ds<S: Scalar>(
    cli: &Cli,
    files: &[std::path::PathBuf],
    m_max: usize,
    budget: usize,
    samples: u64,
    method: ProfileArg,
) -> Result<(), CliError> {
    let method_name = match method {
        ProfileArg::Exact => "exact",
        ProfileArg::Mc => "mc",
        ProfileArg::Auto => "auto",
    };
    let cfg = config(
        cli,
        "ds",
        json!({
            "files": files.iter().map(|f| path_str(f)).collect::<Vec<_>>(),
            "m_max": m_max,
            "budget": budget,
            "samples": samples,
            "method": method_name,
        }),
    );
    echo(&cfg);
    if m_max == 0 || budget == 0 {
        return Err(CliError::Args("--m-max and --budget must be positive".into()));
    }
    let trunc = Truncation { m_max, per_m_budget: budget };
    let sets = trunc.index_sets();
    let method = match method {
        ProfileArg::Exact => ProfileMethod::Exact,
        ProfileArg::Mc => ProfileMethod::Mc,
        ProfileArg::Auto => ProfileMethod::Auto,
    };
    let mut profiles = Vec::with_capacity(files.len());
    for f in files {
        let chi = parse_a2m::<S>(&read(f)?).map_err(invalid)?;
        let src = A2mSource { chi: &chi, method };
        profiles.push(src.profile(&sets, samples, cli.seed, cli.jobs as usize).map_err(invalid)?);
    }
    let mut matrix = vec![vec![Value::Null; files.len()]; files.len()];
    let mut tail = 0.0;
    for i in 0..files.len() {
        for j in 0..files.len() {
            let d = d_s_from_profiles(&profiles[i], &profiles[j], &trunc).map_err(invalid)?;
            tail = d.tail_bound;
            matrix[i][j] = json!(d.value.to_text());
        }
    }
    let result = json!({ "distances": matrix, "tail_bound": tail.to_text(), "index_sets": sets.len() });
    emit(cli, cfg, result)
}

fn resolve_sizes(s: &Sizes) -> Result<Vec<u32>, CliError> {
    let m = s.m.unwrap_or(s.n.len());
    let n = match (s.n.len(), m) {
        (1, m) => vec![s.n[0]; m],
        (k, m) if k == m => s.n.clone(),
        (k, m) => return Err(CliError::Args(format!("--n has {k} entries but --m is {m}"))),
    };
    if n.is_empty() || n.contains(&0) {
        return Err(CliError::Args("need at least one host and one parasite per host".into()));
    }
    if !(s.gamma_h > 0.0 && s.gamma_h.is_finite() && s.gamma_p > 0.0 && s.gamma_p.is_finite()) {
        return Err(CliError::Args("rates must be positive and finite".into()));
    }
    Ok(n)
}

fn parse_schedule(entries: &[String]) -> Result<Vec<Vec<u32>>, CliError> {
    entries
        .iter()
        .map(|e| {
            let bad = || CliError::Args(format!("schedule entry `{e}` is not of the form MxN"));
            let (m, n) = e.split_once(['x', 'X']).ok_or_else(bad)?;
            let m: usize = m.trim().parse().map_err(|_| bad())?;
            let n: u32 = n.trim().parse().map_err(|_| bad())?;
            if m == 0 || n == 0 {
                return Err(bad());
            }
            Ok(vec![n; m])
        })
        .collect()
}

fn kingman(cli: &Cli, command: &KingmanCommand) -> Result<(), CliError> {
    let jobs = cli.jobs as usize;
    match command {
        KingmanCommand::Sim { sizes } => {
            let n = resolve_sizes(sizes)?;
            let cfg = config(
                cli,
                "kingman sim",
                json!({ "n": n, "gamma_h": sizes.gamma_h.to_text(), "gamma_p": sizes.gamma_p.to_text() }),
            );
            echo(&cfg);
            let h = simulate(&n, sizes.gamma_h, sizes.gamma_p, &mut rng_from_seed(cli.seed)).map_err(invalid)?;
            let e = history_to_tree(&h).map_err(invalid)?;
            let tree = match cli.mode {
                Mode::Rational => a2m_json(&e.chi),
                Mode::Float => a2m_json(&e.chi.to_f64()),
            };
            let result = json!({
                "history": history_json(&h),
                "tree": tree,
                "root": e.root,
                "rooted_shape": e.rooted_shape_code().map_err(invalid)?,
            });
            emit(cli, cfg, result)
        }
        KingmanCommand::Consistency { sizes, j, samples } => {
            let n = resolve_sizes(sizes)?;
            let cfg = config(
                cli,
                "kingman consistency",
                json!({
                    "n": n,
                    "j": j,
                    "gamma_h": sizes.gamma_h.to_text(),
                    "gamma_p": sizes.gamma_p.to_text(),
                    "samples": samples,
                }),
            );
            echo(&cfg);
            let c = ConsistencyConfig {
                n,
                j: j.clone(),
                gamma_h: sizes.gamma_h,
                gamma_p: sizes.gamma_p,
                samples: *samples,
                seed: cli.seed,
            };
            let r = consistency_test(&c, jobs).map_err(|e| CliError::Args(e.to_string()))?;
            let result = json!({
                "tv": r.tv.to_text(),
                "threshold": r.threshold.to_text(),
                "support": r.support,
                "pass": r.pass,
                "restricted": shape_distribution_json(&r.restricted),
                "direct": shape_distribution_json(&r.direct),
            });
            emit(cli, cfg, result)?;
            if !r.pass {
                return Err(CliError::Failed(format!("TV {} above {}", r.tv, r.threshold)));
            }
            Ok(())
        }
        KingmanCommand::Converge { schedule, gamma_h, gamma_p, m_max, budget, samples, seeds } => {
            let sched = parse_schedule(schedule)?;
            if sched.len() < 2 {
                return Err(CliError::Args("the schedule needs at least two entries".into()));
            }
            if *m_max == 0 || *budget == 0 || *samples == 0 || *seeds == 0 {
                return Err(CliError::Args("--m-max, --budget, --samples and --seeds must be positive".into()));
            }
            let cfg = config(
                cli,
                "kingman converge",
                json!({
                    "schedule": schedule,
                    "gamma_h": gamma_h.to_text(),
                    "gamma_p": gamma_p.to_text(),
                    "m_max": m_max,
                    "budget": budget,
                    "samples": samples,
                    "seeds": seeds,
                }),
            );
            echo(&cfg);
            let c = ConvergenceConfig {
                schedule: sched,
                gamma_h: *gamma_h,
                gamma_p: *gamma_p,
                truncation: Truncation { m_max: *m_max, per_m_budget: *budget },
                samples: *samples,
                seeds: *seeds,
                seed: cli.seed,
            };
            let rows = convergence_experiment(&c, jobs).map_err(invalid)?;
            let medians = median_by_step(&rows);
            eprintln!("median by step: {}", medians.iter().map(|m| m.to_text()).collect::<Vec<_>>().join(", "));
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Io { path: "<csv>".into(), source: e.into() };
            w.write_record(["step", "from", "to", "seed", "estimate", "tail_bound"]).map_err(io)?;
            for r in &rows {
                w.write_record([
                    r.step.to_string(),
                    schedule[r.step].clone(),
                    schedule[r.step + 1].clone(),
                    r.seed.to_string(),
                    r.estimate.to_text(),
                    r.tail_bound.to_text(),
                ])
                .map_err(io)?;
            }
            let body = w.into_inner().map_err(|e| CliError::Io { path: "<csv>".into(), source: e.into_error() })?;
            let mut text = format!("# a2m {VERSION} config: {}\n", serde_json::to_string(&cfg).expect("serializable"));
            text.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
            write_out(cli, &text)
        }
    }
}

fn bpd_rate(cli: &Cli, file: Option<&Path>, leaves: Option<usize>, ps: &[usize], trials: usize) -> Result<(), CliError> {
    let leaves = if file.is_none() { Some(leaves.unwrap_or(20)) } else { None };
    let params = match (file, leaves) {
        (Some(f), _) => json!({ "file": path_str(f), "p": ps, "trials": trials }),
        (None, Some(k)) => json!({ "leaves": k, "p": ps, "trials": trials }),
        (None, None) => unreachable!(),
    };
    let cfg = config(cli, "bpd-rate", params);
    echo(&cfg);
    if ps.contains(&0) || trials == 0 {
        return Err(CliError::Args("--p values and --trials must be positive".into()));
    }
    let (tree, mu) = match (file, leaves) {
        (Some(f), _) => {
            let chi = parse_a2m::<f64>(&read(f)?).map_err(invalid)?;
            let mu = chi.nu.intensity();
            (chi.tree, mu)
        }
        (None, Some(k)) => {
            if k < 2 {
                return Err(CliError::Args("--leaves must be at least 2".into()));
            }
            let tree = random_binary_tree(k, &mut rng_from_seed(mix_seed(cli.seed, &[u64::MAX])));
            let mu: Measure<f64> = Measure::uniform(&tree.leaves()).map_err(|e: MeasureError| invalid(e))?;
            (tree, mu)
        }
        (None, None) => unreachable!(),
    };
    let mut reports = Vec::with_capacity(ps.len());
    for (k, &p) in ps.iter().enumerate() {
        let r = empirical_bpd_error(&tree, &mu, p, trials, mix_seed(cli.seed, &[k as u64]), cli.jobs as usize)
            .map_err(invalid)?;
        reports.push(json!({
            "p": p,
            "bound": r.bound.to_text(),
            "max_error": r.max_error().to_text(),
            "median_error": r.median_error().to_text(),
            "all_within_bound": r.all_within_bound(),
            "errors": r.errors.iter().map(|e| e.to_text()).collect::<Vec<_>>(),
        }));
    }
    let result = json!({ "tree": a2m_core::io::tree_json(&tree), "runs": reports });
    emit(cli, cfg, result)
}

fn enumerate(cli: &Cli, n: usize) -> Result<(), CliError> {
    let cfg = config(cli, "enumerate", json!({ "n": n }));
    echo(&cfg);
    let all = enumerate_triangulations::<Rational>(n).map_err(|e| CliError::Args(e.to_string()))?;
    let result = json!({
        "n": n,
        "count": all.len(),
        "triangulations": all.iter().map(|t| t.diagonals().iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    emit(cli, cfg, result)
}
