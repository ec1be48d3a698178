use std::fs;
use std::io::Read;
use std::time::Instant;

use kenclose::approx::{approx_optimize_with, ApproxConfig};
use kenclose::cover::{solve_3sided_k_sensitive, solve_k_sensitive, solve_with_outliers};
use kenclose::exact::{solve_3sided, solve_arbitrary, solve_exact, solve_min_weight, solve_red_blue, RedBlueObjective};
use kenclose::oracle::{
    brute_force_colored, brute_force_min_weight, brute_force_opt, brute_force_red_range, brute_force_subset_sum,
    Constraint,
};
use kenclose::reduction::{gen_convolution_reduction, ReductionVariant};
use kenclose::subsetsum::{solve_colored_seeded, solve_subset_sum_with};
use kenclose::{gen, Error, ScoreKind, Solution64, SolutionRect, WeightedPoint64};
use serde::Serialize;

use crate::args::{ApproxArgs, BenchArgs, Command, GenArgs, GenKind, Io, Objective, ReductionKind, Score, SolveArgs, Variant};
use crate::input::{parse_points, plain, Schema};
use crate::report::{digest, Parameters, Report, RunManifest};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Mismatch(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(_) | Error::RedCountUnreachable { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

type Out = Vec<String>;

/// Runs a parsed command and returns the lines for standard output.
pub fn run(cmd: &Command) -> Result<Out, CliError> {
    match cmd {
        Command::Solve(a) => run_solve(a, false),
        Command::Verify(a) => run_solve(a, true),
        Command::Approx(a) => run_approx(a),
        Command::Gen(a) => run_gen(a),
        Command::Bench(a) => run_bench(a),
    }
}

fn read_input(io: &Io) -> Result<String, CliError> {
    match &io.input {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::Parse(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Parse(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn write_manifest(io: &Io, command: &str, variant: &str, parameters: Parameters, text: &str, report: &Report) -> Result<(), CliError> {
    let Some(path) = &io.manifest else { return Ok(()) };
    let m = RunManifest {
        command: command.to_string(),
        variant: variant.to_string(),
        parameters,
        seed: io.seed,
        input_digest: digest(text),
        elapsed_ms: report.elapsed_ms,
        result: report.clone(),
    };
    let json = serde_json::to_string_pretty(&m).expect("plain data serializes");
    fs::write(path, json + "\n").map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn kind_of(s: Score) -> ScoreKind {
    match s {
        Score::Perimeter => ScoreKind::Perimeter,
        Score::Area => ScoreKind::Area,
    }
}

fn schema_for(a: &SolveArgs) -> Schema {
    match a.variant {
        Variant::Weighted | Variant::SubsetSum => Schema::Weighted,
        Variant::RedBlue => Schema::Colored(2),
        Variant::Colored => Schema::Colored(a.counts.as_ref().map_or(0, |c| c.len())),
        _ => Schema::Plain,
    }
}

fn need_k(a: &SolveArgs, n: usize) -> Result<usize, CliError> {
    let k = a.k.ok_or_else(|| CliError::Usage(format!("variant {} needs -k", a.variant.name())))?;
    check_k(k, n)
}

fn check_k(k: usize, n: usize) -> Result<usize, CliError> {
    if k == 0 {
        return Err(CliError::Usage("k must be positive".into()));
    }
    if k > n {
        return Err(CliError::Infeasible(format!("cannot enclose {k} of {n} points")));
    }
    Ok(k)
}

fn objective(a: &SolveArgs) -> Result<RedBlueObjective, CliError> {
    Ok(match a.objective {
        Objective::MinRed => RedBlueObjective::MinRed,
        Objective::MaxRed => RedBlueObjective::MaxRed,
        Objective::ExactRed => {
            RedBlueObjective::ExactRed(a.red.ok_or_else(|| CliError::Usage("exact-red needs --red".into()))?)
        }
    })
}

/// Dispatches one variant; `diff` is the subset-sum distance when relevant.
fn solve(a: &SolveArgs, points: &[WeightedPoint64]) -> Result<(Solution64, Option<f64>), CliError> {
    let pts = plain(points);
    let n = pts.len();
    let geometric = |kind: ScoreKind| -> Result<Solution64, CliError> {
        if let Some(t) = a.outliers {
            if t >= n {
                return Err(CliError::Infeasible(format!("{t} outliers leave no point of {n}")));
            }
            return Ok(solve_with_outliers(&pts, t, kind)?);
        }
        let k = need_k(a, n)?;
        if let Some(eps) = a.eps {
            if kind != ScoreKind::Area {
                return Err(CliError::Usage("--eps applies to the area variant only".into()));
            }
            let (s, _) = approx_optimize_with(&pts, k, eps, a.io.seed, &ApproxConfig::default())?;
            return Ok(s);
        }
        if a.k_sensitive {
            return Ok(solve_k_sensitive(&pts, k, kind, &|p, k, kind| solve_exact(p, k, kind))?);
        }
        Ok(solve_exact(&pts, k, kind)?)
    };
    let s = match a.variant {
        Variant::Perimeter => geometric(ScoreKind::Perimeter)?,
        Variant::Area => geometric(ScoreKind::Area)?,
        Variant::ThreeSided => {
            let above = pts.iter().filter(|p| p.y >= 0.0).count();
            let k = need_k(a, above)?;
            if a.k_sensitive {
                solve_3sided_k_sensitive(&pts, k, kind_of(a.score))?
            } else {
                solve_3sided(&pts, k, kind_of(a.score), a.q)?
            }
        }
        Variant::Weighted => solve_min_weight(points, need_k(a, n)?)?,
        Variant::RedBlue => solve_red_blue(points, need_k(a, n)?, objective(a)?)?,
        Variant::SubsetSum => {
            let t = a.target.ok_or_else(|| CliError::Usage("subset-sum needs --target".into()))?;
            let s = solve_subset_sum_with(points, need_k(a, n)?, t, a.q)?;
            let d = s.score;
            return Ok((s, Some(d)));
        }
        Variant::Colored => {
            let counts = a.counts.as_ref().ok_or_else(|| CliError::Usage("colored needs --counts".into()))?;
            check_k(counts.iter().sum(), n)?;
            solve_colored_seeded(points, counts, a.io.seed)?
        }
        Variant::Arbitrary => {
            let k = need_k(a, n)?;
            if k < 2 {
                return Err(CliError::Usage("arbitrary orientation needs k >= 2".into()));
            }
            solve_arbitrary(&pts, k, kind_of(a.score))?
        }
    };
    Ok((s, None))
}

fn parameters(a: &SolveArgs) -> Parameters {
    Parameters {
        k: a.k,
        eps: a.eps,
        target: a.target,
        outliers: a.outliers,
        counts: a.counts.clone(),
        q: a.q,
    }
}

fn run_solve(a: &SolveArgs, verify: bool) -> Result<Out, CliError> {
    let text = read_input(&a.io)?;
    let points = parse_points(&text, schema_for(a)).map_err(|e| CliError::Parse(e.to_string()))?;
    if points.is_empty() {
        return Err(CliError::Infeasible("no input points".into()));
    }
    let start = Instant::now();
    let solved = solve(a, &points);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let mut report = match (verify, solved) {
        (false, r) => {
            let (s, diff) = r?;
            let mut rep = Report::from_solution(a.variant.name(), &s, elapsed, a.io.seed);
            rep.diff = diff;
            rep
        }
        (true, r) => verify_against_oracle(a, &points, r, elapsed)?,
    };
    report.elapsed_ms = elapsed;
    let command = if verify { "verify" } else { "solve" };
    write_manifest(&a.io, command, a.variant.name(), parameters(a), &text, &report)?;
    Ok(vec![report.to_line()])
}

fn mismatch(what: String) -> CliError {
    CliError::Mismatch(what)
}

/// Report whose `diff` is the gap between solver and oracle; any gap is
/// a mismatch.
fn verify_against_oracle(
    a: &SolveArgs,
    points: &[WeightedPoint64],
    solved: Result<(Solution64, Option<f64>), CliError>,
    elapsed: f64,
) -> Result<Report, CliError> {
    let pts = plain(points);
    let n = pts.len();
    if a.variant == Variant::Colored {
        let counts = a.counts.clone().unwrap_or_default();
        check_k(counts.iter().sum(), n)?;
        let feasible = brute_force_colored(points, &counts)?;
        return match (solved, feasible) {
            (Ok((s, _)), true) => {
                let mut census = vec![0usize; counts.len()];
                for &i in &s.witness {
                    census[points[i].color.unwrap_or(0)] += 1;
                }
                if census != counts {
                    return Err(mismatch(format!("census {census:?} differs from {counts:?}")));
                }
                let mut r = Report::from_solution(a.variant.name(), &s, elapsed, a.io.seed);
                r.diff = Some(0.0);
                Ok(r)
            }
            (Err(CliError::Infeasible(m)), false) => Err(CliError::Infeasible(m)),
            (Ok(_), false) => Err(mismatch("solver found a rectangle the oracle rules out".into())),
            (Err(CliError::Infeasible(_)), true) => Err(mismatch("oracle found a rectangle the solver missed".into())),
            (Err(e), _) => Err(e),
        };
    }
    if let (Variant::RedBlue, Objective::ExactRed) = (a.variant, a.objective) {
        let want = a.red.ok_or_else(|| CliError::Usage("exact-red needs --red".into()))?;
        let (lo, hi) = brute_force_red_range(points, need_k(a, n)?)?;
        let reachable = lo <= want && want <= hi;
        return match (solved, reachable) {
            (Ok((s, _)), true) if s.score == want as f64 => {
                let mut r = Report::from_solution(a.variant.name(), &s, elapsed, a.io.seed);
                r.diff = Some(0.0);
                Ok(r)
            }
            (Err(CliError::Infeasible(m)), false) => Err(CliError::Infeasible(m)),
            (Err(e @ CliError::Usage(_)), _) => Err(e),
            _ => Err(mismatch(format!("red count {want} with oracle range [{lo}, {hi}]"))),
        };
    }
    let (s, _) = solved?;
    let k = match (a.outliers, a.variant) {
        (Some(t), Variant::Perimeter | Variant::Area) => n - t,
        _ => a.k.unwrap_or(0),
    };
    let oracle = match a.variant {
        Variant::Perimeter => brute_force_opt(&pts, k, ScoreKind::Perimeter, Constraint::None)?.score,
        Variant::Area => brute_force_opt(&pts, k, ScoreKind::Area, Constraint::None)?.score,
        Variant::ThreeSided => brute_force_opt(&pts, k, kind_of(a.score), Constraint::BottomOnXAxis)?.score,
        Variant::Weighted => brute_force_min_weight(points, k)?,
        Variant::SubsetSum => brute_force_subset_sum(points, k, a.target.unwrap_or(0.0))?,
        Variant::RedBlue => {
            let (lo, hi) = brute_force_red_range(points, k)?;
            if a.objective == Objective::MaxRed {
                hi as f64
            } else {
                lo as f64
            }
        }
        Variant::Arbitrary => brute_force_opt(&pts, k, kind_of(a.score), Constraint::None)?.score,
        Variant::Colored => unreachable!("handled above"),
    };
    let count = match &s.rect {
        SolutionRect::Axis(r) => r.count_enclosed(&pts),
        SolutionRect::Oriented(o) => {
            let scale = pts.iter().fold(1.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()));
            pts.iter().filter(|p| o.contains(p, scale * 1e-9)).count()
        }
    };
    let exactly = matches!(a.variant, Variant::Weighted | Variant::SubsetSum | Variant::RedBlue);
    if count < k || (exactly && s.count != k) {
        return Err(mismatch(format!("rectangle encloses {count} points, needs {k}")));
    }
    let diff = (s.score - oracle).abs();
    let ok = match a.variant {
        // rotations can only improve on the best axis-parallel rectangle
        Variant::Arbitrary => s.score <= oracle * (1.0 + 1e-9),
        Variant::Area if a.eps.is_some() => s.score >= oracle && s.score <= (1.0 + a.eps.unwrap_or(0.0)) * oracle,
        _ => diff == 0.0,
    };
    if !ok {
        return Err(mismatch(format!("solver score {} vs oracle {oracle}", s.score)));
    }
    let mut r = Report::from_solution(a.variant.name(), &s, elapsed, a.io.seed);
    r.diff = Some(diff);
    Ok(r)
}

fn run_approx(a: &ApproxArgs) -> Result<Out, CliError> {
    let text = read_input(&a.io)?;
    let pts = plain(&parse_points(&text, Schema::Plain).map_err(|e| CliError::Parse(e.to_string()))?);
    check_k(a.k, pts.len())?;
    let mut cfg = ApproxConfig { decision_eps: a.decision_eps, ..ApproxConfig::default() };
    if let Some(b) = a.b {
        cfg.b = b;
    }
    let start = Instant::now();
    let (s, _) = approx_optimize_with(&pts, a.k, a.eps, a.io.seed, &cfg)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let report = Report::from_solution("approx", &s, elapsed, a.io.seed);
    let params = Parameters { k: Some(a.k), eps: Some(a.eps), ..Parameters::default() };
    write_manifest(&a.io, "approx", "area", params, &text, &report)?;
    Ok(vec![report.to_line()])
}

fn run_gen(a: &GenArgs) -> Result<Out, CliError> {
    if a.n == 0 {
        return Err(CliError::Usage("n must be positive".into()));
    }
    let mut out = vec![format!("# kind={:?} n={} seed={}", a.kind, a.n, a.seed).to_lowercase()];
    if a.kind == GenKind::Convolution {
        let inst = gen::conv_instance(a.n, a.seed);
        let variant = match a.reduction {
            ReductionKind::Perimeter => ReductionVariant::Perimeter,
            ReductionKind::Area => ReductionVariant::Area,
            ReductionKind::Weight => ReductionVariant::Weight,
        };
        let r = gen_convolution_reduction(&inst, variant)?;
        out.push(format!("# reduction={:?}", a.reduction).to_lowercase());
        out.push(format!("# k={}", r.k));
        out.push(format!("# threshold={}", r.threshold));
        out.push(format!("# decision={}", r.decision));
        for p in &r.points {
            if variant == ReductionVariant::Weight {
                out.push(format!("{} {} {}", p.point.x, p.point.y, p.weight));
            } else {
                out.push(format!("{} {}", p.point.x, p.point.y));
            }
        }
        return Ok(out);
    }
    let pts = match a.kind {
        GenKind::Uniform => gen::uniform_points(a.n, a.range, a.seed),
        GenKind::Grid => gen::grid_points(a.n),
        _ => gen::clustered_points(a.n, a.clusters, a.range, a.seed),
    };
    let mut r = gen::rng(a.seed ^ 0x9e37_79b9_7f4a_7c15);
    use rand::Rng;
    for p in pts {
        let mut line = format!("{} {}", p.x, p.y);
        if let Some(w) = a.weights {
            line += &format!(" {}", r.gen_range(-w.abs()..=w.abs()));
        } else if let Some(d) = a.colors {
            line += &format!(" {}", r.gen_range(0..d.max(1)));
        }
        out.push(line);
    }
    Ok(out)
}

#[derive(Serialize)]
struct BenchLine {
    variant: String,
    n: usize,
    k: usize,
    median_ms: f64,
    ratio: Option<f64>,
}

fn threads() -> usize {
    std::env::var("KENCLOSE_THREADS").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0)
}

fn bench_one(a: &BenchArgs, n: usize) -> Result<(usize, f64), CliError> {
    let k = a.k.unwrap_or((n / 10).max(2)).min(n);
    let seed = a.seed.wrapping_add(n as u64);
    let points: Vec<WeightedPoint64> = match a.variant {
        Variant::Weighted | Variant::SubsetSum => gen::weighted_points(n, 4 * n as i64, 10, seed),
        Variant::RedBlue | Variant::Colored => gen::colored_points(n, 2, 4 * n as i64, seed),
        _ => gen::uniform_points(n, 4 * n as i64, seed)
            .into_iter()
            .map(|p| WeightedPoint64::new(p.x, p.y, 0.0))
            .collect(),
    };
    let args = SolveArgs {
        variant: a.variant,
        k: Some(k),
        eps: None,
        target: Some(0.0),
        outliers: None,
        k_sensitive: false,
        counts: Some(vec![k / 2, k - k / 2]),
        q: None,
        score: a.score,
        objective: Objective::MinRed,
        red: None,
        io: Io { input: None, seed: a.seed, manifest: None },
    };
    let mut times = Vec::new();
    for _ in 0..a.reps.max(1) {
        let start = Instant::now();
        match solve(&args, &points) {
            Ok(_) | Err(CliError::Infeasible(_)) => {}
            Err(e) => return Err(e),
        }
        times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    times.sort_by(f64::total_cmp);
    Ok((k, times[times.len() / 2]))
}

fn run_bench(a: &BenchArgs) -> Result<Out, CliError> {
    let workers = threads().min(a.sizes.len());
    let results: Vec<Result<(usize, f64), CliError>> = if workers <= 1 {
        a.sizes.iter().map(|&n| bench_one(a, n)).collect()
    } else {
        let mut slots: Vec<Option<Result<(usize, f64), CliError>>> = (0..a.sizes.len()).map(|_| None).collect();
        std::thread::scope(|s| {
            for (w, chunk) in slots.chunks_mut(a.sizes.len().div_ceil(workers)).enumerate() {
                let base = w * a.sizes.len().div_ceil(workers);
                s.spawn(move || {
                    for (off, slot) in chunk.iter_mut().enumerate() {
                        *slot = Some(bench_one(a, a.sizes[base + off]));
                    }
                });
            }
        });
        slots.into_iter().map(|s| s.expect("every size ran")).collect()
    };
    let mut out = Vec::new();
    let mut prev: Option<f64> = None;
    for (&n, r) in a.sizes.iter().zip(results) {
        let (k, median_ms) = r?;
        let ratio = prev.filter(|&p| p > 0.0).map(|p| median_ms / p);
        prev = Some(median_ms);
        let line = BenchLine { variant: a.variant.name().into(), n, k, median_ms, ratio };
        out.push(serde_json::to_string(&line).expect("plain data serializes"));
    }
    Ok(out)
}
