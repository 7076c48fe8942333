//! Batch command line front end. Every JSON output embeds a [`RunManifest`];
//! all randomness derives from `--seed`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{compute_report, ManifoldData};
use crate::complex::{Complex, VertexId};
use crate::error::{Error, ExitCode, Result};
use crate::geometry::{centroid_ratio_bound, geometric_barycentric, kappa, random_simplex, GeometryTag};
use crate::intersect::{align_labels, barycentric_polytopal, intersect_linear, torus_intersect};
use crate::io::{self, GeomComplexFile, RunManifest, SubdivisionFile};
use crate::pachner::{apply_sequence, bfs_equivalence, check_local_pseudomanifold, enumerate_moves, MoveSequence, PachnerMove};
use crate::reduction::{alpha_to_beta, beta2_bridge, relate, ReduceOptions};
use crate::shelling::{find_shelling, star_via_shelling, verify_shelling, Apex, ShellingOutcome, DEFAULT_NODE_CAP};
use crate::subdivision::{barycentric, iterated_barycentric, partial_relative, SubdividedComplex, DEFAULT_SIMPLEX_CAP};

#[derive(Parser, Debug)]
#[command(name = "bistellar", version, about = "Pachner moves between triangulations")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sampling commands.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output file; standard output when omitted.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Subdivide a complex.
    Subdivide {
        #[arg(long)]
        input: PathBuf,
        /// bary, partial:r, iterated:m or geometric:m.
        #[arg(long)]
        mode: String,
        /// Per-level max-edge CSV for geometric mode.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SIMPLEX_CAP)]
        cap: usize,
    },
    /// Enumerate, apply and search for Pachner moves.
    #[command(subcommand)]
    Pachner(PachnerCmd),
    /// Shellings of balls and starring by shelling.
    #[command(subcommand)]
    Shell(ShellCmd),
    /// Verified move sequences between subdivisions.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Common subdivision of two geometric complexes.
    Intersect {
        kind: IntersectKind,
        #[arg(long)]
        k1: PathBuf,
        #[arg(long)]
        k2: PathBuf,
    },
    /// Exact move-count bounds and depth thresholds.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Tables for constant-curvature simplexes.
    #[command(subcommand)]
    Geom(GeomCmd),
    /// Independent checks of emitted sequences.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand, Debug)]
enum PachnerCmd {
    /// List every applicable move.
    Enumerate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Apply a move or a move sequence.
    Apply {
        #[arg(long)]
        input: PathBuf,
        /// A single move or a sequence file.
        #[arg(long = "move")]
        moves: PathBuf,
    },
    /// Breadth-first search for a sequence between two complexes.
    Bfs {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ShellCmd {
    /// Find and verify a shelling certificate of a ball.
    Find {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        cap: usize,
    },
    /// Replace a shellable ball inside an ambient complex by a cone.
    Star {
        #[arg(long)]
        ambient: PathBuf,
        #[arg(long)]
        ball: PathBuf,
        /// Apex label; the next fresh label when omitted.
        #[arg(long)]
        apex: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        cap: usize,
    },
}

#[derive(Args, Debug)]
struct ReduceOut {
    /// Directory receiving sequence.json, start.json, end.json and trace.json.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    cap: usize,
}

#[derive(Subcommand, Debug)]
enum ReduceCmd {
    /// Moves from αK to βK.
    Alpha2beta {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
        #[command(flatten)]
        out: ReduceOut,
    },
    /// Moves from β²K′ to βK.
    Bridge {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        kprime: PathBuf,
        #[command(flatten)]
        out: ReduceOut,
    },
    /// Moves from βK1 to βK2 for two triangulations of one flat torus.
    Relate {
        #[arg(long)]
        k1: PathBuf,
        #[arg(long)]
        k2: PathBuf,
        #[command(flatten)]
        out: ReduceOut,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IntersectKind {
    Linear,
    Torus,
}

#[derive(Subcommand, Debug)]
enum BoundCmd {
    /// Evaluate the bounds for a manifold description.
    Compute {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum GeomCmd {
    /// CSV of κ over a grid of dimensions and edge bounds.
    Kappa {
        #[arg(long, value_delimiter = ',', default_value = "euclidean,spherical,hyperbolic")]
        geometry: Vec<GeometryTag>,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1")]
        lambda: Vec<f64>,
    },
    /// CSV of max edge per level of geometric barycentric subdivision.
    ScalingTable {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = DEFAULT_SIMPLEX_CAP)]
        cap: usize,
    },
    /// CSV of centroid ratios on random simplexes against their bounds.
    CentroidCheck {
        #[arg(long, default_value = "euclidean")]
        geometry: GeometryTag,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Replay a sequence and compare the result with an expected complex.
    Replay {
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long)]
        start: PathBuf,
        #[arg(long)]
        expect: Option<PathBuf>,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::Input as i32 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code as i32,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code() as i32
        }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    manifest: RunManifest,
}

impl Ctx<'_> {
    fn input(&mut self, p: &Path) -> PathBuf {
        self.manifest.inputs.push(p.display().to_string());
        p.to_path_buf()
    }

    fn emit_json<T: Serialize>(&mut self, value: &T) -> Result<()> {
        match &self.cli.output {
            Some(p) => {
                self.manifest.outputs.push(p.display().to_string());
                io::write_with_manifest(p, value, &self.manifest)
            }
            None => {
                print!("{}", io::to_json_with_manifest(value, &self.manifest)?);
                Ok(())
            }
        }
    }

    fn emit_text(&mut self, text: &str) -> Result<()> {
        match &self.cli.output {
            Some(p) => {
                self.manifest.outputs.push(p.display().to_string());
                fs::write(p, text)?;
            }
            None => print!("{text}"),
        }
        Ok(())
    }

    fn write_in(&mut self, dir: &Path, name: &str, value: &impl Serialize) -> Result<()> {
        let p = dir.join(name);
        io::write_with_manifest(&p, value, &self.manifest)
    }
}

fn command_name(c: &Command) -> String {
    let s = format!("{c:?}");
    let head: String = s.chars().take_while(|c| c.is_alphanumeric()).collect();
    let inner = s[head.len()..].trim_start_matches('(');
    let sub: String = inner.chars().take_while(|c| c.is_alphanumeric()).collect();
    if sub.is_empty() || !inner.starts_with(|c: char| c.is_uppercase()) {
        head.to_lowercase()
    } else {
        format!("{} {}", head.to_lowercase(), sub.to_lowercase())
    }
}

fn execute(cli: &Cli) -> Result<ExitCode> {
    let mut ctx = Ctx {
        cli,
        manifest: RunManifest::new(&command_name(&cli.command), cli.seed),
    };
    ctx.manifest.param("jobs", cli.jobs);
    match &cli.command {
        Command::Subdivide { input, mode, csv, cap } => subdivide(&mut ctx, input, mode, csv.as_deref(), *cap),
        Command::Pachner(c) => pachner(&mut ctx, c),
        Command::Shell(c) => shell(&mut ctx, c),
        Command::Reduce(c) => reduce(&mut ctx, c),
        Command::Intersect { kind, k1, k2 } => intersect(&mut ctx, *kind, k1, k2),
        Command::Bound(BoundCmd::Compute { input }) => {
            let p = ctx.input(input);
            let data: ManifoldData = io::read(&p)?;
            let report = compute_report(&data)?;
            eprint!("{}", bound_table(&data, &report));
            ctx.emit_json(&report)?;
            Ok(ExitCode::Success)
        }
        Command::Geom(c) => geom(&mut ctx, c),
        Command::Verify(VerifyCmd::Replay { sequence, start, expect }) => {
            let seq: MoveSequence = io::read(&ctx.input(sequence))?;
            let k = io::read_complex(&ctx.input(start))?;
            let end = seq.replay_with(&k, check_local_pseudomanifold)?;
            end.check_closed_pseudomanifold()?;
            if let Some(e) = expect {
                let l = io::read_complex(&ctx.input(e))?;
                if l != end {
                    return Err(Error::Verification("replayed complex differs from the expected one".into()));
                }
            }
            eprintln!("replayed {} moves; end digest {}", seq.len(), end.digest());
            Ok(ExitCode::Success)
        }
    }
}

fn bound_table(d: &ManifoldData, r: &crate::bounds::BoundReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "geometry  {}  n = {}  Λ = {}  p = {}  q = {}", d.geometry, d.n, d.lambda, d.p, d.q);
    let _ = writeln!(s, "μ         {}", r.mu);
    let _ = writeln!(s, "κ         {}", r.kappa);
    if let Some(inj) = &r.inj {
        let _ = writeln!(s, "inj       {inj} ({})", r.inj_source);
    }
    let _ = writeln!(s, "m         {}", r.m);
    let _ = writeln!(s, "m′        {}", r.mprime);
    s
}

fn parse_mode(mode: &str) -> Result<(&str, usize)> {
    match mode.split_once(':') {
        None if mode == "bary" => Ok(("bary", 1)),
        Some((m @ ("partial" | "iterated" | "geometric"), k)) => k
            .parse()
            .map(|k| (m, k))
            .map_err(|_| Error::Input(format!("bad level in mode {mode:?}"))),
        _ => Err(Error::Input(format!("unknown mode {mode:?}"))),
    }
}

fn subdivide(ctx: &mut Ctx, input: &Path, mode: &str, csv: Option<&Path>, cap: usize) -> Result<ExitCode> {
    let (kind, level) = parse_mode(mode)?;
    ctx.manifest.param("mode", mode).param("cap", cap);
    let input = ctx.input(input);
    if kind == "geometric" {
        let g = io::read_geom(&input)?;
        let out = geometric_barycentric(&g, level, cap)?;
        if let Some(p) = csv {
            ctx.manifest.outputs.push(p.display().to_string());
            fs::write(p, scaling_csv(&out.levels))?;
        }
        #[derive(Serialize)]
        struct GeometricOut {
            geometric: GeomComplexFile,
            subdivision: SubdivisionFile,
            levels: Vec<crate::geometry::ScalingLevel>,
        }
        let ok = out.levels.iter().all(|l| l.max_edge <= l.bound + 1e-9);
        ctx.emit_json(&GeometricOut {
            geometric: GeomComplexFile::from(&out.geom),
            subdivision: SubdivisionFile::from(&out.subdivision),
            levels: out.levels,
        })?;
        return Ok(if ok { ExitCode::Success } else { ExitCode::Invariant });
    }
    let k = io::read_complex(&input)?;
    let sub = match kind {
        "bary" => barycentric(&k),
        "iterated" => iterated_barycentric(&k, level, cap)?,
        _ => partial_relative(&k, &SubdividedComplex::identity(&k), level, None)?,
    };
    sub.validate()?;
    ctx.emit_json(&SubdivisionFile::from(&sub))?;
    Ok(ExitCode::Success)
}

fn scaling_csv(levels: &[crate::geometry::ScalingLevel]) -> String {
    let mut s = String::from("level,top_simplexes,max_edge,bound,ok\n");
    for l in levels {
        let _ = writeln!(s, "{},{},{:.17e},{:.17e},{}", l.level, l.top_simplexes, l.max_edge, l.bound, l.max_edge <= l.bound + 1e-9);
    }
    s
}

/// A move file holds either one move or a sequence.
#[derive(serde::Deserialize)]
#[serde(untagged)]
enum MoveInput {
    Sequence(MoveSequence),
    Single(PachnerMove),
}

fn pachner(ctx: &mut Ctx, c: &PachnerCmd) -> Result<ExitCode> {
    match c {
        PachnerCmd::Enumerate { input } => {
            let k = io::read_complex(&ctx.input(input))?;
            #[derive(Serialize)]
            struct Out {
                moves: Vec<PachnerMove>,
            }
            ctx.emit_json(&Out { moves: enumerate_moves(&k) })?;
        }
        PachnerCmd::Apply { input, moves } => {
            let k = io::read_complex(&ctx.input(input))?;
            let out = match io::read::<MoveInput>(&ctx.input(moves))? {
                MoveInput::Sequence(seq) => seq.replay(&k)?,
                MoveInput::Single(mv) => apply_sequence(&k, &[PachnerMove::new(mv.a, mv.b)])?,
            };
            ctx.emit_json(&out)?;
        }
        PachnerCmd::Bfs { input, target, max_depth, cap } => {
            ctx.manifest.param("max_depth", max_depth).param("cap", cap);
            let k = io::read_complex(&ctx.input(input))?;
            let l = io::read_complex(&ctx.input(target))?;
            match bfs_equivalence(&k, &l, *max_depth, *cap)? {
                Some(seq) => ctx.emit_json(&seq)?,
                None => {
                    eprintln!("no sequence of at most {max_depth} moves");
                    return Ok(ExitCode::Invariant);
                }
            }
        }
    }
    Ok(ExitCode::Success)
}

fn shell(ctx: &mut Ctx, c: &ShellCmd) -> Result<ExitCode> {
    match c {
        ShellCmd::Find { input, cap } => {
            ctx.manifest.param("cap", cap);
            let ball = io::read_complex(&ctx.input(input))?;
            match find_shelling(&ball, *cap)? {
                ShellingOutcome::Found(sh) => {
                    verify_shelling(&ball, &sh)?;
                    ctx.emit_json(&sh)?;
                }
                ShellingOutcome::NotShellable => {
                    eprintln!("the ball is not shellable");
                    return Ok(ExitCode::Invariant);
                }
                ShellingOutcome::Undecided { nodes } => {
                    return Err(Error::ResourceCap { what: "shelling search nodes".into(), limit: nodes })
                }
            }
        }
        ShellCmd::Star { ambient, ball, apex, cap } => {
            ctx.manifest.param("cap", cap);
            let k = io::read_complex(&ctx.input(ambient))?;
            let b = io::read_complex(&ctx.input(ball))?;
            let apex = apex.map_or(Apex::Fresh, |v| Apex::Label(VertexId(v)));
            let (result, sequence, apex) = star_via_shelling(&k, &b, apex, *cap)?;
            #[derive(Serialize)]
            struct Out {
                apex: VertexId,
                sequence: MoveSequence,
                result: Complex,
            }
            ctx.emit_json(&Out { apex, sequence, result })?;
        }
    }
    Ok(ExitCode::Success)
}

fn reduce(ctx: &mut Ctx, c: &ReduceCmd) -> Result<ExitCode> {
    let out = match c {
        ReduceCmd::Alpha2beta { out, .. } | ReduceCmd::Bridge { out, .. } | ReduceCmd::Relate { out, .. } => out,
    };
    ctx.manifest.param("cap", out.cap);
    let opts = ReduceOptions { node_cap: out.cap, ..ReduceOptions::default() };
    fs::create_dir_all(&out.out_dir)?;
    let dir = out.out_dir.clone();
    let mut names = vec!["start.json", "end.json", "trace.json", "sequence.json"];
    if matches!(c, ReduceCmd::Relate { .. }) {
        names.push("k2_relabeled.json");
    }
    for name in names {
        ctx.manifest.outputs.push(dir.join(name).display().to_string());
    }
    match c {
        ReduceCmd::Alpha2beta { input, alpha, .. } | ReduceCmd::Bridge { input, kprime: alpha, .. } => {
            let k = io::read_complex(&ctx.input(input))?;
            let sub = io::read_subdivision(&ctx.input(alpha))?;
            let red = if matches!(c, ReduceCmd::Bridge { .. }) {
                beta2_bridge(&k, &sub, &opts)?
            } else {
                alpha_to_beta(&k, &sub, &opts)?
            };
            let start = if matches!(c, ReduceCmd::Bridge { .. }) {
                crate::reduction::second_derived(&sub)?.complex
            } else {
                sub.complex
            };
            ctx.write_in(&dir, "start.json", &start)?;
            ctx.write_in(&dir, "end.json", &red.result)?;
            ctx.write_in(&dir, "trace.json", &red.trace)?;
            ctx.write_in(&dir, "sequence.json", &red.sequence)?;
        }
        ReduceCmd::Relate { k1, k2, .. } => {
            let g1 = io::read_geom(&ctx.input(k1))?;
            let g2 = io::read_geom(&ctx.input(k2))?;
            let rel = relate(&g1, &g2, &opts, DEFAULT_SIMPLEX_CAP)?;
            ctx.write_in(&dir, "start.json", &rel.start)?;
            ctx.write_in(&dir, "end.json", &rel.end)?;
            ctx.write_in(&dir, "k2_relabeled.json", &GeomComplexFile::from(&rel.k2))?;
            #[derive(Serialize)]
            struct Trace<'a> {
                report: &'a crate::reduction::RelateReport,
                bridge1: &'a crate::reduction::ReductionTrace,
                bridge2: &'a crate::reduction::ReductionTrace,
            }
            ctx.write_in(&dir, "trace.json", &Trace { report: &rel.report, bridge1: &rel.bridge1, bridge2: &rel.bridge2 })?;
            ctx.write_in(&dir, "sequence.json", &rel.sequence)?;
            eprintln!("{} moves (bound {})", rel.report.total_moves, rel.report.total_bound);
        }
    }
    Ok(ExitCode::Success)
}

fn intersect(ctx: &mut Ctx, kind: IntersectKind, k1: &Path, k2: &Path) -> Result<ExitCode> {
    let g1 = io::read_geom(&ctx.input(k1))?;
    let g2 = align_labels(&g1, &io::read_geom(&ctx.input(k2))?)?;
    let poly = match kind {
        IntersectKind::Linear => intersect_linear(&g1, &g2)?,
        IntersectKind::Torus => torus_intersect(&g1, &g2)?,
    };
    poly.validate(&g1, &g2)?;
    let base = VertexId(g1.complex.next_vertex().0.max(g2.complex.next_vertex().0));
    let common = barycentric_polytopal(&poly, base)?;
    common.validate(&g1, &g2, &poly.chart)?;
    #[derive(Serialize)]
    struct Out {
        polytopal: crate::intersect::PolytopalComplex,
        kprime: GeomComplexFile,
        over1: SubdivisionFile,
        over2: SubdivisionFile,
    }
    ctx.emit_json(&Out {
        kprime: GeomComplexFile::from(&common.geom),
        over1: SubdivisionFile::from(&common.over1),
        over2: SubdivisionFile::from(&common.over2),
        polytopal: poly,
    })?;
    Ok(ExitCode::Success)
}

/// Runs `f` on `0..count` split over `jobs` threads, keeping the order.
fn parallel_map<T: Send>(count: usize, jobs: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let jobs = jobs.clamp(1, count.max(1));
    let chunk = count.div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let f = &f;
                s.spawn(move || (j * chunk..((j + 1) * chunk).min(count)).map(f).collect::<Vec<T>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Random stream for sample `i`, independent of how samples are scheduled.
pub fn sample_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

fn geom(ctx: &mut Ctx, c: &GeomCmd) -> Result<ExitCode> {
    match c {
        GeomCmd::Kappa { geometry, n, lambda } => {
            let mut s = String::from("geometry,n,lambda,kappa\n");
            for g in geometry {
                for &n in n {
                    for &l in lambda {
                        let _ = writeln!(s, "{g},{n},{l},{:.17e}", kappa(*g, n, l)?);
                    }
                }
            }
            ctx.emit_text(&s)?;
        }
        GeomCmd::ScalingTable { input, levels, cap } => {
            let g = io::read_geom(&ctx.input(input))?;
            let out = geometric_barycentric(&g, *levels, *cap)?;
            ctx.emit_text(&scaling_csv(&out.levels))?;
            if out.levels.iter().any(|l| l.max_edge > l.bound + 1e-9) {
                return Ok(ExitCode::Invariant);
            }
        }
        GeomCmd::CentroidCheck { geometry, n, lambda, samples } => {
            let (tag, n, lambda) = (*geometry, *n, *lambda);
            let seed = ctx.cli.seed;
            let rows = parallel_map(*samples, ctx.cli.jobs, |i| -> Result<Vec<(usize, f64)>> {
                let s = random_simplex(tag, n, lambda, &mut sample_rng(seed, i))?;
                Ok((0..=n).map(|v| (v, s.centroid_ratio(v))).collect())
            });
            let hi = centroid_ratio_bound(tag, n, lambda);
            let lo = if tag == GeometryTag::Hyperbolic { 1.0 } else { 0.0 };
            let mut s = String::from("geometry,n,lambda,sample,vertex,ratio,lower,upper,ok\n");
            let mut all_ok = true;
            for (i, row) in rows.into_iter().enumerate() {
                for (v, r) in row? {
                    let ok = match tag {
                        GeometryTag::Euclidean => (r - n as f64).abs() <= 1e-9 * n as f64,
                        _ => r >= lo - 1e-9 && r <= hi + 1e-9,
                    };
                    all_ok &= ok;
                    let _ = writeln!(s, "{tag},{n},{lambda},{i},{v},{r:.17e},{lo},{hi:.17e},{ok}");
                }
            }
            ctx.emit_text(&s)?;
            if !all_ok {
                return Ok(ExitCode::Invariant);
            }
        }
    }
    Ok(ExitCode::Success)
}
