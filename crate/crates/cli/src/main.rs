use std::collections::BTreeMap;
use std::fs;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use turedo::config::GlobalState;
use turedo::engine::run;
use turedo::formats::{
    emit_cells, emit_report, emit_seed, emit_spec, emit_trace, parse_cells, parse_claim, parse_path, parse_seed,
    parse_spec, DescriptionFile,
};
use turedo::leakage::{
    description_size, encode_description, field_width, reconstruct_outside, record_crossings, truth_outside, write_ndjson,
    Rect,
};
use turedo::render::{color_from_env, default_bbox, render_ascii, render_svg, AsciiOptions, Palette, RenderOptions};
use turedo::rules::{validate_spec, Turedo, TuredoSpec};
use turedo::simcheck::{check_simulation, Mode};
use turedo::zoo::{self, build_sigma_seed, SigmaSeedParams};
use turedo::{Position, TuredoError};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_SETUP: u8 = 4;

#[derive(Parser)]
#[command(name = "turedo", version, about = "Run, check and draw self-avoiding lattice Turing machines")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a machine from a seed and write an NDJSON trace.
    Run {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        steps: u64,
        /// Trace output; standard output when absent.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Also write the final global state as a seed file.
        #[arg(long = "final")]
        final_state: Option<PathBuf>,
    },
    /// Validate a spec file.
    Validate {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Check a simulation claim over a directory of seed files.
    CheckSim {
        #[arg(long)]
        claim: PathBuf,
        #[arg(long)]
        seeds: PathBuf,
        #[arg(long)]
        horizon: u64,
        #[arg(long, default_value = "rigorous")]
        mode: String,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Built-in machines.
    Zoo {
        #[command(subcommand)]
        cmd: ZooCmd,
    },
    /// Crossing descriptions across a dividing path.
    Leakage {
        #[command(subcommand)]
        cmd: LeakCmd,
    },
    /// Draw an orbit as SVG or ASCII.
    Render(RenderArgs),
}

#[derive(Subcommand)]
enum ZooCmd {
    /// List machines and their parameters.
    List,
    /// Write a machine's spec file.
    Export {
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
    },
    /// Write a seed file for a machine.
    Seed {
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
    },
}

#[derive(Subcommand)]
enum LeakCmd {
    /// Record the crossing events of a run.
    Record {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        steps: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also dump the events as NDJSON.
        #[arg(long)]
        ndjson: Option<PathBuf>,
    },
    /// Rebuild the configuration outside the seed's component.
    Reconstruct {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        description: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed file (the truth is simulated) or a cells file to compare with.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Canonical binary size of a description.
    Size {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        description: PathBuf,
        /// Step count used for the field width; defaults to the recorded one.
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        binary: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    seed: PathBuf,
    #[arg(long, default_value_t = 0)]
    steps: u64,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Print an ASCII picture of the final state.
    #[arg(long)]
    ascii: bool,
    #[arg(long, default_value = "default")]
    palette: String,
    #[arg(long, default_value_t = 12)]
    cell_px: u32,
    #[arg(long)]
    no_path: bool,
    /// Dividing path file to overlay.
    #[arg(long)]
    path: Option<PathBuf>,
    /// Block size `bx,by` for gridlines.
    #[arg(long)]
    blocks: Option<String>,
    /// Draw 3D orbits as one group per z-slice.
    #[arg(long)]
    layered: bool,
}

struct Fail {
    code: u8,
    msg: String,
}

impl From<TuredoError> for Fail {
    fn from(e: TuredoError) -> Fail {
        let code = match e {
            TuredoError::Validation(_) => EXIT_VALIDATION,
            _ => EXIT_INPUT,
        };
        Fail { code, msg: e.to_string() }
    }
}

fn fail(code: u8, msg: impl Into<String>) -> Fail {
    Fail { code, msg: msg.into() }
}

type Res<T = ()> = Result<T, Fail>;

fn read(p: &Path) -> Res<String> {
    fs::read_to_string(p).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", p.display())))
}

fn write(p: &Path, text: &str) -> Res {
    fs::write(p, text).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", p.display())))
}

fn load_spec(p: &Path) -> Res<(TuredoSpec, Turedo)> {
    let spec = parse_spec(&read(p)?).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", p.display())))?;
    let t = spec.compile()?;
    Ok((spec, t))
}

fn load_seed(t: &Turedo, p: &Path) -> Res<GlobalState> {
    parse_seed(t, &read(p)?).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", p.display())))
}

fn parse_params(raw: &[String]) -> Res<BTreeMap<String, String>> {
    raw.iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| fail(EXIT_INPUT, format!("parameter {kv:?} is not K=V")))
        })
        .collect()
}

fn cmd_run(spec: &Path, seed: &Path, steps: u64, trace: Option<&Path>, final_state: Option<&Path>) -> Res {
    let (_, t) = load_spec(spec)?;
    let s = load_seed(&t, seed)?;
    let tr = run(&t, &s, steps);
    let text = emit_trace(&t, &tr);
    match trace {
        Some(p) => write(p, &text)?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| fail(EXIT_INPUT, e.to_string()))?,
    }
    if let Some(p) = final_state {
        write(p, &emit_seed(&t, &tr.final_state))?;
    }
    Ok(())
}

fn cmd_validate(spec: &Path) -> Res {
    let s = parse_spec(&read(spec)?).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", spec.display())))?;
    let rep = validate_spec(&s);
    print!("{rep}");
    if rep.is_ok() {
        println!("ok: {} ({} rules after expansion)", s.name, s.expanded_rules().map(|r| r.len()).unwrap_or(0));
        Ok(())
    } else {
        Err(fail(EXIT_VALIDATION, "spec has errors"))
    }
}

fn cmd_check_sim(
    claim: &Path,
    seeds: &Path,
    horizon: u64,
    mode: &str,
    report: Option<&Path>,
    threads: Option<usize>,
) -> Res {
    let mode = Mode::parse(mode)?;
    let claim = parse_claim(&read(claim)?).map_err(|e| match e {
        TuredoError::Validation(_) => Fail::from(e),
        e => fail(EXIT_INPUT, format!("{}: {e}", claim.display())),
    })?;
    let mut files: Vec<PathBuf> = fs::read_dir(seeds)
        .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", seeds.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(fail(EXIT_INPUT, format!("{}: no seed files", seeds.display())));
    }
    let states = files.iter().map(|f| load_seed(&claim.simulated, f)).collect::<Res<Vec<_>>>()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    let rep = pool.install(|| check_simulation(&claim, &states, horizon, mode));
    let text = emit_report(&rep);
    match report {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    for w in &rep.warnings {
        eprintln!("warning: {w}");
    }
    if rep.has_setup_failure() {
        return Err(fail(EXIT_SETUP, "claim setup failure: an encoded seed is not valid"));
    }
    if let Some(w) = rep.first_failure() {
        return Err(fail(
            EXIT_CHECK_FAILED,
            format!("{mode} check failed on {} at t = {}: {}", files[w.seed].display(), w.t, w.detail),
        ));
    }
    eprintln!("{mode} check passed on {} seeds", states.len());
    Ok(())
}

fn take(p: &mut BTreeMap<String, String>, k: &str) -> Option<String> {
    p.remove(k)
}

fn zoo_seed(name: &str, mut params: BTreeMap<String, String>) -> Res<(Turedo, GlobalState)> {
    let seed_keys: &[&str] = match name {
        "spiral-xor" => &["state"],
        "comparator" => &["east", "north"],
        "copy-and-move" => &["a", "i", "a_prime"],
        "zigzag-copier" => &["u"],
        _ => &[],
    };
    let mut sp = BTreeMap::new();
    for k in seed_keys {
        if let Some(v) = take(&mut params, k) {
            sp.insert(*k, v);
        }
    }
    let t = zoo::generate(name, &params)?.compile()?;
    let num = |v: &str| v.parse::<usize>().map_err(|_| fail(EXIT_INPUT, format!("{v:?} is not an index")));
    let s = match name {
        "spiral-xor" => {
            let q = t.state(sp.get("state").map(String::as_str).unwrap_or("↑"))?;
            GlobalState::single_head(t.dim(), q)
        }
        "comparator" => {
            let r = t.radius() as i64;
            let mut c = turedo::Configuration::new();
            if let Some(l) = sp.get("east") {
                c.set(Position::p2(r, 0), t.cell(l)?);
            }
            if let Some(l) = sp.get("north") {
                c.set(Position::p2(0, r), t.cell(l)?);
            }
            GlobalState::new(c, Position::p2(0, 0), t.state("q")?)
        }
        "copy-and-move" => {
            let a_vec: Vec<String> =
                sp.get("a").map(String::as_str).unwrap_or("a,b").split(',').map(|s| s.trim().to_string()).collect();
            let i = num(sp.get("i").map(String::as_str).unwrap_or("0"))?;
            let a_prime = sp.get("a_prime").cloned().unwrap_or_else(|| "a".into());
            build_sigma_seed(&t, &SigmaSeedParams { a_vec, i, a_prime })?
        }
        "zigzag-copier" => {
            let u = sp
                .get("u")
                .map(String::as_str)
                .unwrap_or("0,1,1,0")
                .split(',')
                .map(|s| num(s.trim()))
                .collect::<Res<Vec<usize>>>()?;
            zoo::zigzag_seed(&t, &u)?
        }
        _ => unreachable!("generate rejects unknown names"),
    };
    Ok((t, s))
}

fn cmd_zoo(cmd: ZooCmd) -> Res {
    match cmd {
        ZooCmd::List => {
            for e in zoo::entries() {
                println!("{}: {}", e.name, e.summary);
                for p in &e.params {
                    println!("    {}={} ({})", p.name, p.default, p.help);
                }
            }
            Ok(())
        }
        ZooCmd::Export { name, out, params } => {
            let spec = zoo::generate(&name, &parse_params(&params)?)?;
            write(&out, &emit_spec(&spec))
        }
        ZooCmd::Seed { name, out, params } => {
            let (t, s) = zoo_seed(&name, parse_params(&params)?)?;
            write(&out, &emit_seed(&t, &s))
        }
    }
}

fn load_description(t: &Turedo, p: &Path) -> Res<(turedo::leakage::DividingPath, turedo::leakage::LeakDescription, u64)> {
    let f: DescriptionFile =
        serde_json::from_str(&read(p)?).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", p.display())))?;
    Ok(f.resolve(t)?)
}

fn cmd_leakage(cmd: LeakCmd) -> Res {
    match cmd {
        LeakCmd::Record { spec, seed, path, steps, out, ndjson } => {
            let (_, t) = load_spec(&spec)?;
            let s = load_seed(&t, &seed)?;
            let dp = parse_path(&read(&path)?)?;
            let (d, count) = record_crossings(&t, &s, &dp, steps)?;
            write(&out, &DescriptionFile::new(&t, &dp, &d, steps).emit())?;
            if let Some(p) = ndjson {
                let mut buf = Vec::new();
                write_ndjson(&t, &d, &mut buf)?;
                write(&p, &String::from_utf8(buf).expect("json is utf-8"))?;
            }
            eprintln!("{count} path crossings in {steps} steps");
            Ok(())
        }
        LeakCmd::Reconstruct { spec, description, out, truth } => {
            let (_, t) = load_spec(&spec)?;
            let (dp, d, n) = load_description(&t, &description)?;
            let rec = reconstruct_outside(&t, &dp, &d, n).map_err(|e| fail(EXIT_CHECK_FAILED, e.to_string()))?;
            let text = emit_cells(&t, &rec);
            match &out {
                Some(p) => write(p, &text)?,
                None => print!("{text}"),
            }
            if let Some(tp) = truth {
                let raw = read(&tp)?;
                let want = match parse_seed(&t, &raw) {
                    Ok(seed) => truth_outside(&t, &seed, &dp, n)?,
                    Err(_) => parse_cells(&t, &raw)?,
                };
                let keys: std::collections::BTreeSet<Position> =
                    rec.iter().chain(want.iter()).map(|(p, _)| *p).collect();
                if let Some(p) = keys.into_iter().find(|p| rec.get(p) != want.get(p)) {
                    return Err(fail(
                        EXIT_CHECK_FAILED,
                        format!(
                            "mismatch at {p}: reconstructed {:?}, truth {:?}",
                            t.cell_name(rec.get(&p)),
                            t.cell_name(want.get(&p))
                        ),
                    ));
                }
                eprintln!("reconstruction matches the truth ({} cells)", want.len());
            }
            Ok(())
        }
        LeakCmd::Size { spec, description, steps, binary } => {
            let (_, t) = load_spec(&spec)?;
            let (_, d, recorded) = load_description(&t, &description)?;
            let n = steps.unwrap_or(recorded);
            let bits = description_size(&t, &d, n);
            println!(
                "{{\"format\":1,\"steps\":{n},\"crossings\":{},\"width\":{},\"bits\":{bits},\"bytes\":{}}}",
                d.events.len(),
                field_width(n),
                bits.div_ceil(8)
            );
            if let Some(p) = binary {
                let bytes = encode_description(&t, &d, n)?;
                fs::write(&p, bytes).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", p.display())))?;
            }
            Ok(())
        }
    }
}

fn parse_blocks(s: &str) -> Res<Position> {
    let v: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| fail(EXIT_INPUT, format!("bad block size {s:?}"))))
        .collect::<Res<_>>()?;
    if v.iter().any(|x| *x < 1) {
        return Err(fail(EXIT_INPUT, "block sizes must be positive"));
    }
    Ok(Position::from_slice(&v)?)
}

fn cmd_render(a: RenderArgs) -> Res {
    let (_, t) = load_spec(&a.spec)?;
    let s = load_seed(&t, &a.seed)?;
    let tr = run(&t, &s, a.steps);
    let blocks = a.blocks.as_deref().map(parse_blocks).transpose()?;
    if a.svg.is_none() && !a.ascii {
        return Err(fail(EXIT_INPUT, "choose --svg FILE and/or --ascii"));
    }
    if let Some(out) = &a.svg {
        let opts = RenderOptions {
            cell_px: a.cell_px,
            palette: Palette::named(&a.palette)?,
            draw_head_path: !a.no_path,
            overlay_path: a.path.as_deref().map(|p| read(p).and_then(|x| Ok(parse_path(&x)?))).transpose()?,
            overlay_blocks: blocks,
            layered: a.layered,
        };
        write(out, &render_svg(&t, &s, &tr, &opts)?)?;
    }
    if a.ascii {
        let color = color_from_env() && std::io::stdout().is_terminal();
        let bbox: Rect = default_bbox(&tr.final_state);
        print!("{}", render_ascii(&t, &tr.final_state, bbox, &AsciiOptions { blocks, color })?);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.cmd {
        Cmd::Run { spec, seed, steps, trace, final_state } => {
            cmd_run(&spec, &seed, steps, trace.as_deref(), final_state.as_deref())
        }
        Cmd::Validate { spec } => cmd_validate(&spec),
        Cmd::CheckSim { claim, seeds, horizon, mode, report, threads } => {
            cmd_check_sim(&claim, &seeds, horizon, &mode, report.as_deref(), threads)
        }
        Cmd::Zoo { cmd } => cmd_zoo(cmd),
        Cmd::Leakage { cmd } => cmd_leakage(cmd),
        Cmd::Render(a) => cmd_render(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("turedo: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
