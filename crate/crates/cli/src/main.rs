mod custom;

use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use syntomic_core::algebra::set_enumeration_limit;
use syntomic_core::chart::{render_json, render_svg, render_text, ChartSpec, Dump, LabelPolicy};
use syntomic_core::engine::{EngineError, LogEntry};
use syntomic_core::instances::{self as inst, BasisClass, BigradedBasis, InstanceError, NygaardDecomposition};
use syntomic_core::{verify, AlgebraError, Window};

#[derive(Parser)]
#[command(name = "synto", version, about = "Exact syntomic cohomology and spectral-sequence charts over F_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mod (p, v_1, ..., v_{n+1}) syntomic cohomology of BP<n>
    Syntomic(Instance),
    /// E-infinity of the periodic t-Bockstein spectral sequence
    Tp(Instance),
    /// E-infinity of the t-Bockstein spectral sequence for TC⁻, with Nygaard pieces
    TcMinus(Instance),
    /// THH(BP<n>; F_p)
    Thh(Instance),
    /// E-infinity of the Hochschild-May spectral sequence
    HochschildMay(Instance),
    /// TC(BP<2>)/(p, v_1, v_2) as graded dimensions
    TcBp2(Bp2),
    /// K(BP<2>)/(p, v_1, v_2) as graded dimensions
    KBp2(Bp2),
    /// Run the engine on a JSON definition file
    RunCustom(Custom),
    /// Run the acceptance checks
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Chart labels for text and SVG output
    #[arg(long, value_enum, default_value_t = Labels::Full)]
    labels: Labels,
}

#[derive(Args)]
struct Instance {
    #[arg(short, long)]
    p: u32,
    #[arg(short, long, allow_negative_numbers = true)]
    n: i32,
    /// Degree interval a..b
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    window: Option<(i64, i64)>,
    /// Adams weight interval a..b
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    weights: Option<(i64, i64)>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Bp2 {
    #[arg(short, long)]
    p: u32,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    window: Option<(i64, i64)>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Custom {
    #[arg(long)]
    defs: PathBuf,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    window: Option<(i64, i64)>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only these criteria
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Svg,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Labels {
    Full,
    Dots,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("bad lower bound {a:?}: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("bad upper bound {b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Config,
    Window,
    Verify,
    Io,
}

#[derive(Debug)]
pub struct Failure {
    kind: Kind,
    message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Config,
            message: message.into(),
        }
    }

    fn window(message: impl Into<String>) -> Self {
        let message = message.into();
        let hint = if message.starts_with("WINDOW_LIMIT") {
            "shrink --window or raise SYNTO_MAX_WINDOW"
        } else if message.starts_with("INFINITE_WINDOW") {
            "bound the window in every direction"
        } else {
            "enlarge --window"
        };
        Self {
            kind: Kind::Window,
            message: format!("{message} ({hint})"),
        }
    }

    pub fn from_display(e: impl Display) -> Self {
        Self::config(e.to_string())
    }

    pub fn from_engine(e: EngineError) -> Self {
        match e {
            EngineError::WindowTooSmall { .. }
            | EngineError::Algebra(AlgebraError::InfiniteWindow(_) | AlgebraError::LimitExceeded(_)) => {
                Self::window(e.to_string())
            }
            _ => Self::config(e.to_string()),
        }
    }

    fn code(&self) -> u8 {
        match self.kind {
            Kind::Config | Kind::Io => 2,
            Kind::Window => 3,
            Kind::Verify => 4,
        }
    }

    fn tag(&self) -> &'static str {
        match self.kind {
            Kind::Config => "config",
            Kind::Window => "window",
            Kind::Verify => "verify",
            Kind::Io => "io",
        }
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        if e.is_window_error() {
            Failure::window(e.to_string())
        } else {
            Failure::config(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error[config]: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.tag(), f.message.replace('\n', " "));
            ExitCode::from(f.code())
        }
    }
}

fn apply_limit() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("SYNTO_MAX_WINDOW") {
        let limit: usize = v
            .trim()
            .parse()
            .map_err(|_| Failure::config(format!("SYNTO_MAX_WINDOW must be a positive integer, got {v:?}")))?;
        if limit == 0 {
            return Err(Failure::config("SYNTO_MAX_WINDOW must be positive"));
        }
        set_enumeration_limit(limit);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    apply_limit()?;
    match cli.command {
        Command::Syntomic(a) => syntomic(&a),
        Command::Tp(a) => tate(&a, true),
        Command::TcMinus(a) => tate(&a, false),
        Command::Thh(a) => {
            let basis = inst::thh_bpn_page(a.p, a.n, &thh_window(&a))?;
            emit(&a.output, Dump::new(&basis), &basis)
        }
        Command::HochschildMay(a) => {
            let hm = inst::hochschild_may(a.p, a.n, &thh_window(&a))?;
            emit(&a.output, Dump::new(&hm.basis).with_log(&hm.run.log), &hm.basis)
        }
        Command::TcBp2(a) => tc_bp2(&a),
        Command::KBp2(a) => k_bp2(&a),
        Command::RunCustom(a) => run_custom(&a),
        Command::Verify(a) => run_verify(&a),
    }
}

fn big(p: u32, n: i32) -> i64 {
    (p as i64).saturating_pow((n + 1).max(0) as u32)
}

fn window_of(range: Option<(i64, i64)>, weights: Option<(i64, i64)>, default: (i64, i64)) -> Window {
    let (a, b) = range.unwrap_or(default);
    let w = Window::degrees(a, b);
    match weights {
        Some((lo, hi)) => w.with_weight(lo, hi),
        None => w,
    }
}

fn lambda_total(p: u32, n: i32) -> i64 {
    (1..=(n + 1).max(0) as u32).map(|j| 2 * (p as i64).saturating_pow(j) - 1).sum()
}

fn thh_window(a: &Instance) -> Window {
    window_of(a.window, a.weights, (0, lambda_total(a.p, a.n) + 4 * big(a.p, a.n)))
}

fn syntomic(a: &Instance) -> Result<(), Failure> {
    let s = inst::syntomic(a.p, a.n, &window_of(a.window, a.weights, inst::degree_range(a.p, a.n)))?;
    let dump = Dump::new(&s.basis).with_labelings(NygaardDecomposition::labelings());
    emit(&a.output, dump, &s.basis)
}

fn tate(a: &Instance, periodic: bool) -> Result<(), Failure> {
    let w = 4 * big(a.p, a.n);
    let window = window_of(a.window, a.weights, (-w, w));
    if periodic {
        let tp = inst::tp_page(a.p, a.n, &window)?;
        emit(&a.output, Dump::new(&tp.basis).with_log(&tp.run.log), &tp.basis)
    } else {
        let tc = inst::tc_minus_page(a.p, a.n, &window)?;
        let basis = &tc.computation.basis;
        let dump = Dump::new(basis)
            .with_log(&tc.computation.run.log)
            .with_labelings(NygaardDecomposition::labelings());
        emit(&a.output, dump, basis)
    }
}

fn bp2_window(a: &Bp2) -> Window {
    window_of(a.window, None, (-3, 2 * inst::v3_degree(a.p.min(1 << 12))))
}

fn tc_bp2(a: &Bp2) -> Result<(), Failure> {
    let tc = inst::tc_bp2(a.p, &bp2_window(a))?;
    let table = || {
        let mut s = String::from("degree dim\n");
        for (d, k) in &tc.dimensions {
            s.push_str(&format!("{d} {k}\n"));
        }
        s
    };
    match a.output.format {
        Format::Text => write_out(&a.output.out, &table()),
        Format::Json => write_out(&a.output.out, &render_json(&Dump::new(&tc.basis))),
        Format::Svg => write_out(&a.output.out, &chart(&tc.basis, Format::Svg, LabelPolicy::Dots)?),
    }
}

fn k_bp2(a: &Bp2) -> Result<(), Failure> {
    let window = bp2_window(a);
    let rows = inst::k_bp2(a.p, &window)?;
    match a.output.format {
        Format::Text => {
            let mut s = String::from("degree tc k v3_inverted\n");
            for r in &rows {
                s.push_str(&format!("{} {} {} {}\n", r.degree, r.tc, r.k, r.v3_inverted));
            }
            write_out(&a.output.out, &s)
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).map_err(Failure::from_display)?;
            s.push('\n');
            write_out(&a.output.out, &s)
        }
        Format::Svg => {
            let classes = rows
                .iter()
                .flat_map(|r| (0..r.k).map(move |_| BasisClass::new("", r.degree, 0)))
                .collect();
            let basis = BigradedBasis::new(a.p, 2, window, classes);
            write_out(&a.output.out, &chart(&basis, Format::Svg, LabelPolicy::Dots)?)
        }
    }
}

fn run_custom(a: &Custom) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&a.defs).map_err(|e| Failure {
        kind: Kind::Io,
        message: format!("{}: {e}", a.defs.display()),
    })?;
    let def = custom::parse(&text)?;
    let ss = def.build()?;
    let mut window = def.window.unwrap_or(Window::degrees(0, 0));
    if let Some((lo, hi)) = a.window {
        window.degree = (lo, hi);
    } else if def.window.is_none() {
        return Err(Failure::config("no window: pass --window or set \"window\" in the definition"));
    }
    let run = ss.run(&window).map_err(Failure::from_engine)?;
    let alg = ss.algebra();
    let classes = run
        .e_infinity
        .restricted(&window)
        .classes()
        .iter()
        .map(|c| {
            let mut b = BasisClass::new(alg.label(&c.leading), c.trigrade.degree, c.trigrade.weight);
            b.filtration = Some(c.trigrade.filtration);
            b
        })
        .collect();
    let basis = BigradedBasis::new(def.p, 0, window, classes);
    let log: Vec<LogEntry> = run.log.clone();
    emit(&a.output, Dump::new(&basis).without_height().with_log(&log), &basis)
}

fn run_verify(a: &VerifyArgs) -> Result<(), Failure> {
    let indices: Vec<usize> = if a.only.is_empty() { (1..=9).collect() } else { a.only.clone() };
    if let Some(bad) = indices.iter().find(|&&i| !(1..=9).contains(&i)) {
        return Err(Failure::config(format!("no criterion {bad}; choose from 1..9")));
    }
    let results: Vec<verify::CriterionResult> = std::thread::scope(|s| {
        let handles: Vec<_> = indices.iter().map(|&i| s.spawn(move || verify::criterion(i))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread")).collect()
    });
    let body = match a.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&results).map_err(Failure::from_display)?;
            s.push('\n');
            s
        }
        _ => results.iter().map(|r| format!("{r}\n")).collect(),
    };
    write_out(&a.out, &body)?;
    let failed = results.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(Failure {
            kind: Kind::Verify,
            message: format!("{failed} of {} criteria failed", results.len()),
        });
    }
    Ok(())
}

fn policy(labels: Labels) -> LabelPolicy {
    match labels {
        Labels::Full => LabelPolicy::Full,
        Labels::Dots => LabelPolicy::Dots,
    }
}

fn chart(basis: &BigradedBasis, format: Format, labels: LabelPolicy) -> Result<String, Failure> {
    let spec = ChartSpec::fit(basis, labels);
    match format {
        Format::Svg => render_svg(basis, &spec),
        _ => render_text(basis, &spec),
    }
    .map_err(Failure::from_display)
}

fn emit(output: &Output, dump: Dump, basis: &BigradedBasis) -> Result<(), Failure> {
    let body = match output.format {
        Format::Json => render_json(&dump),
        f => chart(basis, f, policy(output.labels))?,
    };
    write_out(&output.out, &body)
}

fn write_out(path: &Option<PathBuf>, body: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure {
        kind: Kind::Io,
        message: e.to_string(),
    };
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| Failure {
            kind: Kind::Io,
            message: format!("{}: {e}", p.display()),
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes()).map_err(io)?;
            out.flush().map_err(io)
        }
    }
}
