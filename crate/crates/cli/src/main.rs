use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vn_cli::{render_dot, Env};
use vn_core::search::{grow_ball_with_threads, FindResult, DEFAULT_CAP};
use vn_core::verify::{run_suite, Grid, Suite};
use vn_core::{
    find_element, make_t, make_tau, plan_alpha, save_ball, sidon_generate, sigma_dot, AlphaSequence, Alphabet, ConeStatus,
    Error, GeneratorSet, RationalPoint, SidonStrategy, VnElement, Word,
};

#[derive(Parser)]
#[command(name = "vn", version, about = "Exact computation in the Higman-Thompson groups V_n")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Lines)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Lines,
    Tsv,
}

#[derive(clap::Args)]
struct ExprArgs {
    /// Alphabet size.
    #[arg(short, default_value_t = 2)]
    n: usize,
    /// Expression to evaluate.
    #[arg(short, long = "expr")]
    e: String,
    /// Alpha file bound to the name `s`.
    #[arg(long)]
    alpha: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the reduced form of an element file.
    Canon { file: PathBuf },
    /// Evaluate an expression and print its reduced table.
    Eval(ExprArgs),
    /// Apply an element to a finite word.
    Apply {
        #[command(flatten)]
        x: ExprArgs,
        #[arg(short, long)]
        word: String,
    },
    /// Apply an element to an eventually periodic point `pre:per`.
    Point {
        #[command(flatten)]
        x: ExprArgs,
        #[arg(short, long)]
        point: String,
    },
    Order {
        #[command(flatten)]
        x: ExprArgs,
        #[arg(long, default_value_t = 64)]
        bound: u64,
    },
    /// Sign of an element (odd n only).
    Sign(ExprArgs),
    /// Whether the element preserves word lengths.
    Volume(ExprArgs),
    /// Fixed-point classification of the domain cones.
    Support(ExprArgs),
    /// Print a named construction.
    Make {
        #[arg(value_parser = ["sigma", "tau", "t", "s"])]
        what: String,
        #[arg(short, default_value_t = 2)]
        n: usize,
        /// Alpha file, required for `s`.
        #[arg(long)]
        alpha: Option<PathBuf>,
    },
    /// A Sidon set of the given size.
    Sidon {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value = "greedy")]
        strategy: SidonStrategy,
    },
    /// Place base involutions on a Sidon support with padding.
    Plan {
        #[arg(long, num_args = 1.., required = true)]
        base: Vec<PathBuf>,
        #[arg(long, default_value = "greedy")]
        strategy: SidonStrategy,
        /// Write the plan as an alpha file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run identity checks over a parameter grid.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        /// Alphabet sizes, comma separated.
        #[arg(short, value_delimiter = ',', default_values_t = [2, 3, 5])]
        n: Vec<usize>,
        /// Largest shift k.
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        /// Random samples per degree.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Grow the ball of a given radius in a generated subgroup.
    Ball {
        /// Manifest of `gen <name> <element-file>` lines.
        #[arg(long)]
        gens: PathBuf,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Shortest word for a target element.
    Find {
        #[arg(long)]
        gens: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        radius: usize,
    },
    /// Tree-pair diagram in DOT.
    Dot {
        #[command(flatten)]
        x: ExprArgs,
        #[arg(short, long)]
        o: Option<PathBuf>,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn fail(msg: impl std::fmt::Display) -> String {
    msg.to_string()
}

fn alphabet(n: usize) -> Result<Alphabet, String> {
    Alphabet::new(n).map_err(fail)
}

fn evaluate(x: &ExprArgs) -> Result<VnElement, String> {
    let mut env = Env::new(alphabet(x.n)?);
    if let Some(path) = &x.alpha {
        let seq = AlphaSequence::load(path).map_err(fail)?;
        env.bind("s", seq.s_alpha()).map_err(fail)?;
    }
    env.eval_str(&x.e)
}

fn table(g: &VnElement, format: Format) -> String {
    match format {
        Format::Lines => g.to_text(),
        Format::Tsv => g.pairs().map(|(d, r)| format!("{d}\t{r}\n")).collect(),
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let format = cli.format;
    match cli.command {
        Command::Canon { file } => {
            let text = fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            let g = VnElement::from_text(&text).map_err(fail)?;
            print!("{}", table(&g, format));
        }
        Command::Eval(x) => print!("{}", table(&evaluate(&x)?, format)),
        Command::Apply { x, word } => {
            let g = evaluate(&x)?;
            let w: Word = word.parse().map_err(fail)?;
            println!("{}", g.apply_word(&w).map_err(fail)?);
        }
        Command::Point { x, point } => {
            let g = evaluate(&x)?;
            let p: RationalPoint = point.parse().map_err(fail)?;
            p.check(g.alphabet()).map_err(fail)?;
            println!("{}", g.apply_point(&p));
        }
        Command::Order { x, bound } => println!("{}", evaluate(&x)?.order_bounded(bound)),
        Command::Sign(x) => println!("{}", evaluate(&x)?.sign().map_err(fail)?),
        Command::Volume(x) => println!("{}", evaluate(&x)?.is_volume_preserving()),
        Command::Support(x) => {
            let sep = if format == Format::Tsv { "\t" } else { " " };
            for (w, status) in evaluate(&x)?.support().cones {
                match status {
                    ConeStatus::Fixed => println!("{w}{sep}fixed"),
                    ConeStatus::Moved => println!("{w}{sep}moved"),
                    ConeStatus::Boundary(p) => println!("{w}{sep}boundary{sep}{p}"),
                }
            }
        }
        Command::Make { what, n, alpha } => {
            let a = alphabet(n)?;
            let g = match what.as_str() {
                "sigma" => sigma_dot(a),
                "tau" => make_tau(a),
                "t" => make_t(a),
                _ => {
                    let path = alpha.ok_or("`make s` needs --alpha <file>")?;
                    let seq = AlphaSequence::load(&path).map_err(fail)?;
                    alphabet(n)?.check(seq.alphabet).map_err(fail)?;
                    seq.s_alpha()
                }
            };
            print!("{}", table(&g, format));
        }
        Command::Sidon { count, strategy } => {
            let set = sidon_generate(count, strategy);
            let members: Vec<String> = set.members().iter().map(u64::to_string).collect();
            println!("{}", members.join(if format == Format::Tsv { "\t" } else { " " }));
        }
        Command::Plan { base, strategy, out } => {
            let mut elements = Vec::new();
            for path in &base {
                let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                elements.push(VnElement::from_text(&text).map_err(|e| format!("{}: {e}", path.display()))?);
            }
            let plan = plan_alpha(&elements, strategy).map_err(fail)?;
            let support: Vec<String> = plan.support().members().iter().map(u64::to_string).collect();
            match format {
                Format::Lines => println!(
                    "l={} N={} i0={} I={{{}}}",
                    plan.len(),
                    plan.padding(),
                    plan.i0(),
                    support.join(",")
                ),
                Format::Tsv => println!("{}\t{}\t{}\t{}", plan.len(), plan.padding(), plan.i0(), support.join(",")),
            }
            if let Some(path) = out {
                plan.sequence().save(&path).map_err(fail)?;
            }
        }
        Command::Verify {
            suite,
            n,
            k_max,
            samples,
            seed,
        } => {
            let grid = Grid {
                degrees: n,
                ks: (0..=k_max).collect(),
                samples,
                seed,
            };
            let reports = run_suite(suite, &grid).map_err(fail)?;
            let mut ok = true;
            for r in &reports {
                match format {
                    Format::Lines => println!("{r}"),
                    Format::Tsv => println!("{}\t{}\t{}", r.name, r.params, r.status()),
                }
                if r.failed() {
                    ok = false;
                    if let Some(detail) = r.detail() {
                        eprintln!("{detail}");
                    }
                }
            }
            return Ok(ok);
        }
        Command::Ball {
            gens,
            radius,
            cap,
            out,
            threads,
        } => {
            let set = GeneratorSet::load_manifest(&gens).map_err(fail)?;
            let threads = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from));
            let ball = grow_ball_with_threads(&set, radius, cap, threads).map_err(fail)?;
            for (r, size) in ball.sizes().iter().enumerate() {
                match format {
                    Format::Lines => println!("radius {r}: {size}"),
                    Format::Tsv => println!("{r}\t{size}"),
                }
            }
            if ball.is_truncated() {
                eprintln!("truncated at cap {cap}");
            }
            if let Some(path) = out {
                save_ball(&ball, &path).map_err(fail)?;
            }
        }
        Command::Find { gens, target, radius } => {
            let set = GeneratorSet::load_manifest(&gens).map_err(fail)?;
            let text = fs::read_to_string(&target).map_err(|e| format!("{}: {e}", target.display()))?;
            let g = VnElement::from_text(&text).map_err(fail)?;
            match find_element(&g, &set, radius).map_err(fail)? {
                FindResult::Found(word) => println!("{}", set.format_word(&word)),
                FindResult::NotFound(r) => println!("NotFound({r})"),
            }
        }
        Command::Dot { x, o } => write_or_print(o.as_deref(), &render_dot(&evaluate(&x)?))?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
