use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use slab_core::arith::{cf_expand, QuadraticReal};
use slab_core::builtin::{resolve, NamedWord, BUILTIN_NAMES};
use slab_core::campaign::{capped_horizon, run_campaign, CampaignConfig};
use slab_core::codings::{
    billiard_word, cutting_sequence, flow_word, render_trajectory_svg, rotation_word, LineParams,
    RotationParams,
};
use slab_core::factors::complexity_profile;
use slab_core::flow::{flow_matrix, kernel_basis, tijdeman_audit, Irrationality, Side};
use slab_core::graphs::{dendricity_check, extension_graph, rauzy_graph};
use slab_core::sturmian::renormalize;
use slab_core::Exec;

/// Exploration and verification tools for low-complexity infinite words.
///
/// Words are given as `builtin:NAME`, `directive:RUNS`,
/// `rotation:y=Y,alpha=A`, `line:x=X1;X2,theta=T1;T2` or
/// `file:PATH[;alphabet=LABELS]`.
#[derive(Parser)]
#[command(name = "slab", version)]
struct Cli {
    /// Run every sweep on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct WordArgs {
    #[arg(long, short)]
    word: String,
    /// Letters scanned for factor statistics (capped by SLAB_HORIZON_CAP).
    #[arg(long, default_value_t = 20_000)]
    horizon: usize,
}

impl WordArgs {
    fn horizon(&self) -> usize {
        capped_horizon(self.horizon)
    }

    fn load(&self) -> Result<NamedWord> {
        resolve(&self.word, self.horizon()).with_context(|| format!("word spec `{}`", self.word))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelSide {
    Right,
    Left,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a prefix of a word.
    Generate {
        #[command(flatten)]
        word: WordArgs,
        #[arg(short, long, default_value_t = 64)]
        n: usize,
    },
    /// List the builtin word names.
    Builtins,
    /// Factor complexity p(0..=n_max).
    Complexity {
        #[command(flatten)]
        word: WordArgs,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
    },
    /// Continued fraction of a rational or quadratic irrational such as
    /// `1/2+1/2*sqrt(5)`.
    Cf {
        value: String,
        #[arg(long, default_value_t = 64)]
        terms: usize,
    },
    /// Renormalize a Sturmian word and print a prefix.
    Renormalize {
        #[command(flatten)]
        word: WordArgs,
        #[arg(short, long, default_value_t = 64)]
        n: usize,
    },
    /// Rauzy graph of length-n factors.
    Rauzy {
        #[command(flatten)]
        word: WordArgs,
        #[arg(short, long)]
        n: usize,
        #[arg(long)]
        dot: bool,
    },
    /// Extension graph of a factor (written with the word's labels; `-`
    /// for the empty word).
    ExtGraph {
        #[command(flatten)]
        word: WordArgs,
        #[arg(long)]
        factor: String,
        #[arg(long)]
        dot: bool,
    },
    /// Flow matrix M = R - L for length n.
    FlowMatrix {
        #[command(flatten)]
        word: WordArgs,
        #[arg(short, long)]
        n: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Exact kernel of the flow matrix, as JSON fractions.
    Kernel {
        #[command(flatten)]
        word: WordArgs,
        #[arg(short, long)]
        n: usize,
        #[arg(long, value_enum, default_value = "right")]
        side: KernelSide,
    },
    /// Dendricity check up to factor length n_max.
    Dendric {
        #[command(flatten)]
        word: WordArgs,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Audit complexity against p(n) >= (Δ-1)(n-1)+d.
    TijdemanAudit {
        #[command(flatten)]
        word: WordArgs,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// Alphabet size; defaults to the word's.
        #[arg(long)]
        d: Option<usize>,
        /// Comma-separated exact letter frequencies; defaults to the
        /// word's own when known.
        #[arg(long)]
        exact_freq: Option<String>,
        #[arg(long)]
        claimed_delta: Option<usize>,
        #[arg(long)]
        claimed_min_delta: Option<usize>,
    },
    /// Rotation, billiard, cutting-sequence and flow codings.
    Code {
        #[command(subcommand)]
        kind: CodeKind,
    },
    /// Run a campaign config; exit 0 on success, 1 on a failed check.
    Campaign {
        config: PathBuf,
        /// Omit timing fields so reports are byte-reproducible.
        #[arg(long)]
        no_timing: bool,
        /// Overrides the config's `output`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CodeKind {
    Rotation {
        #[arg(long)]
        y: String,
        #[arg(long)]
        alpha: String,
        #[arg(short, long, default_value_t = 64)]
        n: usize,
    },
    Billiard(LineArgs),
    Cutting(LineArgs),
    Flow(LineArgs),
}

#[derive(Args)]
struct LineArgs {
    /// Start point `X1;X2`.
    #[arg(long, default_value = "0;0")]
    x: String,
    /// Direction `T1;T2`.
    #[arg(long)]
    theta: String,
    #[arg(short, long, default_value_t = 64)]
    n: usize,
    /// Write the unfolded-square trajectory as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, default_value_t = 24)]
    bounces: usize,
}

impl LineArgs {
    fn params(&self) -> Result<LineParams> {
        let pair = |s: &str| -> Result<(QuadraticReal, QuadraticReal)> {
            let (a, b) = s
                .split_once(';')
                .context("expected two `;`-separated values")?;
            Ok((a.parse()?, b.parse()?))
        };
        Ok(LineParams::new(pair(&self.x)?, pair(&self.theta)?)?)
    }
}

/// A closed pipe (e.g. `| head`) is not an error.
fn print_json(v: &serde_json::Value) {
    let _ = writeln!(
        io::stdout(),
        "{}",
        serde_json::to_string_pretty(v).expect("json")
    );
}

fn run(cli: Cli) -> Result<u8> {
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    match cli.cmd {
        Cmd::Generate { word, n } => {
            let w = word.load()?.stream;
            println!("{}", w.alphabet().render(&w.prefix(n)));
        }
        Cmd::Builtins => {
            for name in BUILTIN_NAMES {
                println!("{name}");
            }
        }
        Cmd::Complexity { word, n_max } => {
            let w = word.load()?.stream;
            let p = complexity_profile(&w, n_max, word.horizon(), exec)?;
            print_json(&json!({
                "horizon": p.horizon,
                "complexity": p.values,
                "saturated": p.all_saturated(),
            }));
        }
        Cmd::Cf { value, terms } => {
            let x: QuadraticReal = value.parse()?;
            let cf = cf_expand(&x, terms)?;
            println!("{cf}");
            print_json(&cf.to_json());
        }
        Cmd::Renormalize { word, n } => {
            let w = word.load()?.stream;
            let r = renormalize(&w, word.horizon())?;
            println!("{}", r.alphabet().render(&r.prefix(n)));
        }
        Cmd::Rauzy { word, n, dot } => {
            let w = word.load()?.stream;
            let g = rauzy_graph(&w, n, word.horizon())?;
            if dot {
                print!("{}", g.to_dot());
            } else {
                print_json(&json!({
                    "n": n,
                    "vertices": g.vertices.len(),
                    "edges": g.edges.len(),
                    "strongly_connected": g.is_strongly_connected(),
                    "semi_connected": g.is_semi_connected(),
                    "saturated": g.saturated,
                }));
            }
        }
        Cmd::ExtGraph { word, factor, dot } => {
            let w = word.load()?.stream;
            let u = if factor == "-" {
                Default::default()
            } else {
                w.alphabet().parse_word(&factor)?
            };
            let g = extension_graph(&w, &u, word.horizon())?;
            if dot {
                print!("{}", g.to_dot(w.alphabet()));
            } else {
                print_json(&json!({
                    "tree": format!("{:?}", g.is_tree()?),
                    "bilateral_excess": g.bilateral_excess(),
                    "edges": g.edges.len(),
                }));
            }
        }
        Cmd::FlowMatrix { word, n, csv } => {
            let w = word.load()?.stream;
            let (m, saturated) = flow_matrix(&w, n, word.horizon())?;
            if !saturated {
                eprintln!(
                    "warning: factor tables not saturated at horizon {}",
                    word.horizon()
                );
            }
            if csv {
                print!("{}", m.to_csv());
            } else {
                print!("{m}");
            }
        }
        Cmd::Kernel { word, n, side } => {
            let w = word.load()?.stream;
            let (m, _) = flow_matrix(&w, n, word.horizon())?;
            let side = match side {
                KernelSide::Right => Side::Right,
                KernelSide::Left => Side::Left,
            };
            print_json(&kernel_basis(&m, side).to_json(w.alphabet()));
        }
        Cmd::Dendric { word, n_max } => {
            let w = word.load()?.stream;
            let r = dendricity_check(&w, n_max, word.horizon(), exec)?;
            print_json(&r.to_json(w.alphabet()));
            return Ok(u8::from(!r.is_dendric()));
        }
        Cmd::TijdemanAudit {
            word,
            n_max,
            d,
            exact_freq,
            claimed_delta,
            claimed_min_delta,
        } => {
            let nw = word.load()?;
            let d = d.unwrap_or(nw.stream.alphabet().size());
            let exact = match exact_freq {
                Some(s) => Some(
                    s.split(',')
                        .map(|x| x.trim().parse::<QuadraticReal>())
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                None => nw.exact_freqs.clone(),
            };
            let info = match (claimed_delta, exact) {
                (Some(k), _) => Irrationality::Claimed {
                    delta: claimed_min_delta,
                    max_delta: k,
                },
                (None, Some(f)) => Irrationality::Exact(f),
                (None, None) => Irrationality::Unknown,
            };
            let a = tijdeman_audit(&nw.stream, d, n_max, word.horizon(), &info, exec)?;
            print_json(&a.to_json());
            return Ok(u8::from(!a.passes()));
        }
        Cmd::Code { kind } => code(kind)?,
        Cmd::Campaign {
            config,
            no_timing,
            output,
        } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = CampaignConfig::parse(&text)?;
            if no_timing {
                cfg.timing = false;
            }
            if output.is_some() {
                cfg.output = output;
            }
            let report = run_campaign(&cfg, exec)?;
            let text = serde_json::to_string_pretty(&report.to_json())? + "\n";
            match &cfg.output {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
            for c in &report.checks {
                let verdict = match (c.pass, c.caveat) {
                    (true, _) => "pass",
                    (false, true) => "caveat",
                    (false, false) => "FAIL",
                };
                eprintln!("{:<20} {verdict}", c.name);
            }
            return Ok(report.exit_code() as u8);
        }
    }
    Ok(0)
}

fn code(kind: CodeKind) -> Result<()> {
    let binary = slab_core::Alphabet::numeric(2)?;
    let word = match kind {
        CodeKind::Rotation { y, alpha, n } => {
            let p = RotationParams::new(y.parse()?, alpha.parse()?)?;
            rotation_word(&p, n)
        }
        CodeKind::Billiard(a) => line_code(&a, billiard_word)?,
        CodeKind::Cutting(a) => line_code(&a, cutting_sequence)?,
        CodeKind::Flow(a) => line_code(&a, flow_word)?,
    };
    println!("{}", binary.render(&word));
    Ok(())
}

fn line_code(
    a: &LineArgs,
    f: fn(&LineParams, usize) -> slab_core::Result<slab_core::FiniteWord>,
) -> Result<slab_core::FiniteWord> {
    let p = a.params()?;
    if let Some(path) = &a.svg {
        std::fs::write(path, render_trajectory_svg(&p, a.bounces)?)?;
    }
    Ok(f(&p, a.n)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
