use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lagrangian_ainf::category::{BasisMorphism, LineCategory};
use lagrangian_ainf::dr::{HomElement, XKey};
use lagrangian_ainf::products::Products;
use lagrangian_ainf::verify::{sdr_report, stasheff_sweep, Mode, SweepOptions};
use lagrangian_ainf_cli::config;
use lagrangian_ainf_cli::svg::{render, Selection};

/// Exact A-infinity products for lines in the plane.
#[derive(Parser)]
#[command(name = "ainf", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Via {
    Closed,
    Hpt,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Intersection points with the degrees of both crossings.
    Intersections {
        /// Configuration file, or CFG3.
        config: String,
    },
    /// Evaluates m_k on a composable sequence of basis literals.
    Product {
        config: String,
        #[arg(required = true)]
        literals: Vec<String>,
        #[arg(long, value_enum, default_value = "closed")]
        via: Via,
    },
    /// Stasheff sweep with branch coverage.
    Check {
        config: String,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long, default_value_t = 2)]
        nmax: u32,
        /// Only print the branch coverage and the summary.
        #[arg(long)]
        summary: bool,
        /// Run on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Retract identities on every hom pair.
    Sdr {
        config: String,
        #[arg(long, default_value_t = 4)]
        nmax: u32,
    },
    /// Contribution of every binary tree to a transferred product.
    HptTrace {
        config: String,
        #[arg(required = true)]
        literals: Vec<String>,
    },
    /// Draws the configuration as SVG.
    Svg {
        config: String,
        /// Line ids in cyclic order; corners are the points of neighbours.
        #[arg(long, num_args = 1..)]
        polygon: Vec<String>,
        /// Overlay the tree of the selected polygon.
        #[arg(long)]
        tree: bool,
        /// Fail when the selection is not a clockwise convex polygon.
        #[arg(long)]
        strict: bool,
        /// Output path, `-` for standard output.
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
}

/// Exit status 1: a residual or comparison failed.
struct Failure(String);

enum Error {
    Input(String),
    Failed(Failure),
}

impl<E: std::error::Error> From<E> for Error {
    fn from(e: E) -> Self {
        Error::Input(e.to_string())
    }
}

fn category(arg: &str) -> Result<LineCategory, Error> {
    Ok(LineCategory::new(config::load(arg)?))
}

fn args(cat: &LineCategory, literals: &[String]) -> Result<Vec<BasisMorphism>, Error> {
    Ok(cat.parse_tuple(literals)?)
}

fn hom_text(cat: &LineCategory, h: &HomElement<XKey>) -> String {
    let frame = cat.frame();
    let suffix = format!("@{}{}", cat.id(h.source), cat.id(h.target));
    let body = h.form.render(|k| format!("x={}", frame.x(*k)), &suffix);
    format!("[{}->{}] {}", cat.id(h.source), cat.id(h.target), body)
}

fn run(cmd: Cmd, out: &mut String) -> Result<(), Error> {
    use std::fmt::Write;
    match cmd {
        Cmd::Intersections { config } => {
            let cat = category(&config)?;
            let cfg = cat.config();
            for (a, b, p) in cfg.all_points() {
                let _ = writeln!(
                    out,
                    "v({},{}) = ({}, {}) deg[{},{}]={} deg[{},{}]={}",
                    cfg.id(a),
                    cfg.id(b),
                    p.x,
                    p.y,
                    cfg.id(a),
                    cfg.id(b),
                    cfg.morphism_degree(a, b),
                    cfg.id(b),
                    cfg.id(a),
                    cfg.morphism_degree(b, a)
                );
            }
        }
        Cmd::Product { config, literals, via } => {
            let cat = category(&config)?;
            let w = args(&cat, &literals)?;
            let products = Products::new(&cat);
            let value = match via {
                Via::Closed => products.product(&w),
                Via::Hpt => products.transfer().product(&w),
                Via::Both => {
                    let (closed, hpt) = (products.product(&w), products.transfer().product(&w));
                    if closed != hpt {
                        let _ = writeln!(out, "closed {}", closed.render(&cat));
                        let _ = writeln!(out, "hpt {}", hpt.render(&cat));
                        return Err(Error::Failed(Failure("closed form and transfer differ".into())));
                    }
                    closed
                }
            };
            let _ = writeln!(out, "{}", value.render(&cat));
        }
        Cmd::Check {
            config,
            kmax,
            nmax,
            summary,
            sequential,
        } => {
            if kmax == 0 {
                return Err(Error::Input("--kmax must be at least 1".into()));
            }
            let cat = category(&config)?;
            let mode = if sequential { Mode::Sequential } else { Mode::Parallel };
            let report = stasheff_sweep(
                &cat,
                SweepOptions {
                    k_max: kmax,
                    n_max: nmax,
                    mode,
                    cross_check: true,
                },
            );
            if !summary {
                for l in &report.lines {
                    let _ = writeln!(out, "{l}");
                }
            }
            for l in report.coverage_lines() {
                let _ = writeln!(out, "{l}");
            }
            for m in &report.oracle_mismatches {
                let _ = writeln!(out, "MISMATCH {m}");
            }
            let _ = writeln!(
                out,
                "checked {} tuples: {} nonzero residuals, {} closed/transfer mismatches",
                report.lines.len(),
                report.failures,
                report.oracle_mismatches.len()
            );
            if !report.is_clean() {
                return Err(Error::Failed(Failure("Stasheff sweep failed".into())));
            }
        }
        Cmd::Sdr { config, nmax } => {
            let cat = category(&config)?;
            let (checked, defects) = sdr_report(&cat, nmax);
            for d in &defects {
                let _ = writeln!(
                    out,
                    "DEFECT hom({},{}) {} {}: {}",
                    d.hom.0, d.hom.1, d.generator, d.identity, d.residual
                );
            }
            let _ = writeln!(out, "checked {checked} generators: {} defects", defects.len());
            if !defects.is_empty() {
                return Err(Error::Failed(Failure("retract identities fail".into())));
            }
        }
        Cmd::HptTrace { config, literals } => {
            let cat = category(&config)?;
            let w = args(&cat, &literals)?;
            let products = Products::new(&cat);
            let transfer = products.transfer();
            for term in transfer.trace(&w) {
                let _ = writeln!(out, "TREE {} VALUE {}", term.tree, term.value.render(&cat));
                for v in &term.vertices {
                    let _ = writeln!(
                        out,
                        "  VERTEX {}..{} DEGREES {},{} PRODUCT {}",
                        v.start,
                        v.end,
                        v.left_degree,
                        v.right_degree,
                        hom_text(&cat, &v.product)
                    );
                }
            }
            let total = transfer.product(&w);
            let _ = writeln!(out, "TOTAL {}", total.render(&cat));
            let (branch, closed) = products.product_with_branch(&w);
            let _ = writeln!(out, "CLOSED {} BRANCH {}", closed.render(&cat), branch);
            if closed != total {
                return Err(Error::Failed(Failure("closed form and transfer differ".into())));
            }
        }
        Cmd::Svg {
            config,
            polygon,
            tree,
            strict,
            output,
        } => {
            let cfg = config::load(&config)?;
            let objs = polygon.iter().map(|id| cfg.obj(id)).collect::<Result<Vec<_>, _>>()?;
            for i in 0..objs.len() {
                if objs[i] == objs[(i + 1) % objs.len()] {
                    return Err(Error::Input(format!(
                        "polygon repeats line `{}` on neighbouring corners",
                        cfg.id(objs[i])
                    )));
                }
            }
            let figure = render(&cfg, &Selection { polygon: objs, tree });
            if output.as_os_str() == "-" {
                out.push_str(&figure.svg);
            } else {
                std::fs::write(&output, &figure.svg)
                    .map_err(|e| Error::Input(format!("cannot write `{}`: {e}", output.display())))?;
            }
            if strict && !figure.admissible {
                return Err(Error::Failed(Failure(
                    "selection is not a clockwise convex polygon".into(),
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(cli.command, &mut out);
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Failed(Failure(msg))) => {
            eprintln!("ainf: {msg}");
            ExitCode::from(1)
        }
        Err(Error::Input(msg)) => {
            eprintln!("ainf: {msg}");
            ExitCode::from(2)
        }
    }
}
