use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use legdet::charsums::{eigen_verify, EigenOptions, EXACT_PRIME_LIMIT};
use legdet::harness::{self, Config, DList, Format};
use legdet::hp::DEFAULT_PRECISION_BITS;
use legdet::linalg::{char_poly, det_affine, det_exact};
use legdet::matrix::{build_carlitz, build_chapman, build_evil, build_s, build_sstar};
use legdet::{Exec, PrimeCtx};

#[derive(Parser)]
#[command(
    name = "legdet",
    version,
    about = "Exact Legendre-symbol determinants and identity checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify identities over a range of primes.
    Verify {
        /// Comma-separated check ids, or `all`.
        #[arg(long, default_value = "all")]
        what: String,
        /// Largest prime to test (per-check defaults when omitted).
        #[arg(long)]
        pmax: Option<u64>,
        /// Smallest prime to test.
        #[arg(long, default_value_t = 3)]
        pmin: u64,
        /// Values of d: a comma-separated list, `all`, or `default`.
        #[arg(long, default_value = "default")]
        d: String,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = OutFormat::Json)]
        format: OutFormat,
        /// JSON Lines result cache to read and append to.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
        precision_bits: usize,
        /// Disable the thread pool.
        #[arg(long)]
        sequential: bool,
    },
    /// Print the exact determinant of one matrix.
    Det {
        #[arg(long, value_enum)]
        matrix: MatrixArg,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        d: i64,
        /// Print the characteristic polynomial instead (integer matrices only).
        #[arg(long)]
        charpoly: bool,
        /// Also print the matrix as a grid.
        #[arg(long)]
        show_matrix: bool,
    },
    /// Eigenvalues λ_k of the matrix [((i² + j²)/p)] and their residuals.
    Eigen {
        #[arg(long)]
        p: u64,
        /// Also compute each λ_k exactly in ℤ[ζ_{p−1}].
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
        precision_bits: usize,
        #[arg(long, value_enum, default_value_t = OutFormat::Json)]
        format: OutFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Text,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
            OutFormat::Text => Format::Text,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixArg {
    S,
    Sstar,
    Carlitz,
    Chapman,
    ChapmanStar,
    Evil,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Verify {
            what,
            pmax,
            pmin,
            d,
            jobs,
            format,
            cache,
            precision_bits,
            sequential,
        } => {
            let config = Config {
                checks: harness::parse_checks(&what)?,
                pmax,
                pmin,
                d_list: d.parse::<DList>()?,
                jobs,
                exec: if sequential {
                    Exec::Sequential
                } else {
                    Exec::Parallel
                },
                format: format.into(),
                cache,
                precision_bits,
            };
            let code = harness::run(&config, &mut out, &mut io::stderr())?;
            Ok(code as u8)
        }
        Command::Det {
            matrix,
            p,
            d,
            charpoly,
            show_matrix,
        } => {
            let ctx = PrimeCtx::new(p)?;
            match matrix {
                MatrixArg::Chapman | MatrixArg::ChapmanStar => {
                    if charpoly {
                        bail!("--charpoly needs an integer matrix");
                    }
                    let m = build_chapman(&ctx, matches!(matrix, MatrixArg::ChapmanStar));
                    if show_matrix {
                        write!(out, "{}", m.to_grid())?;
                    }
                    writeln!(out, "{}", det_affine(&m)?)?;
                }
                _ => {
                    let m = match matrix {
                        MatrixArg::S => build_s(&ctx, d),
                        MatrixArg::Sstar => build_sstar(&ctx),
                        MatrixArg::Carlitz => build_carlitz(&ctx),
                        _ => build_evil(&ctx),
                    };
                    if show_matrix {
                        write!(out, "{}", m.to_grid())?;
                    }
                    let im = m.to_int_matrix();
                    if charpoly {
                        writeln!(out, "{}", char_poly(&im)?)?;
                    } else {
                        writeln!(out, "{}", det_exact(&im))?;
                    }
                }
            }
            Ok(0)
        }
        Command::Eigen {
            p,
            exact,
            precision_bits,
            format,
        } => {
            let ctx = PrimeCtx::new(p)?;
            if exact && p > EXACT_PRIME_LIMIT {
                eprintln!("note: exact mode above p = {EXACT_PRIME_LIMIT} can be slow");
            }
            let report = eigen_verify(
                &ctx,
                EigenOptions {
                    exact,
                    precision_bits,
                    exec: Exec::Parallel,
                },
            )
            .with_context(|| format!("eigenvalues for p = {p}"))?;
            match format {
                OutFormat::Json => write!(out, "{}", report.to_json_lines()?)?,
                OutFormat::Csv => {
                    writeln!(out, "p,k,lambda_float,lambda_exact,residual")?;
                    for e in &report.entries {
                        let ex = e.lambda_exact.clone().unwrap_or_default();
                        writeln!(
                            out,
                            "{},{},{},\"{}\",{:e}",
                            e.p, e.k, e.lambda_float, ex, e.residual
                        )?;
                    }
                }
                OutFormat::Text => {
                    for e in &report.entries {
                        write!(
                            out,
                            "k={:<5} λ={:<24} residual={:e}",
                            e.k, e.lambda_float, e.residual
                        )?;
                        if let Some(ex) = &e.lambda_exact {
                            write!(out, "  exact: {ex}")?;
                        }
                        writeln!(out)?;
                    }
                }
            }
            eprintln!(
                "p={} g={} max_residual={:e} max_relative_imag={:e} independent={} exact={}",
                report.p,
                report.generator,
                report.max_residual,
                report.max_relative_imag,
                report.independent,
                report
                    .exact_eigenvectors
                    .map_or("not-run".into(), |b| b.to_string()),
            );
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}
