use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use dn_rigged::bijection::{phi, phi_inverse, phi_inverse_direct_traced};
use dn_rigged::kr_crystal::{paths, TensorElement};
use dn_rigged::rigged_config::{enumerate_rc, RcJson, RiggedConfig};
use dn_rigged::rmatrix_energy::{intrinsic_energy, reorder};
use dn_rigged::root_data::Weight;
use dn_rigged::xm_harness::{parse_tensor, top_weight, verify_rinv, verify_stats, verify_xm, ElementJson};

/// Rigged configurations and KR crystals of type D_n^(1).
#[derive(Parser)]
#[command(name = "dn-rigged", version)]
struct Cli {
    /// Rank n (at least 4).
    #[arg(long, global = true, default_value_t = 4)]
    rank: usize,
    /// Tensor product as `r,s;r,s;...`, leftmost factor first.
    #[arg(long, global = true)]
    tensor: Option<String>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Print intermediate states (phi-inv only).
    #[arg(long, global = true)]
    trace: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Highest weight paths, optionally of one weight.
    EnumeratePaths {
        /// Weight in fundamental coordinates, e.g. `1,0,0,0`.
        #[arg(long)]
        weight: Option<String>,
    },
    /// Highest weight rigged configurations, optionally of one weight.
    EnumerateRc {
        #[arg(long)]
        weight: Option<String>,
    },
    /// Apply the bijection to an element given as JSON.
    Phi {
        #[arg(long)]
        element: String,
    },
    /// Apply the inverse bijection to a rigged configuration given as JSON.
    PhiInv {
        #[arg(long)]
        rc: String,
    },
    /// Apply a crystal operator `e` or `f` to an element or configuration.
    ApplyOp {
        #[arg(long)]
        op: String,
        #[arg(long)]
        index: usize,
        #[arg(long, conflicts_with = "rc")]
        element: Option<String>,
        #[arg(long)]
        rc: Option<String>,
    },
    /// Reorder the factors of an element with R-matrices.
    Rmatrix {
        #[arg(long)]
        element: String,
        /// New order as 1-based indices of the current factors (left first).
        #[arg(long)]
        order: String,
    },
    /// Intrinsic energy of an element.
    Energy {
        #[arg(long)]
        element: String,
    },
    /// Cocharge of a rigged configuration.
    Cocharge {
        #[arg(long)]
        rc: String,
    },
    VerifyXm,
    VerifyRinv,
    VerifyStats,
}

enum Outcome {
    Ok,
    Counterexample,
}

fn parse_weight(n: usize, s: &str) -> Result<Weight> {
    let c: Vec<i32> = s
        .split(',')
        .map(|x| x.trim().parse::<i32>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("bad weight `{}`", s))?;
    if c.len() != n {
        bail!("weight needs {} coordinates", n);
    }
    Ok(Weight::from_fundamental(&c))
}

fn read_element(s: &str) -> Result<TensorElement> {
    let js: ElementJson = serde_json::from_str(s).context("element JSON")?;
    Ok(js.to_tensor()?)
}

fn read_rc(s: &str) -> Result<RiggedConfig> {
    let js: RcJson = serde_json::from_str(s).context("rigged configuration JSON")?;
    Ok(RiggedConfig::from_json(&js)?)
}

fn emit_element(json: bool, b: &TensorElement) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string(&ElementJson::from_tensor(b))?);
    } else {
        println!("{}", b);
    }
    Ok(())
}

fn emit_rc(json: bool, rc: &RiggedConfig) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string(&rc.to_json())?);
    } else {
        println!("{}", rc);
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome> {
    let n = cli.rank;
    let factors = || -> Result<Vec<(usize, usize)>> {
        let spec = cli.tensor.as_deref().context("--tensor is required")?;
        Ok(parse_tensor(n, spec)?)
    };
    match &cli.cmd {
        Cmd::EnumeratePaths { weight } => {
            let f = factors()?;
            let w = weight.as_deref().map(|w| parse_weight(n, w)).transpose()?;
            for b in paths(n, &f, w.as_ref()) {
                emit_element(cli.json, &b)?;
            }
        }
        Cmd::EnumerateRc { weight } => {
            let f = factors()?;
            let ws = match weight {
                Some(w) => vec![parse_weight(n, w)?],
                None => dn_rigged::root_data::dominant_weights_below(&top_weight(n, &f)),
            };
            for w in ws {
                for rc in enumerate_rc(n, &f, &w) {
                    emit_rc(cli.json, &rc)?;
                }
            }
        }
        Cmd::Phi { element } => emit_rc(cli.json, &phi(&read_element(element)?)?)?,
        Cmd::PhiInv { rc } => {
            let f = factors()?;
            let x = read_rc(rc)?;
            let b = if cli.trace {
                phi_inverse_direct_traced(&f, &x, |step, state| eprintln!("{:?}: {}", step, state))?
            } else {
                phi_inverse(&f, &x)?
            };
            emit_element(cli.json, &b)?;
        }
        Cmd::ApplyOp { op, index, element, rc } => {
            let i = *index;
            match (element, rc) {
                (Some(e), _) => {
                    let b = read_element(e)?;
                    let out = match op.as_str() {
                        "e" => b.e(i),
                        "f" => b.f(i),
                        _ => bail!("unknown operator `{}` (expected e or f)", op),
                    };
                    match out {
                        Some(x) => emit_element(cli.json, &x)?,
                        None => println!("null"),
                    }
                }
                (None, Some(r)) => {
                    let x = read_rc(r)?;
                    if i == 0 || i > n {
                        bail!("classical index {} out of range", i);
                    }
                    let out = match op.as_str() {
                        "e" => x.e(i),
                        "f" => x.f(i),
                        _ => bail!("unknown operator `{}` (expected e or f)", op),
                    };
                    match out {
                        Some(y) => emit_rc(cli.json, &y)?,
                        None => println!("null"),
                    }
                }
                (None, None) => bail!("give --element or --rc"),
            }
        }
        Cmd::Rmatrix { element, order } => {
            let b = read_element(element)?;
            let ord: Vec<usize> = order
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .context("bad --order")?;
            let mut sorted = ord.clone();
            sorted.sort();
            if sorted != (1..=b.0.len()).collect::<Vec<_>>() {
                bail!("--order must be a permutation of 1..{}", b.0.len());
            }
            let zero_based: Vec<usize> = ord.iter().map(|x| x - 1).collect();
            emit_element(cli.json, &reorder(&b, &zero_based)?)?;
        }
        Cmd::Energy { element } => println!("{}", intrinsic_energy(&read_element(element)?)?),
        Cmd::Cocharge { rc } => println!("{}", read_rc(rc)?.cocharge()),
        Cmd::VerifyXm => {
            let rows = verify_xm(n, &factors()?)?;
            let bad = rows.iter().any(|r| !r.ok);
            if cli.json || bad {
                println!("{}", serde_json::to_string(&rows)?);
            } else {
                for r in &rows {
                    println!("{:?}: X = M = {}", r.weight, r.x);
                }
            }
            if bad {
                return Ok(Outcome::Counterexample);
            }
        }
        Cmd::VerifyRinv | Cmd::VerifyStats => {
            let f = factors()?;
            let found = if matches!(cli.cmd, Cmd::VerifyRinv) {
                verify_rinv(n, &f)?
            } else {
                verify_stats(n, &f)?
            };
            match found {
                Some(c) => {
                    println!("{}", serde_json::to_string(&c)?);
                    return Ok(Outcome::Counterexample);
                }
                None => println!("ok"),
            }
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors by itself
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Counterexample) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}
