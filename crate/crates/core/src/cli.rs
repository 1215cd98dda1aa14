//! The `rmrpa` command line: argument parsing, dispatch and output formatting.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bounds::{self, BoundInput};
use crate::error::Error;
use crate::fht;
use crate::rm::{self, CodeParams};
use crate::rpa::{RpaConfig, RpaDecoder};
use crate::sim::{self, TrialConfig, TrialResult};
use crate::subspace;
use crate::word::Word;

#[derive(Debug, Parser)]
#[command(name = "rmrpa", version, about = "Reed-Muller codes and RPA decoding over the BSC")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a message (one bit per monomial, degree-ascending order).
    Encode {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        r: u32,
        /// Message bits as a 0/1 string.
        #[arg(long)]
        msg: String,
        /// Print the codeword in hex instead of 0/1.
        #[arg(long)]
        hex: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Decode a received word with the RPA decoder.
    Decode {
        /// Received word, 0/1 or 0x-prefixed hex.
        word: String,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Iteration cap per node (default m).
        #[arg(long)]
        max_iter: Option<usize>,
        /// Also print the projection-aggregation tree.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        hex: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Maximum-likelihood decoding of a first-order code via the Hadamard transform.
    DecodeFo {
        word: String,
        #[arg(long)]
        hex: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List the k-dimensional subspaces of F2^m by canonical basis.
    Subspaces {
        m: u32,
        k: u32,
        /// Print only the number of subspaces.
        #[arg(long)]
        count: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate the closed-form error bounds.
    Bounds(BoundsCmd),
    /// Monte Carlo block-error estimate under RPA decoding.
    Simulate(SimulateCmd),
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
pub struct BoundsCmd {
    #[command(subcommand)]
    pub sweep: Option<BoundsSweep>,
    #[arg(long, required = true)]
    pub m: Option<u32>,
    #[arg(long, required = true)]
    pub r: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, required = true)]
    pub p: Option<f64>,
    #[arg(long, required = true)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum BoundsSweep {
    /// CSV over a grid; combinations with r > m or k not dividing r-1 are skipped.
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        m_list: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        r_list: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        k_list: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        p_list: Vec<f64>,
        /// epsilon as a fraction of the validity edge.
        #[arg(long, default_value_t = 0.5)]
        epsilon_frac: f64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
    },
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
pub struct SimulateCmd {
    #[command(subcommand)]
    pub sweep: Option<SimulateSweep>,
    #[arg(long, required = true)]
    pub m: Option<u32>,
    #[arg(long, required = true)]
    pub r: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, required = true)]
    pub p: Option<f64>,
    #[arg(long, required = true)]
    pub trials: Option<u64>,
    #[arg(long, required = true)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum SimulateSweep {
    /// One CSV row per crossover probability.
    Sweep {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        p_list: Vec<f64>,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

pub const SIMULATE_HEADER: &str = "m,r,k,p,max_iter,trials,seed,block_errors,p_err_hat,ci_low,ci_high,converged_fraction,mean_iterations,rng";

/// Formats a real with 12 significant digits, `%.12g` style.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn show(w: &Word, hex: bool) -> String {
    if hex {
        format!("0x{}", w.to_hex())
    } else {
        w.to_ascii()
    }
}

fn params(m: u32, r: u32) -> Result<CodeParams, Error> {
    CodeParams::new(m, r)
}

fn parse_message(msg: &str) -> Result<Vec<bool>, Error> {
    msg.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::MalformedWord(format!("message must be 0/1 bits, got {msg:?}"))),
        })
        .collect()
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    writeln!(out, "{text}").map_err(|e| e.to_string())
}

fn simulate_row(cfg: &TrialConfig, res: &TrialResult) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        cfg.code.m(),
        cfg.code.r(),
        cfg.k,
        fmt_real(cfg.p),
        cfg.max_iter,
        res.trials,
        cfg.master_seed,
        res.block_errors,
        fmt_real(res.p_err_hat),
        fmt_real(res.ci_low),
        fmt_real(res.ci_high),
        fmt_real(res.converged_fraction),
        fmt_real(res.mean_iterations),
        res.rng
    )
}

fn unsupported(format: Format, command: &str) -> String {
    let name = format.to_possible_value().expect("no skipped variants");
    format!("error: --format {} is not supported by {command}", name.get_name())
}

/// Parses `argv` (including the program name) and runs the command, writing
/// results to `out`. Returns a one-line diagnostic on failure.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> Result<(), String>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            write!(out, "{e}").map_err(|e| e.to_string())?;
            return Ok(());
        }
        Err(e) => {
            let text = e.to_string();
            let lines: Vec<&str> = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect();
            return Err(lines.join(" "));
        }
    };
    execute(cli.command, out)
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), String> {
    let diag = |e: Error| format!("error: {e}");
    let io = |e: std::io::Error| format!("error: {e}");
    match command {
        Command::Encode {
            m,
            r,
            msg,
            hex,
            format,
        } => {
            let code = params(m, r).map_err(diag)?;
            let bits = parse_message(&msg).map_err(diag)?;
            let c = rm::encode(&bits, code).map_err(diag)?;
            match format {
                Format::Text => writeln!(out, "{}", show(&c, hex)).map_err(io)?,
                Format::Json => json_line(out, &json!({"code": code, "codeword": show(&c, hex)}))?,
                Format::Csv => return Err(unsupported(format, "encode")),
            }
        }
        Command::Decode {
            word,
            m,
            r,
            k,
            max_iter,
            trace,
            hex,
            format,
        } => {
            let code = params(m, r).map_err(diag)?;
            let y: Word = word.parse().map_err(diag)?;
            let cfg = RpaConfig::new(code, k, max_iter.unwrap_or(m as usize)).map_err(diag)?;
            let outcome = RpaDecoder::new(cfg)
                .and_then(|d| d.decode(&y, trace))
                .map_err(diag)?;
            match format {
                Format::Text => {
                    writeln!(out, "estimate={}", show(&outcome.estimate, hex)).map_err(io)?;
                    writeln!(out, "converged={}", outcome.converged).map_err(io)?;
                    writeln!(out, "iterations={}", outcome.iterations_used).map_err(io)?;
                    writeln!(out, "ties={}", outcome.ties).map_err(io)?;
                    if let Some(t) = &outcome.trace {
                        write!(out, "{}", t.render_text()).map_err(io)?;
                    }
                }
                Format::Json => json_line(
                    out,
                    &json!({
                        "code": code,
                        "k": k,
                        "max_iter": cfg.max_iter(),
                        "estimate": show(&outcome.estimate, hex),
                        "converged": outcome.converged,
                        "iterations_used": outcome.iterations_used,
                        "ties": outcome.ties,
                        "trace": outcome.trace,
                    }),
                )?,
                Format::Csv => return Err(unsupported(format, "decode")),
            }
        }
        Command::DecodeFo { word, hex, format } => {
            let y: Word = word.parse().map_err(diag)?;
            let d = fht::ml_decode_first_order_counted(&y).map_err(diag)?;
            let m = y.num_vars();
            let decoded = fht::estimate_to_word(d.estimate, m);
            let width = (m as usize).div_ceil(4).max(1);
            let s = format!("0x{:0width$x}", d.estimate.s);
            match format {
                Format::Text => {
                    writeln!(out, "s={s}").map_err(io)?;
                    writeln!(out, "sigma={}", d.estimate.sigma).map_err(io)?;
                    writeln!(out, "word={}", show(&decoded, hex)).map_err(io)?;
                    writeln!(out, "maximizers={}", d.maximizers).map_err(io)?;
                }
                Format::Json => json_line(
                    out,
                    &json!({
                        "s": s,
                        "sigma": d.estimate.sigma.value(),
                        "word": show(&decoded, hex),
                        "maximizers": d.maximizers,
                    }),
                )?,
                Format::Csv => return Err(unsupported(format, "decode-fo")),
            }
        }
        Command::Subspaces { m, k, count, format } => {
            let width = (m as usize).div_ceil(4).max(1);
            let hexes = |s: &subspace::Subspace| -> Vec<String> {
                s.basis().iter().map(|b| format!("0x{b:0width$x}")).collect()
            };
            if count {
                let n = subspace::gaussian_binomial(m, k).map_err(diag)?;
                match format {
                    Format::Json => json_line(out, &json!({"m": m, "k": k, "count": n.to_string()}))?,
                    _ => writeln!(out, "{n}").map_err(io)?,
                }
            } else {
                let all = subspace::enumerate_subspaces(m, k).map_err(diag)?;
                match format {
                    Format::Json => {
                        let bases: Vec<Vec<String>> = all.iter().map(hexes).collect();
                        json_line(out, &json!({"m": m, "k": k, "bases": bases}))?
                    }
                    _ => {
                        for s in &all {
                            writeln!(out, "{}", hexes(s).join(" ")).map_err(io)?;
                        }
                    }
                }
            }
        }
        Command::Bounds(cmd) => run_bounds(cmd, out)?,
        Command::Simulate(cmd) => run_simulate(cmd, out)?,
    }
    Ok(())
}

fn run_bounds(cmd: BoundsCmd, out: &mut dyn Write) -> Result<(), String> {
    let diag = |e: Error| format!("error: {e}");
    let io = |e: std::io::Error| format!("error: {e}");
    if let Some(BoundsSweep::Sweep {
        m_list,
        r_list,
        k_list,
        p_list,
        epsilon_frac,
        delta,
        beta,
    }) = cmd.sweep
    {
        writeln!(out, "{}", bounds::SWEEP_HEADER).map_err(io)?;
        for &m in &m_list {
            for &r in &r_list {
                for &k in &k_list {
                    if r < 2 || r > m || k == 0 || (r - 1) % k != 0 {
                        continue;
                    }
                    for &p in &p_list {
                        let row = bounds::sweep_row(m, r, k, p, epsilon_frac, delta, beta)
                            .map_err(diag)?;
                        writeln!(
                            out,
                            "{},{},{},{},{},{},{},{},{},{},{},{}",
                            row.m,
                            row.r,
                            row.k,
                            fmt_real(row.p),
                            fmt_real(row.epsilon),
                            fmt_real(row.log2_thm1),
                            fmt_real(row.log2_thm2),
                            fmt_real(row.gamma),
                            fmt_real(row.rho),
                            fmt_real(row.rho_bar),
                            row.vacuous_thm1,
                            row.vacuous_thm2
                        )
                        .map_err(io)?;
                    }
                }
            }
        }
        return Ok(());
    }
    let input = BoundInput {
        m: cmd.m.expect("required by clap"),
        r: cmd.r.expect("required by clap"),
        k: cmd.k,
        p: cmd.p.expect("required by clap"),
        epsilon: cmd.epsilon.expect("required by clap"),
        delta: cmd.delta,
        beta: cmd.beta,
    };
    let rep = bounds::evaluate(input).map_err(diag)?;
    let mut rows: Vec<(&str, String)> = vec![
        ("m", input.m.to_string()),
        ("r", input.r.to_string()),
        ("k", input.k.to_string()),
        ("p", fmt_real(input.p)),
        ("epsilon", fmt_real(input.epsilon)),
        ("delta", fmt_real(input.delta)),
        ("beta", fmt_real(input.beta)),
        ("eta_p", fmt_real(rep.eta_p)),
        ("eta_bar_p", fmt_real(rep.eta_bar_p)),
        ("p_bar", fmt_real(rep.p_bar)),
        ("epsilon_edge", fmt_real(rep.window_edge)),
        ("p_hat", fmt_real(rep.p_hat)),
        ("log2_thm1", fmt_real(rep.thm1.log2_value)),
        ("vacuous_thm1", rep.thm1.vacuous.to_string()),
        ("log2_thm2", fmt_real(rep.thm2.log2_value)),
        ("vacuous_thm2", rep.thm2.vacuous.to_string()),
    ];
    if let (Some(one), Some(two)) = (rep.one_iter, rep.two_iter) {
        rows.push(("log2_one_iter", fmt_real(one.log2_value)));
        rows.push(("log2_two_iter", fmt_real(two.log2_value)));
    }
    rows.extend([
        ("gamma", fmt_real(rep.gamma)),
        ("gamma_floor", fmt_real(rep.gamma_floor)),
        ("correctable_errors", fmt_real(rep.correctable_errors)),
        ("c", fmt_real(rep.c)),
        ("rho", fmt_real(rep.rho)),
        ("rho_bar", fmt_real(rep.rho_bar)),
    ]);
    match cmd.format {
        Format::Text => {
            for (key, value) in rows {
                writeln!(out, "{key:<20}{value}").map_err(io)?;
            }
        }
        Format::Csv => {
            let (keys, values): (Vec<&str>, Vec<String>) = rows.into_iter().unzip();
            writeln!(out, "{}", keys.join(",")).map_err(io)?;
            writeln!(out, "{}", values.join(",")).map_err(io)?;
        }
        Format::Json => json_line(out, &rep)?,
    }
    Ok(())
}

fn simulate_config(
    m: u32,
    r: u32,
    k: u32,
    p: f64,
    trials: u64,
    seed: u64,
    max_iter: Option<usize>,
) -> Result<TrialConfig, Error> {
    let cfg = TrialConfig {
        code: params(m, r)?,
        k,
        p,
        max_iter: max_iter.unwrap_or(m as usize),
        num_trials: trials,
        master_seed: seed,
    };
    cfg.rpa_config()?;
    Ok(cfg)
}

fn run_simulate(cmd: SimulateCmd, out: &mut dyn Write) -> Result<(), String> {
    let diag = |e: Error| format!("error: {e}");
    let io = |e: std::io::Error| format!("error: {e}");
    if let Some(SimulateSweep::Sweep {
        m,
        r,
        k,
        p_list,
        trials,
        seed,
        max_iter,
        workers,
    }) = cmd.sweep
    {
        let mut lines = vec![SIMULATE_HEADER.to_string()];
        for p in p_list {
            let cfg = simulate_config(m, r, k, p, trials, seed, max_iter).map_err(diag)?;
            let res = sim::run_trials_with(&cfg, workers, sim::Transmission::AllZeros).map_err(diag)?;
            lines.push(simulate_row(&cfg, &res));
        }
        writeln!(out, "{}", lines.join("\n")).map_err(io)?;
        return Ok(());
    }
    let cfg = simulate_config(
        cmd.m.expect("required by clap"),
        cmd.r.expect("required by clap"),
        cmd.k,
        cmd.p.expect("required by clap"),
        cmd.trials.expect("required by clap"),
        cmd.seed.expect("required by clap"),
        cmd.max_iter,
    )
    .map_err(diag)?;
    let res = sim::run_trials_with(&cfg, cmd.workers, sim::Transmission::AllZeros).map_err(diag)?;
    match cmd.format {
        Format::Csv | Format::Text => {
            writeln!(out, "{SIMULATE_HEADER}").map_err(io)?;
            writeln!(out, "{}", simulate_row(&cfg, &res)).map_err(io)?;
        }
        Format::Json => json_line(out, &json!({"config": cfg, "result": res}))?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> String {
        let mut buf = Vec::new();
        run(std::iter::once("rmrpa").chain(args.iter().copied()), &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    fn run_err(args: &[&str]) -> String {
        let mut buf = Vec::new();
        run(std::iter::once("rmrpa").chain(args.iter().copied()), &mut buf).unwrap_err()
    }

    #[test]
    fn real_formatting() {
        assert_eq!(fmt_real(0.0), "0");
        assert_eq!(fmt_real(0.1), "0.1");
        assert_eq!(fmt_real(18.380153128959141), "18.380153129");
        assert_eq!(fmt_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_real(-61357290.418972824), "-61357290.419");
        assert_eq!(fmt_real(1e-7), "1e-07");
        assert_eq!(fmt_real(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_real(999999999999.5), "1e+12");
        assert_eq!(fmt_real(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn encode_and_count() {
        assert_eq!(run_ok(&["encode", "--m", "2", "--r", "1", "--msg", "100"]), "1111\n");
        assert_eq!(run_ok(&["subspaces", "3", "1", "--count"]), "7\n");
        assert_eq!(run_ok(&["subspaces", "3", "1"]).lines().count(), 7);
    }

    #[test]
    fn diagnostics_are_single_lines() {
        for args in [
            &["encode", "--m", "2", "--r", "3", "--msg", "1"][..],
            &["decode", "01x0", "--m", "2", "--r", "1"],
            &["bounds", "--m", "10", "--r", "2", "--p", "0.05", "--epsilon", "0.5"],
            &["simulate", "--m", "4", "--r", "2", "--p", "0.1", "--trials", "10"],
            &["encode", "--bogus"],
        ] {
            let e = run_err(args);
            assert!(e.starts_with("error:") && !e.contains('\n'), "{e}");
        }
    }
}
