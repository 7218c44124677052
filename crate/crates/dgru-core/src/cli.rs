//! The `dgru` command-line front end: training, enhancement, cost
//! benchmarking, and the brute-force verification suites.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 verification failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dgru::SelectGateConfig;
use crate::dsp::synth::synth_pair;
use crate::dsp::wav::{read_wav, write_wav};
use crate::error::Result;
use crate::eval::sisnr;
use crate::macmodel::{self, ModelCostConfig};
use crate::model::{self, EnhanceModel, EnhanceModelConfig, TrainConfig};
use crate::oracle;
use crate::tensor::Matrix;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Parser)]
#[command(
    name = "dgru",
    about = "Dynamic GRU speech enhancement: train, enhance, benchmark, verify",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a desk-scale model on the seeded synthetic dataset.
    Train(TrainArgs),
    /// Enhance a 16 kHz mono WAV file with a trained model.
    Enhance(EnhanceArgs),
    /// Print the cost table for the full-scale model at P in {100,75,50,25}.
    Bench(BenchArgs),
    /// Run the brute-force verification oracles.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GateModeArg {
    Dense,
    #[value(name = "top-a")]
    TopA,
    Threshold,
}

#[derive(Args)]
struct GateArgs {
    /// Select-gate mode for the recurrent layers.
    #[arg(long, value_enum, default_value_t = GateModeArg::Dense)]
    gate: GateModeArg,
    /// Update percentage P for top-a mode.
    #[arg(long, default_value_t = 100.0)]
    p: f64,
    /// Uniform threshold for threshold mode.
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
}

impl GateArgs {
    fn config(&self, hidden_dim: usize) -> SelectGateConfig {
        match self.gate {
            GateModeArg::Dense => SelectGateConfig::Dense,
            GateModeArg::TopA => SelectGateConfig::top_a(self.p),
            GateModeArg::Threshold => SelectGateConfig::threshold_uniform(self.theta, hidden_dim),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Table,
    Kv,
}

#[derive(Args)]
struct TrainArgs {
    /// Output weight file.
    #[arg(long)]
    out: PathBuf,
    /// Optional per-epoch loss CSV ("epoch,loss").
    #[arg(long)]
    loss_csv: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    utterances: usize,
    /// Utterance length in samples at 16 kHz.
    #[arg(long, default_value_t = 16_000)]
    utterance_len: usize,
    #[arg(long, default_value_t = 1)]
    batch_size: usize,
    #[arg(long, default_value_t = 32)]
    hidden: usize,
    #[arg(long, default_value_t = 33)]
    feature_dim: usize,
    #[arg(long, default_value_t = -5.0)]
    snr_min: f64,
    #[arg(long, default_value_t = 15.0)]
    snr_max: f64,
    #[command(flatten)]
    gate: GateArgs,
}

#[derive(Args)]
struct EnhanceArgs {
    /// Trained model weight file.
    #[arg(long)]
    model: PathBuf,
    /// Input noisy WAV (PCM16 mono 16 kHz).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output enhanced WAV.
    #[arg(long)]
    out: PathBuf,
    /// Optional clean reference WAV; prints SISNR when given.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    format: ReportFormat,
    #[command(flatten)]
    gate: GateArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    format: ReportFormat,
    /// Frames of synthetic input for the wall-clock measurement.
    #[arg(long, default_value_t = 100)]
    frames: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Test hook: run the selection check with a wrong tie-break rule. The
    /// suite must then fail; used to prove the oracle detects mutations.
    #[arg(long, hide = true)]
    flip_ties: bool,
}

/// Parses arguments from the process environment and runs the command.
/// Returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here; they are not usage errors.
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Train(args) => to_exit(cmd_train(&args)),
        Command::Enhance(args) => to_exit(cmd_enhance(&args)),
        Command::Bench(args) => to_exit(cmd_bench(&args)),
        Command::Oracle(args) => cmd_oracle(&args),
    }
}

fn to_exit(r: Result<()>) -> i32 {
    match r {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let model_cfg = EnhanceModelConfig {
        feature_dim: args.feature_dim,
        hidden_dim: args.hidden,
        gate: args.gate.config(args.hidden),
        seed: args.seed,
    };
    let tc = TrainConfig {
        learning_rate: args.lr,
        epochs: args.epochs,
        batch_size: args.batch_size,
        utterances: args.utterances,
        utterance_len: args.utterance_len,
        snr_range_db: (args.snr_min, args.snr_max),
        seed: args.seed.wrapping_add(1),
        gate: args.gate.config(args.hidden),
    };
    let data_seed = args.seed.wrapping_add(2);
    let mut m = EnhanceModel::init(&model_cfg);
    let curve = model::train(&mut m, &tc, |i| synth_pair(tc.utterance_len, data_seed, i))?;
    model::save(&m, &args.out)?;
    if let Some(csv) = &args.loss_csv {
        let mut text = String::from("epoch,loss\n");
        for (i, loss) in curve.iter().enumerate() {
            let _ = writeln!(text, "{},{}", i + 1, loss);
        }
        std::fs::write(csv, text)?;
    }
    for (i, loss) in curve.iter().enumerate() {
        println!("epoch {} loss {loss:.6}", i + 1);
    }
    println!("saved model to {}", args.out.display());
    Ok(())
}

fn cmd_enhance(args: &EnhanceArgs) -> Result<()> {
    let m = model::load(&args.model)?;
    let noisy = read_wav(&args.input)?;
    let gate = args.gate.config(m.hidden_dim());
    let result = model::enhance(&m, &noisy, &gate)?;
    write_wav(&args.out, &result.audio)?;

    let sisnr_db = match &args.reference {
        Some(path) => {
            let reference = read_wav(path)?;
            let n = result.audio.len().min(reference.len());
            let est = crate::dsp::AudioBuffer::new(
                result.audio.samples[..n].to_vec(),
                result.audio.sample_rate,
            );
            let r = crate::dsp::AudioBuffer::new(
                reference.samples[..n].to_vec(),
                reference.sample_rate,
            );
            Some(sisnr(&est, &r)?.value)
        }
        None => None,
    };

    match args.format {
        ReportFormat::Table => {
            print!("{}", result.mac_report.to_table());
            println!("mean update percent: {:.2}", result.mean_update_percent);
            if let Some(v) = sisnr_db {
                println!("sisnr: {v:.2} dB");
            }
        }
        ReportFormat::Kv => {
            print!("{}", result.mac_report.to_kv());
            println!("mean_update_percent={}", result.mean_update_percent);
            if let Some(v) = sisnr_db {
                println!("sisnr_db={v}");
            }
        }
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let cost = ModelCostConfig::paper_scale();
    let m = EnhanceModel::init(&EnhanceModelConfig::paper_scale(args.seed));
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let frames = args.frames.max(1);
    let mag = Matrix::from_fn(frames, cost.feature_dim, |_, _| rng.gen_range(0.0..1.0));

    let setups = [100.0, 75.0, 50.0, 25.0];
    let mut rows = Vec::new();
    for p in setups {
        let gate = SelectGateConfig::top_a(p);
        let rep = macmodel::report(&cost, &gate);
        let start = Instant::now();
        let _ = model::forward(&m, &mag, &gate)?;
        let us_per_frame = start.elapsed().as_secs_f64() * 1e6 / frames as f64;
        rows.push((p, rep, us_per_frame));
    }

    match args.format {
        ReportFormat::Table => {
            println!(
                "{:>6} {:>14} {:>12} {:>18} {:>12} {:>12}",
                "P (%)", "non-GRU (M/s)", "GRU (M/s)", "all layers (M/s)", "% of dense", "us/frame"
            );
            for (p, rep, us) in &rows {
                println!(
                    "{:>6} {:>14.2} {:>12.2} {:>18.2} {:>12.1} {:>12.1}",
                    p,
                    rep.non_gru_macs_per_s / 1e6,
                    rep.gru_macs_per_s / 1e6,
                    rep.total_macs_per_s / 1e6,
                    rep.percent_of_dense,
                    us
                );
            }
        }
        ReportFormat::Kv => {
            for (p, rep, us) in &rows {
                let prefix = format!("p{}", *p as u32);
                println!("{prefix}.non_gru_macs_per_s={}", rep.non_gru_macs_per_s);
                println!("{prefix}.gru_macs_per_s={}", rep.gru_macs_per_s);
                println!("{prefix}.total_macs_per_s={}", rep.total_macs_per_s);
                println!("{prefix}.percent_of_dense={}", rep.percent_of_dense);
                println!("{prefix}.us_per_frame={us}");
            }
        }
    }
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> i32 {
    let mut failed = false;
    for (name, result) in oracle::run_all(args.seed, args.flip_ties) {
        match result {
            Ok(()) => println!("ok   {name}"),
            Err(detail) => {
                failed = true;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed {
        EXIT_VERIFY
    } else {
        EXIT_OK
    }
}
