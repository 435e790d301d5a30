use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use d3_ofdm::complexity::{complexity_row, table_bpsk, table_coded, table_qam, Modulus, PowerWeights};
use d3_ofdm::harness::{emit_outputs, scenario, theory_sweep, write_csv, Experiment, ExperimentConfig, SCENARIOS};
use d3_ofdm::{Error, Result};

#[derive(Parser)]
#[command(name = "d3-ofdm", version, about = "OFDM direct data detection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo BER experiment.
    Simulate {
        /// JSON experiment file.
        #[arg(long, conflicts_with = "scenario")]
        config: Option<PathBuf>,
        /// Built-in scenario name instead of a file.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 0 uses every core. Results do not depend on it.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Output directory for `<scenario>.csv` and `<scenario>.dat`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace existing output files.
        #[arg(long)]
        force: bool,
    },
    /// Print analytical predictions over the configured SNR grid as CSV.
    Theory {
        #[arg(long, conflicts_with = "scenario")]
        config: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Operation-count ratios of D³ against the conventional receiver as CSV.
    Complexity {
        #[arg(long, required_unless_present = "table")]
        n: Option<u64>,
        #[arg(long = "np", required_unless_present = "table")]
        n_p: Option<u64>,
        /// Value substituted for M in the formulas.
        #[arg(long, default_value_t = 2)]
        m: u64,
        #[arg(long, default_value = "cm")]
        modulus: String,
        /// Print a whole comparison table (bpsk, qam or coded) with reference values.
        #[arg(long, value_parser = ["bpsk", "qam", "coded"])]
        table: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        w_add: f64,
        #[arg(long, default_value_t = 3.0)]
        w_mul: f64,
        #[arg(long, default_value_t = 24.0)]
        w_div: f64,
    },
    /// List or show the built-in scenarios.
    Scenarios {
        #[arg(long, conflicts_with = "show")]
        list: bool,
        /// Print the JSON configuration of one scenario.
        #[arg(long)]
        show: Option<String>,
    },
}

fn load(config: Option<PathBuf>, name: Option<String>) -> Result<ExperimentConfig> {
    match (config, name) {
        (Some(p), _) => ExperimentConfig::load(&p),
        (None, Some(n)) => scenario(&n),
        (None, None) => Err(Error::Config("pass --config FILE or --scenario NAME".into())),
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    let mut emit = |s: &str| {
        let _ = stdout.write_all(s.as_bytes());
    };
    match cli.command {
        Command::Simulate { config, scenario, seed, workers, out, force } => {
            let mut cfg = load(config, scenario)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let records = Experiment::new(&cfg)?.run(workers)?;
            match out.or_else(|| cfg.output.as_ref().map(|o| o.dir.clone())) {
                Some(dir) => {
                    for p in emit_outputs(&records, &cfg.scenario, &dir, force)? {
                        log::info!("wrote {}", p.display());
                    }
                }
                None => emit(&write_csv(&records)),
            }
        }
        Command::Theory { config, scenario } => emit(&theory_sweep(&load(config, scenario)?)?),
        Command::Complexity { n, n_p, m, modulus, table, w_add, w_mul, w_div } => {
            let w = PowerWeights { w_add, w_mul, w_div };
            w.validate()?;
            let row = |r: &d3_ofdm::complexity::ComplexityRow| {
                format!(
                    "{},{},{},{:.4},{:.4},{:.4},{:.4}",
                    r.n, r.n_p, r.m, r.eta_ra, r.eta_rm, r.r_d_or_eta_rd, r.eta_p
                )
            };
            match table.as_deref() {
                Some("coded") => {
                    emit("n,k,eta_p_soft,eta_p_hard,ref_eta_p_soft,ref_eta_p_hard\n");
                    for (k, s, h, rs, rh) in table_coded(m, &w)? {
                        emit(&format!("2048,{k},{s:.4},{h:.4},{rs},{rh}\n"));
                    }
                }
                Some(t) => {
                    let entries = if t == "bpsk" { table_bpsk(m, &w)? } else { table_qam(&w)? };
                    emit(
                        "n,n_p,m,eta_ra,eta_rm,r_d_or_eta_rd,eta_p,ref_eta_ra,ref_eta_rm,ref_r_d_or_eta_rd,ref_eta_p\n",
                    );
                    for e in entries {
                        let [a, b, c, d] = e.reference;
                        emit(&format!("{},{a},{b},{c},{d}\n", row(&e.computed)));
                    }
                }
                None => {
                    let modulus: Modulus = modulus.parse()?;
                    let r = complexity_row(n.expect("required"), n_p.expect("required"), m, modulus, &w)?;
                    emit("n,n_p,m,eta_ra,eta_rm,r_d_or_eta_rd,eta_p\n");
                    emit(&format!("{}\n", row(&r)));
                }
            }
        }
        Command::Scenarios { list, show } => match show {
            Some(name) => emit(&format!("{}\n", scenario(&name)?.to_json())),
            None => {
                let _ = list;
                for s in SCENARIOS {
                    emit(&format!("{:<24} {}\n", s.name, s.description));
                }
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
