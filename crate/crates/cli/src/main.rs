use cigen::config::Config;
use cigen::cpatch::{emit_header, header_file_name, plan_patch};
use cigen::metrics::{estimate_metrics, Energy};
use cigen::pipeline::{compile, parse_gaps, parse_inputs, read_file, run_build, PipelineError};
use cigen::sim::{simulate_ci, Stimulus};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cigen", version, about = "Custom-instruction generator for Nios II multicycle instructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// JSON configuration file
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

impl ConfigArg {
    fn load(&self) -> Result<Config, PipelineError> {
        Ok(match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate VHDL, C header and report.json after checking the design
    Build {
        spec: PathBuf,
        #[arg(short, long, value_name = "DIR")]
        out: PathBuf,
        /// Random vectors for the equivalence check (overrides the config)
        #[arg(long)]
        vectors: Option<usize>,
        /// Seed for the equivalence vectors (overrides the config)
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Run one instruction through the cycle-accurate model
    Simulate {
        spec: PathBuf,
        /// Operand values, e.g. a=2,b=3,c=4
        #[arg(long)]
        inputs: String,
        /// Write one JSON record per cycle to this file
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        /// Disabled-cycle gaps as cycle:length, e.g. 1:5,3:2
        #[arg(long, value_name = "GAPS")]
        clk_en_gaps: Option<String>,
        /// Raw cycle indices at which reset is asserted
        #[arg(long, value_name = "CYCLES", value_delimiter = ',')]
        reset_at: Vec<usize>,
        /// Enabled cycles at which start is asserted again
        #[arg(long, value_name = "CYCLES", value_delimiter = ',')]
        restart_at: Vec<usize>,
        /// Fail when start is asserted while an instruction is in flight
        #[arg(long)]
        strict: bool,
    },
    /// Replace matching expressions in a C file with the instruction macro
    Patch {
        spec: PathBuf,
        file: PathBuf,
        /// Overwrite the input instead of writing <file>.ci.c
        #[arg(long)]
        in_place: bool,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Print the metrics report
    Report {
        spec: PathBuf,
        /// Measured power in mW
        #[arg(long, requires = "time")]
        power: Option<f64>,
        /// Measured execution time in ms
        #[arg(long, requires = "power")]
        time: Option<f64>,
        #[command(flatten)]
        config: ConfigArg,
    },
}

fn patched_path(file: &Path) -> PathBuf {
    match file.extension() {
        Some(ext) if ext == "c" => file.with_extension("ci.c"),
        _ => {
            let mut s = file.as_os_str().to_owned();
            s.push(".ci.c");
            PathBuf::from(s)
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), PipelineError> {
    std::fs::write(path, text).map_err(|source| PipelineError::Io {
        stage: "write",
        path: path.display().to_string(),
        source,
    })
}

fn run(command: Command, out: &mut dyn Write) -> Result<(), PipelineError> {
    match command {
        Command::Build {
            spec,
            out: dir,
            vectors,
            seed,
            config,
        } => {
            let mut config = config.load()?;
            config.vectors = vectors.unwrap_or(config.vectors);
            config.seed = seed.unwrap_or(config.seed);
            run_build(&spec, &dir, &config, out)?;
            let _ = writeln!(out, "[done] build ok");
        }
        Command::Simulate {
            spec,
            inputs,
            trace,
            clk_en_gaps,
            reset_at,
            restart_at,
            strict,
        } => {
            let (spec, mapped) = compile(&read_file("parse", &spec)?)?;
            let inputs = parse_inputs(&inputs)?;
            let stimulus = Stimulus {
                gaps: clk_en_gaps.as_deref().map(parse_gaps).transpose()?.unwrap_or_default(),
                resets: reset_at,
                extra_starts: restart_at,
                strict,
                summary_only: false,
            };
            let t = simulate_ci(&spec, &mapped, &inputs, &stimulus)?;
            if let Some(path) = trace {
                let mut buf = Vec::new();
                t.write_jsonl(&mut buf).expect("writing to memory");
                write(&path, &String::from_utf8(buf).expect("JSON is UTF-8"))?;
            }
            let value = t.final_result.value(spec.output.signedness.is_signed());
            let _ = writeln!(out, "done_cycle {}", t.done_cycle);
            let _ = writeln!(out, "done_raw_cycle {}", t.done_raw_cycle);
            let _ = writeln!(out, "result {value} ({})", t.final_result);
        }
        Command::Patch {
            spec,
            file,
            in_place,
            config,
        } => {
            let config = config.load()?;
            let (spec, _) = compile(&read_file("parse", &spec)?)?;
            let src = read_file("patch", &file)?;
            let plan = plan_patch(&src, &spec)?;
            let target = if in_place { file.clone() } else { patched_path(&file) };
            let header = file.parent().unwrap_or(Path::new("")).join(header_file_name(&spec));
            write(&target, &plan.apply(&src))?;
            write(&header, &emit_header(&spec, &config.intrinsic))?;
            let _ = writeln!(
                out,
                "[patch] {} site(s) replaced with {}",
                plan.sites.len(),
                plan.replacement
            );
            let _ = writeln!(out, "[write] {}", target.display());
            let _ = writeln!(out, "[write] {}", header.display());
        }
        Command::Report {
            spec,
            power,
            time,
            config,
        } => {
            let config = config.load()?;
            let (_, mapped) = compile(&read_file("parse", &spec)?)?;
            let energy = match (power, time) {
                (Some(p), Some(t)) => Some(Energy::new(p, t).map_err(|e| PipelineError::Usage(e.to_string()))?),
                _ => None,
            };
            let _ = out.write_all(estimate_metrics(&mapped, &config.costs, energy).to_json().as_bytes());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    match run(cli.command, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
