//! Experiment runner: reads a `key = value` config, runs the density ×
//! gradient × replicate grid, and writes `records.csv` plus `summary.csv`
//! into the output directory. Optional flags dump per-run graph artifacts
//! and lateral-inhibition round traces.

use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Mutex;

use clap::Parser;

use swbeam::beamform::write_decisions;
use swbeam::harness::{
    run_experiment_with, summarize, write_records_csv, write_summary_csv, ExperimentConfig,
    PipelineRun,
};
use swbeam::selforg::write_trace;
use swbeam::AntennaModel;

#[derive(Parser, Debug)]
#[command(
    name = "simulate",
    about = "Small-world beamforming experiment harness",
    version
)]
struct Args {
    /// Configuration file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,

    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,

    /// Override the antenna model from the config file.
    #[arg(long)]
    model: Option<AntennaModel>,

    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Override the replicate count.
    #[arg(long)]
    replicates: Option<u32>,

    /// Write lateral-inhibition round traces per run.
    #[arg(long)]
    trace: bool,

    /// Dump per-run placements, edge lists, region tables and beam decisions.
    #[arg(long)]
    dump_graphs: bool,
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(args: Args) -> Result<(), Box<dyn std::error::Error>> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(model) = args.model {
        cfg.model = model;
    }
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
    }
    if let Some(replicates) = args.replicates {
        cfg.replicates = replicates;
    }
    cfg.capture_trace = args.trace;
    cfg.validate()?;

    fs::create_dir_all(&args.out)?;
    let dump_dir = args.out.join("runs");
    if args.dump_graphs || args.trace {
        fs::create_dir_all(&dump_dir)?;
    }

    let dump_errors = Mutex::new(Vec::<String>::new());
    let observer = |run: &PipelineRun| {
        if !(args.dump_graphs || args.trace) {
            return;
        }
        if let Err(e) = dump_run(&dump_dir, run, args.dump_graphs) {
            dump_errors.lock().unwrap().push(e.to_string());
        }
    };

    let records = run_experiment_with(&cfg, observer)?;
    for e in dump_errors.into_inner().unwrap() {
        eprintln!("warning: dump failed: {e}");
    }

    let records_path = args.out.join("records.csv");
    write_records_csv(&records, &records_path)?;
    let summary_path = args.out.join("summary.csv");
    write_summary_csv(&summarize(&records), &summary_path)?;

    println!("{} records -> {}", records.len(), records_path.display());
    println!("summary -> {}", summary_path.display());
    Ok(())
}

fn dump_run(dir: &std::path::Path, run: &PipelineRun, graphs: bool) -> std::io::Result<()> {
    let r = &run.record;
    let tag = format!("d{}_g{}_{}_rep{}", r.density, r.gradient, r.model, r.replicate);
    if graphs {
        let mut w = BufWriter::new(fs::File::create(dir.join(format!("{tag}_placement.csv")))?);
        run.thinned.write_csv(&mut w)?;
        let mut w = BufWriter::new(fs::File::create(dir.join(format!("{tag}_omni.edges")))?);
        run.pre_graph.write_edge_list(&mut w)?;
        let mut w = BufWriter::new(fs::File::create(dir.join(format!("{tag}_beamformed.edges")))?);
        run.post_graph.write_edge_list(&mut w)?;
        let mut w = BufWriter::new(fs::File::create(dir.join(format!("{tag}_regions.csv")))?);
        run.region_state.write_csv(&mut w)?;
        let mut w = BufWriter::new(fs::File::create(dir.join(format!("{tag}_decisions.csv")))?);
        write_decisions(&run.decisions, &mut w)?;
    }
    if let Some(trace) = &run.li_trace {
        let mut w = BufWriter::new(fs::File::create(dir.join(format!("{tag}_li_trace.csv")))?);
        write_trace(trace, &mut w)?;
    }
    Ok(())
}
