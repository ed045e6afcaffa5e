//! `spx` — batch front end for the sparse-pixel inference engine.
//!
//! Every subcommand is deterministic given its flags and input files; all
//! randomness is behind an explicit --seed.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use spx_core::dense::naive_active_scan;
use spx_core::model::{gen_random_model, load_model, model_cost, n_max_for_size, save_model};
use spx_core::preprocess::{apply_transforms, gen_synthetic_sparse, TransformSpec};
use spx_core::sparse::{sparse_input_reduce, ReduceConfig};
use spx_core::{
    calibrate_cycles, conv_cost, estimate_cycles, run_dense, run_dense_constrained, run_sparse,
    tree_depth, ArithmeticMode, DenseTensor, FixedFormat, OpCounter,
};

#[derive(Parser)]
#[command(name = "spx", about = "Sparse-pixel CNN inference engine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a transform pipeline to a tensor file.
    Preprocess(PreprocessArgs),
    /// Extract active pixels from a tensor into a sparse bundle.
    Reduce(ReduceArgs),
    /// Run a model on a tensor and print logits and the predicted class.
    Infer(InferArgs),
    /// Batch-check sparse vs constrained-dense equivalence over a tensor set.
    Compare(CompareArgs),
    /// Operation counts and calibrated cycle estimates for a model.
    Cost(CostArgs),
    /// Sweep reduction-tree depth and convolution cost over parameter grids.
    Sweep(SweepArgs),
    /// Generate a seeded random-weight model manifest.
    GenWeights(GenWeightsArgs),
}

#[derive(Args)]
struct PreprocessArgs {
    /// Input tensor file (SPXT binary, or .csv).
    #[arg(long = "in")]
    input: PathBuf,
    /// Transform step list, e.g. "avg_pool(3),pad_to(48,48),threshold(0.4)".
    #[arg(long)]
    spec: Option<String>,
    /// File containing the step list (overrides --spec).
    #[arg(long)]
    spec_file: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
    #[arg(long = "n-max")]
    n_max: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    /// sparse | dense-constrained | dense
    #[arg(long, default_value = "sparse")]
    mode: String,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    model: PathBuf,
    /// Tensor files to compare on.
    inputs: Vec<PathBuf>,
    /// Additionally generate this many synthetic sparse inputs.
    #[arg(long, default_value_t = 0)]
    random: usize,
    /// Seed for the synthetic inputs (required when --random > 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Active pixels per synthetic input.
    #[arg(long, default_value_t = 12)]
    active: usize,
    /// Write a machine-readable report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CostArgs {
    /// Model manifest; omit to use the explicit parameters below.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long = "c-in", default_value_t = 1)]
    c_in: usize,
    #[arg(long = "c-out", default_value_t = 1)]
    c_out: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated n_max values.
    #[arg(long = "n-max-list", default_value = "5,10,15,20,25,30")]
    n_max_list: String,
    /// Comma-separated input pixel counts for the depth sweep.
    #[arg(long, default_value = "500,1000,1500,2000,2500,3000")]
    sizes: String,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenWeightsArgs {
    /// mnist | neutrino | jet
    #[arg(long)]
    preset: String,
    /// Explicit seed; there is no ambient entropy.
    #[arg(long)]
    seed: u64,
    /// Retained active-pixel bound, or a size name (tiny/small/medium/large).
    #[arg(long = "n-max", default_value = "large")]
    n_max: String,
    /// float | fixed
    #[arg(long, default_value = "float")]
    mode: String,
    /// Fixed-point format as total:integer, e.g. 8:3 or 16:6.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

fn read_tensor_any(path: &PathBuf) -> anyhow::Result<DenseTensor> {
    let t = if path.extension().is_some_and(|e| e == "csv") {
        spx_core::io::read_tensor_csv(path)
    } else {
        spx_core::io::read_tensor(path)
    };
    t.with_context(|| format!("reading tensor {}", path.display()))
}

fn parse_format(s: &str) -> anyhow::Result<FixedFormat> {
    let (total, integer) = s
        .split_once(':')
        .with_context(|| format!("format must be total:integer, got {:?}", s))?;
    Ok(FixedFormat::new(total.parse()?, integer.parse()?)?)
}

fn parse_list(s: &str) -> anyhow::Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(Into::into))
        .collect()
}

fn cmd_preprocess(args: PreprocessArgs) -> anyhow::Result<()> {
    let spec_text = match (&args.spec_file, &args.spec) {
        (Some(path), _) => std::fs::read_to_string(path)?,
        (None, Some(s)) => s.clone(),
        (None, None) => String::new(),
    };
    let spec: TransformSpec = spec_text.trim().parse()?;
    let input = read_tensor_any(&args.input)?;
    let out = apply_transforms(&input, &spec)?;
    spx_core::io::write_tensor(&args.out, &out)?;
    println!(
        "preprocess: {}x{}x{} -> {}x{}x{} ({} steps)",
        input.h,
        input.w,
        input.c,
        out.h,
        out.w,
        out.c,
        spec.0.len()
    );
    Ok(())
}

fn cmd_reduce(args: ReduceArgs) -> anyhow::Result<()> {
    let input = read_tensor_any(&args.input)?;
    let total_active = input
        .data
        .chunks(input.c)
        .filter(|px| px[0] > args.threshold)
        .count();
    let mut ctr = OpCounter::default();
    let bundle = sparse_input_reduce(
        &input,
        &ReduceConfig {
            threshold: args.threshold,
            n_max: args.n_max,
        },
        &mut ctr,
    )?;
    spx_core::io::write_bundle(&args.out, &bundle)?;
    if total_active > args.n_max {
        eprintln!(
            "warning: {} active pixels exceed n_max {}; {} dropped",
            total_active,
            args.n_max,
            total_active - args.n_max
        );
    }
    println!(
        "reduce: retained {} of {} active pixels (n_max {}, threshold {})",
        bundle.active_count(),
        total_active,
        args.n_max,
        args.threshold
    );
    Ok(())
}

fn cmd_infer(args: InferArgs) -> anyhow::Result<()> {
    let model = load_model(&args.model)?;
    let input = read_tensor_any(&args.input)?;
    let mut ctr = OpCounter::default();
    let logits = match args.mode.as_str() {
        "sparse" => run_sparse(&model, &input, &mut ctr)?,
        "dense-constrained" => run_dense_constrained(&model, &input, &mut ctr)?,
        "dense" => run_dense(&model, &input, &mut ctr)?,
        other => bail!("unknown mode {:?} (sparse | dense-constrained | dense)", other),
    };
    for (i, v) in logits.iter().enumerate() {
        println!("logit[{}] = {:.9}", i, v);
    }
    let argmax = logits
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    println!("argmax = {}", argmax);
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> anyhow::Result<()> {
    let model = load_model(&args.model)?;
    let tolerance = match model.mode {
        ArithmeticMode::Float => 1e-9,
        ArithmeticMode::Fixed => 0.0,
    };
    let mut tensors: Vec<DenseTensor> = args
        .inputs
        .iter()
        .map(read_tensor_any)
        .collect::<anyhow::Result<_>>()?;
    if args.random > 0 {
        let seed = args.seed.context("--seed is required with --random")?;
        for i in 0..args.random {
            tensors.push(gen_synthetic_sparse(
                seed.wrapping_add(i as u64),
                model.input_h,
                model.input_w,
                args.active.min(model.input_h * model.input_w),
                0.1,
                1.0,
            )?);
        }
    }
    if tensors.is_empty() {
        bail!("no inputs: pass tensor files or --random N --seed S");
    }

    let n_max = model.n_max().context("model has no input reduce layer")?;
    let threshold = model.threshold().unwrap_or(0.0);
    let mut max_dev = 0.0f64;
    let mut violations = 0usize;
    let mut sparse_ctr = OpCounter::default();
    let mut dense_ctr = OpCounter::default();
    for (i, t) in tensors.iter().enumerate() {
        let sparse = run_sparse(&model, t, &mut sparse_ctr)?;
        let dense = run_dense_constrained(&model, t, &mut dense_ctr)?;
        let dev = sparse
            .iter()
            .zip(dense.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        max_dev = max_dev.max(dev);

        // active-set agreement between reduction tree and row-major scan
        let quantized;
        let scan_input = match (model.mode, model.format) {
            (ArithmeticMode::Fixed, Some(fmt)) => {
                quantized = t.quantized(fmt);
                &quantized
            }
            _ => t,
        };
        let (coords, _) = naive_active_scan(scan_input, threshold, n_max);
        let mut ctr = OpCounter::default();
        let bundle = sparse_input_reduce(
            scan_input,
            &ReduceConfig {
                threshold,
                n_max,
            },
            &mut ctr,
        )?;
        let bundle_coords: Vec<(u32, u32)> = (0..bundle.active_count())
            .map(|s| bundle.coord(s))
            .collect();
        let agree = bundle_coords == coords;

        let ok = dev <= tolerance && agree;
        if !ok {
            violations += 1;
        }
        println!(
            "input {:>3}: max deviation {:.3e}, active-set agreement {} -> {}",
            i,
            dev,
            agree,
            if ok { "ok" } else { "VIOLATION" }
        );
    }

    // multiply accounting against the analytical formula
    let mut expected_sparse = 0u64;
    let (mut h, mut w) = (model.input_h, model.input_w);
    let mut ratios = Vec::new();
    for layer in &model.layers {
        match layer {
            spx_core::LayerSpec::SparseConv { weights } => {
                let c = conv_cost(n_max, weights.c_in, weights.c_out, h, w, weights.k);
                expected_sparse += c.sparse_mults;
                ratios.push(c.ratio);
            }
            spx_core::LayerSpec::SparsePool { p } => {
                h = (h + p - 1) / p;
                w = (w + p - 1) / p;
            }
            _ => {}
        }
    }
    println!(
        "totals over {} inputs: max deviation {:.3e} (tolerance {:.1e})",
        tensors.len(),
        max_dev,
        tolerance
    );
    println!(
        "sparse conv multiplies: {} measured vs {} expected per input",
        sparse_ctr.mults, // includes head multiplies; conv-only accounting below
        expected_sparse * tensors.len() as u64
    );
    for (i, r) in ratios.iter().enumerate() {
        println!("conv layer {}: sparse/dense multiply ratio {:.6}", i, r);
    }

    if let Some(out) = &args.out {
        let report = serde_json::json!({
            "inputs": tensors.len(),
            "max_deviation": max_dev,
            "tolerance": tolerance,
            "violations": violations,
            "conv_ratios": ratios,
        });
        std::fs::write(out, serde_json::to_string_pretty(&report)?)?;
    }
    if violations > 0 {
        bail!("{} equivalence violations", violations);
    }
    println!("compare: all {} inputs consistent", tensors.len());
    Ok(())
}

fn cmd_cost(args: CostArgs) -> anyhow::Result<()> {
    if let Some(model_path) = &args.model {
        let model = load_model(model_path)?;
        let report = model_cost(&model)?;
        println!(
            "{:<24} {:>12} {:>12} {:>12} {:>6} {:>10}",
            "layer", "mults", "adds", "compares", "depth", "cycles~"
        );
        for l in &report.layers {
            println!(
                "{:<24} {:>12} {:>12} {:>12} {:>6} {:>10}",
                l.layer,
                l.mult_count,
                l.add_count,
                l.compare_count,
                l.tree_depth.map_or(String::from("-"), |d| d.to_string()),
                l.estimated_cycles
                    .map_or(String::from("-"), |c| c.to_string()),
            );
        }
        println!(
            "totals: {} mults, {} adds, {} compares",
            report.total_mults, report.total_adds, report.total_compares
        );
        for (i, r) in report.conv_ratios.iter().enumerate() {
            println!("conv layer {}: sparse/dense multiply ratio {:.6}", i, r);
        }
        if let Some(n) = model.n_max() {
            let frac = n as f64 / (model.input_h * model.input_w) as f64;
            println!(
                "active input fraction: {}/{} = {:.3}%",
                n,
                model.input_h * model.input_w,
                frac * 100.0
            );
        }
        println!("note: {}", report.cycle_note);
        if let Some(out) = &args.out {
            std::fs::write(out, serde_json::to_string_pretty(&report)?)?;
        }
    } else {
        let (n_max, h, w) = (
            args.n_max.context("--n-max required without --model")?,
            args.height.context("--height required without --model")?,
            args.width.context("--width required without --model")?,
        );
        let c = conv_cost(n_max, args.c_in, args.c_out, h, w, args.k);
        println!(
            "conv cost: sparse {} vs dense {} multiplies, ratio {:.6} ({:.4}%)",
            c.sparse_mults,
            c.dense_mults,
            c.ratio,
            c.ratio * 100.0
        );
        println!(
            "active input fraction: {}/{} = {:.4}%",
            n_max,
            h * w,
            n_max as f64 / (h * w) as f64 * 100.0
        );
        println!("reduction tree depth: {}", tree_depth(h, w));
        if let Some(out) = &args.out {
            std::fs::write(out, serde_json::to_string_pretty(&c)?)?;
        }
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> anyhow::Result<()> {
    let sizes = parse_list(&args.sizes)?;
    let n_maxes = parse_list(&args.n_max_list)?;

    println!("reduction tree depth by input size:");
    let mut depths = Vec::new();
    for &s in &sizes {
        let d = tree_depth(1, s);
        depths.push(d);
        println!("  {:>6} pixels -> depth {}", s, d);
    }

    let cal = calibrate_cycles(&spx_core::cost::REDUCE_II_SAMPLES)?;
    println!("estimated input-reduction II by n_max (calibrated, not measured):");
    for &n in &n_maxes {
        println!("  n_max {:>3} -> ~{} cycles", n, estimate_cycles(&cal, n));
    }

    println!(
        "sparse conv multiplies by n_max (independent of K; dense shown for K={}):",
        args.k
    );
    for &n in &n_maxes {
        let c3 = conv_cost(n, 1, 1, 63, 63, args.k);
        println!(
            "  n_max {:>3} -> sparse {:>6}, dense(63x63) {:>7}, ratio {:.5}",
            n, c3.sparse_mults, c3.dense_mults, c3.ratio
        );
    }

    if let Some(out) = &args.out {
        let report = serde_json::json!({
            "sizes": sizes,
            "depths": depths,
            "n_max": n_maxes,
            "estimated_ii": n_maxes.iter().map(|&n| estimate_cycles(&cal, n)).collect::<Vec<_>>(),
        });
        std::fs::write(out, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(())
}

fn cmd_gen_weights(args: GenWeightsArgs) -> anyhow::Result<()> {
    let n_max = n_max_for_size(&args.n_max)
        .or_else(|| args.n_max.parse().ok())
        .with_context(|| format!("invalid --n-max {:?}", args.n_max))?;
    let (mode, format) = match args.mode.as_str() {
        "float" => (ArithmeticMode::Float, None),
        "fixed" => {
            let fmt = match &args.format {
                Some(s) => parse_format(s)?,
                None => FixedFormat::default_for_width(8)?,
            };
            (ArithmeticMode::Fixed, Some(fmt))
        }
        other => bail!("unknown mode {:?} (float | fixed)", other),
    };
    let model = gen_random_model(args.seed, &args.preset, n_max, mode, format)?;
    save_model(&model, &args.out)?;
    println!(
        "gen-weights: preset {} seed {} n_max {} -> {}",
        args.preset,
        args.seed,
        n_max,
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Preprocess(a) => cmd_preprocess(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Infer(a) => cmd_infer(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Cost(a) => cmd_cost(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::GenWeights(a) => cmd_gen_weights(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::FAILURE
        }
    }
}
