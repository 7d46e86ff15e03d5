//! Dataset sweep: every (image, alpha, seed) cell is simulated, initialized
//! with HIO once, and handed to each requested algorithm.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use phaseret::align::align_to_reference;
use phaseret::denoise::Denoiser;
use phaseret::io::load_image;
use phaseret::measurement::{make_fourier_operator, simulate_poisson_intensity};
use phaseret::metrics::{psnr, ssim};
use phaseret::optimize::TraceEntry;
use phaseret::solvers::{hio_init, solve_from, ReconstructionProblem};
use phaseret::Image;
use rayon::prelude::*;

use crate::config::{Algorithm, ExperimentConfig};
use crate::error::{BenchError, Result};
use crate::report::ReportRow;
use crate::seed::derive_seed;

/// Image files (`.pgm`/`.png`) in `dir`, sorted by file name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|source| BenchError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|source| BenchError::Io {
                path: dir.to_path_buf(),
                source,
            })?
            .path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if path.is_file() && matches!(ext.as_deref(), Some("pgm" | "png")) {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(BenchError::EmptyDataset(dir.to_path_buf()));
    }
    Ok(files)
}

fn image_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Runs the sweep described by `config`; see [`run_experiment_with`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    run_experiment_with(config, |_, _| {})
}

/// Runs the sweep and calls `inspect` with every scored row and the solver
/// trace behind it (empty for HIO).
///
/// Rows come out ordered by image, alpha, seed and algorithm, matching the
/// order of the config lists. Unreadable images yield a single row with a
/// note and no scores.
pub fn run_experiment_with<F>(config: &ExperimentConfig, inspect: F) -> Result<Vec<ReportRow>>
where
    F: Fn(&ReportRow, &[TraceEntry]) + Sync,
{
    config.validate()?;
    let denoiser = config.denoiser.build()?;
    let files = list_images(&config.dataset)?;

    let images: Vec<(String, std::result::Result<Image, String>)> = files
        .iter()
        .map(|path| (image_name(path), load_image(path).map_err(|e| e.to_string())))
        .collect();

    let mut cells = Vec::new();
    for (index, (_, image)) in images.iter().enumerate() {
        if image.is_ok() {
            for &alpha in &config.alphas {
                for &seed in &config.seeds {
                    cells.push((index, alpha, seed));
                }
            }
        }
    }

    let results: Vec<Result<Vec<ReportRow>>> = cells
        .par_iter()
        .map(|&(index, alpha, seed)| {
            let (name, image) = &images[index];
            let truth = image.as_ref().expect("only readable images become cells");
            run_cell(config, &denoiser, name, truth, alpha, seed, &inspect)
        })
        .collect();

    let mut by_image: Vec<Vec<ReportRow>> = vec![Vec::new(); images.len()];
    for ((index, _, _), rows) in cells.iter().zip(results) {
        by_image[*index].extend(rows?);
    }
    let mut rows = Vec::new();
    for ((name, image), cell_rows) in images.iter().zip(by_image) {
        if let Err(reason) = image {
            log::warn!("skipping {name}: {reason}");
            rows.push(ReportRow::warning(name, format!("unreadable: {reason}")));
        }
        rows.extend(cell_rows);
    }
    Ok(rows)
}

fn run_cell(
    config: &ExperimentConfig,
    denoiser: &Arc<dyn Denoiser>,
    name: &str,
    truth: &Image,
    alpha: f64,
    master_seed: u64,
    inspect: &(impl Fn(&ReportRow, &[TraceEntry]) + Sync),
) -> Result<Vec<ReportRow>> {
    let (h, w) = truth.dims();
    let op = make_fourier_operator(h, w, config.oversampling)?;
    let observation = simulate_poisson_intensity(&op, truth, alpha, derive_seed(master_seed, name, alpha))?;
    let mut problem = ReconstructionProblem::new(observation, Arc::clone(denoiser))?;
    problem.lambda = config.lambda;
    problem.solver.max_iter = config.iters;
    problem.solver.enable_linesearch = config.linesearch;
    problem.set_step_scale(config.tau);

    let start = Instant::now();
    let init = hio_init(&problem)?;
    let init_time = start.elapsed().as_secs_f64();

    let mut rows = Vec::with_capacity(config.algorithms.len());
    for &algorithm in &config.algorithms {
        let (estimate, trace, runtime) = match algorithm.pipeline() {
            None => (init.clone(), Vec::new(), init_time),
            Some(pipeline) => {
                let start = Instant::now();
                let result = solve_from(&problem, pipeline, &init)?;
                (result.x, result.trace, init_time + start.elapsed().as_secs_f64())
            }
        };
        let aligned = align_to_reference(&estimate, truth)?;
        let row = ReportRow {
            image: name.to_owned(),
            algorithm: algorithm.name().to_owned(),
            alpha,
            seed: master_seed,
            psnr: psnr(truth, &aligned)?,
            ssim: ssim(truth, &aligned)?,
            runtime,
            note: String::new(),
        };
        log::debug!("{name} {algorithm} alpha={alpha} seed={master_seed}: {:.2} dB", row.psnr);
        inspect(&row, &trace);
        rows.push(row);
    }
    Ok(rows)
}

/// Runs one algorithm on `truth` exactly as the sweep would.
pub fn run_single(config: &ExperimentConfig, name: &str, truth: &Image, alpha: f64, seed: u64, algorithm: Algorithm) -> Result<ReportRow> {
    let single = ExperimentConfig {
        algorithms: vec![algorithm],
        ..config.clone()
    };
    let denoiser = config.denoiser.build()?;
    let mut rows = run_cell(&single, &denoiser, name, truth, alpha, seed, &|_: &ReportRow, _: &[TraceEntry]| {})?;
    Ok(rows.remove(0))
}
