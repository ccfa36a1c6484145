//! The `train`, `flow` and `eval` commands.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use lieflow_core::eval::{flow_samples, mmd_permutation_test, two_sample_metrics};
use lieflow_core::training::{train_with_progress, TrainOutcome};
use lieflow_core::{rng, Element, Group, LieGroup};

use crate::checkpoint::Checkpoint;
use crate::config::{join, Resolved, RunConfig, DEFAULT_FLOW_STEPS, DEFAULT_N, DEFAULT_PERMUTATIONS};
use crate::error::{CliError, Result};
use crate::report::{self, ReportFile};
use crate::tables;

/// Paths written by a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub files: Vec<PathBuf>,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn csv_write_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::io(path, e),
        kind => CliError::File { path: path.to_path_buf(), message: format!("{kind:?}") },
    }
}

fn table_err(path: &Path, e: tables::TableError) -> CliError {
    CliError::Csv { path: path.to_path_buf(), line: e.line, message: e.message }
}

/// Group from `--group`, else from the checkpoint; both must agree.
fn checkpoint_and_group(config: &RunConfig) -> Result<(Checkpoint, Group)> {
    let path = config.checkpoint();
    match config.group()? {
        Some(group) => Ok((Checkpoint::load_for(&path, &group)?, group)),
        None => {
            let ckpt = Checkpoint::load(&path)?;
            let group = ckpt.group();
            Ok((ckpt, group))
        }
    }
}

pub fn write_trajectories(path: &Path, group: &Group, trajectories: &[Vec<Element>]) -> Result<()> {
    tables::write_trajectories(create(path)?, group, trajectories).map_err(|e| csv_write_err(path, e))
}

pub fn read_trajectories(path: &Path, group: &Group) -> Result<Vec<Vec<Element>>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    tables::read_trajectories(BufReader::new(file), group).map_err(|e| table_err(path, e))
}

pub fn write_losses(path: &Path, losses: &[f64]) -> Result<()> {
    tables::write_losses(create(path)?, losses).map_err(|e| csv_write_err(path, e))
}

pub fn read_losses(path: &Path) -> Result<Vec<f64>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    tables::read_losses(BufReader::new(file)).map_err(|e| table_err(path, e))
}

/// Trains a field and writes `checkpoint.json` (or `--checkpoint`),
/// `loss.csv` and `train.resolved.cfg`.
pub fn train(config: &RunConfig) -> Result<Outputs> {
    let group = config.group()?.ok_or_else(|| CliError::flag("group", "required (flag or config key)"))?;
    let source = config.distribution("source", &group, None)?;
    let target = config.distribution("target", &group, None)?;
    let tc = config.train_config(&group)?;
    let out = config.out();
    let ckpt_path = config.checkpoint();

    let mut resolved = Resolved::default();
    resolved
        .push("group", group.name())
        .push("source", source.id())
        .push("target", target.id())
        .push("steps", tc.steps)
        .push("batch", tc.batch_size)
        .push("lr", tc.adam.lr)
        .push("schedule", tc.schedule.name())
        .push("seed", tc.seed)
        .push("epsilon", tc.epsilon)
        .push("hidden", join(&tc.hidden))
        .distribution_params(source.params());
    if let Some(w) = &tc.weights {
        resolved.push("weights", join(w.as_slice()));
    }
    resolved.push("out", out.display()).push("checkpoint", ckpt_path.display());
    create_dir(&out)?;
    let cfg_path = resolved.write("train", &out)?;

    let report_every = (tc.steps / 10).max(1);
    let TrainOutcome { net, losses } = train_with_progress(&group, &source, &target, &tc, |step, loss| {
        if (step + 1) % report_every == 0 {
            eprintln!("step {:>6}/{}  loss {loss:.6}", step + 1, tc.steps);
        }
    })?;

    if let Some(parent) = ckpt_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    Checkpoint::new(&group, &net, Some(source.id()), Some(target.id())).save(&ckpt_path)?;
    let loss_path = out.join("loss.csv");
    write_losses(&loss_path, &losses)?;
    Ok(Outputs { files: vec![ckpt_path, loss_path, cfg_path] })
}

/// Flows `n` source samples through a checkpoint's field and writes
/// `trajectories.csv` and `flow.resolved.cfg`.
pub fn flow(config: &RunConfig) -> Result<Outputs> {
    let (ckpt, group) = checkpoint_and_group(config)?;
    let net = ckpt.net()?;
    let source = config.distribution("source", &group, ckpt.source.as_deref())?;
    let n = config.usize_or("n", DEFAULT_N)?;
    let steps = config.usize_or("flow-steps", DEFAULT_FLOW_STEPS)?;
    let seed = config.seed()?;
    if n == 0 {
        return Err(CliError::flag("n", "must be >= 1"));
    }
    if steps == 0 {
        return Err(CliError::flag("flow-steps", "must be >= 1"));
    }
    let out = config.out();
    let mut resolved = Resolved::default();
    resolved
        .push("group", group.name())
        .push("checkpoint", config.checkpoint().display())
        .push("source", source.id())
        .distribution_params(source.params())
        .push("n", n)
        .push("flow-steps", steps)
        .push("seed", seed)
        .push("out", out.display());
    create_dir(&out)?;
    let cfg_path = resolved.write("flow", &out)?;

    let sources = source.sample(n, &mut rng::stream(seed, rng::SOURCE))?;
    let trajectories = flow_samples(&net, &group, &sources, steps)?;
    let path = out.join("trajectories.csv");
    write_trajectories(&path, &group, &trajectories)?;
    Ok(Outputs { files: vec![path, cfg_path] })
}

/// Compares flow endpoints with a fresh target batch and writes
/// `report.json` and `eval.resolved.cfg`. Endpoints come from `--input`
/// (a trajectories CSV) or from flowing `--source` through `--checkpoint`.
pub fn eval(config: &RunConfig) -> Result<(Outputs, ReportFile)> {
    let seed = config.seed()?;
    let permutations = config.usize_or("permutations", DEFAULT_PERMUTATIONS)?;
    if permutations == 0 {
        return Err(CliError::flag("permutations", "must be >= 1"));
    }
    let out = config.out();
    let mut resolved = Resolved::default();

    let (group, endpoints, source, input, flow_steps, target) = if let Some(input) = config.get("input") {
        let group = config.group()?.ok_or_else(|| CliError::flag("group", "required with --input"))?;
        let target = config.distribution("target", &group, None)?;
        let trajectories = read_trajectories(Path::new(input), &group)?;
        let endpoints: Vec<Element> = trajectories.iter().map(|t| t.last().expect("non-empty").clone()).collect();
        resolved.push("group", group.name()).push("input", input);
        (group, endpoints, None, Some(input.to_string()), None, target)
    } else {
        let (ckpt, group) = checkpoint_and_group(config)?;
        let net = ckpt.net()?;
        let source = config.distribution("source", &group, ckpt.source.as_deref())?;
        let target = config.distribution("target", &group, ckpt.target.as_deref())?;
        let n = config.usize_or("n", DEFAULT_N)?;
        let steps = config.usize_or("flow-steps", DEFAULT_FLOW_STEPS)?;
        if steps == 0 {
            return Err(CliError::flag("flow-steps", "must be >= 1"));
        }
        let sources = source.sample(n, &mut rng::stream(seed, rng::SOURCE)).map_err(|e| CliError::flag("n", e.to_string()))?;
        let trajectories = flow_samples(&net, &group, &sources, steps)?;
        let endpoints = trajectories.into_iter().map(|mut t| t.pop().expect("non-empty")).collect();
        resolved
            .push("group", group.name())
            .push("checkpoint", config.checkpoint().display())
            .push("source", source.id())
            .push("n", n)
            .push("flow-steps", steps);
        (group, endpoints, Some(source.id().to_string()), None, Some(steps), target)
    };
    resolved
        .push("target", target.id())
        .distribution_params(target.params())
        .push("seed", seed)
        .push("permutations", permutations)
        .push("out", out.display());
    create_dir(&out)?;
    let cfg_path = resolved.write("eval", &out)?;

    let targets = target.sample(endpoints.len(), &mut rng::stream(seed, rng::TARGET))?;
    let metrics = two_sample_metrics(&group, &endpoints, &targets)?;
    let permutation_test = mmd_permutation_test(&group, &endpoints, &targets, permutations, &mut rng::stream(seed, rng::PERMUTATION))?;
    let report = ReportFile {
        format: report::FORMAT.to_string(),
        version: report::VERSION,
        group: group.name(),
        source,
        input,
        target: target.id().to_string(),
        flow_steps,
        seed,
        metrics,
        permutation_test,
    };
    let path = out.join("report.json");
    report.save(&path)?;
    Ok((Outputs { files: vec![path, cfg_path] }, report))
}
