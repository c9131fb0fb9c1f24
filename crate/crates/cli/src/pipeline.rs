//! Subcommand implementations tying the library modules together.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use qclust_core::cluster::{anova_residual, lloyd_kmeans, scatter_stats, LloydInit};
use qclust_core::data::{gen_blobs as make_blobs, DataSet};
use qclust_core::ising::{
    assignment_from_spins, brute_force, decode, energy, ising_full, ising_reduced, ket_string,
    IsingModel, ReducedModel,
};
use qclust_core::kernel::{gram, Kernel};
use qclust_core::qsim::{build_spec, evolve, initial_state, top_states, Schedule};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::{
    AnovaReport, BruteReport, BruteState, ConfigEcho, DataSummary, EvolutionSummary, LloydSummary,
    ModelSummary, OracleState, OracleSummary, RunReport, ScatterSummary, TopState, Versions,
    SCHEMA_VERSION,
};
use crate::{BruteArgs, CliError, GenBlobsArgs, InputArgs, ModelArgs, ModelKind, RunArgs,
    VerifyAnovaArgs};

/// Reported states are capped at this many entries.
const TOP_STATE_COUNT: usize = 4;
const LLOYD_MAX_ITER: usize = 100;
const ANOVA_TOLERANCE: f64 = 1e-9;

enum BuiltModel {
    Full(IsingModel),
    Reduced(ReducedModel),
}

impl BuiltModel {
    fn model(&self) -> &IsingModel {
        match self {
            BuiltModel::Full(model) => model,
            BuiltModel::Reduced(reduced) => &reduced.model,
        }
    }

    fn fixed(&self) -> Option<usize> {
        match self {
            BuiltModel::Full(_) => None,
            BuiltModel::Reduced(reduced) => Some(reduced.fixed_index),
        }
    }
}

pub fn run(args: &RunArgs) -> Result<(), CliError> {
    let kernel: Kernel = args.model.kernel.parse()?;
    let data = load_data(&args.input, args.seed)?.center();
    let built = build_model(&data, &kernel, &args.model)?;
    let model = built.model();
    let qubits = model.num_spins();

    let ground = brute_force(model)?;
    let spec = build_spec(
        model,
        Schedule {
            tau: args.tau,
            steps: args.steps,
            sample_count: args.samples,
        },
        args.normalize_energy,
    )?;
    let evolution = evolve(&spec, &initial_state(qubits))?;
    let top = top_states(&evolution.trace, TOP_STATE_COUNT.min(1 << qubits));
    let top_index = top[0].0;

    let mut assignment = assignment_from_spins(&decode(top_index, qubits)?, built.fixed())?;
    if built.fixed().is_none() && assignment.labels()[0] == 2 {
        // The full model's ground pair is label-symmetric; report the
        // member that puts point 1 in cluster 1.
        assignment = assignment.swapped();
    }

    let stats = scatter_stats(&data, &assignment)?;
    let residual = anova_residual(&data, &assignment)?;
    let lloyd = lloyd_kmeans(&data, &LloydInit::Seed(args.seed), LLOYD_MAX_ITER)?;

    if let Some(path) = &args.trace {
        let mut writer = BufWriter::new(File::create(path)?);
        evolution.trace.write_csv(&mut writer)?;
        writer.flush()?;
    }

    let report = RunReport {
        schema: SCHEMA_VERSION,
        versions: Versions::current(),
        config: config_echo(args),
        data: DataSummary {
            n: data.len(),
            dim: data.dim(),
            point_ids: data.point_ids().to_vec(),
        },
        model: model_summary(&built),
        evolution: EvolutionSummary {
            tau: spec.tau(),
            steps: spec.steps(),
            sample_count: spec.sample_count(),
            normalize_energy: args.normalize_energy,
            energy_scale: spec.energy_scale(),
            norm_drift_max: evolution.trace.max_drift(),
        },
        top_states: top
            .iter()
            .map(|&(index, probability)| TopState {
                index,
                ket: ket_string(index, qubits),
                probability,
            })
            .collect(),
        oracle: OracleSummary {
            min_energy: ground.min_energy,
            states: ground
                .states
                .iter()
                .map(|&index| -> Result<OracleState, CliError> {
                    Ok(OracleState {
                        index,
                        ket: ket_string(index, qubits),
                        energy: energy(model, &decode(index, qubits)?)?,
                    })
                })
                .collect::<Result<_, _>>()?,
            agrees: ground.states.contains(&top_index),
        },
        cluster_sizes: assignment.sizes(),
        assignment: assignment.labels().to_vec(),
        scatter: ScatterSummary::from(&stats),
        anova_residual: residual,
        lloyd: LloydSummary {
            same_bipartition: lloyd.assignment.same_bipartition(&assignment),
            assignment: lloyd.assignment.labels().to_vec(),
            s_w: lloyd.s_w,
            iterations: lloyd.iterations,
            converged: lloyd.converged,
        },
    };
    write_output(args.out.as_ref(), &to_json(&report))
}

pub fn brute(args: &BruteArgs) -> Result<(), CliError> {
    let kernel: Kernel = args.model.kernel.parse()?;
    let data = load_data(&args.input, args.seed)?.center();
    let built = build_model(&data, &kernel, &args.model)?;
    let model = built.model();
    let qubits = model.num_spins();

    let ground = brute_force(model)?;
    let ground_states = ground
        .states
        .iter()
        .map(|&index| -> Result<BruteState, CliError> {
            let spins = decode(index, qubits)?;
            let assignment = assignment_from_spins(&spins, built.fixed())
                .ok()
                .map(|a| a.labels().to_vec());
            Ok(BruteState {
                index,
                ket: ket_string(index, qubits),
                energy: energy(model, &spins)?,
                assignment,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let report = BruteReport {
        schema: SCHEMA_VERSION,
        versions: Versions::current(),
        kernel: kernel.to_string(),
        model: model_summary(&built),
        n_points: data.len(),
        min_energy: ground.min_energy,
        ground_state_count: ground_states.len(),
        ground_states,
    };
    write_output(args.out.as_ref(), &to_json(&report))
}

pub fn gen_blobs(args: &GenBlobsArgs) -> Result<(), CliError> {
    let (c1, c2) = parse_centers(&args.centers)?;
    let data = make_blobs(args.n1, args.n2, &c1, &c2, args.spread, args.seed)?;
    let mut buf = Vec::new();
    data.write_csv(&mut buf, args.header)?;
    write_output(args.out.as_ref(), &String::from_utf8(buf).expect("csv is utf-8"))
}

pub fn verify_anova(args: &VerifyAnovaArgs) -> Result<(), CliError> {
    let data = load_data(&args.input, args.seed)?;
    let n = data.len();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut max_relative = 0.0f64;
    for _ in 0..args.trials {
        let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(1..=2)).collect();
        if labels.iter().all(|&l| l == labels[0]) {
            labels[0] = 3 - labels[0];
        }
        let assignment = qclust_core::cluster::ClusterAssignment::new(labels)?;
        let stats = scatter_stats(&data, &assignment)?;
        let residual = anova_residual(&data, &assignment)?;
        max_relative = max_relative.max(residual.abs() / stats.s_t.max(1.0));
    }
    let pass = max_relative <= ANOVA_TOLERANCE;
    let report = AnovaReport {
        schema: SCHEMA_VERSION,
        versions: Versions::current(),
        n_points: n,
        trials: args.trials,
        max_relative_residual: max_relative,
        tolerance: ANOVA_TOLERANCE,
        pass,
    };
    write_output(None, &to_json(&report))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(format!(
            "scatter decomposition violated: max relative residual {max_relative:.3e} > {ANOVA_TOLERANCE:.0e}"
        )))
    }
}

fn build_model(
    data: &DataSet,
    kernel: &Kernel,
    args: &ModelArgs,
) -> Result<BuiltModel, CliError> {
    let n = data.len();
    let fixed = match (args.model, args.fixed_index) {
        (ModelKind::Full, None) => None,
        (ModelKind::Full, Some(_)) => {
            return Err(CliError::Usage(
                "--fixed-index is only valid with --model reduced".to_string(),
            ))
        }
        (ModelKind::Reduced, None) => {
            return Err(CliError::Usage(
                "--model reduced requires --fixed-index".to_string(),
            ))
        }
        (ModelKind::Reduced, Some(k)) => {
            if !(1..=n).contains(&k) {
                return Err(CliError::Usage(format!(
                    "--fixed-index {k} out of range 1..={n}"
                )));
            }
            Some(k - 1)
        }
    };
    let g = gram(data, kernel)?;
    Ok(match fixed {
        None => BuiltModel::Full(ising_full(&g)),
        Some(fixed) => BuiltModel::Reduced(ising_reduced(&g, fixed)?),
    })
}

fn model_summary(built: &BuiltModel) -> ModelSummary {
    ModelSummary {
        kind: match built {
            BuiltModel::Full(_) => "full".to_string(),
            BuiltModel::Reduced(_) => "reduced".to_string(),
        },
        num_spins: built.model().num_spins(),
        fixed_index: built.fixed().map(|f| f + 1),
    }
}

fn config_echo(args: &RunArgs) -> ConfigEcho {
    ConfigEcho {
        input: args
            .input
            .source
            .input
            .as_ref()
            .map(|p| p.display().to_string()),
        blobs: args.input.source.blobs.clone(),
        centers: args.input.centers.clone(),
        spread: args.input.spread,
        header: args.input.header,
        kernel: args.model.kernel.clone(),
        model: args.model.model.name().to_string(),
        fixed_index: args.model.fixed_index,
        tau: args.tau,
        steps: args.steps,
        samples: args.samples,
        normalize_energy: args.normalize_energy,
        seed: args.seed,
    }
}

fn load_data(args: &InputArgs, seed: u64) -> Result<DataSet, CliError> {
    match (&args.source.input, &args.source.blobs) {
        (Some(path), None) => {
            let file = File::open(path)?;
            Ok(DataSet::read_csv(BufReader::new(file), args.header)?)
        }
        (None, Some(spec)) => {
            let (n1, n2) = parse_blob_sizes(spec)?;
            let (c1, c2) = parse_centers(&args.centers)?;
            Ok(make_blobs(n1, n2, &c1, &c2, args.spread, seed)?)
        }
        _ => unreachable!("clap enforces exactly one data source"),
    }
}

fn parse_blob_sizes(spec: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if let [n1, n2] = parts.as_slice() {
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("--blobs: cannot parse size {s:?}")))
        };
        return Ok((parse(n1)?, parse(n2)?));
    }
    Err(CliError::Usage(format!(
        "--blobs expects N1,N2, got {spec:?}"
    )))
}

fn parse_centers(spec: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let parts: Vec<&str> = spec.split(';').collect();
    if let [a, b] = parts.as_slice() {
        let parse = |s: &str| -> Result<Vec<f64>, CliError> {
            s.split(',')
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| {
                        CliError::Usage(format!("--centers: cannot parse coordinate {v:?}"))
                    })
                })
                .collect()
        };
        return Ok((parse(a)?, parse(b)?));
    }
    Err(CliError::Usage(format!(
        "--centers expects two vectors separated by ';', got {spec:?}"
    )))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => {
            let mut file = File::create(path)?;
            file.write_all(content.as_bytes())?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}
