use std::fs::File;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use mixgap::chain::{
    dilated_pseudo_spectral_gap, multiplicative_gap, spectral_summary, stationary_distribution,
    tmix_bounds, BoundMode, TransitionMatrix,
};
use mixgap::confidence::{
    num, pimin_interval_from_counts, pssg_interval_from_counts, reversible_intervals_from_counts,
};
use mixgap::estimators::adaptive_k_from;
use mixgap::io::{matrix_to_json, read_matrix, read_trajectory, stream_counts, write_trajectory};
use mixgap::lower_bound::{star_chain, symmetric_family};
use mixgap::trajectory::{simulate, skipped_counts, SkippedCounts, Trajectory};

use crate::args::{
    parse_vector, required, CoverageArgs, EstimateArgs, FamilyArgs, FamilyKind, SimulateArgs,
    SpectrumArgs,
};
use crate::failure::Failure;

pub const DEFAULT_DELTA: f64 = 0.05;
pub const DEFAULT_XI: f64 = 0.25;
pub const THREADS_VAR: &str = "MIXGAP_THREADS";

pub enum Output {
    Json(Value),
    Trajectory(Trajectory),
}

fn pair((a, b): (f64, f64)) -> Value {
    json!([num(a), num(b)])
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn spectrum(args: &SpectrumArgs) -> Result<Output, Failure> {
    let m = read_matrix(&required(args.matrix.clone(), "matrix")?)?;
    let xi = args.xi.unwrap_or(DEFAULT_XI);
    let summary = spectral_summary(&m, args.kmax, xi)?;
    let pi = stationary_distribution(&m)?;
    let first_power = multiplicative_gap(&m, &pi, 1)?;
    let reversible_bounds = match summary.gamma_star {
        Some(_) if summary.reversible => pair(tmix_bounds(&summary, summary.pi_min, BoundMode::Reversible)?),
        _ => Value::Null,
    };
    Ok(Output::Json(json!({
        "d": m.dim(),
        "reversible": summary.reversible,
        "gamma": opt(summary.gamma),
        "gamma_star": opt(summary.gamma_star),
        "multiplicative_gap_k1": num(first_power),
        "gamma_ps": num(summary.gamma_ps),
        "k_ps": summary.k_ps,
        "gamma_ps_dilated": num(summary.gamma_ps_dilated),
        "xi": num(xi),
        "t_mix": summary.t_mix,
        "balance_beta": num(summary.balance_beta),
        "pi_min": num(summary.pi_min),
        "stationary": pi.probs().iter().map(|&p| num(p)).collect::<Vec<_>>(),
        "tmix_bounds": {
            "reversible": reversible_bounds,
            "pseudo": pair(tmix_bounds(&summary, summary.pi_min, BoundMode::Pseudo)?),
            "dilated": pair(tmix_bounds(&summary, summary.pi_min, BoundMode::Dilated)?),
        },
    })))
}

fn initial_law(choice: Option<&str>, m: &TransitionMatrix) -> Result<Vec<f64>, Failure> {
    match choice.unwrap_or("stationary") {
        "stationary" => Ok(stationary_distribution(m)?.probs().to_vec()),
        "uniform" => Ok(vec![1.0 / m.dim() as f64; m.dim()]),
        explicit => parse_vector(explicit, "initial law"),
    }
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<Output, Failure> {
    let m = read_matrix(&required(args.matrix.clone(), "matrix")?)?;
    let len = required(args.m, "m")?;
    let mu = initial_law(args.mu.as_deref(), &m)?;
    Ok(Output::Trajectory(simulate(&m, &mu, len, args.seed.unwrap_or(0))?))
}

/// How the outer `K` is chosen.
#[derive(Debug, Clone, Copy)]
enum SkipRule {
    Fixed(usize),
    Adaptive(f64),
}

impl SkipRule {
    fn from_flags(k: Option<usize>, eps: Option<f64>) -> Result<Self, Failure> {
        match (k, eps) {
            (Some(k), None) if k >= 1 => Ok(Self::Fixed(k)),
            (Some(k), None) => Err(Failure::precondition(format!("--K must be at least 1, got {k}"))),
            (None, Some(e)) if e > 0.0 && e < 1.0 => Ok(Self::Adaptive(e)),
            (None, Some(e)) => Err(Failure::precondition(format!("--adaptive-eps must lie in (0, 1), got {e}"))),
            (Some(_), Some(_)) => Err(Failure::precondition("--K and --adaptive-eps are exclusive")),
            (None, None) => Err(Failure::precondition("one of --K or --adaptive-eps is required")),
        }
    }

    fn json(self) -> (Value, Value) {
        match self {
            Self::Fixed(_) => (json!("fixed"), Value::Null),
            Self::Adaptive(e) => (json!("adaptive"), num(e)),
        }
    }
}

fn counts_for(traj: &Trajectory, rule: SkipRule) -> Result<Vec<SkippedCounts>, Failure> {
    let k_outer = match rule {
        SkipRule::Fixed(k) => k,
        SkipRule::Adaptive(eps) => adaptive_k_from(skipped_counts(traj, 1)?.n_min, eps, traj.len()),
    };
    Ok((1..=k_outer).map(|k| skipped_counts(traj, k)).collect::<mixgap::Result<Vec<_>>>()?)
}

fn smoothing(alpha: Option<f64>, m: usize) -> f64 {
    alpha.unwrap_or(1.0 / (m.saturating_sub(1)).max(1) as f64)
}

fn require_length(m: usize) -> Result<(), Failure> {
    if m < 2 {
        return Err(Failure::precondition(format!("trajectory needs at least 2 states, got {m}")));
    }
    Ok(())
}

pub fn estimate(args: &EstimateArgs) -> Result<Output, Failure> {
    let path = required(args.traj.clone(), "traj")?;
    let d = required(args.d, "d")?;
    let rule = SkipRule::from_flags(args.k, args.adaptive_eps)?;
    let open = |p: &Path| File::open(p).map_err(|e| Failure::parse(format!("{}: {e}", p.display())));
    let (counts, m) = match rule {
        SkipRule::Fixed(k) => {
            let (counts, m) = stream_counts(open(&path)?, d, k)?;
            require_length(m)?;
            (counts, m)
        }
        SkipRule::Adaptive(_) => {
            let traj = read_trajectory(open(&path)?, d)?;
            require_length(traj.len())?;
            (counts_for(&traj, rule)?, traj.len())
        }
    };
    let alpha = smoothing(args.alpha, m);
    let delta = args.delta.unwrap_or(DEFAULT_DELTA);
    let pssg = pssg_interval_from_counts(&counts, alpha, delta)?;
    let pimin = pimin_interval_from_counts(&counts[0], alpha, delta, counts.len())?;
    let (rule_name, eps) = rule.json();
    let mut out = json!({
        "m": m,
        "d": d,
        "K": counts.len(),
        "k_rule": rule_name,
        "adaptive_eps": eps,
        "alpha": num(alpha),
        "delta": num(delta),
        "n_min": counts[0].n_min,
        "pssg_dilated": pssg.to_json(),
        "pi_min": pimin.to_json(),
    });
    if args.reversible {
        out["asg_reversible"] = reversible_intervals_from_counts(&counts[0], alpha, delta)?.to_json();
    }
    Ok(Output::Json(out))
}

struct RunResult {
    gap: (bool, f64, f64),
    pimin: (bool, f64, f64),
    k_outer: usize,
}

fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_VAR) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::precondition(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Failure::precondition(format!("thread pool: {e}")))
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

pub fn coverage(args: &CoverageArgs) -> Result<Output, Failure> {
    let chain = read_matrix(&required(args.matrix.clone(), "matrix")?)?;
    let len = required(args.m, "m")?;
    let runs = required(args.runs, "runs")?;
    if runs == 0 {
        return Err(Failure::precondition("--runs must be at least 1"));
    }
    require_length(len)?;
    let rule = SkipRule::from_flags(args.k, args.adaptive_eps)?;
    let alpha = smoothing(args.alpha, len);
    let delta = args.delta.unwrap_or(DEFAULT_DELTA);
    let seed = args.seed.unwrap_or(0);

    let pi = stationary_distribution(&chain)?;
    let true_gap = dilated_pseudo_spectral_gap(&chain, &pi, None)?.value;
    let true_pimin = pi.pi_min();

    let one_run = |i: usize| -> Result<RunResult, Failure> {
        let traj = simulate(&chain, pi.probs(), len, seed.wrapping_add(i as u64))?;
        let counts = counts_for(&traj, rule)?;
        let gap = pssg_interval_from_counts(&counts, alpha, delta)?;
        let pimin = pimin_interval_from_counts(&counts[0], alpha, delta, counts.len())?;
        Ok(RunResult {
            gap: (gap.contains(true_gap), gap.half_width, gap.point),
            pimin: (pimin.contains(true_pimin), pimin.half_width, pimin.point),
            k_outer: counts.len(),
        })
    };
    // Indexed collection keeps results in seed order regardless of scheduling.
    let results = thread_pool()?.install(|| {
        (0..runs).into_par_iter().map(one_run).collect::<Result<Vec<_>, Failure>>()
    })?;

    let summarize = |pick: fn(&RunResult) -> (bool, f64, f64), truth: f64| {
        let n = results.len() as f64;
        json!({
            "truth": num(truth),
            "coverage": num(results.iter().filter(|r| pick(r).0).count() as f64 / n),
            "mean_half_width": num(mean(results.iter().map(|r| pick(r).1))),
            "vacuous_fraction": num(results.iter().filter(|r| pick(r).1.is_infinite()).count() as f64 / n),
            "mean_point": num(mean(results.iter().map(|r| pick(r).2))),
        })
    };
    let (rule_name, eps) = rule.json();
    Ok(Output::Json(json!({
        "m": len,
        "runs": runs,
        "seed": seed,
        "k_rule": rule_name,
        "adaptive_eps": eps,
        "mean_K": num(mean(results.iter().map(|r| r.k_outer as f64))),
        "alpha": num(alpha),
        "delta": num(delta),
        "pssg_dilated": summarize(|r| r.gap, true_gap),
        "pi_min": summarize(|r| r.pimin, true_pimin),
    })))
}

pub fn family(args: &FamilyArgs) -> Result<Output, Failure> {
    let kind = required(args.kind, "kind")?;
    let alpha = required(args.alpha, "alpha")?;
    let d = required(args.d, "d")?;
    let matrix = match kind {
        FamilyKind::Star => {
            let p = match &args.p {
                Some(text) => parse_vector(text, "spoke weights")?,
                None => vec![1.0 / d as f64; d],
            };
            if p.len() != d {
                return Err(Failure::precondition(format!("--p has {} entries but --d is {d}", p.len())));
            }
            star_chain(alpha, &p)?.matrix
        }
        FamilyKind::Symmetric => symmetric_family(alpha, d)?.matrix,
    };
    let value = serde_json::from_str(&matrix_to_json(&matrix)).expect("matrix JSON is valid");
    Ok(Output::Json(value))
}

pub fn write_trajectory_to(traj: &Trajectory, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => write_trajectory(File::create(path)?, traj)?,
        None => write_trajectory(std::io::stdout().lock(), traj)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_start_matches_first_state_frequency() {
        let dir = std::env::temp_dir().join(format!("mixgap-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("nr.csv");
        std::fs::write(&path, "0.6,0.3,0.1\n0.1,0.6,0.3\n0.4,0.1,0.5\n").unwrap();
        let pi = stationary_distribution(&read_matrix(&path).unwrap()).unwrap();

        let seeds = 10_000;
        let mut hits = [0usize; 3];
        for seed in 0..seeds {
            let args = SimulateArgs { matrix: Some(path.clone()), m: Some(1), seed: Some(seed), mu: None };
            let Ok(Output::Trajectory(t)) = simulate_cmd(&args) else { panic!("simulation failed") };
            hits[t.states()[0]] += 1;
        }
        std::fs::remove_dir_all(&dir).unwrap();
        for (h, p) in hits.iter().zip(pi.probs()) {
            let freq = *h as f64 / seeds as f64;
            // Five binomial standard deviations.
            assert!((freq - p).abs() < 5.0 * (p * (1.0 - p) / seeds as f64).sqrt(), "{freq} vs {p}");
        }
    }

    #[test]
    fn skip_rule_validation() {
        assert!(matches!(SkipRule::from_flags(Some(2), None), Ok(SkipRule::Fixed(2))));
        assert!(SkipRule::from_flags(None, None).is_err());
        assert!(SkipRule::from_flags(Some(0), None).is_err());
        assert!(SkipRule::from_flags(None, Some(1.5)).is_err());
    }
}
