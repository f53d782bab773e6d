"""Experiment drivers. Each takes a validated config and an output directory,
writes schema-tagged CSVs, and returns (artifacts, summary).

``artifacts`` is a list of (relative path, seed or None); ``summary`` is an
ordered dict of key/value results written to ``summary.txt``.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .. import brain, mcmc, metrics
from .. import rng as rngmod
from ..hamiltonians import (
    Chain1D,
    CurieWeiss,
    DenseCoupling,
    DoubleWell,
    NearestNeighbor2D,
    enumerate_boltzmann,
)
from ..oracle import NoisyOracle
from ..records import SCHEMA_LINE, table_csv, write_atomic
from ..variational import BernoulliField, GaussianMixture1D
from .config import ExperimentConfig

DEFAULT_HAMILTONIAN = {"model": "curie_weiss", "n": 1024, "J": 1.0}


def build_hamiltonian(spec: dict):
    spec = {**DEFAULT_HAMILTONIAN, **spec} if "model" not in spec else dict(spec)
    model = spec["model"]
    J = spec.get("J", 1.0)
    if model == "curie_weiss":
        n = spec["n"] if "n" in spec else spec["L"] ** 2
        return CurieWeiss(n, J, square="L" in spec)
    if model == "dense_curie_weiss":
        return DenseCoupling.curie_weiss(spec["n"], J)
    if model == "nearest_neighbor_2d":
        return NearestNeighbor2D(spec.get("L", 32), J, spec.get("boundary", "periodic"))
    if model == "chain_1d":
        return Chain1D(spec.get("n", 6), J, spec.get("boundary", "open"))
    if model == "double_well":
        return DoubleWell(spec.get("A", 1.0), spec.get("B", 0.2), spec.get("x0", 1.0))
    raise ValueError(f"unknown model {model!r}")


def brain_config(cfg: ExperimentConfig, beta: float, seed: int, **over) -> brain.BrainConfig:
    keys = ("batch_size", "learning_rate", "lr_halflife", "max_iterations", "window", "tolerance", "init",
            "parameterization", "clip")
    kw = {k: cfg.brain[k] for k in keys if k in cfg.brain}
    kw.update(over)
    return brain.BrainConfig(beta=beta, seed=seed, **kw)


def mcmc_config(cfg: ExperimentConfig, beta: float, seed: int, **over) -> mcmc.McmcConfig:
    keys = ("steps", "burn_in", "thinning", "cache_current_energy", "record_every")
    kw = {k: cfg.mcmc[k] for k in keys if k in cfg.mcmc}
    kw.update(over)
    return mcmc.McmcConfig(beta=beta, seed=seed, **kw)


def _map(fn, jobs, workers: int):
    """Ordered map over picklable jobs, optionally in a process pool."""
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _fmt(x) -> str:
    return repr(float(x))


# ---------------------------------------------------------------- double well

def _double_well_job(job):
    cfg, sigma, beta, seed = job
    h = build_hamiltonian(cfg.hamiltonian)
    p = cfg.params
    means = p.get("gmm_init_means", [-0.5, 0.5])
    stds = p.get("gmm_init_stds", [1.0, 1.0])
    q0 = GaussianMixture1D(np.zeros(2), means, stds)
    oracle = NoisyOracle(h, sigma, seed)
    q, rec = brain.train_gmm(q0, oracle, brain_config(cfg, beta, seed))
    samples = p.get("samples", 100_000)
    xb = q.sample(samples, rngmod.stream(seed, rngmod.EVAL))
    m = cfg.mcmc
    xm = mcmc.continuous_metropolis(NoisyOracle(h, sigma, seed + 7919), beta, m.get("steps", 200_000),
                                    m.get("step_size", 0.5), 0.0, m.get("burn_in", 1000), m.get("thinning", 1),
                                    seed, m.get("cache_current_energy", True))
    xs, dens = h.density_grid(beta)
    bins = p.get("bins", 60)
    edges = np.linspace(xs[0], xs[-1], bins + 1)
    # exact mass per bin from the normalised grid density
    cdf = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) / 2 * np.diff(xs))])
    exact = np.diff(np.interp(edges, xs, cdf))
    hb = np.histogram(xb, edges)[0] / len(xb)
    hm = np.histogram(xm, edges)[0] / max(1, len(xm))
    centers = (edges[1:] + edges[:-1]) / 2
    width = edges[1] - edges[0]
    rows = [(c, e / width, b / width, mm / width) for c, e, b, mm in zip(centers, exact, hb, hm)]
    tv_b = 0.5 * np.abs(hb - exact).sum()
    tv_m = 0.5 * np.abs(hm - exact).sum()
    return sigma, beta, seed, rows, tv_b, tv_m, rec, q.params


def run_double_well(cfg, out: Path, workers: int):
    jobs = [(cfg, s, b, seed) for s in cfg.sigmas for b in cfg.betas for seed in cfg.seeds]
    arts, summary = [], {}
    for sigma, beta, seed, rows, tv_b, tv_m, rec, params in _map(_double_well_job, jobs, workers):
        tag = f"s{sigma:g}_b{beta:g}_seed{seed}"
        name = f"double_well_{tag}.csv"
        table_csv(("x", "exact_density", "brain_density", "mcmc_density"), rows, out / name)
        rec.to_csv(out / f"brain_trace_{tag}.csv")
        arts += [(name, seed), (f"brain_trace_{tag}.csv", seed)]
        summary[f"tv_brain[{tag}]"] = tv_b
        summary[f"tv_mcmc[{tag}]"] = tv_m
        summary[f"gmm_params[{tag}]"] = " ".join(_fmt(v) for v in params)
    return arts, summary


# ------------------------------------------------------------------- six spin

def symmetrized_sample(q: BernoulliField, count: int, rng) -> np.ndarray:
    """Draw from (q(x) + q(-x)) / 2: sample q, then flip each row with probability 1/2."""
    X = q.sample(count, rng)
    flip = rng.random(count) < 0.5
    X[flip] *= -1
    return X


def _six_spin_job(job):
    cfg, sigma, beta, seed = job
    h = build_hamiltonian({"model": "chain_1d", "n": 6, **cfg.hamiltonian})
    dist = enumerate_boltzmann(h, beta)
    sym = cfg.brain.get("symmetrize", False)
    q, rec = brain.train(None, NoisyOracle(h, sigma, seed), brain_config(cfg, beta, seed))
    count = cfg.params.get("samples", 100_000)
    r = rngmod.stream(seed, rngmod.EVAL)
    Xb = symmetrized_sample(q, count, r) if sym else q.sample(count, r)
    fb = dist.histogram(Xb)
    steps = cfg.mcmc.get("steps", 1_000_000)
    thin = cfg.mcmc.get("thinning", 1)
    Xm, _ = mcmc.metropolis_chain(NoisyOracle(h, sigma, seed + 7919),
                                  mcmc_config(cfg, beta, seed, steps=steps * thin, thinning=thin))
    fm = dist.histogram(Xm)
    rows = []
    for i, s in enumerate(dist.states):
        label = "".join("+" if v > 0 else "-" for v in s)
        rows.append((i, label, dist.probabilities[i], fb[i], fm[i]))
    return sigma, beta, seed, rows, dist.total_variation(fb), dist.total_variation(fm), rec


def run_six_spin(cfg, out: Path, workers: int):
    jobs = [(cfg, s, b, seed) for s in cfg.sigmas for b in cfg.betas for seed in cfg.seeds]
    arts, summary = [], {}
    for sigma, beta, seed, rows, tv_b, tv_m, rec in _map(_six_spin_job, jobs, workers):
        tag = f"s{sigma:g}_b{beta:g}_seed{seed}"
        name = f"six_spin_{tag}.csv"
        table_csv(("index", "state", "exact", "brain", "mcmc"), rows, out / name)
        rec.to_csv(out / f"brain_trace_{tag}.csv")
        arts += [(name, seed), (f"brain_trace_{tag}.csv", seed)]
        summary[f"tv_brain[{tag}]"] = tv_b
        summary[f"tv_mcmc[{tag}]"] = tv_m
    return arts, summary


# --------------------------------------------------------------------- sweeps

def _sweep_job(job):
    cfg, sigma, seed = job
    h = build_hamiltonian(cfg.hamiltonian)
    b = cfg.brain
    base = brain_config(cfg, 1.0, seed)
    return brain.temperature_sweep(h, [sigma], cfg.temperatures, base, seeds=(seed,),
                                   warm_start=b.get("warm_start", False), eval_samples=b.get("eval_samples", 1000))


def run_sweep(cfg, out: Path, workers: int):
    jobs = [(cfg, s, seed) for s in cfg.sigmas for seed in cfg.seeds]
    points = [p for chunk in _map(_sweep_job, jobs, workers) for p in chunk]
    points.sort(key=lambda p: (p.sigma, p.temperature, p.seed))
    table_csv(("temperature", "sigma", "seed", "abs_mag", "cum_evals"),
              [(p.temperature, p.sigma, p.seed, p.abs_mag, p.evals) for p in points], out / "sweep_points.csv")
    table = metrics.SweepTable.from_points(points)
    table.to_csv(out / "sweep.csv")
    summary = {f"tc[sigma={s:g}]": table.tc(s) for s in table.sigmas()}
    return [("sweep_points.csv", None), ("sweep.csv", None)], summary


# ------------------------------------------------------------ convergence race

def _race_job(job):
    cfg, sigma, seed = job
    h = build_hamiltonian(cfg.hamiltonian)
    T = cfg.temperatures[0] if cfg.temperatures else 0.33
    beta = 1.0 / T
    oracle_b = NoisyOracle(h, sigma, seed)
    q, rec_b = brain.train(None, oracle_b, brain_config(cfg, beta, seed))
    mag_b = brain.sampled_abs_magnetization(q, cfg.brain.get("eval_samples", 1000), seed)
    oracle_m = NoisyOracle(h, sigma, seed + 7919, cfg.mcmc.get("averaging_k", 1))
    _, rec_m = mcmc.metropolis_chain(oracle_m, mcmc_config(cfg, beta, seed, keep_samples=False))
    tail = cfg.params.get("tail_fraction", 0.2)
    target = cfg.params.get("target", metrics.converged_abs_mag(rec_m, tail))
    tts_m = metrics.time_to_solution(rec_m, target)
    tts_b = metrics.time_to_solution(rec_b, target)
    return sigma, seed, rec_b, rec_m, mag_b, rec_m.batch_abs_mag[-1], target, tts_b, tts_m, oracle_m.eval_count


def run_convergence_race(cfg, out: Path, workers: int):
    jobs = [(cfg, s, seed) for s in cfg.sigmas for seed in cfg.seeds]
    arts, rows, summary = [], [], {}
    for sigma, seed, rec_b, rec_m, mag_b, mag_m, target, tts_b, tts_m, ev_m in _map(_race_job, jobs, workers):
        tag = f"s{sigma:g}_seed{seed}"
        rec_b.to_csv(out / f"brain_{tag}.csv")
        rec_m.to_csv(out / f"mcmc_{tag}.csv")
        arts += [(f"brain_{tag}.csv", seed), (f"mcmc_{tag}.csv", seed)]
        ratio = tts_m / tts_b if tts_b and tts_m else float("nan")
        rows.append((sigma, seed, mag_b, mag_m, ev_m, target, tts_b if tts_b is not None else "",
                     tts_m if tts_m is not None else "", ratio))
    table_csv(("sigma", "seed", "brain_abs_mag", "mcmc_abs_mag", "mcmc_evals", "target", "brain_tts", "mcmc_tts",
               "ratio"), rows, out / "race.csv")
    arts.append(("race.csv", None))
    for sigma in cfg.sigmas:
        sel = [r for r in rows if r[0] == sigma]
        summary[f"brain_fidelity_mean[sigma={sigma:g}]"] = float(np.mean([r[2] for r in sel]))
        summary[f"mcmc_fidelity_mean[sigma={sigma:g}]"] = float(np.mean([r[3] for r in sel]))
        summary[f"tts_ratio_median[sigma={sigma:g}]"] = float(np.nanmedian([r[8] for r in sel]))
    return arts, summary


# -------------------------------------------------------------- noise ablation

def _ablation_job(job):
    cfg, sigma, solver, k, seed = job
    h = build_hamiltonian(cfg.hamiltonian)
    T = cfg.temperatures[0] if cfg.temperatures else 0.33
    if solver == "brain":
        o = NoisyOracle(h, sigma, seed)
        q, _ = brain.train(None, o, brain_config(cfg, 1.0 / T, seed))
        return sigma, solver, k, seed, brain.sampled_abs_magnetization(q, cfg.brain.get("eval_samples", 1000), seed), \
            o.eval_count
    o = NoisyOracle(h, sigma, seed + 7919, k)
    _, rec = mcmc.averaged_metropolis(o, mcmc_config(cfg, 1.0 / T, seed, keep_samples=False))
    return sigma, solver, k, seed, rec.batch_abs_mag[-1], o.eval_count


def run_noise_ablation(cfg, out: Path, workers: int):
    ks = cfg.params.get("averaging", [1])
    jobs = [(cfg, s, "brain", 1, seed) for s in cfg.sigmas for seed in cfg.seeds]
    jobs += [(cfg, s, "mcmc", k, seed) for s in cfg.sigmas for k in ks for seed in cfg.seeds]
    rows = _map(_ablation_job, jobs, workers)
    table_csv(("sigma", "solver", "averaging_k", "seed", "abs_mag", "cum_evals"), rows, out / "ablation.csv")
    summary = {}
    for s in cfg.sigmas:
        for solver, k in [("brain", 1)] + [("mcmc", k) for k in ks]:
            v = [r[4] for r in rows if r[0] == s and r[1] == solver and r[2] == k]
            summary[f"{solver}_k{k}_abs_mag[sigma={s:g}]"] = float(np.mean(v))
    return [("ablation.csv", None)], summary


# --------------------------------------------------------- sample size ablation

def _sample_size_job(job):
    cfg, S, sigma, seed = job
    h = build_hamiltonian(cfg.hamiltonian)
    T = cfg.temperatures[0] if cfg.temperatures else 0.33
    o = NoisyOracle(h, sigma, seed)
    q, _ = brain.train(None, o, brain_config(cfg, 1.0 / T, seed, batch_size=S))
    return S, sigma, seed, brain.sampled_abs_magnetization(q, cfg.brain.get("eval_samples", 1000), seed), o.eval_count


def run_sample_size_ablation(cfg, out: Path, workers: int):
    sizes = cfg.params.get("batch_sizes", [100, 300, 1000, 3000])
    jobs = [(cfg, S, s, seed) for s in cfg.sigmas for S in sizes for seed in cfg.seeds]
    rows = _map(_sample_size_job, jobs, workers)
    table_csv(("batch_size", "sigma", "seed", "abs_mag", "cum_evals"), rows, out / "sample_size.csv")
    summary = {}
    for s in cfg.sigmas:
        for S in sizes:
            summary[f"abs_mag_mean[S={S},sigma={s:g}]"] = float(np.mean(
                [r[3] for r in rows if r[0] == S and r[1] == s]))
    return [("sample_size.csv", None)], summary


# --------------------------------------------------------------------- scaling

def _scaling_job(job):
    cfg, n, sigma, seed = job
    h = build_hamiltonian({**cfg.hamiltonian, "n": n})
    T = cfg.temperatures[0] if cfg.temperatures else 0.33
    ratio = cfg.params.get("batch_per_spin", 0.1)
    target = cfg.params.get("target", 0.95)
    S = max(2, int(round(n * ratio)))
    o = NoisyOracle(h, sigma, seed)
    _, rec = brain.train(None, o, brain_config(cfg, 1.0 / T, seed, batch_size=S),
                         until=lambda r: metrics.time_to_solution(r, target) is not None)
    tts = metrics.time_to_solution(rec, target)
    # a run that never reaches the target is censored at the budget it spent
    return n, sigma, seed, S, tts if tts is not None else o.eval_count, tts is not None


def scaling_fits(rows, sizes, sigmas):
    """Per-sigma power-law fit of mean evals vs N. Censored sizes make the
    fitted exponent a lower bound, flagged in the last field."""
    fits = []
    for s in sigmas:
        ns, ev, censored = [], [], False
        for n in sizes:
            sel = [r for r in rows if r[0] == n and r[1] == s]
            if sel:
                ns.append(n)
                ev.append(float(np.mean([r[4] for r in sel])))
                censored |= not all(r[5] for r in sel)
        if len(ns) >= 2:
            c, p = metrics.fit_power(ns, ev)
            fits.append((s, c, p, len(ns), int(censored)))
    return fits


def run_scaling(cfg, out: Path, workers: int):
    sizes = cfg.params.get("sizes", [1024, 4096, 16384])
    jobs = [(cfg, n, s, seed) for s in cfg.sigmas for n in sizes for seed in cfg.seeds]
    rows = _map(_scaling_job, jobs, workers)
    table_csv(("n_spins", "sigma", "seed", "batch_size", "evals_to_target", "reached"),
              [r[:5] + (int(r[5]),) for r in rows], out / "scaling.csv")
    fits = scaling_fits(rows, sizes, cfg.sigmas)
    table_csv(("sigma", "prefactor", "exponent", "n_sizes", "lower_bound"), fits, out / "scaling_fit.csv")
    summary = {}
    for s, c, p, _, lb in fits:
        summary[f"prefactor[sigma={s:g}]"] = c
        summary[f"exponent{'_lower_bound' if lb else ''}[sigma={s:g}]"] = p
    return [("scaling.csv", None), ("scaling_fit.csv", None)], summary


# ------------------------------------------------------------------------ ESS

def _ess_job(job):
    cfg, sigma, beta, seed = job
    h = build_hamiltonian(cfg.hamiltonian)
    p = cfg.params
    n_samples = p.get("samples", 10_000)
    o = NoisyOracle(h, sigma, seed)
    q, _ = brain.train(None, o, brain_config(cfg, beta, seed))
    X = q.sample(n_samples, rngmod.stream(seed, rngmod.EVAL))
    if p.get("noisy_ess", False):
        E = NoisyOracle(h, sigma, seed + 104729).measure_batch(X)
    else:
        E = h.energies(X)
    ess_b = metrics.ess(q.log_prob(X), E, beta)
    # Metropolis with the same number of oracle evaluations as BRAIN used to
    # train and draw, scored by the autocorrelation ESS of its energy trace.
    budget = o.eval_count + n_samples if p.get("mcmc_matched_budget", True) else cfg.mcmc.get("steps", 10 ** 6)
    om = NoisyOracle(h, sigma, seed + 7919)
    steps = max(2, budget - 1)
    Xm, _ = mcmc.metropolis_chain(om, mcmc_config(cfg, beta, seed, steps=steps, burn_in=0,
                                                  thinning=max(1, steps // n_samples)))
    ess_m = metrics.chain_ess(h.energies(Xm)) / max(1, steps // n_samples)
    return sigma, beta, seed, ess_b, ess_m, o.eval_count, steps


def run_ess_compare(cfg, out: Path, workers: int):
    jobs = [(cfg, s, b, seed) for s in cfg.sigmas for b in cfg.betas for seed in cfg.seeds]
    rows = _map(_ess_job, jobs, workers)
    table_csv(("sigma", "beta", "seed", "ess_brain", "ess_mcmc", "brain_evals", "mcmc_steps"), rows, out / "ess.csv")
    summary = {}
    for s in cfg.sigmas:
        for b in cfg.betas:
            sel = [r for r in rows if r[0] == s and r[1] == b]
            eb = float(np.mean([r[3] for r in sel]))
            em = float(np.mean([r[4] for r in sel]))
            summary[f"ess_brain[sigma={s:g},beta={b:g}]"] = eb
            summary[f"ess_mcmc[sigma={s:g},beta={b:g}]"] = em
            summary[f"ess_ratio[sigma={s:g},beta={b:g}]"] = eb / em
    return [("ess.csv", None)], summary


# --------------------------------------------------------- parallel tempering

def pt_config(cfg: ExperimentConfig, seed: int) -> mcmc.PtConfig:
    keys = ("replicas", "t_min", "t_max", "swap_interval", "steps", "cache_current_energy")
    return mcmc.PtConfig(seed=seed, **{k: cfg.pt[k] for k in keys if k in cfg.pt})


class _ReplicaOracles:
    def __init__(self, h, sigma, seed):
        self.h, self.sigma, self.seed = h, sigma, seed

    def __call__(self, r):
        return NoisyOracle(self.h, self.sigma, self.seed * 1000 + r)


def _pt_job(job):
    cfg, sigma, seed = job
    h = build_hamiltonian(cfg.hamiltonian)
    res = mcmc.parallel_tempering(_ReplicaOracles(h, sigma, seed), pt_config(cfg, seed))
    return sigma, seed, res


def run_pt_compare(cfg, out: Path, workers: int):
    jobs = [(cfg, s, seed) for s in cfg.sigmas for seed in cfg.seeds]
    arts, summary = [], {}
    for sigma, seed, res in _map(_pt_job, jobs, workers):
        tag = f"s{sigma:g}_seed{seed}"
        acc = np.append(res.swap_acceptance, np.nan)
        table_csv(("slot", "temperature", "final_abs_mag", "tail_abs_mag", "swap_acceptance_up"),
                  [(i, t, m, tm, a) for i, (t, m, tm, a) in
                   enumerate(zip(res.temperatures, res.final_abs_mag, res.tail_abs_mag, acc))],
                  out / f"pt_{tag}.csv")
        table_csv(("replica_i", "replica_j", "accepted", "step"), res.swap_rows(), out / f"pt_swaps_{tag}.csv")
        arts += [(f"pt_{tag}.csv", seed), (f"pt_swaps_{tag}.csv", seed)]
        summary[f"coldest_abs_mag[{tag}]"] = float(res.final_abs_mag[0])
        summary[f"max_abs_mag[{tag}]"] = float(res.final_abs_mag.max())
    return arts, summary


# ---------------------------------------------------------- variance check

def variance_check(h, sigma: float, beta: float, batch: int, coordinate: int, realizations: int, seed: int,
                   blocks: int = 100):
    """Closed-form noise-variance gap against a Monte Carlo estimate.

    Returns (predicted, estimated, standard_error). The standard error comes
    from splitting the realizations into ``blocks`` independent groups.
    """
    q = BernoulliField.uniform(h.n_spins)
    X = q.sample(batch, rngmod.stream(seed, rngmod.SAMPLER))
    a = q.score(X)[:, coordinate]
    E = h.energies(X)
    pred = brain.noise_variance_delta(a, E, sigma, beta)
    plain, based = brain.noise_only_gradients(a, E, sigma, beta, realizations, rngmod.stream(seed, rngmod.ORACLE))
    per = realizations // blocks
    d = np.array([plain[i * per:(i + 1) * per].var(ddof=1) - based[i * per:(i + 1) * per].var(ddof=1)
                  for i in range(blocks)])
    est = plain.var(ddof=1) - based.var(ddof=1)
    return pred, float(est), float(d.std(ddof=1) / np.sqrt(blocks))


def _variance_job(job):
    cfg, sigma, beta, seed = job
    h = build_hamiltonian({"model": "curie_weiss", "n": 8, **cfg.hamiltonian})
    p = cfg.params
    pred, est, se = variance_check(h, sigma, beta, p.get("batch", 8), p.get("coordinate", 0),
                                   p.get("realizations", 1_000_000), seed)
    return sigma, beta, seed, pred, est, se


def run_variance_check(cfg, out: Path, workers: int):
    betas = cfg.betas or [1.0]
    jobs = [(cfg, s, b, seed) for s in cfg.sigmas for b in betas for seed in cfg.seeds]
    rows = _map(_variance_job, jobs, workers)
    table_csv(("sigma", "beta", "seed", "predicted", "monte_carlo", "standard_error"), rows, out / "variance.csv")
    summary = {}
    for s, b, seed, pred, est, se in rows:
        z = 0.0 if se == 0 else (est - pred) / se
        summary[f"z_score[sigma={s:g},beta={b:g},seed={seed}]"] = z
    return [("variance.csv", None)], summary


RUNNERS = {
    "double_well": run_double_well,
    "six_spin": run_six_spin,
    "cw_sweep": run_sweep,
    "nn2d_sweep": run_sweep,
    "convergence_race": run_convergence_race,
    "noise_ablation": run_noise_ablation,
    "sample_size_ablation": run_sample_size_ablation,
    "scaling": run_scaling,
    "ess_compare": run_ess_compare,
    "pt_compare": run_pt_compare,
    "variance_check": run_variance_check,
}


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_experiment(cfg: ExperimentConfig, out, workers: int = 1) -> dict:
    """Run one experiment, write its CSVs, summary.txt and manifest.csv into ``out``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    artifacts, summary = RUNNERS[cfg.experiment](cfg, out, workers)
    chash = cfg.hash()
    lines = [SCHEMA_LINE, f"experiment: {cfg.experiment}", f"config_hash: {chash}",
             f"seeds: {' '.join(str(s) for s in cfg.seeds)}"]
    for k, v in summary.items():
        lines.append(f"{k}: {_fmt(v) if isinstance(v, (float, np.floating)) else v}")
    write_atomic(out / "summary.txt", "\n".join(lines) + "\n")
    artifacts = artifacts + [("summary.txt", None)]
    rows = [(name, _sha256(out / name), chash, "all" if seed is None else seed) for name, seed in artifacts]
    table_csv(("file", "sha256", "config_hash", "seed"), rows, out / "manifest.csv")
    return summary
