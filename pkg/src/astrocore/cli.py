"""Command line experiment runner.

``astrocore <subcommand>`` reproduces one study at desk scale from a JSON
config, writing deterministic CSV tables, an SVG figure, and a line in
``summary.txt`` to the output directory. With ``--check`` the subcommand
also verifies its acceptance bounds and exits nonzero when one fails.

All results are computed before anything is written, so a bad config or
parameter set produces a diagnostic and no partial outputs. Monte-Carlo
loops may fan out over ``--jobs`` worker threads; outputs are aggregated
in seed order, so parallelism never changes a single byte.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import report
from .astro import AstroParams, ReadoutParams, self_repair_run, steady_state, step
from .config import ConfigError, load_config
from .costmodel import (
    AreaModel,
    AreaWeights,
    PowerModel,
    area_report,
    power_report,
    power_savings_disable,
)
from .fixedpoint import (
    FixedAstroParams,
    build_pwl,
    encode,
    encode_state,
    fixed_astro_step,
)
from .netmap import CoreSpec, cluster_count_estimate, partition
from .presets import BENCHMARKS, REFERENCE_CLUSTERS
from .reliability import (
    BtiParams,
    DisturbParams,
    EnduranceParams,
    FailureRates,
    failure_rate,
    mttf_bti,
    mttf_disturb,
    mttf_endurance,
    overall_mttf,
    p_failures,
    self_heating_temp,
    sofr,
)
from .snn import (
    AstroAllocation,
    AstroGroup,
    EvalHarness,
    FaultSpec,
    build_toy_model,
    inject_faults,
)
from .synthesis import EvaluationEngine, SynthesisConfig, insert_astrocytes

__all__ = ["main"]


@dataclass(frozen=True)
class Check:
    """One acceptance predicate evaluated by a subcommand."""

    name: str
    passed: bool
    detail: str


@dataclass
class CommandOutput:
    """Everything a subcommand produces, computed before any file is written."""

    summary: str
    csvs: list[tuple[str, Sequence[str], list]]
    figures: list[tuple[str, object]]
    checks: list[Check]


def _seed_map(fn: Callable, items, jobs: int) -> list:
    items = list(items)
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _update_summary(out_dir: Path, name: str, line: str) -> None:
    """Keep one line per subcommand, sorted, so reruns are idempotent."""
    path = out_dir / "summary.txt"
    entries: dict[str, str] = {}
    if path.exists():
        for raw in path.read_text().splitlines():
            key, sep, rest = raw.partition(": ")
            if sep:
                entries[key] = rest
    entries[name] = line
    path.write_text("".join(f"{k}: {entries[k]}\n" for k in sorted(entries)))


def _core_spec(name: str) -> CoreSpec:
    if name == "ubrain":
        return CoreSpec.ubrain()
    if name == "crossbar":
        return CoreSpec.crossbar()
    raise ConfigError(f"core: unknown core kind {name!r}")


def _pct(x: float, base: float) -> str:
    return f"{x / base:.1%}" if base > 0 else "n/a"


# ---------------------------------------------------------------------------
# Subcommands


def cmd_selfrepair(cfg: dict, seed: int, jobs: int) -> CommandOutput:
    sc = cfg["selfrepair"]
    astro = AstroParams(**sc["astro"])
    readout = ReadoutParams(**sc["readout"])
    kw = dict(
        n_sources=sc["n_sources"],
        source_rate_hz=sc["source_rate_hz"],
        duration_s=sc["duration_s"],
        fault_time_s=sc["fault_time_s"],
        sample_every=sc["sample_every"],
    )

    def one(s: int):
        return (self_repair_run(astro, readout, repair=True, seed=s, **kw),
                self_repair_run(astro, readout, repair=False, seed=s, **kw))

    seeds = range(seed, seed + sc["n_seeds"])
    pairs = _seed_map(one, seeds, jobs)
    t_fault, t_end = sc["fault_time_s"], sc["duration_s"]
    rate_rows = [
        (s,
         rep.mean_out_rate(0.0, t_fault),
         fro.mean_out_rate(t_fault, t_end),
         rep.mean_out_rate(t_fault, t_end))
        for s, (rep, fro) in zip(seeds, pairs)
    ]
    base = float(np.mean([r[1] for r in rate_rows]))
    unrep = float(np.mean([r[2] for r in rate_rows]))
    rest = float(np.mean([r[3] for r in rate_rows]))

    rep0, fro0 = pairs[0]
    trace_rows = list(zip(rep0.time_s, rep0.ag, rep0.ca, rep0.glu, rep0.esp,
                          rep0.dse, rep0.pr, rep0.in_rate_hz,
                          rep0.out_rate_hz, fro0.out_rate_hz))
    checks = [
        Check("post-fault collapse without repair", unrep < 0.05 * base,
              f"unrepaired {unrep:.4f} Hz vs bound {0.05 * base:.4f} Hz"),
        Check("astrocyte restores the output",
              rest > unrep and rest >= 0.40 * base,
              f"restored {rest:.4f} Hz vs unrepaired {unrep:.4f} Hz, "
              f"floor {0.40 * base:.4f} Hz"),
    ]
    summary = (f"baseline {base:.3f} Hz; post-fault unrepaired "
               f"{_pct(unrep, base)}, with astrocyte {_pct(rest, base)} "
               f"of baseline ({len(rate_rows)} seeds)")
    return CommandOutput(
        summary,
        [("selfrepair_rates.csv",
          ("seed", "baseline_hz", "unrepaired_hz", "repaired_hz"), rate_rows),
         ("selfrepair_trace.csv",
          ("time_s", "ag", "ca", "glu", "esp", "dse", "pr", "in_rate_hz",
           "out_rate_hz", "out_rate_frozen_hz"), trace_rows)],
        [("selfrepair.svg", report.selfrepair_figure(rep0, fro0, t_fault))],
        checks,
    )


def cmd_clusters(cfg: dict, seed: int, jobs: int) -> CommandOutput:
    del cfg, seed, jobs  # a fixed reference table; nothing to configure
    cores = {"ubrain": CoreSpec.ubrain(), "crossbar": CoreSpec.crossbar()}
    expected = {r.model: {"ubrain": r.ubrain, "crossbar": r.crossbar}
                for r in REFERENCE_CLUSTERS}
    rows = []
    matches = 0
    for bench in BENCHMARKS:
        for kind, core in cores.items():
            clusters = cluster_count_estimate(bench.params, core)
            want = expected[bench.name][kind]
            rows.append((bench.name, bench.params, kind, clusters, want,
                         clusters == want))
            matches += clusters == want
    ub, xb = cores["ubrain"], cores["crossbar"]
    checks = [
        Check("reference cluster counts", matches == len(rows),
              f"{matches}/{len(rows)} table entries match"),
        Check("capacity identities",
              ub.synapse_capacity == 256 * 64 + 64 * 16 == 17_408
              and xb.synapse_capacity == 128 ** 2 == 16_384
              and ub.neuron_capacity == 256 + 64 + 16 == 336
              and (ub.max_astrocytes, xb.max_astrocytes) == (6, 4),
              "synapses 17408/16384, neurons 336, astrocytes 6/4"),
    ]
    summary = (f"{matches}/{len(rows)} reference core counts reproduced "
               f"(capacities {ub.synapse_capacity}/{xb.synapse_capacity})")
    return CommandOutput(
        summary,
        [("clusters.csv",
          ("model", "params", "core", "clusters", "expected", "match"), rows)],
        [("clusters.svg", report.clusters_figure(rows))],
        checks,
    )


def _toy_setup(section: dict):
    toy = section["toy"]
    model, dataset = build_toy_model(
        tuple(int(x) for x in toy["layer_sizes"]),
        toy["n_classes"],
        seed=toy["seed"],
        hidden_drive=toy["hidden_drive"],
        blob_spread=toy["blob_spread"],
        feature_hi=toy["feature_hi"],
        feature_lo=toy["feature_lo"],
    )
    h = section["harness"]
    harness = EvalHarness(dataset, duration_s=h["duration_s"],
                          samples=h["samples"], n_seeds=h["n_seeds"])
    engine = EvaluationEngine(model, harness,
                              time_scale=section["time_scale"])
    core = _core_spec(section["core"])
    mapping = partition(model, core)
    syn = section["synthesis"]
    config = SynthesisConfig(n_r=syn["n_r"], a_th=syn["a_th"],
                             max_astro_per_layer=syn["max_astro_per_layer"],
                             seed=syn["seed"])
    return model, harness, engine, core, mapping, config


def cmd_synthesize(cfg: dict, seed: int, jobs: int) -> CommandOutput:
    del seed, jobs  # the insertion protocol carries its own seeds
    _, _, engine, core, mapping, config = _toy_setup(cfg["synthesize"])
    enabled = insert_astrocytes(mapping, config, engine, core)

    log_rows = [(r.cluster, r.layer, r.iteration, r.a_min, r.astro_count)
                for r in enabled.log]
    alloc = enabled.allocation
    alloc_rows = [(g.layer, i, ";".join(map(str, g.members)))
                  for i, g in enumerate(alloc.groups)]

    first: dict[tuple[int, int], float] = {}
    last: dict[tuple[int, int], float] = {}
    count: dict[tuple[int, int], int] = {}
    for r in enabled.log:
        key = (r.cluster, r.layer)
        first.setdefault(key, r.a_min)
        last[key] = r.a_min
        count[key] = count.get(key, 0) + 1
    weakest = min(first, key=lambda k: first[k])

    balanced = True
    for cluster_alloc in enabled.cluster_allocations:
        layers = {g.layer for g in cluster_alloc.groups}
        for layer in layers:
            sizes = [len(g.members) for g in cluster_alloc.layer_groups(layer)]
            balanced &= max(sizes) - min(sizes) <= 1
    checks = [
        Check("terminates within the budget",
              all(c <= config.max_astro_per_layer + 1 for c in count.values()),
              f"max {max(count.values())} evaluations per band, "
              f"budget {config.max_astro_per_layer}"),
        Check("balanced groups", balanced, "group sizes differ by at most 1"),
        Check("worst-case accuracy never regresses",
              all(last[k] >= first[k] for k in first),
              f"weakest band {first[weakest]:.4f} -> {last[weakest]:.4f}"),
    ]
    summary = (f"inserted {alloc.n_astrocytes} astrocytes "
               f"(a_th {enabled.a_th:.4f}); worst single-fault accuracy "
               f"{first[weakest]:.4f} -> {last[weakest]:.4f}")
    return CommandOutput(
        summary,
        [("synthesize_log.csv",
          ("cluster", "layer", "iteration", "a_min", "astro_count"), log_rows),
         ("synthesize_allocation.csv", ("layer", "group", "members"),
          alloc_rows)],
        [("synthesize.svg", report.synthesize_figure(log_rows))],
        checks,
    )


def cmd_faults(cfg: dict, seed: int, jobs: int) -> CommandOutput:
    fc = cfg["faults"]
    model, _, engine, core, mapping, config = _toy_setup(fc)
    enabled = insert_astrocytes(mapping, config, engine, core)
    alloc = enabled.allocation
    empty = AstroAllocation()
    rates = [float(r) for r in fc["error_rates_pct"]]
    seeds = list(range(seed, seed + fc["n_seeds"]))

    def one(s: int):
        out = []
        for rate in rates:
            faulted = inject_faults(model, FaultSpec(rate / 100.0, seed=s))
            out.append((rate, "astro", s, engine.evaluate(faulted, alloc, s)))
            out.append((rate, "plain", s, engine.evaluate(faulted, empty, s)))
        return out

    rows = [row for chunk in _seed_map(one, seeds, jobs) for row in chunk]
    rows.sort(key=lambda r: (r[0], r[1], r[2]))

    means = {
        (rate, variant): float(np.mean(
            [r[3] for r in rows if r[0] == rate and r[1] == variant]))
        for rate in rates for variant in ("astro", "plain")
    }
    needed = (0.0, 10.0, 20.0, 50.0)
    if all(r in rates for r in needed):
        m0, m10, m20, m50 = (means[(r, "astro")] for r in needed)
        checks = [
            Check("no accuracy drop at 10% faults", abs(m10 - m0) <= 0.01,
                  f"10% mean {m10:.4f} vs baseline {m0:.4f}"),
            Check("degradation is monotone", m10 >= m20 >= m50,
                  f"means {m10:.4f} / {m20:.4f} / {m50:.4f} "
                  "at 10/20/50% faults"),
        ]
    else:
        checks = [Check("sweep covers 0/10/20/50%", False,
                        f"configured rates {rates}")]
    astro_means = " ".join(
        f"{rate:g}%={means[(rate, 'astro')]:.4f}" for rate in rates)
    summary = (f"mean accuracy {astro_means} over {len(seeds)} seeds; "
               f"{alloc.n_astrocytes} astrocytes inserted "
               f"(a_th {enabled.a_th:.4f})")
    return CommandOutput(
        summary,
        [("faults.csv", ("error_rate_pct", "variant", "seed", "accuracy"),
          rows)],
        [("faults.svg", report.faults_figure(rows))],
        checks,
    )


def cmd_reliability(cfg: dict, seed: int, jobs: int) -> CommandOutput:
    del seed, jobs  # closed-form report
    rc = cfg["reliability"]
    bti = BtiParams(**rc["bti"])
    end = EnduranceParams(**rc["endurance"])
    dis = DisturbParams(**rc["disturb"])
    m_aging = mttf_bti(bti)
    m_end = mttf_endurance(end)
    m_dis = mttf_disturb(dis)
    rates = FailureRates(failure_rate(m_aging), failure_rate(m_end),
                         failure_rate(m_dis))
    lam = sofr(rates)
    overall = overall_mttf(rates)
    interval = rc["interval_hours"]

    mech_rows = [("aging", m_aging), ("endurance", m_end),
                 ("disturb", m_dis), ("overall", overall)]
    disturb_rows = [(float(v), mttf_disturb(DisturbParams(voltage=float(v))))
                    for v in rc["voltage_sweep"]]
    heat_rows = [(float(t), self_heating_temp(replace(end, time_t=float(t))))
                 for t in rc["time_sweep_s"]]
    pmf_rows = [(n, p_failures(lam, interval, n))
                for n in range(rc["max_failures"] + 1)]

    p0 = p_failures(lam, interval, 0)
    pmf_mass = math.fsum(p_failures(min(lam * interval, 10.0), 1.0, n)
                         for n in range(300))
    m_dis0 = mttf_disturb(DisturbParams(voltage=0.0))
    t_amb0 = self_heating_temp(replace(end, time_t=0.0))
    checks = [
        Check("zero-failure probability is exp(-lambda T)",
              p0 == math.exp(-lam * interval), f"P0 {p0:.6g}"),
        Check("failure-count distribution sums to 1",
              abs(pmf_mass - 1.0) <= 1e-9, f"mass {pmf_mass:.12f}"),
        Check("disturb MTTF anchor at 0 V",
              abs(m_dis0 - 10 ** 6.7) <= 1e-3 * 10 ** 6.7,
              f"{m_dis0:.6g} h vs 10^6.7"),
        Check("combined MTTF below each mechanism",
              overall <= min(m_aging, m_end, m_dis) * (1 + 1e-12),
              f"overall {overall:.6g} h"),
        Check("no self-heating at t=0", t_amb0 == end.t_amb,
              f"T(0) = {t_amb0:g} K"),
    ]
    summary = (f"overall MTTF {overall:.4g} h (aging {m_aging:.4g}, "
               f"endurance {m_end:.4g}, disturb {m_dis:.4g})")
    return CommandOutput(
        summary,
        [("reliability_mttf.csv", ("mechanism", "mttf_hours"), mech_rows),
         ("reliability_disturb.csv", ("voltage_v", "mttf_hours"),
          disturb_rows),
         ("reliability_heating.csv", ("time_s", "temperature_k"), heat_rows),
         ("reliability_pmf.csv", ("failures", "probability"), pmf_rows)],
        [("reliability.svg", report.reliability_figure(
            disturb_rows, heat_rows, pmf_rows, mech_rows))],
        checks,
    )


def cmd_area(cfg: dict, seed: int, jobs: int) -> CommandOutput:
    del seed, jobs  # closed-form report
    ac = cfg["area"]
    model = AreaModel(AreaWeights(**ac["weights"]),
                      ac["replication_factor"], ac["redundant_factor"])
    rows = [(r.model, r.technique, r.core, r.clusters, r.area, r.normalized)
            for r in area_report(model)]
    by = {(r[0], r[1], r[2]): r for r in rows}

    rep_ok = all(
        abs(by[(b.name, "replication", "ubrain")][5]
            - by[(b.name, "replication", "ubrain")][3] / 30.0) <= 0.1
        for b in BENCHMARKS)
    ratios = [by[(b.name, "proposed", "ubrain")][4]
              / by[(b.name, "replication", "ubrain")][4] for b in BENCHMARKS]
    ratio_ok = all(abs(r - 0.50) <= 0.05 for r in ratios)
    order_ok = all(
        by[(b.name, "proposed", "crossbar")][4]
        < by[(b.name, "redundant", "crossbar")][4]
        < by[(b.name, "replication", "crossbar")][4] for b in BENCHMARKS)
    alexnet = by[("alexnet", "replication", "ubrain")][5]
    checks = [
        Check("replication area tracks cluster count", rep_ok,
              f"normalized = clusters/30 within 0.1 (alexnet {alexnet:.1f})"),
        Check("proposed halves the replication area", ratio_ok,
              f"ratio {min(ratios):.3f}..{max(ratios):.3f} vs 0.50 +/- 0.05"),
        Check("proposed < redundant < replication on crossbar", order_ok,
              "ordering holds for all models"),
    ]
    summary = (f"proposed/replication {ratios[0]:.3f} on the three-layer "
               f"core; crossbar ordering proposed < redundant < replication "
               f"{'holds' if order_ok else 'violated'}")
    return CommandOutput(
        summary,
        [("area.csv",
          ("model", "technique", "core", "clusters", "area", "normalized"),
          rows)],
        [("area.svg", report.area_figure(rows))],
        checks,
    )


def cmd_power(cfg: dict, seed: int, jobs: int) -> CommandOutput:
    del seed, jobs  # closed-form report
    pc = cfg["power"]
    power = PowerModel(alpha_w=pc["alpha_w"],
                       astro_share_w=pc["astro_share_w"])
    rows = [(r.model, r.technique, r.core, r.clusters, r.watts)
            for r in power_report(power, pc["activity"])]

    core = CoreSpec.ubrain()
    all_on = power.core_full_w(core.kind) + core.max_astrocytes * power.astro_share_w
    savings_rows = []
    for used in range(core.max_astrocytes + 1):
        alloc = AstroAllocation(tuple(AstroGroup(0, (i,))
                                      for i in range(used)))
        saved, frac = power_savings_disable(alloc, core, power)
        savings_rows.append((used, all_on - saved, saved, frac))

    fracs = [r[3] for r in savings_rows]
    checks = [
        Check("profiled core power reproduced at full activity",
              abs(power.core_full_w("ubrain") - 4.64) <= 1e-9
              and abs(power.core_full_w("crossbar") - 4.53) <= 1e-9,
              "4.64 W / 4.53 W"),
        Check("gating saves more the fewer astrocytes are used",
              all(a > b for a, b in zip(fracs, fracs[1:])) and fracs[-1] == 0.0,
              f"savings {fracs[0]:.1%} down to {fracs[-1]:.1%}"),
    ]
    summary = (f"one core at full activity: ubrain "
               f"{power.core_full_w('ubrain'):.2f} W, crossbar "
               f"{power.core_full_w('crossbar'):.2f} W; disabling all "
               f"{core.max_astrocytes} astrocytes saves {fracs[0]:.1%}")
    return CommandOutput(
        summary,
        [("power.csv", ("model", "technique", "core", "clusters", "watts"),
          rows),
         ("power_savings.csv",
          ("astro_used", "watts", "savings_w", "fraction"), savings_rows)],
        [("power.svg", report.power_figure(rows, savings_rows))],
        checks,
    )


def cmd_pwl(cfg: dict, seed: int, jobs: int) -> CommandOutput:
    wc = cfg["pwl"]
    p = AstroParams(**wc["astro"])
    segments = [int(s) for s in wc["segment_sweep"]]
    steps = wc["steps"]
    sample_every = wc["sample_every"]

    # The error-recovery drive: two sources, one cut at the midpoint.
    rng = np.random.default_rng(seed)
    spikes = rng.random((steps, 2)) < 30.0 * p.dt
    spikes[steps // 2:, 0] = False
    events = spikes.sum(axis=1).astype(float)

    def run_pair(n_segments: int):
        fp = FixedAstroParams.from_params(p, segments=n_segments)
        sf = steady_state(p, 60.0)
        sx = encode_state(sf)
        worst = 0.0
        trace = []
        for t in range(steps):
            sf = step(sf, p, spikes=events[t])
            sx = fixed_astro_step(sx, fp, spikes=events[t])
            dev = abs(sf.pr - sx.pr.value)
            worst = max(worst, dev)
            if (t + 1) % sample_every == 0:
                trace.append(((t + 1) * p.dt, sf.pr, sx.pr.value, dev))
        return fp, worst, trace

    results = _seed_map(run_pair, segments, jobs)
    err_rows = []
    for n_segments, (fp, worst, _) in zip(segments, results):
        exp_table = build_pwl(lambda x: math.exp(-x), (0.0, 10.0), n_segments)
        err_rows.append((n_segments,
                         exp_table.max_error(lambda x: math.exp(-x)),
                         worst))
    fp0, dev0, trace0 = results[0]
    table_rows = [(i, float(fp0.table.breakpoints[i]),
                   fp0.table.slopes[i].raw, fp0.table.intercepts[i].raw)
                  for i in range(fp0.table.segments)]

    grid = np.linspace(-1000.0, 1000.0, 20001)
    round_trip = max(abs(encode(float(x)).value - float(x)) for x in grid)
    checks = [
        Check("fixed-point round trip", round_trip <= 2.0 ** -21,
              f"max error {round_trip:.3g} vs 2^-21"),
        Check("exponential table error", err_rows[0][1] < 0.01,
              f"S={segments[0]}: {err_rows[0][1]:.5f}"),
        Check("trace deviation bound", dev0 < 0.01,
              f"S={segments[0]}: max |pr_fx - pr| = {dev0:.5f}"),
        Check("deviation shrinks with more segments",
              err_rows[-1][2] < err_rows[0][2],
              f"{err_rows[0][2]:.5f} -> {err_rows[-1][2]:.5f} "
              f"at S={segments[-1]}"),
    ]
    summary = (f"S={segments[0]}: table error {err_rows[0][1]:.5f}, trace "
               f"pr deviation {dev0:.5f}; S={segments[-1]} deviation "
               f"{err_rows[-1][2]:.5f}")
    return CommandOutput(
        summary,
        [("pwl_errors.csv",
          ("segments", "exp_table_max_error", "pr_max_deviation"), err_rows),
         ("pwl_trace.csv", ("time_s", "pr_float", "pr_fixed", "abs_dev"),
          trace0),
         ("pwl_table.csv",
          ("segment", "breakpoint", "slope_raw", "intercept_raw"),
          table_rows)],
        [("pwl.svg", report.pwl_figure(trace0, err_rows))],
        checks,
    )


# ---------------------------------------------------------------------------
# Entry point

_COMMANDS: dict[str, tuple[Callable, str]] = {
    "selfrepair": (cmd_selfrepair,
                   "self-repair trace and rates after an input fault"),
    "clusters": (cmd_clusters,
                 "core counts for the benchmark models vs the reference"),
    "synthesize": (cmd_synthesize,
                   "greedy astrocyte insertion on a fragile toy classifier"),
    "faults": (cmd_faults,
               "accuracy sweep under random parameter faults"),
    "reliability": (cmd_reliability, "memory fault mechanism report"),
    "area": (cmd_area, "area cost of the fault-tolerance techniques"),
    "power": (cmd_power, "power cost and astrocyte gating savings"),
    "pwl": (cmd_pwl, "42-bit fixed-point datapath vs float reference"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="astrocore",
        description="Desk-scale fault-tolerant neuromorphic design studies.")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="subcommand")
    for name, (fn, help_text) in _COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", type=Path, default=None,
                        help="JSON config file (defaults used when omitted)")
        sp.add_argument("--out", type=Path, default=Path("results"),
                        help="output directory (default: results)")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the base seed for Monte-Carlo loops")
        sp.add_argument("--check", action="store_true",
                        help="verify acceptance bounds; nonzero exit on failure")
        sp.add_argument("--jobs", type=int, default=1,
                        help="worker threads for Monte-Carlo loops")
        sp.set_defaults(fn=fn)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        result = args.fn(cfg, cfg["seed"], args.jobs)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 2

    out_dir: Path = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, header, rows in result.csvs:
        report.write_csv(out_dir / name, header, rows)
    for name, fig in result.figures:
        report.save_figure(fig, out_dir / name)
    _update_summary(out_dir, args.command, result.summary)

    print(f"{args.command}: {result.summary}")
    if args.check:
        failed = False
        for c in result.checks:
            status = "ok" if c.passed else "FAILED"
            print(f"check {status}: {c.name} ({c.detail})")
            failed |= not c.passed
        if failed:
            return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
