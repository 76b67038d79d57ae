"""Command-line entry points for the sweep runner and validators."""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import harness, maxmin
from .channel import dump_channels, realize_channels
from .scenario import ScenarioConfig, VelocityProfile


def _add_common(p):
    p.add_argument("--config", help="scenario config JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--realizations", type=int, default=500)
    p.add_argument("--out", default="results.csv", help="output CSV path")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--n", type=int, default=10, help="data time instant")
    p.add_argument(
        "--schemes",
        default="mr:superposition",
        help="comma list of private:common pairs, e.g. mr:superposition,cmmse:bisection",
    )
    p.add_argument("--calib-batch", type=int, default=200)
    p.add_argument("--bisect-eps", type=float, default=None)
    p.add_argument("--bisect-max-iter", type=int, default=200)
    p.add_argument("--inner-tol", type=float, default=1e-6)
    p.add_argument("--inner-max-iter", type=int, default=10000)
    p.add_argument("--dump-channels", help="write one ChannelState to this path and exit")


def _load_config(args) -> ScenarioConfig:
    if args.config:
        return ScenarioConfig.from_json(args.config)
    return ScenarioConfig()


def _scheme_pairs(spec: str):
    pairs = []
    for chunk in spec.split(","):
        private, _, common = chunk.partition(":")
        pairs.append((private.strip(), (common or "superposition").strip()))
    return tuple(pairs)


def _grid(arg, cast=float):
    return tuple(cast(x) for x in arg.split(","))


def _maybe_dump(args, config):
    if not args.dump_channels:
        return False
    scn = harness.build_scenario(config, args.seed)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=args.seed, spawn_key=(9,)))
    state = realize_channels(scn.stats, scn.aging, rng)
    dump_channels(state, args.dump_channels)
    print(f"wrote channel dump to {args.dump_channels}")
    return True


def _run(args, variable, grid):
    config = _load_config(args)
    if _maybe_dump(args, config):
        return 0
    spec = harness.SweepSpec(
        variable=variable,
        grid=grid,
        config=config,
        scheme_pairs=_scheme_pairs(args.schemes),
        realizations=args.realizations,
        seed=args.seed,
        time_instant=args.n,
        calib_batch=args.calib_batch,
        threads=args.threads,
        bisect_opts={
            "epsilon": args.bisect_eps,
            "max_iter": args.bisect_max_iter,
            "inner_tol": args.inner_tol,
            "inner_max_iter": args.inner_max_iter,
        },
    )
    rows = harness.run_sweep(spec)
    harness.write_csv(rows, args.out)
    harness.write_timing(rows, str(args.out) + ".timing.csv")
    bad = [r for r in rows if r.error]
    for r in bad:
        print(f"point {r.sweep_value} {r.private_scheme}:{r.common_scheme} failed: {r.error}")
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def main(argv=None):
    ap = argparse.ArgumentParser(prog="rscf")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("sweep-t", "sum SE vs power-splitting factor"),
        ("sweep-n", "sum SE vs time instant"),
        ("sweep-power", "sum SE vs transmit power (dBm)"),
        ("sweep-ues", "sum SE vs number of UEs"),
        ("sweep-velocity", "sum SE vs equal-velocity setting"),
        ("validate-closed-form", "closed form vs Monte-Carlo oracles"),
        ("bench-bisection", "bisection timing and iteration counts"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name.startswith("sweep"):
            p.add_argument("--grid", required=True, help="comma-separated grid values")
        if name == "validate-closed-form":
            p.add_argument("--oracle-samples", type=int, default=200_000)

    args = ap.parse_args(argv)

    if args.command == "sweep-t":
        return _run(args, "power_split_t", _grid(args.grid))
    if args.command == "sweep-n":
        return _run(args, "time_instant_n", _grid(args.grid, int))
    if args.command == "sweep-power":
        return _run(args, "transmit_power_dbm", _grid(args.grid))
    if args.command == "sweep-ues":
        return _run(args, "num_ues_K", _grid(args.grid, int))
    if args.command == "sweep-velocity":
        return _run(args, "velocity_profile", _grid(args.grid))
    if args.command == "validate-closed-form":
        config = _load_config(args)
        if _maybe_dump(args, config):
            return 0
        report = harness.validate_closed_form(
            config,
            realizations=args.realizations,
            oracle_samples=args.oracle_samples,
            seed=args.seed,
            time_instant=args.n,
        )
        for c in report.term_checks:
            mark = "ok" if c.passed else "FAIL"
            print(
                f"{c.term} k={c.ue}: closed={c.closed_form:.6g} oracle={c.oracle:.6g} "
                f"(se {c.stderr:.2g}, z={c.z:.2f}) {mark}"
            )
        mark = "ok" if report.bound_ok else "FAIL"
        print(
            f"bound: closed {report.bound_closed_form:.6g} <= "
            f"mc {report.bound_mc:.6g} + 2*{report.bound_mc_stderr:.2g} {mark}"
        )
        return 0 if report.all_passed else 1
    if args.command == "bench-bisection":
        return _bench_bisection(args)
    return 2


def _bench_bisection(args):
    config = _load_config(args)
    if _maybe_dump(args, config):
        return 0
    scn = harness.build_scenario(config, args.seed)
    n = args.n
    rho_n = scn.aging.rho[:, n]
    rng = np.random.default_rng(np.random.SeedSequence(entropy=args.seed, spawn_key=(5,)))
    from . import se as se_mod
    from .channel import draw_initial, stack_vectors

    reps = min(args.realizations, 10)
    h0 = draw_initial(scn.stats, rng, num=reps)
    h_hat_blocks = rho_n[None, :, None, None] * h0
    v_p, _ = se_mod.build_precoders_batch(
        h_hat_blocks, scn.stats, rho_n, "mr", "random",
        scn.config.downlink_power, scn.config.power_split, scn.config.noise_power,
    )
    for s in range(reps):
        t0 = time.perf_counter()
        res = maxmin.bisection_common(
            stack_vectors(h_hat_blocks[s]),
            stack_vectors(v_p[s]),
            scn.stats.R,
            rho_n,
            scn.config.downlink_power,
            scn.config.power_split,
            scn.config.noise_power,
            epsilon=args.bisect_eps,
            max_iter=args.bisect_max_iter,
            inner_tol=args.inner_tol,
            inner_max_iter=args.inner_max_iter,
        )
        dt = time.perf_counter() - t0
        print(
            f"run {s}: gamma*={res.gamma_star:.6g} iters={res.iterations} "
            f"pick={res.selected_candidate} wall={dt:.3f}s"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
