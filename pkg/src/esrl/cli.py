"""Command line front end for the workbench.

One canonical config format: a flat JSON object whose keys match the
long-option names of the subcommand (with ``-`` spelled ``_``).  Flags
override file keys.  Exit codes: 0 success, 1 domain error, 2 usage or
config error.  Every file this module writes goes through a
temp-and-rename so failures never leave partial output behind.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

import numpy as np

from esrl import repro
from esrl.codec import CodecError, build_lifted, encode, syndrome_ok
from esrl.designer import (
    DesignConfig,
    DesignError,
    design_full,
    lift_profile,
)
from esrl.profile import (
    ProfileError,
    code_rate,
    expand_coupled,
    load_profile,
    prune,
    save_profile,
    validate,
)
from esrl.rca import rca_threshold_detail
from esrl.simulator import (
    SimConfig,
    SimError,
    _atomic_write,
    run_fer,
    run_harq,
    write_report_csv,
)
from esrl.unified_graph import (
    CycleCountError,
    cycle_report,
    from_profile,
    girth,
    optimize_spreading,
)


class UsageError(ValueError):
    pass


_DOMAIN_ERRORS = (ProfileError, DesignError, SimError, CodecError,
                  CycleCountError, RuntimeError, OSError)


def _load_config(path, allowed) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path} must be a JSON object")
    unknown = sorted(set(cfg) - set(allowed))
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return cfg


def _merged(args, keys, config_key="config") -> dict:
    """File keys overridden by explicitly supplied CLI flags."""
    out = {}
    path = getattr(args, config_key, None)
    if path is not None:
        out.update(_load_config(path, keys))
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    return out


def _emit(payload: dict, out_path=None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        _atomic_write(out_path, text)


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in str(text).split(",") if x != ""]
    except ValueError as e:
        raise UsageError(f"expected comma-separated integers: {text!r}") from e


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in str(text).split(",") if x != ""]
    except ValueError as e:
        raise UsageError(f"expected comma-separated numbers: {text!r}") from e


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    profile = load_profile(args.profile)
    problems = validate(profile)
    for p in problems:
        print(f"violation: {p}", file=sys.stderr)
    if not problems:
        print(f"profile ok: m={profile.m} n={profile.n} "
              f"omega={profile.omega} rho={profile.rho} Z={profile.Z}")
    return 1 if problems else 0


def cmd_analyze(args) -> int:
    profile = load_profile(args.profile)
    lengths = _int_list(args.lengths)
    if any(l < 4 or l % 2 for l in lengths):
        raise UsageError("cycle lengths must be even integers >= 4")
    g = from_profile(profile)
    report = cycle_report(g, lengths)
    payload = {"girth": girth(g), "lengths": {}}
    for l, entry in report.items():
        per_vn = entry["per_vn"]
        worst = max(per_vn) if per_vn else 0
        payload["lengths"][str(l)] = {
            "total": entry["total"],
            "per_vn": per_vn,
            "worst_vns": [v for v, c in enumerate(per_vn) if c == worst > 0],
        }
    if args.optimize_length is not None:
        moves = []
        optimize_spreading(g, args.optimize_length, args.i_mp, moves=moves)
        payload["reallocations"] = moves
    _emit(payload, args.out)
    return 0


def cmd_threshold(args) -> int:
    keys = ("profile", "L", "m_sub", "sweep", "i_rca", "t_stop_db",
            "resolution_db", "bracket", "unpunctured", "out")
    cfg = _merged(args, keys)
    if "profile" not in cfg or "L" not in cfg:
        raise UsageError("threshold needs a profile and L")
    profile = load_profile(cfg["profile"])
    bracket = cfg.get("bracket", (-6.0, 15.0))
    if isinstance(bracket, str):
        bracket = _float_list(bracket)
    if len(bracket) != 2:
        raise UsageError("bracket must be two numbers lo,hi")
    kw = dict(
        I_RCA=int(cfg.get("i_rca", 1000)),
        T_stop_db=float(cfg.get("t_stop_db", 20.0)),
        resolution_db=float(cfg.get("resolution_db", 0.01)),
        bracket=tuple(float(b) for b in bracket),
        punctured=not cfg.get("unpunctured", False))
    L = int(cfg["L"])
    sweep = cfg.get("sweep")
    if sweep is not None:
        if isinstance(sweep, str):
            sweep = _int_list(sweep)
        if cfg.get("out") is None:
            raise UsageError("a sweep needs an --out CSV path")
        if not sweep or sorted(set(sweep)) != list(sweep):
            raise UsageError("sweep must be strictly increasing row counts")
        tag = hashlib.sha256(json.dumps(
            {k: str(v) for k, v in sorted(cfg.items())},
            sort_keys=True).encode()).hexdigest()[:12]
        lines = [f"# esrl-sim v1 config={tag}", "ebn0_db,metric,value"]
        for m_sub in sweep:
            res = rca_threshold_detail(
                expand_coupled(prune(profile, int(m_sub)), L), **kw)
            # first column keys the sweep point, mirroring the FER layout
            lines.append(f"{m_sub},rate,{float(res.rate)!r}")
            lines.append(f"{m_sub},threshold_db,{res.threshold_db!r}")
        _atomic_write(cfg["out"], "\n".join(lines) + "\n")
        print(f"wrote {cfg['out']} ({len(sweep)} sweep points)")
        return 0
    if cfg.get("m_sub") is not None:
        profile = prune(profile, int(cfg["m_sub"]))
    res = rca_threshold_detail(expand_coupled(profile, L), **kw)
    _emit({"rate": str(res.rate), "threshold_db": res.threshold_db,
           "esn0_db": res.esn0_db, "iterations_used": res.iterations_used},
          cfg.get("out"))
    return 0


_DESIGN_KEYS = tuple(DesignConfig.__dataclass_fields__) + (
    "out", "log_out", "lift_z", "lift_g_target", "lift_budget")


def cmd_design(args) -> int:
    cfg = _merged(args, _DESIGN_KEYS)
    out = cfg.pop("out", None)
    log_out = cfg.pop("log_out", None)
    lift_z = cfg.pop("lift_z", None)
    lift_g = cfg.pop("lift_g_target", 6)
    lift_budget = cfg.pop("lift_budget", 200)
    if out is None:
        raise UsageError("design needs an output profile path (out)")
    if "weight_target" in cfg and cfg["weight_target"] is not None:
        cfg["weight_target"] = int(cfg["weight_target"])
    for key in ("rca_bracket",):
        if isinstance(cfg.get(key), str):
            cfg[key] = tuple(_float_list(cfg[key]))
        elif isinstance(cfg.get(key), list):
            cfg[key] = tuple(cfg[key])
    try:
        dconf = DesignConfig(**cfg)
    except TypeError as e:
        raise UsageError(f"bad design config: {e}") from e
    result = design_full(dconf)
    profile = result.profile
    if lift_z is not None:
        profile = lift_profile(profile, int(lift_z), g_target=int(lift_g),
                               rng=np.random.default_rng(dconf.seed),
                               budget=int(lift_budget))
    save_profile(profile, out)
    if log_out is not None:
        _emit({"threshold_db": result.threshold_db, "log": result.log,
               "weight": int(profile.B.sum())}, log_out)
    print(f"wrote {out} (threshold {result.threshold_db:.3f} dB)")
    return 0


def cmd_lift(args) -> int:
    profile = load_profile(args.profile)
    rng = np.random.default_rng(args.seed)
    lifted = lift_profile(profile, args.z, g_target=args.g_target,
                          rng=rng, budget=args.budget)
    save_profile(lifted, args.out)
    print(f"wrote {args.out} (Z={args.z}, girth target {args.g_target})")
    return 0


def cmd_encode(args) -> int:
    profile = load_profile(args.profile)
    if args.m_sub is not None:
        profile = prune(profile, args.m_sub)
    code = build_lifted(profile, args.L)
    rng = np.random.default_rng(args.seed)
    z = max(profile.Z, 1)
    lines = []
    for _ in range(args.frames):
        u = rng.integers(0, 2, (args.L, code.k, z), dtype=np.uint8)
        bits = encode(code, u)
        if not syndrome_ok(code, bits):
            raise CodecError("encoded frame fails the parity check")
        if args.out is not None:
            lines.append("".join("1" if b else "0" for b in bits.ravel()))
    if args.out is not None:
        _atomic_write(args.out, "\n".join(lines) + "\n")
    rate = code_rate(profile, args.L)
    n_bits = (profile.n * args.L + profile.m * profile.omega) * z
    print(f"encoded {args.frames} frames, n={n_bits} bits, "
          f"rate {rate}, all syndromes zero")
    return 0


_SIM_KEYS = ("profile", "L", "ebn0_grid_db", "m_sub", "decoder", "variant",
             "W", "S", "I_max", "alpha", "max_frames", "min_frame_errors",
             "seed", "workers", "stages", "target_fer", "out")


def _sim_config(args, *, harq: bool) -> tuple:
    cfg = _merged(args, _SIM_KEYS)
    if "profile" not in cfg:
        raise UsageError("simulation config needs a profile path")
    out = cfg.pop("out", None)
    if out is None:
        raise UsageError("simulation config needs an output CSV path (out)")
    if isinstance(cfg.get("ebn0_grid_db"), str):
        cfg["ebn0_grid_db"] = _float_list(cfg["ebn0_grid_db"])
    if isinstance(cfg.get("stages"), str):
        cfg["stages"] = _int_list(cfg["stages"])
    if harq and not cfg.get("stages"):
        raise UsageError("harq needs at least two stages")
    try:
        profile = load_profile(cfg.pop("profile"))
        sim = SimConfig(profile=profile, **cfg)
    except (TypeError, SimError, ProfileError, OSError) as e:
        raise UsageError(f"bad simulation config: {e}") from e
    return sim, out


def cmd_simulate(args) -> int:
    sim, out = _sim_config(args, harq=False)
    write_report_csv(run_fer(sim), out)
    print(f"wrote {out}")
    return 0


def cmd_harq(args) -> int:
    sim, out = _sim_config(args, harq=True)
    write_report_csv(run_harq(sim), out)
    print(f"wrote {out}")
    return 0


def cmd_repro(args) -> int:
    groups = list(repro.GROUPS) if args.target == "all" else [args.target]
    failed = False
    for name in groups:
        for check, ok, detail in repro.GROUPS[name]():
            status = "PASS" if ok else "FAIL"
            failed |= not ok
            print(f"{status} {name}/{check}: {detail}")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="esrl",
        description="Spatially coupled LDPC code workbench")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a profile's invariants")
    p.add_argument("profile", help="profile file path")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("analyze", help="cycle counts and ACE diagnostics")
    p.add_argument("profile", help="profile file path")
    p.add_argument("--lengths", default="4,6",
                   help="comma-separated cycle lengths (default 4,6)")
    p.add_argument("--optimize-length", type=int, default=None,
                   help="also report greedy label reallocations at this "
                        "cycle length")
    p.add_argument("--i-mp", type=int, default=30,
                   help="optimizer pass budget (default 30)")
    p.add_argument("--out", default=None, help="write JSON here instead of "
                   "stdout")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("threshold", help="coupled decoding threshold")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--profile", default=None, help="profile file path")
    p.add_argument("--L", type=int, default=None, help="coupling length")
    p.add_argument("--m-sub", dest="m_sub", type=int, default=None,
                   help="pruning point (default: full profile)")
    p.add_argument("--sweep", default=None,
                   help="comma list of pruning points; writes a "
                        "rate/threshold CSV to --out instead of JSON")
    p.add_argument("--i-rca", dest="i_rca", type=int, default=None,
                   help="iteration budget (default 1000)")
    p.add_argument("--t-stop-db", dest="t_stop_db", type=float, default=None,
                   help="accumulated-SNR stop value in dB (default 20)")
    p.add_argument("--resolution-db", dest="resolution_db", type=float,
                   default=None, help="bisection resolution (default 0.01)")
    p.add_argument("--bracket", default=None,
                   help="search bracket lo,hi in dB (default -6,15)")
    p.add_argument("--unpunctured", action="store_const", const=True,
                   default=None, help="ignore puncturing in the evaluation")
    p.add_argument("--out", default=None, help="write JSON here instead of "
                   "stdout")
    p.set_defaults(fn=cmd_threshold)

    p = sub.add_parser("design", help="search for a code profile")
    p.add_argument("--config", required=True, help="JSON config file; keys "
                   f"are {', '.join(_DESIGN_KEYS)}")
    p.add_argument("--seed", type=int, default=None, help="override seed")
    p.add_argument("--out", default=None, help="output profile path")
    p.add_argument("--log-out", dest="log_out", default=None,
                   help="write the design log JSON here")
    p.set_defaults(fn=cmd_design)

    p = sub.add_parser("lift", help="assign circulant shifts to a profile")
    p.add_argument("profile", help="profile file path")
    p.add_argument("--z", type=int, required=True, help="lifting size")
    p.add_argument("--g-target", dest="g_target", type=int, default=6,
                   help="target girth of the lifted staircase (default 6)")
    p.add_argument("--seed", type=int, default=0, help="search seed")
    p.add_argument("--budget", type=int, default=200,
                   help="restart budget (default 200)")
    p.add_argument("--out", required=True, help="output profile path")
    p.set_defaults(fn=cmd_lift)

    p = sub.add_parser("encode", help="encode random frames and verify")
    p.add_argument("profile", help="profile file path")
    p.add_argument("--L", type=int, required=True, help="coupling length")
    p.add_argument("--m-sub", dest="m_sub", type=int, default=None,
                   help="pruning point (default: full profile)")
    p.add_argument("--frames", type=int, default=1, help="frame count")
    p.add_argument("--seed", type=int, default=0, help="data seed")
    p.add_argument("--out", default=None,
                   help="write codewords here, one 0/1 line per frame")
    p.set_defaults(fn=cmd_encode)

    for name, fn, extra in (("simulate", cmd_simulate, "frame error rate"),
                            ("harq", cmd_harq, "retransmission throughput")):
        p = sub.add_parser(name, help=f"Monte Carlo {extra} sweep")
        p.add_argument("--config", required=True, help="JSON config file; "
                       f"keys are {', '.join(_SIM_KEYS)}")
        p.add_argument("--seed", type=int, default=None, help="override seed")
        p.add_argument("--workers", type=int, default=None,
                       help="override worker count (results identical)")
        p.add_argument("--max-frames", dest="max_frames", type=int,
                       default=None, help="override frame budget")
        p.add_argument("--out", default=None, help="override output CSV path")
        p.set_defaults(fn=fn)

    p = sub.add_parser("repro", help="golden-number self checks")
    p.add_argument("target", nargs="?", default="all",
                   choices=["all"] + sorted(repro.GROUPS),
                   help="check group (default all)")
    p.set_defaults(fn=cmd_repro)
    return top


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except _DOMAIN_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
