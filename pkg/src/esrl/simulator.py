"""Monte Carlo FER and IR-HARQ measurement over BPSK / AWGN.

Each frame gets its own counter-based RNG stream seeded by
(seed, point index, frame index), so results are bit-identical no matter
how frames are distributed over workers.  Punctured positions are never
transmitted; their channel LLR is zero.  Noise variance is derived from
Eb/N0 through the punctured code rate.

HARQ transmissions are incremental: stage s adds only the parity bits of
the next pruning point, and the accumulated word is decoded under the
lower-rate parity-check.  The nesting of stage codewords is asserted on
every trial.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from esrl.codec import (
    LiftedCode,
    build_lifted,
    decode_layered,
    decode_slme,
    decode_windowed,
    encode,
)
from esrl.profile import CodeProfile, CoupledCode, code_rate, prune

__all__ = [
    "SimConfig",
    "SimError",
    "FerPoint",
    "FerReport",
    "HarqPoint",
    "HarqReport",
    "puncture_map",
    "max_punctured_per_row",
    "noise_sigma",
    "wilson_interval",
    "run_fer",
    "run_harq",
    "write_report_csv",
    "config_hash",
]

_WILSON_Z = 1.959963984540054  # two-sided 95%

_CHUNK = 64  # frames per stop-rule check; fixed so workers cannot alter it


class SimError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    """One sweep: a pruned, lifted code plus channel grid and stop rule."""

    profile: CodeProfile
    L: int
    ebn0_grid_db: tuple
    m_sub: int | None = None          # pruning point, None = full profile
    decoder: str = "layered"          # layered | slme | windowed
    variant: str = "nms"              # nms | sp
    W: int | None = None
    S: int | None = None
    I_max: int = 20
    alpha: float = 0.75
    max_frames: int = 10 ** 6
    min_frame_errors: int = 100
    seed: int = 0
    workers: int = 1
    # HARQ only: pruning points per transmission stage, rate descending
    stages: tuple = ()
    target_fer: float = 1e-2

    def __post_init__(self):
        grid = tuple(float(x) for x in self.ebn0_grid_db)
        object.__setattr__(self, "ebn0_grid_db", grid)
        object.__setattr__(self, "stages", tuple(int(s) for s in self.stages))
        if list(grid) != sorted(grid):
            raise SimError("Eb/N0 grid must be sorted ascending")
        if self.min_frame_errors < 1:
            raise SimError("min_frame_errors must be >= 1")
        if self.max_frames < 1:
            raise SimError("max_frames must be >= 1")
        if self.decoder not in ("layered", "slme", "windowed"):
            raise SimError(f"unknown decoder {self.decoder!r}")
        if self.stages and list(self.stages) != sorted(set(self.stages)):
            raise SimError("stages must be strictly increasing pruning points")

    def echo(self) -> dict:
        """JSON-serializable snapshot used for the sidecar and the hash."""
        d = {
            "profile_sha": hashlib.sha256(
                _profile_bytes(self.profile)).hexdigest()[:16],
            "L": self.L,
            "m_sub": self.m_sub,
            "decoder": self.decoder,
            "variant": self.variant,
            "W": self.W,
            "S": self.S,
            "I_max": self.I_max,
            "alpha": self.alpha,
            "ebn0_grid_db": list(self.ebn0_grid_db),
            "max_frames": self.max_frames,
            "min_frame_errors": self.min_frame_errors,
            "seed": self.seed,
            "stages": list(self.stages),
            "target_fer": self.target_fer,
        }
        return d


def _profile_bytes(profile: CodeProfile) -> bytes:
    from esrl.profile import serialize_profile

    return serialize_profile(profile).encode("ascii")


def config_hash(cfg: SimConfig) -> str:
    blob = json.dumps(cfg.echo(), sort_keys=True).encode("ascii")
    return hashlib.sha256(blob).hexdigest()[:12]


# ---------------------------------------------------------------------------
# channel plumbing


def puncture_map(coupled: CoupledCode):
    """(transmit bit indices, inverse map) for a coupled code.

    The inverse map sends a transmitted-stream position back to its bit
    index; punctured bit indices map to -1 in the forward direction.
    """
    z = max(coupled.Z, 1)
    keep = np.repeat(~coupled.punct_mask, z)
    tx = np.flatnonzero(keep)
    inv = np.full(keep.size, -1, dtype=np.int64)
    inv[tx] = np.arange(tx.size)
    return tx, inv


def max_punctured_per_row(coupled: CoupledCode) -> int:
    """Largest number of punctured VNs any single CN row touches."""
    worst = 0
    for row in coupled.rows:
        hits = sum(1 for batch, v, _ in row
                   if coupled.punct_mask[coupled.col_index(batch, v)])
        worst = max(worst, hits)
    return worst


def noise_sigma(ebn0_db: float, rate) -> float:
    """AWGN sigma for BPSK at the given Eb/N0 and (punctured) code rate."""
    return math.sqrt(1.0 / (2.0 * float(rate) * 10.0 ** (ebn0_db / 10.0)))


def wilson_interval(successes: int, trials: int, z: float = _WILSON_Z):
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    den = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / den
    half = z * math.sqrt(p * (1.0 - p) / trials
                         + z * z / (4.0 * trials * trials)) / den
    return max(0.0, center - half), min(1.0, center + half)


# ---------------------------------------------------------------------------
# FER sweep


@dataclass
class FerPoint:
    ebn0_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    info_bits: int
    mean_iterations: float

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames

    @property
    def ber(self) -> float:
        return self.bit_errors / self.info_bits

    def fer_ci(self):
        return wilson_interval(self.frame_errors, self.frames)


@dataclass
class FerReport:
    points: list
    config: dict
    config_hash: str


def _make_decoder(cfg: SimConfig, code: LiftedCode):
    if cfg.decoder == "layered":
        return lambda llr: decode_layered(code, llr, cfg.I_max, cfg.variant,
                                          cfg.alpha)
    W = cfg.W if cfg.W is not None else code.num_positions
    S = cfg.S if cfg.S is not None else W
    if cfg.decoder == "slme":
        return lambda llr: decode_slme(code, llr, W, S, cfg.I_max,
                                       variant=cfg.variant, alpha=cfg.alpha)
    return lambda llr: decode_windowed(code, llr, W, S, cfg.I_max,
                                       variant=cfg.variant, alpha=cfg.alpha)


def _info_bit_index(code: LiftedCode) -> np.ndarray:
    n, k, Z = code.profile.n, code.k, code.Z
    blocks = np.concatenate([np.arange(i * n, i * n + k)
                             for i in range(code.L)])
    return (blocks[:, None] * Z + np.arange(Z)[None, :]).ravel()


def _fer_frame(code: LiftedCode, decode, tx: np.ndarray, info: np.ndarray,
               sigma: float, seed_key) -> tuple:
    rng = np.random.default_rng(seed_key)
    L, k, Z = code.L, code.k, code.Z
    u = rng.integers(0, 2, (L, k, Z), dtype=np.uint8)
    bits = encode(code, u).ravel()
    y = (1.0 - 2.0 * bits[tx]) + sigma * rng.standard_normal(tx.size)
    llr = np.zeros(bits.size)
    llr[tx] = 2.0 * y / (sigma * sigma)
    res = decode(llr)
    errs = int(np.count_nonzero(res.bits.ravel()[info] != bits[info]))
    return errs > 0, errs, res.iterations


def run_fer(config: SimConfig) -> FerReport:
    """FER/BER sweep over the Eb/N0 grid with the configured stop rule."""
    p = config.profile if config.m_sub is None \
        else prune(config.profile, config.m_sub)
    code = build_lifted(p, config.L)
    decode = _make_decoder(config, code)
    tx, _ = puncture_map(code.coupled)
    info = _info_bit_index(code)
    rate = code_rate(p, config.L)
    points = []
    for pt, ebn0 in enumerate(config.ebn0_grid_db):
        sigma = noise_sigma(ebn0, rate)
        frames = fe = be = 0
        iters = 0.0
        while frames < config.max_frames and fe < config.min_frame_errors:
            batch = min(_CHUNK, config.max_frames - frames)
            keys = [[config.seed, pt, frames + j] for j in range(batch)]
            if config.workers > 1:
                with ThreadPoolExecutor(config.workers) as pool:
                    out = list(pool.map(
                        lambda key: _fer_frame(code, decode, tx, info, sigma,
                                               key), keys))
            else:
                out = [_fer_frame(code, decode, tx, info, sigma, key)
                       for key in keys]
            for err, nbits, it in out:
                fe += err
                be += nbits
                iters += it
            frames += batch
        points.append(FerPoint(ebn0, frames, fe, be, frames * info.size,
                               iters / frames))
    return FerReport(points, config.echo(), config_hash(config))


# ---------------------------------------------------------------------------
# IR-HARQ


@dataclass
class HarqPoint:
    ebn0_db: float
    trials: int
    system_rate: float
    mean_tx_bits: float
    stage_fail_rates: tuple
    saturated: bool


@dataclass
class HarqReport:
    points: list
    stages: tuple
    stage_rates: tuple
    config: dict
    config_hash: str


@dataclass
class _Stage:
    code: LiftedCode
    decode: object
    tx_local: np.ndarray    # transmitted bit indices in stage numbering
    tx_full: np.ndarray     # the same bits as mother-code indices
    bit_map: np.ndarray     # stage bit index -> mother bit index
    info_local: np.ndarray
    n_tx: int


def _stage_bit_map(mother: CodeProfile, L: int,
                   sub: CodeProfile) -> np.ndarray:
    """Mother-code bit index of each column of the pruned coupled code."""
    n, m, Z = mother.n, mother.m, mother.Z
    blocks = []
    for i in range(L):
        blocks.extend(range(i * n, i * n + sub.n))
    for j in range(sub.omega):
        start = L * n + j * m
        blocks.extend(range(start, start + sub.m))
    blocks = np.asarray(blocks, dtype=np.int64)
    return (blocks[:, None] * Z + np.arange(Z)[None, :]).ravel()


def _build_stages(config: SimConfig, mother_profile: CodeProfile) -> list:
    stages = []
    for m_sub in config.stages:
        p = prune(mother_profile, m_sub)
        code = build_lifted(p, config.L)
        decode = _make_decoder(config, code)
        tx, _ = puncture_map(code.coupled)
        bmap = _stage_bit_map(mother_profile, config.L, p)
        stages.append(_Stage(code, decode, tx, bmap[tx], bmap,
                             _info_bit_index(code), tx.size))
    return stages


def _harq_trial(mother: LiftedCode, info_mother: np.ndarray, stages: list,
                sigma: float, seed_key):
    """One trial: returns (success stage index or -1, transmitted bits)."""
    rng = np.random.default_rng(seed_key)
    L, k, Z = mother.L, mother.k, mother.Z
    u = rng.integers(0, 2, (L, k, Z), dtype=np.uint8)
    bits = encode(mother, u).ravel()
    noise = rng.standard_normal(bits.size)
    for s, st in enumerate(stages):
        word = encode(st.code, u).ravel()
        if not np.array_equal(word, bits[st.bit_map]):
            raise SimError(
                f"stage {s} codeword is not nested in the mother codeword")
        llr = np.zeros(st.bit_map.size)
        y = (1.0 - 2.0 * bits[st.tx_full]) + sigma * noise[st.tx_full]
        llr[st.tx_local] = 2.0 * y / (sigma * sigma)
        res = st.decode(llr)
        if np.array_equal(res.bits.ravel()[st.info_local],
                          bits[info_mother]):
            return s, st.n_tx
    return -1, stages[-1].n_tx


def run_harq(config: SimConfig) -> HarqReport:
    """IR-HARQ sweep; system rate = info bits over mean transmitted bits."""
    if len(config.stages) < 2:
        raise SimError("HARQ needs at least two transmission stages")
    mother_profile = prune(config.profile, config.stages[-1])
    mother = build_lifted(mother_profile, config.L)
    stages = _build_stages(config, mother_profile)
    stage_rates = tuple(code_rate(prune(mother_profile, s), config.L)
                        for s in config.stages)
    # Eb/N0 is quoted at the first (highest-rate) transmission
    k_total = mother.k * config.L * mother.Z
    info_mother = _info_bit_index(mother)
    points = []
    for pt, ebn0 in enumerate(config.ebn0_grid_db):
        sigma = noise_sigma(ebn0, stage_rates[0])
        trials = 0
        tx_total = 0
        fails = np.zeros(len(stages), dtype=np.int64)
        done = 0
        while trials < config.max_frames and done < config.min_frame_errors:
            batch = min(_CHUNK, config.max_frames - trials)
            for j in range(batch):
                s, tx = _harq_trial(mother, info_mother, stages, sigma,
                                    [config.seed, pt, trials + j])
                tx_total += tx
                hit = s if s >= 0 else len(stages)
                fails[:hit] += 1
                done += 1
            trials += batch
        rates = tuple(float(f) / trials for f in fails)
        theta = k_total * trials / tx_total
        points.append(HarqPoint(ebn0, trials, theta, tx_total / trials, rates,
                                rates[-1] > config.target_fer))
    return HarqReport(points, config.stages, stage_rates, config.echo(),
                      config_hash(config))


# ---------------------------------------------------------------------------
# report output


def _atomic_write(path, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".esrl-tmp-")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_report_csv(report, path) -> None:
    """Long-format CSV (one row per SNR and metric) plus a JSON sidecar."""
    lines = [f"# esrl-sim v1 config={report.config_hash}",
             "ebn0_db,metric,value"]
    if isinstance(report, FerReport):
        for p in report.points:
            lo, hi = p.fer_ci()
            rows = [("frames", p.frames), ("frame_errors", p.frame_errors),
                    ("fer", p.fer), ("fer_lo", lo), ("fer_hi", hi),
                    ("ber", p.ber), ("mean_iterations", p.mean_iterations)]
            for name, val in rows:
                lines.append(f"{_fmt(p.ebn0_db)},{name},{_fmt(val)}")
    elif isinstance(report, HarqReport):
        for p in report.points:
            rows = [("trials", p.trials), ("system_rate", p.system_rate),
                    ("mean_tx_bits", p.mean_tx_bits),
                    ("saturated", int(p.saturated))]
            rows += [(f"stage{i + 1}_fail_rate", r)
                     for i, r in enumerate(p.stage_fail_rates)]
            for name, val in rows:
                lines.append(f"{_fmt(p.ebn0_db)},{name},{_fmt(val)}")
    else:
        raise SimError(f"unknown report type {type(report).__name__}")
    _atomic_write(path, "\n".join(lines) + "\n")
    sidecar = {"config_hash": report.config_hash, "config": report.config}
    if isinstance(report, HarqReport):
        sidecar["stages"] = list(report.stages)
        sidecar["stage_rates"] = [str(r) for r in report.stage_rates]
    _atomic_write(str(path) + ".json",
                  json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
