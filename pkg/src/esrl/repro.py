"""Golden-number self checks exposed through the ``repro`` CLI subcommand.

Three check groups:

* ``cycles``  -- the small hand-checked unified graph whose cycle counts and
  best reallocation are frozen below.
* ``rates``   -- the design rates of the shipped profile at its six classical
  pruning points.
* ``ace``     -- ACE floor of the shipped profile (4-cycles at 6 or better,
  6- and 8-cycles at 12 or better).

Every function returns a list of (name, ok, detail) tuples so callers can
render pass/fail lines however they like.
"""

from fractions import Fraction
from importlib import resources

import numpy as np

from esrl.designer import ace_spectrum
from esrl.profile import CodeProfile, code_rate, parse_profile, prune
from esrl.unified_graph import (
    UnifiedGraph,
    count_cycles_at_vn,
    eval_reallocation,
    optimize_spreading,
)

# rows are CNs 0..5, columns VNs 0..4; -1 means no edge
WORKED_T = np.array([
    [1, -1, -1, -1,  1],
    [1,  1, -1,  0,  0],
    [-1, 0,  1, -1,  0],
    [0, -1, -1,  1, -1],
    [0, -1,  0, -1, -1],
    [-1, -1, 0,  1, -1],
], dtype=np.int64)

WORKED_OMEGA = 1
WORKED_ROOT = 4

# frozen outcomes of the worked reallocation example
Q4_ROOT = 0
Q6_ROOT = 2
CANDIDATE_DELTAS = {(0, 0): 0, (1, 1): 1, (2, 1): 1}
NEW_4CYCLES_CN1 = 2
BEST_MOVE = {"cn": 2, "vn": WORKED_ROOT, "old": 0, "new": 1, "removed": 1}

# shipped design example: six pruning points and their design rates
SHIPPED_PROFILE = "design_example_z39.txt"
SHIPPED_PROFILE_LARGE = "design_example_z390.txt"
SHIPPED_L = 10
RATE_GOLDENS = {
    4: Fraction(220, 253),
    6: Fraction(220, 275),
    9: Fraction(220, 308),
    13: Fraction(220, 352),
    20: Fraction(220, 429),
    40: Fraction(220, 649),
}
ACE_FLOOR = {4: 6, 6: 12, 8: 12}


def worked_example_graph() -> UnifiedGraph:
    return UnifiedGraph(WORKED_T, WORKED_OMEGA)


def load_shipped_profile(name: str = SHIPPED_PROFILE) -> CodeProfile:
    text = resources.files("esrl.data").joinpath(name).read_text("ascii")
    return parse_profile(text)


def check_cycles() -> list:
    checks = []
    g = worked_example_graph()
    c4, p4 = count_cycles_at_vn(g, WORKED_ROOT, 4)
    c6, p6 = count_cycles_at_vn(g, WORKED_ROOT, 6)
    checks.append(("root-4-cycle-count", c4 == Q4_ROOT,
                   f"Q4={c4}, expected {Q4_ROOT}"))
    checks.append(("root-6-cycle-count", c6 == Q6_ROOT,
                   f"Q6={c6}, expected {Q6_ROOT}"))
    deltas = {}
    for (c, new), want in CANDIDATE_DELTAS.items():
        f_new = eval_reallocation(g, p6, (c, WORKED_ROOT), new).f()
        deltas[(c, new)] = (p6.f() - f_new) // 2
    checks.append(("candidate-removal-counts", deltas == CANDIDATE_DELTAS,
                   f"deltas={sorted(deltas.values())}, expected "
                   f"{sorted(CANDIDATE_DELTAS.values())}"))
    created = (eval_reallocation(g, p4, (1, WORKED_ROOT), 1).f()
               - p4.f()) // 2
    checks.append(("rejected-move-new-4-cycles", created == NEW_4CYCLES_CN1,
                   f"created={created}, expected {NEW_4CYCLES_CN1}"))
    moves = []
    optimize_spreading(g, 6, 1, moves=moves, roots=[WORKED_ROOT])
    checks.append(("optimizer-best-move", moves == [BEST_MOVE],
                   f"moves={moves}"))
    return checks


def check_rates() -> list:
    profile = load_shipped_profile()
    checks = []
    for m_sub, want in sorted(RATE_GOLDENS.items()):
        r = code_rate(profile, SHIPPED_L, m_sub)
        checks.append((f"rate-m{m_sub}", r == want, f"{r} vs {want}"))
    return checks


def check_ace(profile: CodeProfile | None = None) -> list:
    if profile is None:
        profile = load_shipped_profile()
    spec = ace_spectrum(profile.B, max(ACE_FLOOR), T=profile.T)
    checks = []
    for l, floor in sorted(ACE_FLOOR.items()):
        got = spec[l]
        checks.append((f"ace-l{l}", got >= floor,
                       f"min eta {got}, floor {floor}"))
    return checks


GROUPS = {"cycles": check_cycles, "rates": check_rates, "ace": check_ace}
