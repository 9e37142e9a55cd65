"""Invariant suite run by ``pyrope selfcheck``."""

import argparse
import itertools
import os
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from pyrope.analysis.decay import decay_curve, fit_trend, spatial_decay_map, stderr_ratio
from pyrope.analysis.flow import flow_trend
from pyrope.core.config import ENV_SEED, ModelConfig
from pyrope.core.types import GridShape, MultiViewLayout
from pyrope.maskgen.masks import build_mask
from pyrope.numkit.gradcheck import finite_diff_check
from pyrope.numkit.rng import SeededRng
from pyrope.posindex.grid import cartesian_coords, chebyshev_ring
from pyrope.posindex.triplet import triplet_array
from pyrope.rotary.frequencies import VARIANTS, make_allocation
from pyrope.rotary.rotate import (
    apply_rotary,
    relative_rotation_score,
    relative_score,
    rotary_adjoint,
)
from pyrope.toynet.model import ToyDecoder
from pyrope.toynet.sequence import TokenSequence


@dataclass(frozen=True)
class CheckBudget:
    """
    Case counts for the sampled checks.

    The defaults are the acceptance counts; :data:`QUICK_BUDGET` trades
    coverage for a run of a few seconds.
    """

    identity_draws: int = 10_000
    isometry_draws: int = 10_000
    adjoint_cases: int = 100
    oracle_max_side: int = 6
    oracle_max_text: int = 4
    decay_samples: int = 10_000


FULL_BUDGET = CheckBudget()
QUICK_BUDGET = CheckBudget(
    identity_draws=1_000,
    isometry_draws=1_000,
    adjoint_cases=10,
    oracle_max_side=4,
    oracle_max_text=2,
    decay_samples=2_000,
)

Check = Callable[[int, CheckBudget], Tuple[bool, str]]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _compatible(variant: str, d: int) -> bool:
    if variant == "vanilla":
        return d % 2 == 0
    if variant == "c2rope":
        return d % 8 == 0 and d >= 16
    return d % 8 == 0


def _allocations(dims: Tuple[int, ...]) -> list:
    return [make_allocation(v, d) for d in dims for v in VARIANTS if _compatible(v, d)]


def check_corner_triplets(seed: int, budget: CheckBudget) -> Tuple[bool, str]:
    triplets = triplet_array(MultiViewLayout(1, GridShape(4, 4)))
    expected = {
        1: (1, -1, 1),
        4: (4, 1, 1),
        13: (13, -1, -1),
        16: (16, 1, -1),
        6: (6, 0, 0),
        7: (7, 0, 0),
        10: (10, 0, 0),
        11: (11, 0, 0),
    }
    bad = [m for m, triple in expected.items() if tuple(triplets[m - 1]) != triple]
    return not bad, "4x4 corner and centre triples" if not bad else f"mismatch at tokens {bad}"

def check_relative_identity(seed: int, budget: CheckBudget) -> Tuple[bool, str]:
    gen = SeededRng(seed).child(10).generator()
    allocations = _allocations((16, 64, 128))
    worst = 0.0
    for draw in range(budget.identity_draws):
        alloc = allocations[draw % len(allocations)]
        d = alloc.head_dim
        q, k = gen.standard_normal(d), gen.standard_normal(d)
        idx_q, idx_k = gen.integers(-512, 513, size=3), gen.integers(-512, 513, size=3)
        two_sided = relative_score(q, k, idx_q, idx_k, alloc)
        one_sided = relative_rotation_score(q, k, idx_q, idx_k, alloc)
        worst = max(worst, abs(two_sided - one_sided) / max(1.0, abs(two_sided)))
    return worst <= 1e-9, f"{budget.identity_draws} draws, max deviation {worst:.2e}"


def check_text_path(seed: int, budget: CheckBudget) -> Tuple[bool, str]:
    gen = SeededRng(seed).child(11).generator()
    c2rope, vanilla = make_allocation("c2rope", 64), make_allocation("vanilla", 64)
    q, k = gen.standard_normal(64), gen.standard_normal(64)
    key_positions = gen.integers(1, 513, size=512)
    worst = 0.0
    for m_q, m_k in zip(range(1, 513), key_positions):
        for idx_q, idx_k in (((m_q,) * 3, (int(m_k),) * 3), ((int(m_k),) * 3, (m_q,) * 3)):
            a = relative_score(q, k, idx_q, idx_k, c2rope)
            b = relative_score(q, k, idx_q, idx_k, vanilla)
            worst = max(worst, abs(a - b))
    return worst <= 1e-12, f"m = 1..512 against random keys, max deviation {worst:.2e}"


def _oracle_visible(layout: MultiViewLayout, coords: np.ndarray, query: int, key: int) -> bool:
    v = layout.image_tokens
    if query >= v:
        return key < v or key <= query
    if key >= v:
        return False
    view_q, cell_q = divmod(query, layout.grid.size)
    view_k, cell_k = divmod(key, layout.grid.size)
    if view_k != view_q:
        return view_k < view_q
    return chebyshev_ring(*coords[cell_k]) <= chebyshev_ring(*coords[cell_q])


def check_chebyshev_oracle(seed: int, budget: CheckBudget) -> Tuple[bool, str]:
    sides = range(1, budget.oracle_max_side + 1)
    cases = 0
    for rows, cols, views, text in itertools.product(
        sides, sides, (1, 2), range(budget.oracle_max_text + 1)
    ):
        layout = MultiViewLayout(views, GridShape(rows, cols), text)
        mask = build_mask(layout, "chebyshev").visible
        n = layout.length
        coords = cartesian_coords(layout.grid).reshape(-1, 2)
        oracle = np.array(
            [[_oracle_visible(layout, coords, i, j) for j in range(n)] for i in range(n)]
        )
        if not np.array_equal(mask, oracle):
            return False, f"mismatch on {views} view(s) of {rows}x{cols} + {text} text"
        cases += 1
    return True, f"{cases} layouts match the per-entry oracle"


def check_column_continuity(seed: int, budget: CheckBudget) -> Tuple[bool, str]:
    for grid in (GridShape(4, 4), GridShape(5, 3), GridShape(6, 2)):
        triplets = triplet_array(MultiViewLayout(1, grid)).reshape(grid.rows, grid.cols, 3)
        diff = triplets[1:] - triplets[:-1]
        dy = -diff[..., 2]
        expected_dy = np.ones(grid.rows - 1, dtype=np.int64)
        if grid.rows % 2 == 0:
            # the two central rows share y = 0
            expected_dy[grid.rows // 2 - 1] = 0
        if not (
            np.all(diff[..., 0] == grid.cols)
            and np.all(diff[..., 1] == 0)
            and np.all(dy == expected_dy[:, np.newaxis])
        ):
            return False, f"vertical neighbours broken on {grid}"
    return True, "vertical neighbours differ by (cols, 0, 1)"


def check_isometry(seed: int, budget: CheckBudget) -> Tuple[bool, str]:
    gen = SeededRng(seed).child(12).generator()
    allocations = _allocations((16, 64, 128))
    worst = 0.0
    for draw in range(budget.isometry_draws):
        alloc = allocations[draw % len(allocations)]
        vec = gen.standard_normal(alloc.head_dim)
        idx = gen.integers(-4096, 4097, size=3)
        worst = max(worst, abs(np.linalg.norm(apply_rotary(vec, idx, alloc)) - np.linalg.norm(vec)))
    return worst <= 1e-9, f"{budget.isometry_draws} draws, max norm deviation {worst:.2e}"


def check_adjoint(seed: int, budget: CheckBudget) -> Tuple[bool, str]:
    root = SeededRng(seed).child(13)
    gen = root.generator()
    worst = 0.0
    for v_index, variant in enumerate(VARIANTS):
        alloc = make_allocation(variant, 16)
        for case in range(budget.adjoint_cases):
            idx = gen.integers(-256, 257, size=3)
            report = finite_diff_check(
                lambda u: apply_rotary(u, idx, alloc),
                lambda w: rotary_adjoint(w, idx, alloc),
                dim=16,
                tol=1e-8,
                rng=root.child(v_index).child(case),
                trials=2,
            )
            if not report.passed:
                return False, f"{variant} failed at {idx.tolist()}"
            worst = max(worst, report.max_deviation)
    return True, f"{budget.adjoint_cases} cases per variant, max deviation {worst:.2e}"


def check_softmax_conservation(seed: int, budget: CheckBudget) -> Tuple[bool, str]:
    layout = MultiViewLayout(2, GridShape(8, 8), 16)
    for mask_kind in ("causal", "chebyshev"):
        cfg = ModelConfig(seed=seed, encoding="c2rope", mask_kind=mask_kind)
        seq = TokenSequence.synthetic(layout, cfg.model_dim, cfg.vocab, seed)
        result = ToyDecoder(cfg).forward(seq)
        if not result.trace.is_consistent(result.mask):
            return False, f"{mask_kind}: rows off by {result.trace.max_row_error():.2e}"
    return True, "2 views of 8x8 + 16 text, both masks"


def check_decay_trend(seed: int, budget: CheckBudget) -> Tuple[bool, str]:
    series = decay_curve(make_allocation("vanilla", 64), 256, budget.decay_samples, seed)
    fit = fit_trend(series)
    return fit.slope < 0 and abs(fit.t_stat) > 3, (
        f"{budget.decay_samples} samples, slope {fit.slope:.4f}, t {fit.t_stat:.1f}"
    )


def check_spatial_sensitivity(seed: int, budget: CheckBudget) -> Tuple[bool, str]:
    sweep = decay_curve(make_allocation("c2rope", 64), 1024, 2000, seed, component="x")
    variation = abs(sweep.means[0] - sweep.means[-1])
    noise = sweep.stderrs[0] + sweep.stderrs[-1]
    flat = spatial_decay_map(make_allocation("vanilla", 64), GridShape(8, 8), 500, seed)
    spread = float(flat.values.max() - flat.values.min())
    passed = variation > 3 * noise and spread <= 2 * float(flat.stderr.max())
    return passed, f"c2rope x variation {variation:.3f} vs 3x stderr {3 * noise:.3f}; vanilla spread {spread:.2e}"


def check_stderr_scaling(seed: int, budget: CheckBudget) -> Tuple[bool, str]:
    alloc = make_allocation("vanilla", 16)
    ratio = stderr_ratio(lambda n: decay_curve(alloc, 16, n, seed), 500)
    return 1.6 <= ratio <= 2.4, f"stderr ratio at 4x samples {ratio:.2f}"


def check_determinism(seed: int, budget: CheckBudget) -> Tuple[bool, str]:
    layout = MultiViewLayout(1, GridShape(4, 4), 4)
    cfg = ModelConfig(seed=seed)
    seq = TokenSequence.synthetic(layout, cfg.model_dim, cfg.vocab, seed)
    a, b = ToyDecoder(cfg).forward(seq), ToyDecoder(cfg).forward(seq)
    same = np.array_equal(a.logits, b.logits) and np.array_equal(a.trace.weights, b.trace.weights)
    return same, "repeated forward passes are bit-identical"


CHECKS: List[Tuple[str, Check]] = [
    ("corner_triplets", check_corner_triplets),
    ("relative_identity", check_relative_identity),
    ("text_path_equivalence", check_text_path),
    ("chebyshev_oracle", check_chebyshev_oracle),
    ("column_continuity", check_column_continuity),
    ("isometry", check_isometry),
    ("adjoint", check_adjoint),
    ("softmax_conservation", check_softmax_conservation),
    ("decay_trend", check_decay_trend),
    ("spatial_sensitivity", check_spatial_sensitivity),
    ("stderr_scaling", check_stderr_scaling),
    ("determinism", check_determinism),
]


def run_checks(seed: int = 0, budget: CheckBudget = FULL_BUDGET) -> List[CheckResult]:
    results = []
    for name, check in CHECKS:
        passed, detail = check(seed, budget)
        results.append(CheckResult(name, bool(passed), detail))
    return results


def cmd_selfcheck(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else int(os.getenv(ENV_SEED, "0"))
    results = run_checks(seed, QUICK_BUDGET if args.quick else FULL_BUDGET)
    for result in results:
        print(f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.detail}")

    # recorded, never gated
    layout = MultiViewLayout(1, GridShape(16, 16), 8)
    seeds = range(seed, seed + args.trend_seeds)
    for encoding, mask_kind in (("vanilla", "causal"), ("c2rope", "chebyshev")):
        trend = flow_trend(seeds, layout, encoding, mask_kind)
        print(
            f"INFO flow_trend {encoding}/{mask_kind}: mean bottom/top ratio "
            f"{trend.mean_ratio:.3f}, bottom-heavy in {trend.bottom_heavy_fraction:.0%} of seeds"
        )
    return 0 if all(r.passed for r in results) else 2
