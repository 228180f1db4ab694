"""Multi-maps between finite balleans and the equivalence oracle.

A multi-map is any relation between the point sets of two chains.  Its
oscillation at a source level collects all pairs of image points sitting
over entourage-related sources; the map is coarse for a shift function when
every oscillation lands inside the prescribed target level.

Shift bookkeeping, fixed here once:

* a shift table assigns a target level to every source level 0..k and must
  be monotone;
* the constant-shift family sends level a to min(a + s, k_target), except
  that the top source level (when it is not also level 0) maps straight to
  the top target level.  In a finite chain the top entourage is the full
  relation, so its oscillation always fits in the target's top; charging
  the depth difference to the shift would make equally-shaped towers of
  different depth look inequivalent for bookkeeping reasons alone.  The
  bottom level is never exempt, which keeps 0-shift equivalences exactly
  the level-respecting bijections.

The oracle search_equivalence is exhaustive: if any equivalence with
constant shifts <= s exists, one exists of the form
graph(f) union graph(g)^-1 for single-valued selections f, g (a subset of
an equivalence keeps totality and surjectivity witnesses by construction
and only shrinks oscillations), and the backtracking enumerates exactly
those.  Every returned witness is rechecked by check_equivalence.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .balleans import EntourageChain, Tower

DEFAULT_SEARCH_CAP = 10_000_000
PAIR_UNIVERSE_LIMIT = 4096


class SearchCapExceeded(RuntimeError):
    """The oracle hit its node budget before deciding either way."""

    def __init__(self, cap: int):
        super().__init__(f"equivalence search exceeded {cap} nodes")
        self.cap = cap


def search_cap() -> int:
    return int(os.environ.get("COARSEKIT_SEARCH_CAP", DEFAULT_SEARCH_CAP))


class MultiMap:
    """A relation between the points of two chains."""

    def __init__(self, source: EntourageChain, target: EntourageChain, pairs: Iterable):
        self.source = source
        self.target = target
        pairs = frozenset((int(x), int(y)) for x, y in pairs)
        for x, y in pairs:
            if not 0 <= x < source.n:
                raise ValueError(f"source point {x} out of range")
            if not 0 <= y < target.n:
                raise ValueError(f"target point {y} out of range")
        self.pairs = pairs
        self._matrix = None

    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            m = np.zeros((self.source.n, self.target.n), dtype=bool)
            for x, y in self.pairs:
                m[x, y] = True
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    def image(self, x: int) -> frozenset:
        return frozenset(y for (a, y) in self.pairs if a == x)

    def is_total(self) -> bool:
        return {x for x, _ in self.pairs} == set(range(self.source.n))

    def is_surjective(self) -> bool:
        return {y for _, y in self.pairs} == set(range(self.target.n))

    def __eq__(self, other):
        if not isinstance(other, MultiMap):
            return NotImplemented
        return (
            self.pairs == other.pairs
            and self.source == other.source
            and self.target == other.target
        )

    def __repr__(self):
        return f"<MultiMap {self.source.n}->{self.target.n} pairs={len(self.pairs)}>"


def identity_map(chain: EntourageChain) -> MultiMap:
    return MultiMap(chain, chain, ((x, x) for x in range(chain.n)))


def inverse(phi: MultiMap) -> MultiMap:
    return MultiMap(phi.target, phi.source, ((y, x) for x, y in phi.pairs))


def compose(psi: MultiMap, phi: MultiMap) -> MultiMap:
    """Relational composition: first phi, then psi."""
    if phi.target != psi.source:
        raise ValueError("compose needs phi's target to equal psi's source")
    by_mid: dict = {}
    for y, z in psi.pairs:
        by_mid.setdefault(y, []).append(z)
    pairs = {(x, z) for x, y in phi.pairs for z in by_mid.get(y, ())}
    return MultiMap(phi.source, psi.target, pairs)


class ShiftFn:
    """A monotone table: source level index -> target level index."""

    def __init__(self, table: Iterable[int], target_k: int):
        self.table = tuple(int(v) for v in table)
        self.target_k = int(target_k)
        if not self.table:
            raise ValueError("shift table must cover level 0")
        for v in self.table:
            if not 0 <= v <= self.target_k:
                raise ValueError(f"shift value {v} outside target levels 0..{self.target_k}")
        if any(a > b for a, b in zip(self.table, self.table[1:])):
            raise ValueError("shift table must be monotone non-decreasing")

    @staticmethod
    def constant(s: int, source_k: int, target_k: int) -> "ShiftFn":
        """The canonical family: level a -> min(a + s, target_k), top -> top."""
        if s < 0:
            raise ValueError("shift must be non-negative")
        if source_k == 0:
            return ShiftFn([min(s, target_k)], target_k)
        table = [min(a + s, target_k) for a in range(source_k)] + [target_k]
        return ShiftFn(table, target_k)

    @staticmethod
    def identity(source_k: int, target_k: int) -> "ShiftFn":
        return ShiftFn.constant(0, source_k, target_k)

    def __call__(self, alpha: int) -> int:
        return self.table[alpha]

    def __eq__(self, other):
        return (
            isinstance(other, ShiftFn)
            and self.table == other.table
            and self.target_k == other.target_k
        )

    def __repr__(self):
        return f"ShiftFn({list(self.table)})"


def oscillation(phi: MultiMap, alpha: int) -> np.ndarray:
    """All pairs Phi(x) x Phi(x') over (x, x') in the source level-alpha
    entourage, as a boolean relation on the target."""
    p = phi.matrix().astype(np.uint8)
    e = phi.source.level(alpha).astype(np.uint8)
    return (p.T @ e @ p) > 0


@dataclass(frozen=True)
class CoarseReport:
    ok: bool
    fail_level: Optional[int]
    witness: Optional[tuple]

    def __str__(self):
        if self.ok:
            return "coarse"
        return f"oscillation escapes at level {self.fail_level}, witness {self.witness}"


def check_coarse(phi: MultiMap, shift: ShiftFn) -> CoarseReport:
    """Does every oscillation fit in the shifted target level?  On failure,
    the least bad source level and one escaping pair."""
    if len(shift.table) != phi.source.num_levels or shift.target_k != phi.target.k:
        raise ValueError("shift table does not match the chains")
    for alpha in range(phi.source.num_levels):
        osc = oscillation(phi, alpha)
        tgt = phi.target.level(shift(alpha))
        bad = osc & ~tgt
        if bad.any():
            u, v = np.argwhere(bad)[0]
            return CoarseReport(False, alpha, (int(u), int(v)))
    return CoarseReport(True, None, None)


def _constrained_levels(k: int) -> range:
    # every proper level plus the bottom; the top is exempt unless it is
    # also the bottom (see module docstring)
    return range(max(k, 1))


def _min_constant_shift_from(oscs, tgt: EntourageChain) -> int:
    s = 0
    j = 0
    for alpha, osc in enumerate(oscs):
        while j <= tgt.k and (osc & ~tgt.level(j)).any():
            j += 1
        if j > tgt.k:
            raise ValueError("oscillation escapes even the top level; invalid target chain")
        s = max(s, j - alpha)
    return s


def _min_constant_shift(phi: MultiMap) -> int:
    """Least s such that the constant-s table makes phi coarse."""
    oscs = [oscillation(phi, a) for a in _constrained_levels(phi.source.k)]
    return _min_constant_shift_from(oscs, phi.target)


@dataclass(frozen=True)
class EquivalenceReport:
    total: bool
    surjective: bool
    fwd: Optional[CoarseReport]
    bwd: Optional[CoarseReport]
    s: Optional[int]
    t: Optional[int]
    passed: bool

    def __str__(self):
        if self.passed:
            return f"pass s={self.s} t={self.t}"
        bits = []
        if not self.total:
            bits.append("not total")
        if not self.surjective:
            bits.append("not surjective")
        if self.fwd is not None and not self.fwd.ok:
            bits.append(f"forward: {self.fwd}")
        if self.bwd is not None and not self.bwd.ok:
            bits.append(f"backward: {self.bwd}")
        return "fail: " + "; ".join(bits)


def check_equivalence(
    phi: MultiMap, fwd: Optional[ShiftFn] = None, bwd: Optional[ShiftFn] = None
) -> EquivalenceReport:
    """Totality, surjectivity, and coarseness of the map and its inverse.

    When tables are given, coarseness is checked against them; the report
    always carries the least constant shifts (s, t) that suffice, or None
    for them when the map is not total/surjective (oscillations of an
    empty fiber say nothing useful).
    """
    total = phi.is_total()
    surjective = phi.is_surjective()
    inv = inverse(phi)

    def coarse_from(oscs, table: ShiftFn, tgt) -> CoarseReport:
        for alpha, osc in enumerate(oscs):
            bad = osc & ~tgt.level(table(alpha))
            if bad.any():
                u, v = np.argwhere(bad)[0]
                return CoarseReport(False, alpha, (int(u), int(v)))
        return CoarseReport(True, None, None)

    oscs_fwd = [oscillation(phi, a) for a in range(phi.source.num_levels)]
    oscs_bwd = [oscillation(inv, a) for a in range(phi.target.num_levels)]
    fwd_rep = bwd_rep = None
    if fwd is not None:
        if len(fwd.table) != phi.source.num_levels or fwd.target_k != phi.target.k:
            raise ValueError("forward shift table does not match the chains")
        fwd_rep = coarse_from(oscs_fwd, fwd, phi.target)
    if bwd is not None:
        if len(bwd.table) != phi.target.num_levels or bwd.target_k != phi.source.k:
            raise ValueError("backward shift table does not match the chains")
        bwd_rep = coarse_from(oscs_bwd, bwd, phi.source)
    s = t = None
    if total and surjective:
        s = _min_constant_shift_from(oscs_fwd[: max(phi.source.k, 1)], phi.target)
        t = _min_constant_shift_from(oscs_bwd[: max(phi.target.k, 1)], phi.source)
    passed = (
        total
        and surjective
        and (fwd_rep.ok if fwd_rep is not None else True)
        and (bwd_rep.ok if bwd_rep is not None else True)
    )
    return EquivalenceReport(total, surjective, fwd_rep, bwd_rep, s, t, passed)


# --- the oracle ---------------------------------------------------------------

def _pair_level(chain: EntourageChain) -> np.ndarray:
    if isinstance(chain, Tower):
        return chain.dist_matrix()
    return chain.pair_level_matrix()


@dataclass(frozen=True)
class _SearchContext:
    n: int
    m: int
    compat: tuple      # per pair id, bitmask of compatible pair ids
    pairs_of_x: tuple
    pairs_of_y: tuple


def _build_context(X: EntourageChain, Y: EntourageChain, s: int) -> _SearchContext:
    n, m = X.n, Y.n
    dX = _pair_level(X)
    dY = _pair_level(Y)
    limX = max(X.k, 1)
    limY = max(Y.k, 1)
    pxs = np.repeat(np.arange(n), m)
    pys = np.tile(np.arange(m), n)
    A = dX[np.ix_(pxs, pxs)]
    B = dY[np.ix_(pys, pys)]
    ok = ((A >= limX) | (B <= A + s)) & ((B >= limY) | (A <= B + s))
    compat = tuple(
        int(sum(1 << int(j) for j in np.flatnonzero(row))) for row in ok
    )
    pairs_of_x = tuple(((1 << m) - 1) << (x * m) for x in range(n))
    pairs_of_y = tuple(
        sum(1 << (x * m + y) for x in range(n)) for y in range(m)
    )
    return _SearchContext(n, m, compat, pairs_of_x, pairs_of_y)


_context_cache: dict = {}


def _context(X: EntourageChain, Y: EntourageChain, s: int) -> _SearchContext:
    if isinstance(X, Tower) and isinstance(Y, Tower):
        key = (X, Y, s)
        got = _context_cache.get(key)
        if got is None:
            got = _build_context(X, Y, s)
            if len(_context_cache) > 4096:
                _context_cache.clear()
            _context_cache[key] = got
        return got
    return _build_context(X, Y, s)


def search_equivalence(
    X: EntourageChain,
    Y: EntourageChain,
    max_shift: int,
    *,
    require_pair: Optional[tuple] = None,
    node_cap: Optional[int] = None,
) -> Optional[MultiMap]:
    """Exhaustively search for a coarse equivalence with constant shifts
    <= max_shift in both directions; None is a proof none exists.

    The search runs over selection pairs (see module docstring), choosing
    an image for each source point in order and then a preimage for each
    still-uncovered target point, backtracking on the pairwise shift
    constraints.  The first witness in this order is returned, so results
    are deterministic.  require_pair forces a given (x, y) into the
    relation, which is what the homogeneity oracle needs.
    """
    s = int(max_shift)
    if s < 0:
        raise ValueError("max_shift must be non-negative")
    n, m = X.n, Y.n
    if n * m > PAIR_UNIVERSE_LIMIT:
        raise SearchCapExceeded(PAIR_UNIVERSE_LIMIT)
    # at shift 0 the bottom-level constraints force singleton images and
    # preimages, i.e. a bijection, so unequal sizes settle it immediately
    if s == 0 and n != m:
        return None
    cap = search_cap() if node_cap is None else int(node_cap)
    ctx = _context(X, Y, s)
    compat = ctx.compat
    pairs_of_x = ctx.pairs_of_x
    pairs_of_y = ctx.pairs_of_y
    full_x = (1 << n) - 1
    full_y = (1 << m) - 1
    nodes = 0

    def viable(allowed, cov_x, cov_y):
        pending_x = full_x & ~cov_x
        while pending_x:
            x = (pending_x & -pending_x).bit_length() - 1
            pending_x &= pending_x - 1
            if not allowed & pairs_of_x[x]:
                return False
        pending_y = full_y & ~cov_y
        while pending_y:
            y = (pending_y & -pending_y).bit_length() - 1
            pending_y &= pending_y - 1
            if not allowed & pairs_of_y[y]:
                return False
        return True

    def solve(chosen, allowed, cov_x, cov_y):
        nonlocal nodes
        if cov_x == full_x and cov_y == full_y:
            return chosen
        if cov_x != full_x:
            x = ((cov_x + 1) & ~cov_x).bit_length() - 1  # least uncovered source
            cands = allowed & pairs_of_x[x]
        else:
            y = ((cov_y + 1) & ~cov_y).bit_length() - 1  # least uncovered target
            cands = allowed & pairs_of_y[y]
        while cands:
            nodes += 1
            if nodes > cap:
                raise SearchCapExceeded(cap)
            p = (cands & -cands).bit_length() - 1
            cands &= cands - 1
            px, py = divmod(p, ctx.m)
            new_allowed = allowed & compat[p]
            new_cov_x = cov_x | (1 << px)
            new_cov_y = cov_y | (1 << py)
            if viable(new_allowed, new_cov_x, new_cov_y):
                got = solve(chosen + [p], new_allowed, new_cov_x, new_cov_y)
                if got is not None:
                    return got
        return None

    chosen0: list = []
    allowed0 = (1 << (n * m)) - 1
    cov_x0 = cov_y0 = 0
    if require_pair is not None:
        rx, ry = require_pair
        if not (0 <= rx < n and 0 <= ry < m):
            raise ValueError("require_pair out of range")
        p0 = rx * m + ry
        chosen0 = [p0]
        allowed0 &= compat[p0]
        cov_x0 |= 1 << rx
        cov_y0 |= 1 << ry
        if not viable(allowed0, cov_x0, cov_y0):
            return None
    got = solve(chosen0, allowed0, cov_x0, cov_y0)
    if got is None:
        return None
    return MultiMap(X, Y, (divmod(p, m) for p in got))


def min_shift(X: EntourageChain, Y: EntourageChain, cap: int) -> Optional[int]:
    """Least s <= cap at which search_equivalence succeeds, else None."""
    for s in range(cap + 1):
        if search_equivalence(X, Y, s) is not None:
            return s
    return None


# --- large-subset form of an equivalence --------------------------------------

@dataclass(frozen=True)
class LargeSubsetWitness:
    """A pair of large subsets with a coarse bijection between them,
    extracted from a multi-map equivalence (the two definitions of coarse
    equivalence agreeing at desk scale)."""

    large_x: tuple
    large_y: tuple
    bijection: tuple           # pairs (x, y), x in large_x, y in large_y
    x_large_level: int
    y_large_level: int
    report: EquivalenceReport  # of the bijection between the subspaces


def equivalence_to_large_subsets(phi: MultiMap) -> LargeSubsetWitness:
    from .balleans import is_large, subspace

    if not (phi.is_total() and phi.is_surjective()):
        raise ValueError("needs a total surjective multi-map")
    f = {x: min(phi.image(x)) for x in range(phi.source.n)}
    large_y = sorted(set(f.values()))
    section = {}
    for x in range(phi.source.n):
        y = f[x]
        if y not in section or x < section[y]:
            section[y] = x
    large_x = sorted(section.values())
    bij = tuple(sorted((section[y], y) for y in large_y))
    lx = is_large(phi.source, large_x)
    ly = is_large(phi.target, large_y)
    sub_x = subspace(phi.source, large_x)
    sub_y = subspace(phi.target, large_y)
    ix = {x: i for i, x in enumerate(large_x)}
    iy = {y: i for i, y in enumerate(large_y)}
    bij_map = MultiMap(sub_x, sub_y, ((ix[x], iy[y]) for x, y in bij))
    rep = check_equivalence(bij_map)
    return LargeSubsetWitness(tuple(large_x), tuple(large_y), bij, lx, ly, rep)


# --- text format ---------------------------------------------------------------

def format_multimap(phi: MultiMap, shifts=()) -> str:
    """The pair list, optionally followed by `shift:` table lines."""
    lines = ["multimap v1"]
    lines.extend(f"pair {x} {y}" for x, y in sorted(phi.pairs))
    for shift in shifts:
        lines.append("shift: " + " ".join(map(str, shift.table)))
    return "\n".join(lines) + "\n"


def parse_multimap(text: str, source: EntourageChain, target: EntourageChain):
    """Read back a multi-map; trailing `shift:` tables, if present, are
    returned alongside it as plain tuples."""
    from .balleans import FormatError, _meaningful_lines

    lines = list(_meaningful_lines(text))
    if not lines or lines[0][1] != "multimap v1":
        raise FormatError("expected header 'multimap v1'", lines[0][0] if lines else 1)
    pairs = []
    shifts = []
    for lineno, line in lines[1:]:
        if line.startswith("shift:"):
            vals = line[len("shift:"):].split()
            if not vals or not all(v.isdigit() for v in vals):
                raise FormatError("expected 'shift: a0 a1 ...'", lineno)
            shifts.append(tuple(int(v) for v in vals))
            continue
        if shifts:
            raise FormatError("pair lines must precede shift tables", lineno)
        parts = line.split()
        if len(parts) != 3 or parts[0] != "pair" or not parts[1].isdigit() or not parts[2].isdigit():
            raise FormatError("expected 'pair x y'", lineno)
        pairs.append((int(parts[1]), int(parts[2])))
    try:
        phi = MultiMap(source, target, pairs)
    except ValueError as e:
        raise FormatError(str(e), lines[-1][0] if len(lines) > 1 else lines[0][0])
    return (phi, tuple(shifts)) if shifts else phi
