"""Finite balleans as nested chains of entourages.

A chain on points 0..n-1 is a sequence of reflexive symmetric relations
eps_0 <= eps_1 <= ... <= eps_k with eps_0 the diagonal and eps_k the full
relation; the index of a level plays the role of a radius.  When every
level is an equivalence relation the chain is cellular and is stored as a
Tower: a sequence of partitions, each coarsening the previous, running from
singletons up to a single block.

All values are immutable after construction and every operation here is
pure, so concurrent use needs no coordination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

#: general chains larger than this get a greedy upper bound from cov()
#: instead of the exact branch-and-bound set cover
EXACT_COVER_LIMIT = 24


class FormatError(ValueError):
    """Malformed text input; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _as_bool_matrix(m, n):
    a = np.asarray(m, dtype=bool)
    if a.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} relation, got shape {a.shape}")
    return a


class EntourageChain:
    """A finite ballean: point count plus the nested levels as boolean
    relation matrices.  The constructor only checks shapes; semantic
    invariants are the business of validate()."""

    def __init__(self, levels: Sequence):
        levels = list(levels)
        if not levels:
            raise ValueError("a chain needs at least one level")
        n = np.asarray(levels[0], dtype=bool).shape[0]
        self.n = int(n)
        self._levels = tuple(_as_bool_matrix(m, self.n) for m in levels)
        for m in self._levels:
            m.setflags(write=False)

    @property
    def k(self) -> int:
        """Index of the top level."""
        return len(self._levels) - 1

    @property
    def num_levels(self) -> int:
        return len(self._levels)

    def level(self, i: int) -> np.ndarray:
        if not 0 <= i <= self.k:
            raise IndexError(f"level {i} out of range 0..{self.k}")
        return self._levels[i]

    def levels(self):
        return self._levels

    def is_tower(self) -> bool:
        return isinstance(self, Tower)

    def __eq__(self, other):
        if not isinstance(other, EntourageChain):
            return NotImplemented
        return (
            self.n == other.n
            and self.num_levels == other.num_levels
            and all(np.array_equal(a, b) for a, b in zip(self.levels(), other.levels()))
        )

    def __repr__(self):
        return f"<EntourageChain n={self.n} levels=0..{self.k}>"

    def pair_level_matrix(self) -> np.ndarray:
        """For each pair (x, y) the least level whose entourage contains it;
        k+1 where no level does (possible only for invalid chains)."""
        out = np.full((self.n, self.n), self.k + 1, dtype=np.int64)
        for i in range(self.k, -1, -1):
            out[self.level(i)] = i
        return out


class Tower(EntourageChain):
    """A cellular chain stored as a partition chain.

    labels[i][x] is the id of the level-i class containing x, with ids
    numbered by first occurrence.  Level 0 is the singleton partition and
    the top level is one block; consecutive levels may coincide.
    """

    def __init__(self, labels: Sequence[Sequence[int]]):
        labels = [tuple(int(v) for v in row) for row in labels]
        if not labels:
            raise ValueError("a tower needs at least one level")
        n = len(labels[0])
        if n < 1:
            raise ValueError("a tower needs at least one point")
        if any(len(row) != n for row in labels):
            raise ValueError("all levels must label the same points")
        labels = [_canonical_labels(row) for row in labels]
        if labels[0] != tuple(range(n)):
            raise ValueError("level 0 must be the singleton partition")
        if any(v != 0 for v in labels[-1]):
            raise ValueError("the top level must be a single block")
        for i in range(len(labels) - 1):
            parent = {}
            for x in range(n):
                got = parent.setdefault(labels[i][x], labels[i + 1][x])
                if got != labels[i + 1][x]:
                    raise ValueError(
                        f"level {i} does not refine level {i + 1} (class split at point {x})"
                    )
        self.n = n
        self.labels = tuple(labels)
        self._level_cache: dict = {}
        self._classes_cache: dict = {}
        self._numbering_cache: dict = {}
        self._regroup_cache: dict = {}
        self._spectrum_cache = None
        self._dist: Optional[np.ndarray] = None
        self._hash = hash(self.labels)

    @staticmethod
    def from_partitions(n: int, partitions: Sequence[Iterable[Iterable[int]]]) -> "Tower":
        """Build from the intermediate partitions only; singletons and the
        one-block top are appended automatically."""
        labels = [list(range(n))]
        for cells in partitions:
            row = [-1] * n
            for ci, cell in enumerate(cells):
                for x in cell:
                    if not 0 <= x < n:
                        raise ValueError(f"point {x} out of range")
                    if row[x] != -1:
                        raise ValueError(f"point {x} listed twice")
                    row[x] = ci
            if -1 in row:
                raise ValueError(f"point {row.index(-1)} missing from a partition")
            labels.append(row)
        labels.append([0] * n)
        if n == 1 and len(labels) == 2 and not partitions:
            labels = [[0]]
        return Tower(labels)

    @property
    def k(self) -> int:
        return len(self.labels) - 1

    @property
    def num_levels(self) -> int:
        return len(self.labels)

    def level(self, i: int) -> np.ndarray:
        if not 0 <= i <= self.k:
            raise IndexError(f"level {i} out of range 0..{self.k}")
        m = self._level_cache.get(i)
        if m is None:
            row = np.asarray(self.labels[i])
            m = row[:, None] == row[None, :]
            m.setflags(write=False)
            self._level_cache[i] = m
        return m

    def levels(self):
        return tuple(self.level(i) for i in range(self.num_levels))

    def classes(self, i: int):
        """The level-i classes as tuples of points, ordered by minimum."""
        got = self._classes_cache.get(i)
        if got is None:
            cells: dict = {}
            for x, c in enumerate(self.labels[i]):
                cells.setdefault(c, []).append(x)
            got = tuple(tuple(cells[c]) for c in sorted(cells, key=lambda c: cells[c][0]))
            self._classes_cache[i] = got
        return got

    def class_of(self, i: int, x: int) -> int:
        return self.labels[i][x]

    def dist_matrix(self) -> np.ndarray:
        """level_dist for all pairs at once."""
        if self._dist is None:
            d = np.full((self.n, self.n), self.k, dtype=np.int64)
            for i in range(self.k - 1, -1, -1):
                row = np.asarray(self.labels[i])
                d[row[:, None] == row[None, :]] = i
            d.setflags(write=False)
            self._dist = d
        return self._dist

    def __eq__(self, other):
        if isinstance(other, Tower):
            return self.labels == other.labels
        return super().__eq__(other)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"<Tower n={self.n} levels=0..{self.k}>"


def _canonical_labels(row) -> tuple:
    """Renumber class ids by first occurrence."""
    seen: dict = {}
    out = []
    for v in row:
        out.append(seen.setdefault(v, len(seen)))
    return tuple(out)


# --- constructions -----------------------------------------------------------

def gen_product(sizes: Sequence[int]) -> Tower:
    """The finite asymptotic product: points are tuples in prod(sizes) and
    level j glues tuples agreeing on all coordinates >= j.  The branching
    spectrum equals ``sizes``; all sizes 2 gives the finite macro-cube."""
    sizes = [int(s) for s in sizes]
    if any(s < 1 for s in sizes):
        raise ValueError("all factor sizes must be positive")
    n = 1
    for s in sizes:
        n *= s
    k = len(sizes)
    labels = []
    stride = 1
    for j in range(k + 1):
        labels.append([p // stride for p in range(n)])
        if j < k:
            stride *= sizes[j]
    return Tower(labels)


def product_point_tuple(sizes: Sequence[int], p: int) -> tuple:
    """Decode a gen_product point index into its coordinate tuple
    (coordinate 0 varies fastest)."""
    out = []
    for s in sizes:
        out.append(p % s)
        p //= s
    return tuple(out)


def product_point_index(sizes: Sequence[int], coords: Sequence[int]) -> int:
    p = 0
    stride = 1
    for s, c in zip(sizes, coords):
        if not 0 <= c < s:
            raise ValueError(f"coordinate {c} out of range for factor {s}")
        p += c * stride
        stride *= s
    return p


def gen_interval(n: int, radii: Sequence[int]) -> EntourageChain:
    """The integer interval 0..n-1 with levels |x - y| <= r for each radius,
    the diagonal prepended.  Radii must strictly increase and the last must
    reach n - 1 so the top level is the full relation."""
    if n < 1:
        raise ValueError("need at least one point")
    radii = [int(r) for r in radii]
    if any(r < 1 for r in radii):
        raise ValueError("radii must be positive")
    if any(a >= b for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must strictly increase")
    if not radii or radii[-1] < n - 1:
        raise ValueError(f"last radius must be at least n - 1 = {n - 1}")
    idx = np.arange(n)
    gap = np.abs(idx[:, None] - idx[None, :])
    return EntourageChain([gap == 0] + [gap <= r for r in radii])


# --- validation --------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    issues: tuple
    absorption: tuple

    def __str__(self):
        if self.valid:
            ab = " ".join(f"j({i})={j}" for i, j in enumerate(self.absorption))
            return f"valid ({ab})" if ab else "valid"
        return "invalid: " + "; ".join(self.issues)


def validate(chain: EntourageChain) -> ValidationReport:
    """Check every chain invariant, reporting violations with witnesses, and
    record for each level the least level absorbing its self-composition."""
    issues = []
    n = chain.n
    diag = np.eye(n, dtype=bool)
    for i in range(chain.num_levels):
        m = chain.level(i)
        missing = np.flatnonzero(~m[diag])
        if missing.size:
            issues.append(f"level {i}: not reflexive: missing ({missing[0]}, {missing[0]})")
        asym = np.argwhere(m & ~m.T)
        if asym.size:
            x, y = asym[0]
            issues.append(f"level {i}: not symmetric: contains ({x}, {y}) but not ({y}, {x})")
    for i in range(chain.num_levels - 1):
        extra = np.argwhere(chain.level(i) & ~chain.level(i + 1))
        if extra.size:
            x, y = extra[0]
            issues.append(f"level {i}: not contained in level {i + 1}: pair ({x}, {y})")
    stray = np.argwhere(chain.level(0) & ~diag)
    if stray.size:
        x, y = stray[0]
        issues.append(f"level 0: must be the diagonal: contains ({x}, {y})")
    hole = np.argwhere(~chain.level(chain.k))
    if hole.size:
        x, y = hole[0]
        issues.append(f"level {chain.k}: must be the full relation: missing ({x}, {y})")
    absorption = []
    for i in range(chain.num_levels):
        m = chain.level(i).astype(np.uint8)
        sq = (m @ m) > 0
        j = next(
            (j for j in range(i, chain.num_levels) if not (sq & ~chain.level(j)).any()),
            None,
        )
        if j is None:
            x, y = np.argwhere(sq & ~chain.level(chain.k))[0]
            issues.append(
                f"level {i}: self-composition absorbed by no level: pair ({x}, {y})"
            )
        absorption.append(j)
    return ValidationReport(not issues, tuple(issues), tuple(absorption))


# --- basic operations --------------------------------------------------------

def ball(chain: EntourageChain, x: int, alpha: int) -> frozenset:
    """The set of points within the level-alpha entourage of x; for a tower
    this is the level-alpha class of x."""
    if not 0 <= x < chain.n:
        raise IndexError(f"point {x} out of range 0..{chain.n - 1}")
    if isinstance(chain, Tower):
        if not 0 <= alpha <= chain.k:
            raise IndexError(f"level {alpha} out of range 0..{chain.k}")
        c = chain.labels[alpha][x]
        return frozenset(p for p in range(chain.n) if chain.labels[alpha][p] == c)
    return frozenset(np.flatnonzero(chain.level(alpha)[x]).tolist())


class CovResult(int):
    """A covering number; ``exact`` is False when only the greedy upper
    bound was computed (large non-cellular chains)."""

    exact: bool

    def __new__(cls, value: int, exact: bool = True):
        self = super().__new__(cls, value)
        self.exact = exact
        return self


def cov(chain: EntourageChain, A: Iterable[int], alpha: int) -> CovResult:
    """Least number of level-alpha balls (centers anywhere) covering A.

    Exact for towers (count of classes meeting A) and for general chains
    with at most EXACT_COVER_LIMIT points; beyond that the greedy bound is
    returned with exact=False.
    """
    A = sorted(set(int(a) for a in A))
    if not A:
        raise ValueError("cov of the empty set is undefined")
    if any(not 0 <= a < chain.n for a in A):
        raise IndexError("point out of range")
    if isinstance(chain, Tower):
        if not 0 <= alpha <= chain.k:
            raise IndexError(f"level {alpha} out of range 0..{chain.k}")
        return CovResult(len({chain.labels[alpha][a] for a in A}))
    m = chain.level(alpha)
    pos = {a: i for i, a in enumerate(A)}
    target = (1 << len(A)) - 1
    balls = set()
    for x in range(chain.n):
        mask = 0
        for a in A:
            if m[x, a]:
                mask |= 1 << pos[a]
        if mask:
            balls.add(mask)
    balls = sorted(balls, key=lambda b: -bin(b).count("1"))
    # greedy pass for an upper bound
    covered, greedy = 0, 0
    while covered != target:
        best = max(balls, key=lambda b: bin(b & ~covered).count("1"))
        gain = bin(best & ~covered).count("1")
        if gain == 0:
            raise ValueError("set not coverable at this level (invalid chain)")
        covered |= best
        greedy += 1
    if chain.n > EXACT_COVER_LIMIT:
        return CovResult(greedy, exact=False)
    best_count = greedy

    per_point = [[b for b in balls if b >> i & 1] for i in range(len(A))]

    def dfs(covered: int, used: int):
        nonlocal best_count
        if covered == target:
            best_count = min(best_count, used)
            return
        if used + 1 >= best_count:
            return
        i = min(
            (i for i in range(len(A)) if not covered >> i & 1),
            key=lambda i: len(per_point[i]),
        )
        for b in per_point[i]:
            dfs(covered | b, used + 1)

    dfs(0, 0)
    return CovResult(best_count)


def level_dist(tower: Tower, x: int, y: int) -> int:
    """The least level whose class contains both points; an ultrametric."""
    if not isinstance(tower, Tower):
        raise TypeError("level_dist needs a cellular tower")
    if not (0 <= x < tower.n and 0 <= y < tower.n):
        raise IndexError("point out of range")
    for i in range(tower.num_levels):
        if tower.labels[i][x] == tower.labels[i][y]:
            return i
    raise AssertionError("unreachable: the top level is one block")


@dataclass(frozen=True)
class Spectrum:
    """Per-level branching counts of a tower.

    per_point[alpha][x] counts the level-alpha classes inside the
    level-(alpha+1) class of x; lo and hi are the level minima and maxima
    and uniform says they agree everywhere.
    """

    per_point: tuple
    lo: tuple
    hi: tuple
    uniform: bool


def spectrum(tower: Tower) -> Spectrum:
    if not isinstance(tower, Tower):
        raise TypeError("spectrum needs a cellular tower")
    if tower._spectrum_cache is not None:
        return tower._spectrum_cache
    per_point = []
    for alpha in range(tower.k):
        inner: dict = {}
        for x in range(tower.n):
            inner.setdefault(tower.labels[alpha + 1][x], set()).add(tower.labels[alpha][x])
        counts = {parent: len(kids) for parent, kids in inner.items()}
        per_point.append(tuple(counts[tower.labels[alpha + 1][x]] for x in range(tower.n)))
    lo = tuple(min(row) for row in per_point)
    hi = tuple(max(row) for row in per_point)
    got = Spectrum(tuple(per_point), lo, hi, lo == hi)
    tower._spectrum_cache = got
    return got


# --- cellularity -------------------------------------------------------------

def is_cellular(chain: EntourageChain) -> bool:
    """True iff every level is transitive (an equivalence relation)."""
    if isinstance(chain, Tower):
        return True
    for i in range(chain.num_levels):
        m = chain.level(i)
        sq = (m.astype(np.uint8) @ m.astype(np.uint8)) > 0
        if (sq & ~m).any():
            return False
    return True


def _components_labels(m: np.ndarray) -> list:
    n = m.shape[0]
    labels = [-1] * n
    nxt = 0
    for s in range(n):
        if labels[s] != -1:
            continue
        stack = [s]
        labels[s] = nxt
        while stack:
            x = stack.pop()
            for y in np.flatnonzero(m[x]):
                if labels[y] == -1:
                    labels[y] = nxt
                    stack.append(int(y))
        nxt += 1
    return labels


def cellular_hull(chain: EntourageChain) -> Tower:
    """Replace each level by its transitive closure and renormalize the
    chain (consecutive duplicate levels collapse)."""
    rows = [_canonical_labels(_components_labels(chain.level(i))) for i in range(chain.num_levels)]
    deduped = [rows[0]]
    for row in rows[1:]:
        if row != deduped[-1]:
            deduped.append(row)
    return Tower(deduped)


def normalize(chain: EntourageChain) -> EntourageChain:
    """Drop consecutive duplicate levels; towers stay towers."""
    if isinstance(chain, Tower):
        rows = [chain.labels[0]]
        for row in chain.labels[1:]:
            if row != rows[-1]:
                rows.append(row)
        return Tower(rows)
    kept = [chain.level(0)]
    for i in range(1, chain.num_levels):
        if not np.array_equal(chain.level(i), kept[-1]):
            kept.append(chain.level(i))
    return EntourageChain(kept)


def subspace(chain: EntourageChain, A: Iterable[int]) -> EntourageChain:
    """The induced chain on A (each level restricted to A x A), points
    renumbered in increasing order, then normalized."""
    A = sorted(set(int(a) for a in A))
    if not A:
        raise ValueError("subspace of the empty set is undefined")
    if any(not 0 <= a < chain.n for a in A):
        raise IndexError("point out of range")
    if isinstance(chain, Tower):
        rows = [_canonical_labels([chain.labels[i][a] for a in A]) for i in range(chain.num_levels)]
        deduped = [rows[0]]
        for row in rows[1:]:
            if row != deduped[-1]:
                deduped.append(row)
        return Tower(deduped)
    sel = np.ix_(A, A)
    return normalize(EntourageChain([chain.level(i)[sel] for i in range(chain.num_levels)]))


def is_large(chain: EntourageChain, L: Iterable[int]) -> Optional[int]:
    """The least level alpha with B(L, eps_alpha) = X, or None."""
    L = sorted(set(int(x) for x in L))
    if not L:
        raise ValueError("largeness of the empty set is undefined")
    if any(not 0 <= x < chain.n for x in L):
        raise IndexError("point out of range")
    for alpha in range(chain.num_levels):
        if chain.level(alpha)[L].any(axis=0).all():
            return alpha
    return None


# --- text format -------------------------------------------------------------
#
# ballean v1
# points 8
# levels 3
# level 1 cells: 0 1 | 2 3 | 4 5 | 6 7
# level 2 cells: 0 1 2 3 | 4 5 6 7
#
# Level 0 (singletons) and level K (one cell / full) are implicit.  General
# chains list the off-diagonal pairs of each level instead:
# level 1 pairs: (0,1) (2,5)
# '#' starts a comment.


def format_ballean(chain: EntourageChain) -> str:
    lines = ["ballean v1", f"points {chain.n}", f"levels {chain.k}"]
    if isinstance(chain, Tower):
        for i in range(1, chain.k):
            cells = " | ".join(" ".join(str(p) for p in cell) for cell in chain.classes(i))
            lines.append(f"level {i} cells: {cells}")
    else:
        for i in range(1, chain.k):
            m = chain.level(i)
            pairs = [(x, y) for x in range(chain.n) for y in range(x + 1, chain.n) if m[x, y]]
            body = " ".join(f"({x},{y})" for x, y in pairs)
            lines.append(f"level {i} pairs: {body}".rstrip())
    return "\n".join(lines) + "\n"


def _meaningful_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_ballean(text: str) -> EntourageChain:
    """Parse the ballean text format; returns a Tower when every level is
    an equivalence relation, a general EntourageChain otherwise."""
    lines = list(_meaningful_lines(text))
    if not lines or lines[0][1] != "ballean v1":
        raise FormatError("expected header 'ballean v1'", lines[0][0] if lines else 1)
    header = {}
    for key in ("points", "levels"):
        idx = len(header) + 1
        if idx >= len(lines):
            raise FormatError(f"missing '{key} N' line", lines[-1][0])
        lineno, line = lines[idx]
        parts = line.split()
        if len(parts) != 2 or parts[0] != key or not parts[1].isdigit():
            raise FormatError(f"expected '{key} N'", lineno)
        header[key] = int(parts[1])
    n, k = header["points"], header["levels"]
    if n < 1:
        raise FormatError("points must be at least 1", lines[1][0])
    if k == 0 and n != 1:
        raise FormatError("levels 0 requires points 1", lines[2][0])
    seen: dict = {}
    for lineno, line in lines[3:]:
        if not line.startswith("level "):
            raise FormatError("expected a 'level i cells:'/'level i pairs:' line", lineno)
        rest = line[len("level "):]
        parts = rest.split(None, 1)
        if len(parts) != 2 or not parts[0].isdigit():
            raise FormatError("expected 'level i cells:' or 'level i pairs:'", lineno)
        i = int(parts[0])
        if not 1 <= i <= k - 1:
            raise FormatError(f"level index {i} out of range 1..{k - 1}", lineno)
        if i in seen:
            raise FormatError(f"duplicate level {i}", lineno)
        kind, _, body = parts[1].partition(":")
        kind = kind.strip()
        if kind not in ("cells", "pairs"):
            raise FormatError("level body must be 'cells:' or 'pairs:'", lineno)
        seen[i] = (lineno, kind, body.strip())
    for i in range(1, k):
        if i not in seen:
            raise FormatError(f"missing level {i}", lines[-1][0])

    diag = np.eye(n, dtype=bool)
    mats = [diag]
    level_line = {0: lines[0][0]}
    for i in range(1, k):
        lineno, kind, body = seen[i]
        level_line[i] = lineno
        m = diag.copy()
        if kind == "cells":
            assigned = [False] * n
            for cell_text in body.split("|"):
                cell = []
                for tok in cell_text.split():
                    if not tok.isdigit():
                        raise FormatError(f"bad point {tok!r}", lineno)
                    p = int(tok)
                    if not 0 <= p < n:
                        raise FormatError(f"point {p} out of range 0..{n - 1}", lineno)
                    if assigned[p]:
                        raise FormatError(f"point {p} listed twice", lineno)
                    assigned[p] = True
                    cell.append(p)
                for a in cell:
                    for b in cell:
                        m[a, b] = True
            if not all(assigned):
                raise FormatError(f"point {assigned.index(False)} missing", lineno)
        else:
            for tok in body.split():
                if not (tok.startswith("(") and tok.endswith(")")):
                    raise FormatError(f"bad pair {tok!r}", lineno)
                nums = tok[1:-1].split(",")
                if len(nums) != 2 or not all(s.strip().isdigit() for s in nums):
                    raise FormatError(f"bad pair {tok!r}", lineno)
                a, b = (int(s) for s in nums)
                if a == b:
                    raise FormatError(f"diagonal pair {tok}", lineno)
                if not (0 <= a < n and 0 <= b < n):
                    raise FormatError(f"pair {tok} out of range", lineno)
                m[a, b] = m[b, a] = True
        mats.append(m)
    if k >= 1:
        mats.append(np.ones((n, n), dtype=bool))
    level_line[k] = lines[0][0]
    for i in range(len(mats) - 1):
        if (mats[i] & ~mats[i + 1]).any():
            raise FormatError(
                f"level {i} is not contained in level {i + 1}", level_line.get(i + 1, lines[0][0])
            )
    chain = EntourageChain(mats)
    if is_cellular(chain):
        return Tower([_canonical_labels(_components_labels(m)) for m in mats])
    return chain
