"""Spectra interleaving, equivalence certificates, and homogeneity.

Two uniform towers of the same total size can be regrouped, level blocks
on each side, so that the regrouped branching spectra agree level by
level; coordinatizing both regrouped towers onto the common product then
yields a bijection whose shift tables come straight from the block
boundaries.  The certificate records the towers, the multi-map, the shift
tables, a construction transcript and the verified minimal shifts, and can
be re-verified from its serialized body alone.

Homogeneity at shift s has two independent readings kept side by side: the
spectral one (some regrouping with blocks of width at most s+1 is uniform)
and the oracle one (for every ordered pair of points some self-equivalence
within shift s moves one to the other).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .balleans import FormatError, Tower, _meaningful_lines, format_ballean, parse_ballean, spectrum
from .coordinates import coordinatize
from .multimaps import (
    EquivalenceReport,
    MultiMap,
    ShiftFn,
    check_equivalence,
    format_multimap,
    search_equivalence,
)

REGROUP_SEARCH_LIMIT = 4096
HOMOGENEITY_ORACLE_CAP = 24


def regroup(tower: Tower, boundaries: Sequence[int]) -> Tower:
    """Keep only the levels at the given boundary indices.  Boundaries must
    strictly increase from 0 to the top index; spectrum entries multiply
    within each block."""
    if not isinstance(tower, Tower):
        raise TypeError("regroup needs a cellular tower")
    bounds = tuple(int(b) for b in boundaries)
    if not bounds or bounds[0] != 0 or bounds[-1] != tower.k:
        raise ValueError(f"boundaries must run from 0 to {tower.k}")
    if any(a >= b for a, b in zip(bounds, bounds[1:])):
        raise ValueError("boundaries must strictly increase")
    got = tower._regroup_cache.get(bounds)
    if got is None:
        got = Tower([tower.labels[b] for b in bounds])
        tower._regroup_cache[bounds] = got
    return got


def cumulative_products(values: Sequence[int]) -> tuple:
    out = [1]
    for v in values:
        out.append(out[-1] * v)
    return tuple(out)


def interleave(X: Tower, Y: Tower):
    """Block boundaries making two uniform towers' regrouped spectra equal
    level by level, chosen greedily with the earliest possible matches.
    None when the cumulative products end at different totals.  Towers of
    depth 0 can only be aligned with each other."""
    sx, sy = spectrum(X), spectrum(Y)
    if not sx.uniform or not sy.uniform:
        raise ValueError("interleave needs uniform towers; regroup to uniform first")
    cx = cumulative_products(sx.lo)
    cy = cumulative_products(sy.lo)
    if cx[-1] != cy[-1]:
        return None
    if (X.k == 0) != (Y.k == 0):
        return None
    bx, by = [0], [0]
    i = j = 0
    while i < X.k or j < Y.k:
        a = cx[i + 1] if i < X.k else None
        b = cy[j + 1] if j < Y.k else None
        if a is not None and b is not None and a == b:
            i += 1
            j += 1
            bx.append(i)
            by.append(j)
        elif b is None or (a is not None and a < b):
            i += 1
        else:
            j += 1
    if len(bx) > 1:
        # trailing unit-branching levels leave the last match short of the
        # top; both cumulative values there already equal the total
        bx[-1] = X.k
        by[-1] = Y.k
    return tuple(bx), tuple(by)


def uniformizing_regroup(tower: Tower, max_width: Optional[int] = None):
    """The finest regrouping whose spectrum is uniform, optionally with all
    block widths bounded; None when no such regrouping exists."""
    k = tower.k
    interior = list(range(1, k))
    if 2 ** len(interior) > REGROUP_SEARCH_LIMIT:
        raise ValueError("tower too deep for the exhaustive regrouping search")
    for size in range(len(interior), -1, -1):
        for combo in itertools.combinations(interior, size):
            bounds = [0, *combo, k] if k > 0 else [0]
            if max_width is not None and any(
                b - a > max_width for a, b in zip(bounds, bounds[1:])
            ):
                continue
            if spectrum(regroup(tower, bounds)).uniform:
                return tuple(bounds)
    return None


@dataclass(frozen=True)
class Certificate:
    """A serialized coarse-equivalence witness: the two towers, the
    multi-map, monotone shift tables both ways, the construction
    transcript, and the verified minimal constant shifts."""

    x_tower: Tower
    y_tower: Tower
    pairs: tuple
    shift_fwd: tuple
    shift_bwd: tuple
    transcript: tuple
    s: int
    t: int

    def multimap(self) -> MultiMap:
        return MultiMap(self.x_tower, self.y_tower, self.pairs)

    def fwd_shift(self) -> ShiftFn:
        return ShiftFn(self.shift_fwd, self.y_tower.k)

    def bwd_shift(self) -> ShiftFn:
        return ShiftFn(self.shift_bwd, self.x_tower.k)


def _boundary_shift_table(src_bounds, dst_bounds, src_k):
    table = []
    for alpha in range(src_k + 1):
        j = next(i for i, b in enumerate(src_bounds) if b >= alpha)
        table.append(dst_bounds[j])
    return tuple(table)


def build_equivalence(
    X: Tower, Y: Tower, max_shift: Optional[int] = None
) -> Optional[Certificate]:
    """Construct and pre-verify a certificate between two towers, or None.

    Non-uniform towers are first regrouped to uniform (the finest such
    regrouping); the uniformized pair is interleaved onto a common
    spectrum; minimum-basepoint codes of both regrouped towers then match
    bijectively through the common product.  Fails only when the point
    counts differ, or when max_shift is given and the verified shifts
    exceed it.
    """
    if not (isinstance(X, Tower) and isinstance(Y, Tower)):
        raise TypeError("build_equivalence needs cellular towers")
    if X.n != Y.n:
        return None
    transcript = []
    if X.n == 1:
        phi = MultiMap(X, Y, [(0, 0)])
        fwd = tuple(Y.k for _ in range(X.k + 1))
        bwd = tuple(X.k for _ in range(Y.k + 1))
        rep = check_equivalence(phi, ShiftFn(fwd, Y.k), ShiftFn(bwd, X.k))
        transcript.append("single-point towers: trivial pairing")
        return Certificate(X, Y, tuple(sorted(phi.pairs)), fwd, bwd, tuple(transcript), rep.s, rep.t)
    ubx = uniformizing_regroup(X)
    uby = uniformizing_regroup(Y)
    if ubx is None or uby is None:
        return None
    if list(ubx) != list(range(X.k + 1)):
        transcript.append("X uniformized at boundaries " + ",".join(map(str, ubx)))
    if list(uby) != list(range(Y.k + 1)):
        transcript.append("Y uniformized at boundaries " + ",".join(map(str, uby)))
    il = interleave(regroup(X, ubx), regroup(Y, uby))
    if il is None:
        return None
    bx = tuple(ubx[i] for i in il[0])
    by = tuple(uby[j] for j in il[1])
    RX, RY = regroup(X, bx), regroup(Y, by)
    sx, sy = spectrum(RX), spectrum(RY)
    if sx.lo != sy.lo:
        raise AssertionError("interleave produced unequal spectra")
    transcript.append("interleaved boundaries X=" + ",".join(map(str, bx)))
    transcript.append("interleaved boundaries Y=" + ",".join(map(str, by)))
    transcript.append("common spectrum " + ",".join(map(str, sx.lo)))
    cmx = coordinatize(RX)
    cmy = coordinatize(RY)
    transcript.append(f"basepoints X={cmx.base} Y={cmy.base}")
    to_y = {code: y for y, code in enumerate(cmy.codes)}
    if len(to_y) != Y.n:
        raise AssertionError("uniform tower code table is not injective")
    pairs = tuple(sorted((x, to_y[cmx.codes[x]]) for x in range(X.n)))
    fwd = _boundary_shift_table(bx, by, X.k)
    bwd = _boundary_shift_table(by, bx, Y.k)
    phi = MultiMap(X, Y, pairs)
    rep = check_equivalence(phi, ShiftFn(fwd, Y.k), ShiftFn(bwd, X.k))
    if not rep.passed:
        raise AssertionError(f"constructed certificate failed verification: {rep}")
    if max_shift is not None and max(rep.s, rep.t) > max_shift:
        return None
    return Certificate(X, Y, pairs, fwd, bwd, tuple(transcript), rep.s, rep.t)


def point_transitive_map(tower: Tower, x: int, y: int) -> MultiMap:
    """A self-bijection moving x to y on a uniform tower: conjugate a
    coordinatewise transposition through the minimum-basepoint codes.
    Passes check_equivalence with identity shift tables."""
    spec = spectrum(tower)
    if not spec.uniform:
        raise ValueError("point-transitive translations need a uniform tower")
    if not (0 <= x < tower.n and 0 <= y < tower.n):
        raise IndexError("point out of range")
    cm = coordinatize(tower)
    to_point = {code: p for p, code in enumerate(cm.codes)}
    cx, cy = cm.codes[x], cm.codes[y]

    def tau(code):
        out = []
        for a, (v, va, vb) in enumerate(zip(code, cx, cy)):
            if v == va:
                out.append(vb)
            elif v == vb:
                out.append(va)
            else:
                out.append(v)
        return tuple(out)

    pairs = [(z, to_point[tau(code)]) for z, code in enumerate(cm.codes)]
    return MultiMap(tower, tower, pairs)


@dataclass(frozen=True)
class HomogeneityReport:
    """Both verdicts at the checked shift.

    spectral: some regrouping with blocks of width <= shift+1 is uniform;
    when it is, regrouping/bound carry the witness and its implied shift.
    oracle: every unordered pair of points is connected by a
    self-equivalence within the shift (None when skipped by the size cap);
    witnesses/failing_pair carry the evidence.  homogeneous repeats the
    spectral verdict, which is the headline criterion.
    """

    shift: int
    spectral: bool
    regrouping: Optional[tuple]
    bound: Optional[int]
    oracle: Optional[bool]
    oracle_skipped: bool
    failing_pair: Optional[tuple]
    witnesses: dict
    translations: dict

    @property
    def homogeneous(self) -> bool:
        return self.spectral


def is_homogeneous(
    tower: Tower,
    max_shift: Optional[int] = None,
    oracle_cap: int = HOMOGENEITY_ORACLE_CAP,
) -> HomogeneityReport:
    if not isinstance(tower, Tower):
        raise TypeError("is_homogeneous needs a cellular tower")
    shift = max(tower.k - 1, 0) if max_shift is None else int(max_shift)
    bounds = uniformizing_regroup(tower, max_width=shift + 1)
    spectral = bounds is not None
    bound = max((b - a for a, b in zip(bounds, bounds[1:])), default=1) - 1 if spectral else None
    translations: dict = {}
    if spectral:
        reg = regroup(tower, bounds)
        for x in range(min(tower.n, 6)):
            for y in range(x + 1, min(tower.n, 6)):
                phi = point_transitive_map(reg, x, y)
                translations[(x, y)] = MultiMap(tower, tower, phi.pairs)
    oracle = None
    skipped = tower.n > oracle_cap
    failing = None
    witnesses: dict = {}
    if not skipped:
        oracle = True
        for x in range(tower.n):
            for y in range(x + 1, tower.n):
                phi = search_equivalence(tower, tower, shift, require_pair=(x, y))
                if phi is None:
                    oracle = False
                    failing = (x, y)
                    break
                witnesses[(x, y)] = phi
            if not oracle:
                break
    return HomogeneityReport(
        shift, spectral, bounds, bound, oracle, skipped, failing, witnesses, translations
    )


@dataclass(frozen=True)
class CoveringInvariants:
    lo: tuple
    hi: tuple
    uniform: bool
    cumulative: tuple   # prefix products of the min spectrum
    normalized: tuple   # the cumulative values as a sorted set

    def __str__(self):
        u = "uniform" if self.uniform else "non-uniform"
        return (
            f"{u}; lo={self.lo} hi={self.hi}; "
            f"cumulative={self.cumulative}; normalized={self.normalized}"
        )


def covering_invariants(tower: Tower) -> CoveringInvariants:
    spec = spectrum(tower)
    cum = cumulative_products(spec.lo)
    return CoveringInvariants(
        spec.lo, spec.hi, spec.uniform, cum, tuple(sorted(set(cum)))
    )


# --- certificate text format -----------------------------------------------------
#
# certificate v1
# tower X
# <ballean block>
# tower Y
# <ballean block>
# multimap v1
# pair x y ...
# shift-fwd: 0 1 2
# shift-bwd: 0 1 2
# transcript: free text
# verified: pass s=0 t=0


def format_certificate(cert: Certificate) -> str:
    parts = ["certificate v1\n"]
    parts.append("tower X\n")
    parts.append(format_ballean(cert.x_tower))
    parts.append("tower Y\n")
    parts.append(format_ballean(cert.y_tower))
    parts.append(format_multimap(cert.multimap()))
    parts.append("shift-fwd: " + " ".join(map(str, cert.shift_fwd)) + "\n")
    parts.append("shift-bwd: " + " ".join(map(str, cert.shift_bwd)) + "\n")
    for line in cert.transcript:
        parts.append(f"transcript: {line}\n")
    parts.append(f"verified: pass s={cert.s} t={cert.t}\n")
    return "".join(parts)


def _parse_int_list(body: str, lineno: int) -> tuple:
    vals = body.split()
    if not vals or not all(v.isdigit() for v in vals):
        raise FormatError("expected a list of naturals", lineno)
    return tuple(int(v) for v in vals)


def parse_certificate(text: str) -> Certificate:
    raw_lines = text.splitlines()
    lines = list(_meaningful_lines(text))
    if not lines or lines[0][1] != "certificate v1":
        raise FormatError("expected header 'certificate v1'", lines[0][0] if lines else 1)

    def find_marker(marker, start):
        for pos in range(start, len(lines)):
            if lines[pos][1] == marker:
                return pos
        raise FormatError(f"missing '{marker}' section", lines[-1][0])

    ix = find_marker("tower X", 0)
    iy = find_marker("tower Y", ix + 1)
    im = find_marker("multimap v1", iy + 1)

    def slice_text(a, b):
        first = lines[a][0]
        last = lines[b][0] if b < len(lines) else len(raw_lines) + 1
        return "\n".join(raw_lines[first - 1:last - 1]), first - 1

    def parse_tower_block(a, b):
        block, offset = slice_text(a, b)
        try:
            got = parse_ballean(block)
        except FormatError as e:
            raise FormatError(str(e).split(": ", 1)[1], e.line + offset)
        if not isinstance(got, Tower):
            raise FormatError("certificate towers must be cellular", lines[a][0])
        return got

    tx = parse_tower_block(ix + 1, iy)
    ty = parse_tower_block(iy + 1, im)

    pairs = []
    pos = im + 1
    while pos < len(lines) and lines[pos][1].startswith("pair "):
        lineno, line = lines[pos]
        parts = line.split()
        if len(parts) != 3 or not parts[1].isdigit() or not parts[2].isdigit():
            raise FormatError("expected 'pair x y'", lineno)
        pairs.append((int(parts[1]), int(parts[2])))
        pos += 1

    def expect_prefix(prefix):
        nonlocal pos
        if pos >= len(lines) or not lines[pos][1].startswith(prefix):
            at = lines[pos][0] if pos < len(lines) else lines[-1][0]
            raise FormatError(f"expected '{prefix}' line", at)
        lineno, line = lines[pos]
        pos += 1
        return lineno, line[len(prefix):].strip()

    lineno, body = expect_prefix("shift-fwd:")
    fwd = _parse_int_list(body, lineno)
    lineno, body = expect_prefix("shift-bwd:")
    bwd = _parse_int_list(body, lineno)
    transcript = []
    while pos < len(lines) and lines[pos][1].startswith("transcript:"):
        transcript.append(lines[pos][1][len("transcript:"):].strip())
        pos += 1
    lineno, body = expect_prefix("verified: pass")
    parts = body.split()
    if (
        len(parts) != 2
        or not parts[0].startswith("s=")
        or not parts[1].startswith("t=")
        or not parts[0][2:].isdigit()
        or not parts[1][2:].isdigit()
    ):
        raise FormatError("expected 'verified: pass s=N t=N'", lineno)
    s, t = int(parts[0][2:]), int(parts[1][2:])
    if pos != len(lines):
        raise FormatError("unexpected trailing content", lines[pos][0])
    try:
        return Certificate(tx, ty, tuple(sorted(set(pairs))), fwd, bwd, tuple(transcript), s, t)
    except ValueError as e:
        raise FormatError(str(e), lines[im][0])


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: str
    report: Optional[EquivalenceReport]


def verify_certificate(cert) -> VerifyResult:
    """Re-derive pass/fail purely from the certificate body; the embedded
    'verified' line is compared against, never trusted."""
    if isinstance(cert, str):
        cert = parse_certificate(cert)
    try:
        phi = cert.multimap()
        fwd = cert.fwd_shift()
        bwd = cert.bwd_shift()
        if len(cert.shift_fwd) != cert.x_tower.num_levels:
            return VerifyResult(False, "forward shift table does not cover the source levels", None)
        if len(cert.shift_bwd) != cert.y_tower.num_levels:
            return VerifyResult(False, "backward shift table does not cover the source levels", None)
    except ValueError as e:
        return VerifyResult(False, str(e), None)
    rep = check_equivalence(phi, fwd, bwd)
    if not rep.total:
        return VerifyResult(False, "multi-map is not total", rep)
    if not rep.surjective:
        return VerifyResult(False, "multi-map is not surjective", rep)
    if not rep.fwd.ok:
        return VerifyResult(False, f"forward coarseness fails: {rep.fwd}", rep)
    if not rep.bwd.ok:
        return VerifyResult(False, f"backward coarseness fails: {rep.bwd}", rep)
    if (rep.s, rep.t) != (cert.s, cert.t):
        return VerifyResult(
            False,
            f"recomputed shifts s={rep.s} t={rep.t} disagree with the embedded s={cert.s} t={cert.t}",
            rep,
        )
    return VerifyResult(True, f"pass s={rep.s} t={rep.t}", rep)
