"""Ball coordinatization of a cellular tower into a product tower.

Fix a well-order on the points.  Within each level-(alpha+1) class the
level-alpha classes get numbered injectively: the class of the block
minimum is 0, the rest follow by ascending class minimum.  The code of a
point y relative to a basepoint x is then built by the recursion

    f_x(y) = 0                                         if d(x, y) = 0
    f_x(y) = f_{c_a(y)}(y) + n_a(y) * delta_a          otherwise,

where d is the level ultrametric, a = d(x, y) - 1, c_a(y) is the least
element of y's level-a class and delta_a is the unit vector at coordinate
a.  The recursion terminates because d(c_a(y), y) <= a < d(x, y).

The recursion is implemented literally; the closed "truncation law"
(coordinate alpha equals n_alpha(y) below d(x, y) and 0 from there up) is
kept separate as a verification oracle, never as the construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .balleans import Tower, gen_product, spectrum


def _resolve_order(tower: Tower, order: Optional[Sequence[int]]) -> tuple:
    if order is None:
        return tuple(range(tower.n))
    order = tuple(int(p) for p in order)
    if sorted(order) != list(range(tower.n)):
        raise ValueError("order must be a permutation of the points")
    return order


def numbering(tower: Tower, order: Optional[Sequence[int]] = None):
    """Representative and numbering tables.

    Returns (c, nums): c[alpha][y] is the order-least element of y's
    level-alpha class for alpha in 0..k, and nums[alpha][y] numbers the
    level-alpha classes inside y's level-(alpha+1) class for alpha in
    0..k-1, the block minimum's class getting 0 and the rest following by
    ascending class minimum.  Tables are cached on the tower per order.
    """
    if not isinstance(tower, Tower):
        raise TypeError("numbering needs a cellular tower")
    order = _resolve_order(tower, order)
    cached = tower._numbering_cache.get(order)
    if cached is not None:
        return cached
    rank = [0] * tower.n
    for i, p in enumerate(order):
        rank[p] = i
    c = []
    class_min = []  # per level: class id -> order-least member
    for alpha in range(tower.num_levels):
        mins = [min(members, key=rank.__getitem__) for members in tower.classes(alpha)]
        class_min.append(mins)
        c.append(tuple(mins[tower.labels[alpha][y]] for y in range(tower.n)))
    nums = []
    for alpha in range(tower.k):
        kids_by_parent: dict = {}
        for cid, members in enumerate(tower.classes(alpha)):
            kids_by_parent.setdefault(tower.labels[alpha + 1][members[0]], []).append(cid)
        number = [0] * len(tower.classes(alpha))
        for parent, kids in kids_by_parent.items():
            zero_kid = tower.labels[alpha][class_min[alpha + 1][parent]]
            rest = sorted(
                (cid for cid in kids if cid != zero_kid),
                key=lambda cid: rank[class_min[alpha][cid]],
            )
            number[zero_kid] = 0
            for i, cid in enumerate(rest, start=1):
                number[cid] = i
        nums.append(tuple(number[tower.labels[alpha][y]] for y in range(tower.n)))
    got = (tuple(c), tuple(nums))
    tower._numbering_cache[order] = got
    return got


@dataclass(frozen=True)
class CoordMap:
    """A coordinatization: code tables for one tower, basepoint and order,
    landing in the product tower over the max branching spectrum."""

    tower: Tower
    base: int
    order: tuple
    c: tuple             # c[alpha][y], alpha in 0..k
    nums: tuple          # nums[alpha][y], alpha in 0..k-1
    codes: tuple         # codes[y] is a tuple of k coordinates
    kappa_lo: tuple
    kappa_hi: tuple

    @property
    def target(self) -> Tower:
        return gen_product(self.kappa_hi)

    def code(self, y: int) -> tuple:
        return self.codes[y]


def coordinatize(
    tower: Tower, base: Optional[int] = None, order: Optional[Sequence[int]] = None
) -> CoordMap:
    """Run the recursion for every point against the given basepoint
    (default: the order-least point, which makes the code injective)."""
    if not isinstance(tower, Tower):
        raise TypeError("coordinatize needs a cellular tower")
    order = _resolve_order(tower, order)
    if base is None:
        base = order[0]
    base = int(base)
    if not 0 <= base < tower.n:
        raise IndexError("basepoint out of range")
    c, nums = numbering(tower, order)
    d = tower.dist_matrix()
    k = tower.k
    memo: dict = {}

    def code_rel(x: int, y: int) -> tuple:
        if d[x, y] == 0:
            return (0,) * k
        key = (x, y)
        got = memo.get(key)
        if got is not None:
            return got
        a = int(d[x, y]) - 1
        rep = c[a][y]
        vec = list(code_rel(rep, y))
        vec[a] += nums[a][y]
        got = tuple(vec)
        memo[key] = got
        return got

    codes = tuple(code_rel(base, y) for y in range(tower.n))
    spec = spectrum(tower)
    return CoordMap(tower, base, order, c, nums, codes, spec.lo, spec.hi)


@dataclass(frozen=True)
class CoordReport:
    """What verify_coordinatization established.

    truncation_ok: the closed-form law agrees with the recursion.
    forward_ok: entourage-related points share all coordinates from that
        level up (the code map is 0-shift coarse into the product).
    min_base: whether the basepoint is the order-least point; the three
        exactness fields are only checked (non-None) in that case.
    exact_ok: code agreement from level alpha up implies the points share
        their level-alpha class.
    injective: the code table is injective.
    image_lower_ok / image_upper_ok: the image contains the full box over
        the min spectrum and sits inside the box over the max spectrum.
    inverse_shift: largest level-diameter of a code-collision fiber (0 when
        injective), the measured inverse defect for off-minimum basepoints.
    """

    truncation_ok: bool
    forward_ok: bool
    min_base: bool
    exact_ok: Optional[bool]
    injective: Optional[bool]
    image_lower_ok: Optional[bool]
    image_upper_ok: bool
    inverse_shift: int
    failures: tuple

    @property
    def ok(self) -> bool:
        core = self.truncation_ok and self.forward_ok and self.image_upper_ok
        if self.min_base:
            core = core and self.exact_ok and self.injective and self.image_lower_ok
        return core


def verify_coordinatization(cm: CoordMap) -> CoordReport:
    tower = cm.tower
    n, k = tower.n, tower.k
    d = tower.dist_matrix()
    failures = []

    truncation_ok = True
    for y in range(n):
        dist = int(d[cm.base, y])
        want = tuple(cm.nums[a][y] if a < dist else 0 for a in range(k))
        if cm.codes[y] != want:
            truncation_ok = False
            failures.append(f"truncation law fails at point {y}: {cm.codes[y]} vs {want}")
            break

    forward_ok = True
    for x in range(n):
        for y in range(x + 1, n):
            a = int(d[x, y])
            if any(cm.codes[x][b] != cm.codes[y][b] for b in range(a, k)):
                forward_ok = False
                failures.append(f"forward coarseness fails on pair ({x}, {y})")
                break
        if not forward_ok:
            break

    image_upper_ok = all(
        all(0 <= v < s for v, s in zip(code, cm.kappa_hi)) for code in cm.codes
    )
    if not image_upper_ok:
        failures.append("a code escapes the max-spectrum box")

    fibers: dict = {}
    for y, code in enumerate(cm.codes):
        fibers.setdefault(code, []).append(y)
    inverse_shift = 0
    for members in fibers.values():
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                inverse_shift = max(inverse_shift, int(d[a, b]))

    min_base = cm.base == cm.order[0]
    exact_ok = injective = image_lower_ok = None
    if min_base:
        exact_ok = True
        for x in range(n):
            for y in range(x + 1, n):
                a = int(d[x, y])
                agree_from = next(
                    (b for b in range(k + 1) if all(cm.codes[x][c] == cm.codes[y][c] for c in range(b, k))),
                )
                if agree_from != a:
                    exact_ok = False
                    failures.append(
                        f"exact agreement fails on ({x}, {y}): distance {a}, codes agree from {agree_from}"
                    )
                    break
            if not exact_ok:
                break
        injective = len(fibers) == n
        if not injective:
            failures.append("code table is not injective")
        image_lower_ok = True
        lower_box_size = 1
        for v in cm.kappa_lo:
            lower_box_size *= v
        if lower_box_size > n:
            image_lower_ok = False
            failures.append("min-spectrum box larger than the point set")
        else:
            image = set(cm.codes)
            stack = [()]
            for s in cm.kappa_lo:
                stack = [t + (v,) for t in stack for v in range(s)]
            for t in stack:
                if t not in image:
                    image_lower_ok = False
                    failures.append(f"min-spectrum box tuple {t} missing from the image")
                    break
    return CoordReport(
        truncation_ok,
        forward_ok,
        min_base,
        exact_ok,
        injective,
        image_lower_ok,
        image_upper_ok,
        inverse_shift,
        tuple(failures),
    )


# --- text format ----------------------------------------------------------------
#
# coordmap v1
# base 0
# code 0: 0 0
# code 1: 1 0


def format_coordmap(cm: CoordMap) -> str:
    lines = ["coordmap v1", f"base {cm.base}"]
    for y, code in enumerate(cm.codes):
        body = " ".join(str(v) for v in code)
        lines.append(f"code {y}: {body}".rstrip())
    return "\n".join(lines) + "\n"


def parse_coordmap(text: str):
    """Read back a code table as (base, codes); the tower itself is not
    part of the format."""
    from .balleans import FormatError, _meaningful_lines

    lines = list(_meaningful_lines(text))
    if not lines or lines[0][1] != "coordmap v1":
        raise FormatError("expected header 'coordmap v1'", lines[0][0] if lines else 1)
    if len(lines) < 2 or not lines[1][1].startswith("base "):
        raise FormatError("expected 'base x'", lines[1][0] if len(lines) > 1 else lines[0][0])
    base_txt = lines[1][1][len("base "):].strip()
    if not base_txt.isdigit():
        raise FormatError("expected 'base x'", lines[1][0])
    base = int(base_txt)
    codes = {}
    for lineno, line in lines[2:]:
        if not line.startswith("code "):
            raise FormatError("expected 'code y: v0 v1 ...'", lineno)
        head, _, body = line[len("code "):].partition(":")
        if not head.strip().isdigit():
            raise FormatError("expected 'code y: v0 v1 ...'", lineno)
        y = int(head)
        if y in codes:
            raise FormatError(f"duplicate code line for point {y}", lineno)
        vals = body.split()
        if not all(v.isdigit() for v in vals):
            raise FormatError("coordinates must be naturals", lineno)
        codes[y] = tuple(int(v) for v in vals)
    if sorted(codes) != list(range(len(codes))):
        raise FormatError("code lines must cover points 0..n-1", lines[-1][0])
    return base, tuple(codes[y] for y in range(len(codes)))
