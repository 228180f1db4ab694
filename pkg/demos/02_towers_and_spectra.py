"""Finite balleans: interval chains, partition towers, covering spectra.

Run: python demos/02_towers_and_spectra.py
"""

from coarsekit import (
    Tower,
    ball,
    cellular_hull,
    cov,
    covering_invariants,
    format_ballean,
    gen_interval,
    gen_product,
    is_cellular,
    is_large,
    level_dist,
    spectrum,
    validate,
)

print("== an interval chain and its validation ==")
chain = gen_interval(8, [1, 3, 7])
rep = validate(chain)
print(format_ballean(chain))
print(f"report: {rep}")
print("the radius-1 level composed with itself is the radius-2 relation,")
print(f"absorbed by the radius-3 level: j(1) = {rep.absorption[1]}")
print(f"cellular? {is_cellular(chain)}  (radius-1 hops chain up, never closing)")
hull = cellular_hull(chain)
print(f"its cellular hull collapses to {hull.num_levels} levels (diagonal and full)")

print()
print("== a product tower: the finite macro-cube 2 x 2 x 2 ==")
cube = gen_product([2, 2, 2])
print(format_ballean(cube))
for level in range(4):
    print(f"ball(0, level {level}) = {sorted(ball(cube, 0, level))}")
print(f"level distance between 0 and 6: {level_dist(cube, 0, 6)}")
spec = spectrum(cube)
print(f"branching spectrum: lo={spec.lo} hi={spec.hi} uniform={spec.uniform}")
print(f"cov of everything by singletons: {cov(cube, range(8), 0)}")

print()
print("== a lopsided tower is seen by its spectrum ==")
lop = Tower.from_partitions(3, [[[0], [1, 2]]])
print(format_ballean(lop))
print(covering_invariants(lop))

print()
print("== largeness of an arithmetic progression in an interval chain ==")
c = gen_interval(10, [3, 9])
for L in ([0, 4, 8], [0]):
    print(f"L = {L}: large at level {is_large(c, L)}")
print("radius 3 around 0, 4, 8 already covers 0..9, one level below the top")
