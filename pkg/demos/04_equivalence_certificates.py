"""Coarse-equivalence certificates: interleave, construct, verify, tamper.

Run: python demos/04_equivalence_certificates.py
"""

from coarsekit import (
    build_equivalence,
    check_equivalence,
    format_certificate,
    gen_product,
    interleave,
    min_shift,
    search_equivalence,
    verify_certificate,
)

x = gen_product([2, 2, 2, 2])
y = gen_product([4, 4])

print("== interleaving two uniform towers onto a common spectrum ==")
bx, by = interleave(x, y)
print(f"boundaries: X at {bx}, Y at {by}; both regroup to spectrum (4, 4)")

print()
print("== the certificate ==")
cert = build_equivalence(x, y)
print(format_certificate(cert))
print(f"verified minimal shifts: forward {cert.s}, backward {cert.t}")
print("(the backward table jumps by a whole block: Y level 1 lands at X level 2)")

print()
print("== independent re-verification and tamper detection ==")
text = format_certificate(cert)
print(f"re-verify from the body alone: {verify_certificate(text).reason}")
lines = text.splitlines()
drop = next(i for i, l in enumerate(lines) if l.startswith("pair "))
tampered = "\n".join(lines[:drop] + lines[drop + 1:]) + "\n"
res = verify_certificate(tampered)
print(f"after deleting one pair: ok={res.ok} ({res.reason})")

print()
print("== the oracle agrees with the construction ==")
a, b = gen_product([2, 2]), gen_product([4, 1])
print(f"min_shift between (2,2) and (4,1): {min_shift(a, b, 3)}")
phi = search_equivalence(a, b, 1)
rep = check_equivalence(phi)
print(f"oracle witness at shift 1 verifies with s={rep.s}, t={rep.t}")
print(f"and (2,2) against (3,3) is refused outright at shift 0: "
      f"{search_equivalence(a, gen_product([3, 3]), 0)}")
