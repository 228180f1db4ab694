"""Ordinal arithmetic below epsilon_0, and what it says about interval
balleans over an ordinal.

Run: python demos/01_ordinal_arithmetic.py
"""

from coarsekit import (
    cardinal_tail,
    classify_cardinal_ballean,
    cofinality_class,
    format_ordinal,
    is_additively_indecomposable,
    ord_add,
    ord_mul,
    parse_ordinal,
    tail,
)

w = parse_ordinal("w")

print("== Cantor normal form arithmetic ==")
for expr in ["1 + w", "w + 1", "w^2*3 + w + 4", "(w+1) times w is computed below"]:
    if expr.startswith("("):
        product = ord_mul(ord_add(w, parse_ordinal("1")), w)
        print(f"(w + 1) * w            = {format_ordinal(product)}")
        continue
    print(f"{expr:<22} = {format_ordinal(parse_ordinal(expr))}")

print(f"2 * w                  = {format_ordinal(ord_mul(parse_ordinal('2'), w))}")
print(f"w * 2                  = {format_ordinal(ord_mul(w, parse_ordinal('2')))}")

print()
print("== tails and cardinal tails ==")
for text in ["w + 5", "w*2", "w^2 + w", "w^(w)"]:
    g = parse_ordinal(text)
    print(
        f"gamma = {text:<8} tail = {format_ordinal(tail(g)):<8} "
        f"cardinal tail = {cardinal_tail(g)}  cofinality class = {cofinality_class(g)}"
    )

print()
print("== the interval-ballean dichotomy over indecomposable ordinals ==")
print("gamma must be a power of w for the interval chain to absorb compositions:")
for text in ["w", "w^2", "w^3", "w^(w)", "w^(w + 1)", "w^(w*2)"]:
    g = parse_ordinal(text)
    assert is_additively_indecomposable(g)
    print(f"  gamma = {text:<10} -> {classify_cardinal_ballean(g)}")
print("w^(w) is the first place the macro-cube side appears: no beta solves")
print("beta * w = w^(w), because beta * w is always a successor power of w.")
