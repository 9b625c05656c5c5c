"""Regenerates oracle.json with mpmath at 50 digits.

Parameters are taken as the exact binary64 values the library receives.
"""
import json

import mpmath as mp

mp.mp.dps = 50

THIRD = 1.0 / 3.0
TRIPLES = [
    (1.0, 4.0 / 3.0, 5.0 / 3.0),
    (THIRD, 2.0 * THIRD, 5.0 / 3.0),
    (4.0 / 3.0, 1.0, 5.0 / 3.0),
    (0.5, 0.5, 1.5),
    (-0.75, 2.25, 3.5),
]
XS = [-0.8, 0.1, 0.5, 0.75]


def s(v):
    return mp.nstr(v, 30)


cases = [
    {"a": a, "b": b, "c": c, "x": x, "value": s(mp.hyp2f1(mp.mpf(a), mp.mpf(b), mp.mpf(c), mp.mpf(x)))}
    for (a, b, c) in TRIPLES
    for x in XS
]
g = lambda sig: 1 - mp.mpf(sig) * mp.hyp2f1(1, mp.mpf(4.0 / 3.0), mp.mpf(5.0 / 3.0), 1 - mp.mpf(sig))
out = {
    "c0": s(mp.gamma(mp.mpf(2) / 3) * mp.gamma(mp.mpf(5) / 3) / (2 * mp.gamma(mp.mpf(4) / 3))),
    "gamma_half": s(mp.gamma(mp.mpf(1) / 2)),
    "hyp2f1": cases,
    "g": [{"sigma": v, "value": s(g(v))} for v in [0.5, 1.0 / 9.0, 0.01, 0.9]],
}
with open("oracle.json", "w") as f:
    json.dump(out, f, indent=1)
    f.write("\n")
