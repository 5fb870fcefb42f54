"""Generator spec strings such as ``rr:n=500,d=22,seed=7`` or ``blowup:c5,k=100``.

Grammar (case-insensitive)::

    petersen | cN | pN | kN | kAxB | emptyN | starN | paleyQ
    rr:n=N,d=D,seed=S      gnp:n=N,p=P,seed=S      turan:n=N,r=R
    blowup:BASE,k=K        complement:BASE
"""

from __future__ import annotations

import re
from pathlib import Path

from . import graph as g
from .errors import GuardError

_SIMPLE = [
    (re.compile(r"k(\d+)x(\d+)"), lambda a, b: g.complete_bipartite(int(a), int(b))),
    (re.compile(r"k(\d+)"), lambda n: g.complete(int(n))),
    (re.compile(r"c(\d+)"), lambda n: g.cycle(int(n))),
    (re.compile(r"p(\d+)"), lambda n: g.path(int(n))),
    (re.compile(r"empty(\d+)"), lambda n: g.empty(int(n))),
    (re.compile(r"star(\d+)"), lambda n: g.star(int(n))),
    (re.compile(r"paley(\d+)"), lambda q: g.paley(int(q))),
]


def _keywords(text: str, required: tuple, spec: str) -> dict:
    out = {}
    for item in filter(None, text.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise GuardError(f"expected key=value in {spec!r}, got {item!r}")
        out[key.strip()] = value.strip()
    missing = [k for k in required if k not in out]
    extra = [k for k in out if k not in required]
    if missing or extra:
        raise GuardError(f"{spec!r}: need keys {list(required)}, missing {missing}, unexpected {extra}")
    return out


def _int(value: str, spec: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise GuardError(f"{spec!r}: {value!r} is not an integer") from None


def parse_graph_spec(spec: str):
    text = spec.strip().lower()
    if text == "petersen":
        return g.petersen()
    for pattern, build in _SIMPLE:
        match = pattern.fullmatch(text)
        if match:
            return build(*match.groups())
    family, sep, rest = text.partition(":")
    if not sep:
        raise GuardError(f"unknown graph spec {spec!r}")
    if family == "rr":
        kw = _keywords(rest, ("n", "d", "seed"), spec)
        return g.gen_random_regular(_int(kw["n"], spec), _int(kw["d"], spec), _int(kw["seed"], spec))
    if family == "gnp":
        kw = _keywords(rest, ("n", "p", "seed"), spec)
        try:
            p = float(kw["p"])
        except ValueError:
            raise GuardError(f"{spec!r}: p={kw['p']!r} is not a number") from None
        return g.gen_gnp(_int(kw["n"], spec), p, _int(kw["seed"], spec))
    if family == "turan":
        kw = _keywords(rest, ("n", "r"), spec)
        return g.turan(_int(kw["n"], spec), _int(kw["r"], spec))
    if family == "blowup":
        base, _, tail = rest.partition(",")
        kw = _keywords(tail, ("k",), spec)
        return g.gen_blowup(parse_graph_spec(base), _int(kw["k"], spec))
    if family == "complement":
        return parse_graph_spec(rest).complement()
    raise GuardError(f"unknown generator family {family!r} in {spec!r}")


def load_graph(source: str):
    """An edge-list file if ``source`` names one, otherwise a generator spec."""
    path = Path(source)
    if path.is_file():
        return g.from_edge_list(path.read_text(), name=path.stem)
    return parse_graph_spec(source)
