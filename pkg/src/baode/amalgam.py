"""Superamalgamation through the pullback of dual frames.

Given embeddings ``f: A -> B`` and ``h: A -> C``, dualise them to frame maps
``f_+: B_+ -> A_+`` and ``h_+: C_+ -> A_+``, take the pullback frame
``INSEP = {(x, y) : f_+(x) == h_+(y)}`` and use its complex algebra ``D`` as
the amalgam.  ``B`` and ``C`` embed by ``g(b) = {(x, y) : x <= b}`` and
``k(c) = {(x, y) : y <= c}``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .bao import Morphism
from .errors import MorphismError
from .frames import Insep, complex_algebra, dual_morphism, insep
from .schema import Schema, check_schema, default_positive_schema


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    """Named pass/fail checks with witnesses for the failures."""

    checks: list = field(default_factory=list)
    failing_pairs: list = field(default_factory=list)
    strong: bool = None

    def add(self, name, passed, detail=""):
        self.checks.append(Check(name, bool(passed), detail))

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def summary(self):
        lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}" + (f": {c.detail}" if c.detail else "") for c in self.checks]
        return "\n".join(lines)

    def as_dict(self):
        return {
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
            "failing_pairs": [list(p) for p in self.failing_pairs],
            "strong_amalgamation": self.strong,
        }


class AmalgamationInstance:
    """Two embeddings of a common base algebra, with the schema they are taken over."""

    def __init__(self, f, h, schema=None, small_dim=None, validate=True):
        self.f = f
        self.h = h
        self.schema = default_positive_schema() if schema is None else schema
        self.small_dim = small_dim
        if validate:
            self.validate()

    @property
    def base(self):
        return self.f.source

    @property
    def left(self):
        return self.f.target

    @property
    def right(self):
        return self.h.target

    def validate(self):
        if not (self.f.source is self.h.source or self.f.source == self.h.source):
            raise MorphismError("f and h must share their source algebra")
        for name, m in (("f", self.f), ("h", self.h)):
            fails = m.homomorphism_failures(limit=1)
            if fails:
                raise MorphismError(f"{name} is not a homomorphism (fails at {fails[0][0]})")
            if not m.is_injective():
                raise MorphismError(f"{name} is not injective")
        if isinstance(self.schema, Schema):
            for name, alg in (("base", self.base), ("left", self.left), ("right", self.right)):
                rep = check_schema(alg, self.schema, self.small_dim, stop_at_first=True)
                if not rep.valid:
                    inst, _ = rep.failures()[0]
                    raise MorphismError(f"{name} algebra violates schema equation {inst.label}")


@dataclass
class SupapCertificate:
    amalgam: object
    g: Morphism
    k: Morphism
    pullback: Insep
    report: Report


def _tables(m):
    return K.additive_table(m.atom_images)


def _leq(x, y):
    return (x & ~y) == 0


def superamalgamate(inst):
    """Build the amalgam and a certificate whose report covers every required check."""
    B, C = inst.left, inst.right
    fp = dual_morphism(inst.f)
    hp = dual_morphism(inst.h)
    pb = insep(fp, hp)
    D = complex_algebra(pb.frame, name="amalgam")
    pts = pb.frame.labels
    g_img = np.zeros(B.n, dtype=np.int64)
    k_img = np.zeros(C.n, dtype=np.int64)
    for p, (x, y) in enumerate(pts):
        g_img[x] |= 1 << p
        k_img[y] |= 1 << p
    g = Morphism(B, D, g_img)
    k = Morphism(C, D, k_img)
    report = Report()
    report.add("zigzag", pb.zigzag, "" if pb.zigzag else "pullback projections are not onto")
    report.add("pullback-commutes", pb.commutes)
    _morphism_checks(report, inst, g, k)
    _schema_check(report, inst, D)
    _interpolation_checks(report, inst, g, k)
    return SupapCertificate(D, g, k, pb, report)


def _schema_check(report, inst, D):
    if not isinstance(inst.schema, Schema):
        report.add("schema", True, "no schema")
        return
    rep = check_schema(D, inst.schema, inst.small_dim)
    bad = [f"{i.label} at {r.counterexample}" for i, r in rep.failures()]
    report.add("schema", not bad, "; ".join(bad[:5]))


def _morphism_checks(report, inst, g, k):
    for name, m in (("g", g), ("k", k)):
        fails = m.homomorphism_failures(limit=3)
        report.add(f"{name}-homomorphism", not fails, ", ".join(f"{op}@{x}" for op, x in fails))
        report.add(f"{name}-injective", m.is_injective())
    gf = _tables(g)[_tables(inst.f)]
    kh = _tables(k)[_tables(inst.h)]
    bad = np.nonzero(gf != kh)[0]
    report.add("commuting-square", not len(bad), f"g(f(a)) != k(h(a)) at a={int(bad[0])}" if len(bad) else "")


def _interpolation_checks(report, inst, g, k):
    B, C = inst.left, inst.right
    fa = _tables(inst.f)
    ha = _tables(inst.h)
    bs = B.elements()
    cs = C.elements()
    gb = _tables(g)
    kc = _tables(k)
    below = _leq(gb[:, None], kc[None, :])
    # exists a with b <= f(a) and h(a) <= c, by brute force over A
    up = _leq(bs[:, None], fa[None, :]).astype(np.int64)
    down = _leq(ha[:, None], cs[None, :]).astype(np.int64)
    has_interp = (up @ down) > 0
    bad = np.argwhere(below & ~has_interp)
    report.failing_pairs = [(int(b), int(c)) for b, c in bad]
    detail = ""
    if len(bad):
        b, c = bad[0]
        detail = f"{len(bad)} pairs, first b={int(b)} c={int(c)}: g(b) <= k(c) but no a in A has b <= f(a), h(a) <= c"
    report.add("interpolation", not len(bad), detail)
    # strong amalgamation: g[B] and k[C] meet only inside g f [A]
    common = set(gb.tolist()) & set(kc.tolist())
    base_img = set(gb[fa].tolist())
    report.strong = common <= base_img


def verify_supap(inst, cert):
    """Re-check a certificate from scratch: morphisms, commuting square and every ``(b, c)`` pair."""
    report = Report()
    report.add("amalgam-source", cert.g.target is cert.amalgam and cert.k.target is cert.amalgam)
    _morphism_checks(report, inst, cert.g, cert.k)
    _schema_check(report, inst, cert.amalgam)
    _interpolation_checks(report, inst, cert.g, cert.k)
    return report


def find_interpolant(inst, b, c):
    """The least ``a`` (by size, then index) with ``b <= f(a)`` and ``h(a) <= c``, or ``None``."""
    xs = inst.base.elements()
    fa = inst.f.apply(xs)
    ha = inst.h.apply(xs)
    ok = _leq(int(b), fa) & _leq(ha, int(c))
    cands = xs[ok]
    if not len(cands):
        return None
    order = np.lexsort((cands, K.popcount(cands)))
    return int(cands[order[0]])


def least_interpolant(inst, b, c):
    """Closed form: the least ``a`` above ``b`` in the image of ``f`` interpolates iff anything does."""
    from .bao import upper_bound_in

    a = upper_bound_in(inst.f, b)
    return a if inst.h(a) & ~int(c) == 0 else None
