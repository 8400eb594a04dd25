"""Randomized invariant campaigns.

Each property runner takes a ``numpy.random.Generator`` and keyword
parameters and returns a :class:`PropertyResult`.  Results hold no timings,
so a campaign replayed from the same seed yields an identical report.
"""

from dataclasses import dataclass, field

import numpy as np

from .amalgam import AmalgamationInstance, superamalgamate, verify_supap
from .bao import Signature, find_algebra_isomorphism
from .dilation import build_witness_system, cs_dilation, dilated_cylindrifier, verify_well_definedness
from .errors import BaodeError, ParseError
from .frames import (
    FrameMorphism,
    atom_structure,
    complex_algebra,
    dual_map,
    frames_isomorphic,
    insep,
    is_bounded_morphism,
    is_zigzag_product,
)
from .generators import (
    random_boolean_morphism,
    random_frame,
    random_instance,
    random_valid_algebra,
    surjective_bounded_morphism,
)
from .schema import annotated_partition, check_schema, default_positive_schema, default_schema, positive_partition, toolkit_schema

MAX_WITNESSES = 5


@dataclass
class PropertyResult:
    name: str
    params: dict
    trials: int = 0
    failure_count: int = 0
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.failure_count == 0

    def fail(self, witness):
        self.failure_count += 1
        if len(self.failures) < MAX_WITNESSES:
            self.failures.append(witness)

    def count(self, key):
        self.stats[key] = self.stats.get(key, 0) + 1

    def as_dict(self):
        return {
            "property": self.name,
            "params": self.params,
            "trials": self.trials,
            "passed": self.passed,
            "failure_count": self.failure_count,
            "failures": self.failures,
            "stats": dict(sorted(self.stats.items())),
        }


def _sig(params):
    return Signature.full(int(params.get("dim", 2)), bool(params.get("with_diagonals", True)))


def _size(rng, params, key, default):
    hi = int(params.get(key, default))
    return int(rng.integers(1, hi + 1))


# ------------------------------------------------------------------ duality


def duality_roundtrip(rng, trials=100, **params):
    """``At(Cm F)`` is isomorphic to ``F`` and ``Cm(At A)`` to ``A``."""
    res = PropertyResult("duality-roundtrip", params)
    sig = _sig(params)
    for t in range(trials):
        n = _size(rng, params, "max_points", 4)
        F = random_frame(rng, sig, n, float(rng.uniform(0.1, 0.9)))
        res.trials += 1
        if not frames_isomorphic(atom_structure(complex_algebra(F)), F):
            res.fail({"trial": t, "side": "At(Cm F)", "points": n})
        A = complex_algebra(random_frame(rng, sig, n, float(rng.uniform(0.1, 0.9))))
        if find_algebra_isomorphism(complex_algebra(atom_structure(A)), A) is None:
            res.fail({"trial": t, "side": "Cm(At A)", "atoms": n})
    return res


def dual_morphism_equivalence(rng, trials=200, **params):
    """``h`` is a homomorphism exactly when ``h_+`` is a bounded morphism."""
    res = PropertyResult("dual-morphism", params)
    sig = _sig(params)
    for t in range(trials):
        A = complex_algebra(random_frame(rng, sig, _size(rng, params, "max_atoms", 3), float(rng.uniform(0.1, 0.9))))
        h = _random_hom_candidate(rng, A, sig, int(params.get("max_atoms", 3)))
        hom = h.is_homomorphism()
        bounded = is_bounded_morphism(dual_map(h))
        res.trials += 1
        res.count("homomorphism" if hom else "not-homomorphism")
        if hom != bounded:
            res.fail({"trial": t, "homomorphism": hom, "bounded": bounded, "map": [int(v) for v in h.atom_images]})
    return res


def _random_hom_candidate(rng, A, sig, max_atoms):
    """Half the time a genuine homomorphism from a bounded morphism onto ``At A``, else a random Boolean map."""
    from .bao import Morphism
    from .frames import complex_morphism

    if rng.random() < 0.5:
        for _ in range(20):
            p = surjective_bounded_morphism(rng, atom_structure(A), extra=2)
            if p.source.n <= max_atoms:
                m, _, _ = complex_morphism(p)
                # Cm(At A) has the same atoms as A
                return Morphism(A, m.target, m.atom_images)
    B = complex_algebra(random_frame(rng, sig, _size(rng, {"n": max_atoms}, "n", max_atoms), float(rng.uniform(0.1, 0.9))))
    return random_boolean_morphism(rng, A, B, homomorphism_bias=1.0)


# -------------------------------------------------------------------- INSEP


def insep_lemma(rng, trials=200, **params):
    """The pullback of two surjective bounded morphisms is a zigzag product and commutes."""
    res = PropertyResult("insep", params)
    sig = _sig(params)
    cap = int(params.get("max_points", 4))
    for t in range(trials):
        target = random_frame(rng, sig, _size(rng, params, "max_points", 4), float(rng.uniform(0.1, 0.9)))
        f = _bounded_onto(rng, target, cap)
        h = _bounded_onto(rng, target, cap)
        pb = insep(f, h)
        res.trials += 1
        zz = is_zigzag_product(pb.frame, [f.source, h.source])
        pointwise = all(f(pb.left(p)) == h(pb.right(p)) for p in range(pb.frame.n))
        full = len(pb.frame.labels) == sum(1 for x in range(f.source.n) for y in range(h.source.n) if f(x) == h(y))
        if not (zz and pointwise and full):
            res.fail({"trial": t, "zigzag": zz, "commutes": pointwise, "complete": full})
    return res


def _bounded_onto(rng, target, cap):
    for _ in range(20):
        m = surjective_bounded_morphism(rng, target, extra=2)
        if m.source.n <= cap:
            return m
    return FrameMorphism(target, target, tuple(range(target.n)))


# -------------------------------------------------------------- amalgamation


def supap(rng, trials=100, **params):
    """Certificates from :func:`superamalgamate` pass :func:`verify_supap`."""
    res = PropertyResult("supap", params)
    dim = int(params.get("dim", 2))
    schema = default_positive_schema()
    pool = _model_pool(rng, dim, int(params.get("max_atoms", 3)), int(params.get("pool", 40)), schema)
    for t in range(trials):
        f, h = random_instance(rng, pool)
        inst = AmalgamationInstance(f, h, schema)
        cert = superamalgamate(inst)
        rep = verify_supap(inst, cert)
        res.trials += 1
        res.count("strong" if rep.strong else "not-strong")
        if not (cert.report.passed and rep.passed):
            res.fail({"trial": t, "failed": [c.name for c in cert.report.failures() + rep.failures()]})
    return res


def _model_pool(rng, dim, max_atoms, size, schema):
    return [random_valid_algebra(rng, dim, int(rng.integers(1, max_atoms + 1)), schema) for _ in range(size)]


# ---------------------------------------------------------------- dilations


def random_dilation(rng, max_alpha=2, max_beta=4, max_base=2):
    """A random set-algebra dilation pair, with a randomly generated small algebra half the time."""
    while True:
        alpha = int(rng.integers(1, max_alpha + 1))
        beta = int(rng.integers(alpha, max_beta + 1))
        base = int(rng.integers(2, max_base + 1))
        if base**beta <= 16:
            break
    gens = None
    if rng.random() < 0.5:
        top = (1 << base**alpha) - 1
        gens = [int(rng.integers(0, top + 1)) for _ in range(int(rng.integers(1, 3)))]
    return cs_dilation(alpha, beta, base, small_generators=gens, minimal=bool(rng.random() < 0.5))


def well_definedness(rng, trials=100, verify_all_rho=False, **params):
    """The dilated cylindrifier agrees across admissible ``rho`` and presentations, and with ``big``'s own."""
    res = PropertyResult("well-definedness", dict(params, verify_all_rho=verify_all_rho))
    for t in range(trials):
        pair = random_dilation(rng, int(params.get("max_alpha", 2)), int(params.get("max_beta", 4)))
        res.trials += 1
        if verify_all_rho:
            bad = _per_element_route(pair)
        else:
            _, dis, nat = verify_well_definedness(pair)
            bad = [list(map(str, d[:3])) for d in dis] + [list(map(int, n)) for n in nat]
        if bad:
            res.fail({"trial": t, "alpha": pair.alpha, "beta": pair.beta, "first": bad[0]})
    return res


def _per_element_route(pair):
    """Every ``(k, sigma, p)`` through :func:`dilated_cylindrifier` in verify-all mode."""
    bad = []
    for k in range(pair.beta):
        for sigma in pair.sigmas():
            for p in pair.small.elements().tolist():
                try:
                    v = dilated_cylindrifier(pair, k, sigma, p, verify_all=True, native=True)
                except BaodeError as exc:
                    bad.append(str(exc))
                    continue
                if not v.native_agrees:
                    bad.append([k, list(sigma), p])
    return bad


def distributivity(rng, trials=50, **params):
    """The distributivity toolkit on random models of the positive schema."""
    res = PropertyResult("distributivity", params)
    schema = default_positive_schema()
    toolkit = toolkit_schema()
    for t in range(trials):
        a = random_valid_algebra(rng, int(params.get("dim", 2)), _size(rng, params, "max_atoms", 3), schema)
        rep = check_schema(a, toolkit)
        res.trials += 1
        for inst, r in rep.failures():
            res.count(inst.entry.name)
            res.fail({"trial": t, "equation": inst.label, "counterexample": r.counterexample})
    return res


def witness_dichotomy(rng, trials=30, **params):
    """``H`` is improper exactly when an interpolant exists; claims (i) and (ii) hold."""
    res = PropertyResult("witness-dichotomy", params)
    alpha = int(params.get("alpha", 1))
    beta = int(params.get("beta", 3 if alpha == 1 else 4))
    base = int(params.get("base", 3 if alpha == 1 else 2))
    pair = cs_dilation(alpha, beta, base)
    top = pair.small.top
    for t in range(trials):
        a, c = int(rng.integers(0, top + 1)), int(rng.integers(0, top + 1))
        enum = None
        if 2 * alpha > beta - alpha:
            ident = tuple(range(beta))
            enum = ([(ident, 0, pair.embed(a))], [(ident, min(1, alpha - 1), pair.big.neg(pair.embed(c)))])
        try:
            ws = build_witness_system(pair, a, c, enumeration=enum)
        except BaodeError as exc:
            res.trials += 1
            res.fail({"trial": t, "a": a, "c": c, "error": str(exc)})
            continue
        res.trials += 1
        res.count("improper" if not ws.h_proper else "proper")
        if ws.h_proper == ws.interpolant_exists:
            res.fail({"trial": t, "a": a, "c": c, "h_proper": ws.h_proper, "interpolant": ws.interpolant})
    return res


def positivity(rng, trials=1, **params):
    """The syntactic positive/non-positive split equals the schema file's annotations."""
    res = PropertyResult("positivity", params)
    s = default_schema()
    res.trials = 1
    if positive_partition(s) != annotated_partition(s):
        res.fail({"syntactic": positive_partition(s), "annotated": annotated_partition(s)})
    return res


PROPERTIES = {
    "duality-roundtrip": duality_roundtrip,
    "dual-morphism": dual_morphism_equivalence,
    "insep": insep_lemma,
    "supap": supap,
    "well-definedness": well_definedness,
    "distributivity": distributivity,
    "witness-dichotomy": witness_dichotomy,
    "positivity": positivity,
}


def run_campaign(campaign, seed, verify_all_rho=False, max_atoms=None):
    """Run every property of a campaign dict; property ``k`` draws from ``default_rng([seed, k])``."""
    props = campaign.get("properties")
    if not isinstance(props, list) or not props:
        raise ParseError("campaign needs a nonempty 'properties' list")
    results = []
    for k, spec in enumerate(props):
        spec = dict(spec)
        name = spec.pop("property", None)
        if name not in PROPERTIES:
            raise ParseError(f"unknown property {name!r}; known: {', '.join(sorted(PROPERTIES))}")
        if max_atoms is not None:
            for key in ("max_atoms", "max_points"):
                spec[key] = min(int(spec.get(key, max_atoms)), max_atoms)
        if name == "well-definedness":
            spec["verify_all_rho"] = bool(spec.get("verify_all_rho", False) or verify_all_rho)
        rng = np.random.default_rng([seed, k])
        results.append(PROPERTIES[name](rng, **spec))
    return {
        "kind": "report",
        "campaign": campaign.get("name", "campaign"),
        "seed": seed,
        "passed": all(r.passed for r in results),
        "results": [r.as_dict() for r in results],
    }
