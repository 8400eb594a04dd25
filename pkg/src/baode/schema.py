"""Equation schemata: parameterised equations instantiated per signature.

A schema entry is an equation whose indices and transformations may be
parameters.  Each parameter has a kind:

``index``  every ``i < dim``
``small``  every ``i < small_dim``
``spare``  every ``small_dim <= m < dim``
``trans``  every admitted transformation

``where`` adds side conditions (``["neq", "i", "j"]``, ``["fixes", "tau", "m"]``)
and ``restrict`` limits a variable to elements whose dimension set lies
inside ``small_dim`` (written ``{"x": "small"}``).  With ``small_dim`` left at
the full dimension, entries with spare parameters have no instances.
"""

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import ParseError, SignatureError
from .terms import Equation, check_equation, is_positive_equation, parse_equation, parse_term, substitute_params

PARAM_KINDS = ("index", "small", "spare", "trans")


@dataclass(frozen=True)
class SchemaEntry:
    name: str
    equation: Equation
    params: dict = field(default_factory=dict)
    where: tuple = ()
    restrict: dict = field(default_factory=dict)
    requires_diagonals: bool = False
    positive: bool = None

    def __hash__(self):
        return hash((self.name, self.equation))


@dataclass(frozen=True)
class Schema:
    name: str
    entries: tuple

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def names(self):
        return [e.name for e in self.entries]

    def select(self, names):
        keep = set(names)
        return Schema(self.name, tuple(e for e in self.entries if e.name in keep))


@dataclass(frozen=True)
class Instance:
    entry: SchemaEntry
    binding: tuple
    equation: Equation

    @property
    def label(self):
        if not self.binding:
            return self.entry.name
        return self.entry.name + "[" + ",".join(f"{k}={_fmt(v)}" for k, v in self.binding) + "]"


def _fmt(v):
    return "".join(map(str, v)) if isinstance(v, tuple) else str(v)


def _entry_from_dict(d, k):
    name = d.get("name", f"eq{k}")
    try:
        if "equation" in d:
            eq = parse_equation(d["equation"], name)
        else:
            eq = Equation(parse_term(d["lhs"]), parse_term(d["rhs"]), name)
    except KeyError as exc:
        raise ParseError(f"schema entry {name!r} lacks {exc.args[0]!r}") from None
    params = dict(d.get("params", {}))
    for p, kind in params.items():
        if kind not in PARAM_KINDS:
            raise ParseError(f"schema entry {name!r}: unknown parameter kind {kind!r}")
    where = tuple(tuple(w) for w in d.get("where", ()))
    for w in where:
        if w[0] not in ("neq", "fixes") or len(w) != 3:
            raise ParseError(f"schema entry {name!r}: bad side condition {list(w)}")
    return SchemaEntry(
        name=name,
        equation=eq,
        params=params,
        where=where,
        restrict=dict(d.get("restrict", {})),
        requires_diagonals=bool(d.get("requires_diagonals", False)),
        positive=d.get("positive"),
    )


def schema_from_dict(d):
    if d.get("kind", "schema") != "schema":
        raise ParseError(f"expected kind 'schema', got {d.get('kind')!r}")
    entries = d.get("equations")
    if not isinstance(entries, list):
        raise ParseError("schema needs an 'equations' list")
    out = []
    for k, e in enumerate(entries):
        if isinstance(e, str):
            out.append(SchemaEntry(f"eq{k}", parse_equation(e, f"eq{k}")))
        else:
            out.append(_entry_from_dict(e, k))
    return Schema(d.get("name", "schema"), tuple(out))


def schema_to_dict(schema):
    eqs = []
    for e in schema.entries:
        d = {"name": e.name, "lhs": e.equation.lhs.sexpr(), "rhs": e.equation.rhs.sexpr()}
        if e.params:
            d["params"] = dict(e.params)
        if e.where:
            d["where"] = [list(w) for w in e.where]
        if e.restrict:
            d["restrict"] = dict(e.restrict)
        if e.requires_diagonals:
            d["requires_diagonals"] = True
        if e.positive is not None:
            d["positive"] = e.positive
        eqs.append(d)
    return {"kind": "schema", "name": schema.name, "equations": eqs}


def load_schema(path):
    with open(path, encoding="utf-8") as fh:
        return schema_from_dict(json.load(fh))


def default_schema():
    text = resources.files("baode").joinpath("data/default_schema.json").read_text(encoding="utf-8")
    return schema_from_dict(json.loads(text))


def positive_partition(schema):
    """Names of the syntactically positive entries and of the rest."""
    pos = [e.name for e in schema if is_positive_equation(e.equation)]
    neg = [e.name for e in schema if not is_positive_equation(e.equation)]
    return pos, neg


def annotated_partition(schema):
    """The same split, read off the hand-written ``positive`` flags."""
    pos = [e.name for e in schema if e.positive]
    neg = [e.name for e in schema if e.positive is not None and not e.positive]
    return pos, neg


def default_positive_schema():
    base = default_schema()
    return Schema(base.name + "-positive", tuple(e for e in base if is_positive_equation(e.equation)))


def _param_values(kind, sig, small_dim):
    if kind == "index":
        return list(range(sig.dim))
    if kind == "small":
        return list(range(small_dim))
    if kind == "spare":
        return list(range(small_dim, sig.dim))
    return list(sig.transformations)


def instantiate(schema, sig, small_dim=None):
    """All concrete instances of ``schema`` over ``sig``."""
    small_dim = sig.dim if small_dim is None else small_dim
    if not 0 <= small_dim <= sig.dim:
        raise SignatureError(f"small dimension {small_dim} outside 0..{sig.dim}")
    out = []
    for entry in schema:
        if entry.requires_diagonals and not sig.with_diagonals:
            continue
        names = sorted(entry.params)
        pools = [_param_values(entry.params[p], sig, small_dim) for p in names]
        for values in itertools.product(*pools):
            binding = dict(zip(names, values))
            if not all(_side_condition(w, binding) for w in entry.where):
                continue
            eq = Equation(
                substitute_params(entry.equation.lhs, binding),
                substitute_params(entry.equation.rhs, binding),
                entry.name,
            )
            out.append(Instance(entry, tuple((p, binding[p]) for p in names), eq))
    return out


def _side_condition(w, binding):
    op, a, b = w
    if op == "neq":
        return binding[a] != binding[b]
    tau, m = binding[a], binding[b]
    return tau[m] == m


def small_elements(a, small_dim):
    """Elements whose dimension set lies below ``small_dim``."""
    xs = a.elements()
    keep = np.ones(len(xs), dtype=bool)
    for i in range(small_dim, a.dim):
        keep &= a.cyl_apply(i, xs) == xs
    return xs[keep]


@dataclass(frozen=True)
class SchemaReport:
    results: tuple

    @property
    def valid(self):
        return all(r.valid for _, r in self.results)

    def failures(self):
        return [(inst, r) for inst, r in self.results if not r.valid]

    def __bool__(self):
        return self.valid


def check_schema(a, schema, small_dim=None, stop_at_first=False):
    """Check every instance of ``schema`` in ``a``."""
    small_dim = a.dim if small_dim is None else small_dim
    small = None
    results = []
    for inst in instantiate(schema, a.sig, small_dim):
        domains = None
        if inst.entry.restrict:
            if small is None:
                small = small_elements(a, small_dim)
            domains = {v: small for v in inst.entry.restrict}
        r = check_equation(a, inst.equation, domains=domains)
        results.append((inst, r))
        if stop_at_first and not r.valid:
            break
    return SchemaReport(tuple(results))


def satisfies(a, schema, small_dim=None):
    return check_schema(a, schema, small_dim, stop_at_first=True).valid


def toolkit_schema():
    """The distributivity toolkit as stated: ``c_m`` and its dual both additive, ``-c_m x`` closed under ``c_m``.

    The dual cylindrifier distributes over meets, not joins, so the second
    entry fails as soon as some ``c_m`` is not the identity; see
    :func:`dual_meet_schema` for the law that holds.
    """
    return schema_from_dict(
        {
            "name": "toolkit",
            "equations": [
                {"name": "c-join", "lhs": "(c m (+ u v))", "rhs": "(+ (c m u) (c m v))", "params": {"m": "index"}},
                {
                    "name": "dual-c-join",
                    "lhs": "(- (c m (- (+ u v))))",
                    "rhs": "(+ (- (c m (- u))) (- (c m (- v))))",
                    "params": {"m": "index"},
                },
                {"name": "c-complement-closed", "lhs": "(c m (- (c m x)))", "rhs": "(- (c m x))", "params": {"m": "index"}},
            ],
        }
    )


def dual_meet_schema():
    return schema_from_dict(
        {
            "name": "dual-meet",
            "equations": [
                {
                    "name": "dual-c-meet",
                    "lhs": "(- (c m (- (* u v))))",
                    "rhs": "(* (- (c m (- u))) (- (c m (- v))))",
                    "params": {"m": "index"},
                }
            ],
        }
    )
