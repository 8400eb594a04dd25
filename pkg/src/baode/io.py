"""JSON artifacts with a ``kind`` discriminator.

Kinds: ``frame``, ``bao``, ``morphism``, ``schema``, ``instance`` and
``campaign``.  Relations are pair lists, elements are atom-index lists and
terms are S-expression strings.  A signature is written as ``dim``,
``with_diagonals`` and optionally ``transformations`` (default: all of them).
"""

import json
from pathlib import Path

import numpy as np

from .bao import FiniteBao, Morphism, Signature
from .boolean import FiniteBA
from .errors import BaodeError, ParseError
from .frames import Frame, FrameMorphism
from .schema import default_positive_schema, default_schema, schema_from_dict, schema_to_dict

KINDS = ("frame", "bao", "morphism", "schema", "instance", "campaign")


def atoms_of(x):
    x = int(x)
    return [i for i in range(x.bit_length()) if (x >> i) & 1]


def element_of(atoms, n=None):
    x = 0
    for a in atoms:
        a = int(a)
        if a < 0 or (n is not None and a >= n):
            raise ParseError(f"atom index {a} out of range")
        x |= 1 << a
    return x


def _need(d, key, kind):
    if key not in d:
        raise ParseError(f"{kind} artifact lacks {key!r}")
    return d[key]


# ------------------------------------------------------------- signatures


def sig_to_dict(sig):
    d = {"dim": sig.dim, "with_diagonals": sig.with_diagonals}
    if not sig.is_full:
        d["transformations"] = [list(t) for t in sig.transformations]
    return d


def sig_from_dict(d):
    dim = int(_need(d, "dim", "signature"))
    ts = d.get("transformations")
    return Signature(dim, None if ts is None else [tuple(t) for t in ts], bool(d.get("with_diagonals", True)))


# ------------------------------------------------------------------ frames


def frame_to_dict(F, name=None):
    d = {"kind": "frame"}
    if name:
        d["name"] = name
    d.update(sig_to_dict(F.sig))
    d["points"] = F.n
    d["T"] = [[list(map(int, p)) for p in np.argwhere(F.T[i])] for i in range(F.dim)]
    d["S"] = [
        {"tau": list(t), "pairs": [list(map(int, p)) for p in np.argwhere(F.S[k])]}
        for k, t in enumerate(F.sig.transformations)
    ]
    if F.D is not None:
        d["D"] = [[[int(p) for p in np.nonzero(F.D[i, j])[0]] for j in range(F.dim)] for i in range(F.dim)]
    if F.labels != tuple(range(F.n)):
        d["labels"] = [list(lab) if isinstance(lab, tuple) else lab for lab in F.labels]
    return d


def frame_from_dict(d):
    sig = sig_from_dict(d)
    n = int(_need(d, "points", "frame"))
    T = np.zeros((sig.dim, n, n), dtype=bool)
    rels = _need(d, "T", "frame")
    if len(rels) != sig.dim:
        raise ParseError(f"frame needs {sig.dim} T relations, got {len(rels)}")
    for i, pairs in enumerate(rels):
        for t, s in pairs:
            _point(t, n)
            _point(s, n)
            T[i, t, s] = True
    S = np.zeros((len(sig.transformations), n, n), dtype=bool)
    given = {}
    for entry in d.get("S", []):
        given[tuple(entry["tau"])] = entry["pairs"]
    for k, tau in enumerate(sig.transformations):
        if tau in given:
            for t, s in given[tau]:
                _point(t, n)
                _point(s, n)
                S[k, t, s] = True
        elif tau == tuple(range(sig.dim)):
            S[k] = np.eye(n, dtype=bool)
        else:
            raise ParseError(f"frame lacks S for {list(tau)}")
    D = None
    if sig.with_diagonals:
        D = np.zeros((sig.dim, sig.dim, n), dtype=bool)
        rows = _need(d, "D", "frame")
        for i in range(sig.dim):
            for j in range(sig.dim):
                for p in rows[i][j]:
                    _point(p, n)
                    D[i, j, p] = True
    labels = d.get("labels")
    if labels is not None:
        labels = [tuple(lab) if isinstance(lab, list) else lab for lab in labels]
    return Frame(n, sig, T, S, D, labels)


def _point(p, n):
    if not isinstance(p, int) or not 0 <= p < n:
        raise ParseError(f"point {p!r} outside a universe of {n}")


# ---------------------------------------------------------------- algebras


def bao_to_dict(a, name=None):
    d = {"kind": "bao"}
    if name or a.name:
        d["name"] = name or a.name
    d.update(sig_to_dict(a.sig))
    d["atoms"] = a.n
    d["cyl"] = [[atoms_of(v) for v in a.cyl[i]] for i in range(a.dim)]
    d["subst"] = [
        {"tau": list(t), "images": [atoms_of(v) for v in a.subst_images(t)]} for t in a.sig.transformations
    ]
    if a.diag is not None:
        d["diag"] = [[atoms_of(a.diag[i, j]) for j in range(a.dim)] for i in range(a.dim)]
    return d


def bao_from_dict(d):
    sig = sig_from_dict(d)
    n = int(_need(d, "atoms", "bao"))
    ba = FiniteBA(n)
    cyl = [[element_of(img, n) for img in row] for row in _need(d, "cyl", "bao")]
    subst = {}
    for entry in d.get("subst", []):
        subst[tuple(entry["tau"])] = [element_of(img, n) for img in entry["images"]]
    ident = tuple(range(sig.dim))
    subst.setdefault(ident, [1 << i for i in range(n)])
    diag = None
    if sig.with_diagonals:
        diag = [[element_of(v, n) for v in row] for row in _need(d, "diag", "bao")]
    return FiniteBao.from_atom_images(ba, sig, cyl, subst, diag, d.get("name"))


# --------------------------------------------------------------- morphisms


def morphism_to_dict(m, name=None):
    d = {"kind": "morphism"}
    if name:
        d["name"] = name
    if isinstance(m, FrameMorphism):
        d["level"] = "frame"
        d["source"] = frame_to_dict(m.source)
        d["target"] = frame_to_dict(m.target)
        d["map"] = list(m.mapping)
    else:
        d["level"] = "algebra"
        d["source"] = bao_to_dict(m.source)
        d["target"] = bao_to_dict(m.target)
        d["map"] = [atoms_of(v) for v in m.atom_images]
    return d


def morphism_from_dict(d, resolve=None):
    level = d.get("level", "algebra")
    src = _sub(d, "source", resolve)
    tgt = _sub(d, "target", resolve)
    mp = _need(d, "map", "morphism")
    if level == "frame":
        return FrameMorphism(src, tgt, tuple(int(v) for v in mp))
    if level != "algebra":
        raise ParseError(f"unknown morphism level {level!r}")
    return Morphism(src, tgt, [element_of(v, tgt.n) for v in mp])


def _sub(d, key, resolve):
    v = _need(d, key, d.get("kind", "artifact"))
    if isinstance(v, str):
        if resolve is None:
            raise ParseError(f"cannot resolve reference {v!r}")
        return resolve(v)
    return from_dict(v, resolve)


# ---------------------------------------------------------------- instances


def instance_to_dict(inst, name=None):
    d = {"kind": "instance"}
    if name:
        d["name"] = name
    d["base"] = bao_to_dict(inst.base)
    d["left"] = bao_to_dict(inst.left)
    d["right"] = bao_to_dict(inst.right)
    d["f"] = [atoms_of(v) for v in inst.f.atom_images]
    d["h"] = [atoms_of(v) for v in inst.h.atom_images]
    d["schema"] = schema_to_dict(inst.schema) if hasattr(inst.schema, "entries") else "none"
    if inst.small_dim is not None:
        d["small_dim"] = inst.small_dim
    return d


def instance_from_dict(d, resolve=None, validate=True):
    from .amalgam import AmalgamationInstance

    A = _sub(d, "base", resolve)
    B = _sub(d, "left", resolve)
    C = _sub(d, "right", resolve)
    f = Morphism(A, B, [element_of(v, B.n) for v in _need(d, "f", "instance")])
    h = Morphism(A, C, [element_of(v, C.n) for v in _need(d, "h", "instance")])
    sch = d.get("schema", "default-positive")
    if sch == "default-positive":
        schema = default_positive_schema()
    elif sch == "default":
        schema = default_schema()
    elif sch == "none":
        schema = ()
    elif isinstance(sch, dict):
        schema = schema_from_dict(sch)
    elif resolve is not None:
        schema = resolve(sch)
    else:
        raise ParseError(f"unknown schema reference {sch!r}")
    return AmalgamationInstance(f, h, schema, d.get("small_dim"), validate=validate)


# ------------------------------------------------------------------ generic


def to_dict(obj, name=None):
    from .amalgam import AmalgamationInstance
    from .schema import Schema

    if isinstance(obj, Frame):
        return frame_to_dict(obj, name)
    if isinstance(obj, FiniteBao):
        return bao_to_dict(obj, name)
    if isinstance(obj, (Morphism, FrameMorphism)):
        return morphism_to_dict(obj, name)
    if isinstance(obj, Schema):
        d = schema_to_dict(obj)
        if name:
            d["name"] = name
        return d
    if isinstance(obj, AmalgamationInstance):
        return instance_to_dict(obj, name)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def from_dict(d, resolve=None):
    if not isinstance(d, dict):
        raise ParseError("artifact must be a JSON object")
    kind = d.get("kind")
    if kind not in KINDS:
        raise ParseError(f"unknown artifact kind {kind!r}")
    try:
        if kind == "frame":
            return frame_from_dict(d)
        if kind == "bao":
            return bao_from_dict(d)
        if kind == "morphism":
            return morphism_from_dict(d, resolve)
        if kind == "schema":
            return schema_from_dict(d)
        if kind == "instance":
            return instance_from_dict(d, resolve)
        return dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed {kind} artifact: {exc}") from None


def dumps(obj, name=None):
    return json.dumps(to_dict(obj, name), indent=1, sort_keys=True) + "\n"


def loads(text, resolve=None):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.pos, text) from None
    return from_dict(data, resolve)


def save(obj, path, name=None):
    Path(path).write_text(dumps(obj, name), encoding="utf-8")


def load(path, resolve=None):
    return loads(Path(path).read_text(encoding="utf-8"), resolve)


class Workspace:
    """Named artifacts loaded from files; names come from ``name`` fields or file stems."""

    def __init__(self):
        self.bindings = {}

    def bind(self, name, obj):
        if name in self.bindings:
            raise ParseError(f"name {name!r} is bound twice")
        self.bindings[name] = obj

    def load_dir(self, directory):
        for path in sorted(Path(directory).glob("*.json")):
            self.load_file(path)
        return self

    def load_file(self, path):
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc.msg}", exc.pos, text) from None
        obj = from_dict(raw, self.resolve)
        name = raw.get("name", path.stem) if isinstance(raw, dict) else path.stem
        self.bind(name, obj)
        return obj

    def resolve(self, ref):
        if ref in self.bindings:
            return self.bindings[ref]
        path = Path(ref)
        if path.exists():
            return load(path, self.resolve)
        raise BaodeError(f"unbound name {ref!r}: no workspace binding or file of that name")
