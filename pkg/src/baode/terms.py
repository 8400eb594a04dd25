"""Terms and equations of the operator language, with brute-force validity checking.

Terms are written as prefix S-expressions::

    x  0  1  (+ t u)  (* t u)  (- t)  (c i t)  (s tau t)  (d i j)

An index ``i`` is an integer or a parameter name.  A transformation ``tau`` is
``id``, a literal ``(1 0)``, a replacement ``[i/j]``, a composition
``(o sigma tau)`` or a parameter name.  Parameters are bound when a schema is
instantiated (see :mod:`baode.schema`); a concrete term has none left.
"""

import os
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .bao import compose, identity, replacement
from .errors import IndexRangeError, ParseError, SignatureError, SizeError, UnboundVariableError

DEFAULT_MAX_ASSIGNMENTS = 1 << 24


def max_universe():
    """Enumeration cap, overridable through ``BAODE_MAX_UNIVERSE``."""
    raw = os.environ.get("BAODE_MAX_UNIVERSE")
    return int(raw) if raw else DEFAULT_MAX_ASSIGNMENTS


# ------------------------------------------------------------ transformations


@dataclass(frozen=True)
class TIdent:
    def sexpr(self):
        return "id"


@dataclass(frozen=True)
class TLiteral:
    values: tuple

    def sexpr(self):
        return "(" + " ".join(map(str, self.values)) + ")"


@dataclass(frozen=True)
class TParam:
    name: str

    def sexpr(self):
        return self.name


@dataclass(frozen=True)
class TRepl:
    i: Union[int, str]
    j: Union[int, str]

    def sexpr(self):
        return f"[{self.i}/{self.j}]"


@dataclass(frozen=True)
class TComp:
    left: object
    right: object

    def sexpr(self):
        return f"(o {self.left.sexpr()} {self.right.sexpr()})"


def resolve_index(i, binding=None):
    if isinstance(i, str):
        if binding is None or i not in binding:
            raise UnboundVariableError(f"index parameter {i!r} is unbound")
        return binding[i]
    return i


def resolve_transformation(t, dim, binding=None):
    if isinstance(t, TIdent):
        return identity(dim)
    if isinstance(t, TLiteral):
        if len(t.values) != dim or any(not 0 <= v < dim for v in t.values):
            raise IndexRangeError(f"{t.values} is not a transformation of {dim}")
        return t.values
    if isinstance(t, TParam):
        if binding is None or t.name not in binding:
            raise UnboundVariableError(f"transformation parameter {t.name!r} is unbound")
        return tuple(binding[t.name])
    if isinstance(t, TRepl):
        return replacement(dim, resolve_index(t.i, binding), resolve_index(t.j, binding))
    if isinstance(t, TComp):
        return compose(resolve_transformation(t.left, dim, binding), resolve_transformation(t.right, dim, binding))
    raise TypeError(f"not a transformation expression: {t!r}")


# ---------------------------------------------------------------------- terms


class Term:
    def sexpr(self):
        raise NotImplementedError

    def __str__(self):
        return self.sexpr()


@dataclass(frozen=True)
class Var(Term):
    name: str

    def sexpr(self):
        return self.name


@dataclass(frozen=True)
class Const(Term):
    value: int

    def sexpr(self):
        return str(self.value)


@dataclass(frozen=True)
class Join(Term):
    left: Term
    right: Term

    def sexpr(self):
        return f"(+ {self.left.sexpr()} {self.right.sexpr()})"


@dataclass(frozen=True)
class Meet(Term):
    left: Term
    right: Term

    def sexpr(self):
        return f"(* {self.left.sexpr()} {self.right.sexpr()})"


@dataclass(frozen=True)
class Neg(Term):
    arg: Term

    def sexpr(self):
        return f"(- {self.arg.sexpr()})"


@dataclass(frozen=True)
class Cyl(Term):
    index: Union[int, str]
    arg: Term

    def sexpr(self):
        return f"(c {self.index} {self.arg.sexpr()})"


@dataclass(frozen=True)
class Subst(Term):
    trans: object
    arg: Term

    def sexpr(self):
        return f"(s {self.trans.sexpr()} {self.arg.sexpr()})"


@dataclass(frozen=True)
class Diag(Term):
    i: Union[int, str]
    j: Union[int, str]

    def sexpr(self):
        return f"(d {self.i} {self.j})"


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term
    name: str = field(default="", compare=False)

    def sexpr(self):
        return f"{self.lhs.sexpr()} = {self.rhs.sexpr()}"

    def __str__(self):
        return self.sexpr()

    @property
    def variables(self):
        return sorted(free_vars(self.lhs) | free_vars(self.rhs))


def children(t):
    if isinstance(t, (Join, Meet)):
        return (t.left, t.right)
    if isinstance(t, (Neg, Cyl, Subst)):
        return (t.arg,)
    return ()


def walk(t):
    yield t
    for ch in children(t):
        yield from walk(ch)


def free_vars(t):
    return {node.name for node in walk(t) if isinstance(node, Var)}


def is_positive_equation(e):
    """True iff neither side uses complementation."""
    return not any(isinstance(node, Neg) for side in (e.lhs, e.rhs) for node in walk(side))


# --------------------------------------------------------------------- parser

_TOKEN = re.compile(r"\s*(?:(?P<punct>[()\[\]/=])|(?P<atom>[^\s()\[\]/=]+))")


def _tokenize(src):
    pos = 0
    out = []
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            if src[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {src[pos]!r}", pos, src)
        if m.group("punct") is None and m.group("atom") is None:
            break
        tok = m.group("punct") or m.group("atom")
        out.append((tok, m.start(m.lastindex)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = _tokenize(src)
        self.k = 0

    def peek(self):
        return self.toks[self.k][0] if self.k < len(self.toks) else None

    def pos(self):
        return self.toks[self.k][1] if self.k < len(self.toks) else len(self.src)

    def take(self, expected=None):
        if self.k >= len(self.toks):
            raise ParseError("unexpected end of input" + (f", expected {expected!r}" if expected else ""), len(self.src), self.src)
        tok, p = self.toks[self.k]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", p, self.src)
        self.k += 1
        return tok

    def index(self):
        p = self.pos()
        tok = self.take()
        if tok in "()[]/=":
            raise ParseError(f"expected an index, found {tok!r}", p, self.src)
        if re.fullmatch(r"\d+", tok):
            return int(tok)
        if re.fullmatch(r"[A-Za-z_]\w*", tok):
            return tok
        raise ParseError(f"bad index {tok!r}", p, self.src)

    def trans(self):
        p = self.pos()
        tok = self.peek()
        if tok == "[":
            self.take("[")
            i = self.index()
            self.take("/")
            j = self.index()
            self.take("]")
            return TRepl(i, j)
        if tok == "(":
            self.take("(")
            if self.peek() == "o":
                self.take("o")
                left = self.trans()
                right = self.trans()
                self.take(")")
                return TComp(left, right)
            values = []
            while self.peek() not in (")", None):
                q = self.pos()
                v = self.take()
                if not re.fullmatch(r"\d+", v):
                    raise ParseError(f"transformation literal needs integers, found {v!r}", q, self.src)
                values.append(int(v))
            self.take(")")
            if not values:
                raise ParseError("empty transformation literal", p, self.src)
            return TLiteral(tuple(values))
        tok = self.take()
        if tok == "id":
            return TIdent()
        if re.fullmatch(r"[A-Za-z_]\w*", tok):
            return TParam(tok)
        raise ParseError(f"expected a transformation, found {tok!r}", p, self.src)

    def term(self):
        p = self.pos()
        tok = self.take()
        if tok == "(":
            q = self.pos()
            op = self.take()
            if op in ("+", "*"):
                args = [self.term(), self.term()]
                while self.peek() != ")":
                    if self.peek() is None:
                        raise ParseError("unexpected end of input", len(self.src), self.src)
                    args.append(self.term())
                self.take(")")
                node = Join if op == "+" else Meet
                acc = args[0]
                for a in args[1:]:
                    acc = node(acc, a)
                return acc
            if op == "-":
                arg = self.term()
                self.take(")")
                return Neg(arg)
            if op == "c":
                i = self.index()
                arg = self.term()
                self.take(")")
                return Cyl(i, arg)
            if op == "s":
                t = self.trans()
                arg = self.term()
                self.take(")")
                return Subst(t, arg)
            if op == "d":
                i = self.index()
                j = self.index()
                self.take(")")
                return Diag(i, j)
            raise ParseError(f"unknown operator {op!r}", q, self.src)
        if tok in ("0", "1"):
            return Const(int(tok))
        if re.fullmatch(r"[A-Za-z_]\w*", tok):
            return Var(tok)
        raise ParseError(f"unexpected token {tok!r}", p, self.src)

    def end(self):
        if self.k != len(self.toks):
            raise ParseError(f"trailing input {self.peek()!r}", self.pos(), self.src)


def parse_term(src):
    p = _Parser(src)
    t = p.term()
    p.end()
    return t


def parse_equation(src, name=""):
    """Parse ``"lhs = rhs"``."""
    p = _Parser(src)
    lhs = p.term()
    p.take("=")
    rhs = p.term()
    p.end()
    return Equation(lhs, rhs, name)


def equation(lhs, rhs, name=""):
    lhs = parse_term(lhs) if isinstance(lhs, str) else lhs
    rhs = parse_term(rhs) if isinstance(rhs, str) else rhs
    return Equation(lhs, rhs, name)


def substitute_params(t, binding):
    """Replace index/transformation parameters in ``t`` by concrete values."""
    if isinstance(t, (Var, Const)):
        return t
    if isinstance(t, Join):
        return Join(substitute_params(t.left, binding), substitute_params(t.right, binding))
    if isinstance(t, Meet):
        return Meet(substitute_params(t.left, binding), substitute_params(t.right, binding))
    if isinstance(t, Neg):
        return Neg(substitute_params(t.arg, binding))
    if isinstance(t, Cyl):
        return Cyl(resolve_index(t.index, binding), substitute_params(t.arg, binding))
    if isinstance(t, Diag):
        return Diag(resolve_index(t.i, binding), resolve_index(t.j, binding))
    if isinstance(t, Subst):
        return Subst(_substitute_trans(t.trans, binding), substitute_params(t.arg, binding))
    raise TypeError(t)


def _substitute_trans(t, binding):
    if isinstance(t, TParam):
        return TLiteral(tuple(binding[t.name])) if t.name in binding else t
    if isinstance(t, TRepl):
        return TRepl(
            binding.get(t.i, t.i) if isinstance(t.i, str) else t.i,
            binding.get(t.j, t.j) if isinstance(t.j, str) else t.j,
        )
    if isinstance(t, TComp):
        return TComp(_substitute_trans(t.left, binding), _substitute_trans(t.right, binding))
    return t


# ----------------------------------------------------------------- evaluation


def _eval(a, t, env, binding):
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise UnboundVariableError(f"variable {t.name!r} is unbound") from None
    if isinstance(t, Const):
        return np.int64(a.top if t.value else 0)
    if isinstance(t, Join):
        return _eval(a, t.left, env, binding) | _eval(a, t.right, env, binding)
    if isinstance(t, Meet):
        return _eval(a, t.left, env, binding) & _eval(a, t.right, env, binding)
    if isinstance(t, Neg):
        return a.top ^ _eval(a, t.arg, env, binding)
    if isinstance(t, Cyl):
        i = resolve_index(t.index, binding)
        a.sig.check_index(i)
        return a.cyl_apply(i, np.atleast_1d(_eval(a, t.arg, env, binding)))
    if isinstance(t, Subst):
        tau = resolve_transformation(t.trans, a.dim, binding)
        if tau not in a.sig.index:
            raise SignatureError(f"transformation {tau} not in the signature")
        return a.subst_apply(tau, np.atleast_1d(_eval(a, t.arg, env, binding)))
    if isinstance(t, Diag):
        return np.int64(a.d(resolve_index(t.i, binding), resolve_index(t.j, binding)))
    raise TypeError(f"not a term: {t!r}")


def eval_term(a, t, env=None, binding=None):
    """Value of ``t`` in ``a`` under ``env`` (variable name -> element)."""
    env = {k: np.array([int(v)], dtype=np.int64) for k, v in (env or {}).items()}
    out = np.atleast_1d(_eval(a, t, env, binding))
    return int(out[0])


def eval_term_array(a, t, env, binding=None):
    """Vectorised :func:`eval_term`; ``env`` maps names to equal-length arrays."""
    env = {k: np.asarray(v, dtype=np.int64) for k, v in env.items()}
    n = len(next(iter(env.values()))) if env else 1
    out = _eval(a, t, env, binding)
    out = np.asarray(out, dtype=np.int64)
    return np.broadcast_to(out, (n,)) if out.ndim == 0 or out.shape[0] != n else out


@dataclass(frozen=True)
class EquationCheck:
    """Outcome of :func:`check_equation`: valid, or the least falsifying assignment."""

    equation: Equation
    counterexample: dict = None
    assignments: int = 0

    @property
    def valid(self):
        return self.counterexample is None

    def __bool__(self):
        return self.valid


def check_equation(a, e, domains=None, binding=None, max_assignments=None):
    """Decide ``a |= e`` by evaluating both sides under every assignment.

    Variables are ordered by name and assignments lexicographically by element
    index, so the reported counterexample is the least one.  ``domains`` can
    restrict individual variables to given element arrays.
    """
    names = e.variables
    doms = []
    for v in names:
        if domains is not None and v in domains:
            doms.append(np.unique(np.asarray(domains[v], dtype=np.int64)))
        else:
            doms.append(a.elements())
    total = 1
    for d in doms:
        total *= len(d)
    cap = max_assignments or max_universe()
    if total > cap:
        raise SizeError(f"{total} assignments exceed the enumeration cap {cap}")
    if not names:
        lhs = eval_term(a, e.lhs, {}, binding)
        rhs = eval_term(a, e.rhs, {}, binding)
        return EquationCheck(e, None if lhs == rhs else {}, 1)
    rest = 1
    for d in doms[1:]:
        rest *= len(d)
    chunk = max(1, (1 << 20) // max(rest, 1))
    first = doms[0]
    for start in range(0, len(first), chunk):
        grids = np.meshgrid(first[start : start + chunk], *doms[1:], indexing="ij")
        env = {v: g.ravel() for v, g in zip(names, grids)}
        lhs = eval_term_array(a, e.lhs, env, binding)
        rhs = eval_term_array(a, e.rhs, env, binding)
        bad = np.nonzero(lhs != rhs)[0]
        if len(bad):
            k = bad[0]
            return EquationCheck(e, {v: int(env[v][k]) for v in names}, total)
    return EquationCheck(e, None, total)
