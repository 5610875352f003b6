"""First-order sentences over atom structures.

Surface syntax (ASCII)::

    formula := 'forall' var+ '.' formula | 'exists' var+ '.' formula
             | formula '->' formula | formula '|' formula | formula '&' formula
             | '!' formula | '(' formula ')'
             | 'T(' term ',' term ',' term ')' | 'I(' term ')' | term '=' term | term '!=' term
    term    := var | 'e' | 'f(' term ')'

Precedence ``!`` > ``&`` > ``|`` > ``->``; ``->`` is right-associative, ``&``
and ``|`` associate to the left, and a quantifier body extends as far right
as possible.  ``t != u`` parses as ``!(t = u)``.  The ``e`` signature has the
constant ``e`` and no ``I``; the ``I`` signature the reverse.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from .config import GUARDS, check_guard
from .core import AtomStructure, EStructure, Structure


# -- AST ----------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class EConst:
    pass


@dataclass(frozen=True)
class FApp:
    arg: "Term"


Term = Union[Var, EConst, FApp]


@dataclass(frozen=True)
class Rel:
    args: tuple  # three terms


@dataclass(frozen=True)
class Ident:
    arg: Term


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    vars: tuple
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    vars: tuple
    body: "Formula"


Formula = Union[Rel, Ident, Eq, Not, And, Or, Implies, Forall, Exists]


@dataclass(frozen=True)
class Sentence:
    formula: Formula
    signature: str = "e"

    def __str__(self) -> str:
        return render(self)


# -- parser -------------------------------------------------------------------

class FOLSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


_TOKEN = re.compile(r"\s*(?:(->|!=|[().,&|!=])|([A-Za-z_][A-Za-z0-9_']*))")
_KEYWORDS = {"forall", "exists", "T", "I", "e", "f"}


@dataclass(frozen=True)
class _Tok:
    kind: str   # 'op', 'name', 'eof'
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def where(pos):
        ln = max(i for i, s in enumerate(line_starts) if s <= pos)
        return ln + 1, pos - line_starts[ln] + 1

    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            if not rest.strip():
                ln, col = where(len(text))
                toks.append(_Tok("eof", "", ln, col))
                return toks
            skip = len(rest) - len(rest.lstrip())
            ln, col = where(pos + skip)
            raise FOLSyntaxError(f"unexpected character {rest.lstrip()[0]!r}", ln, col)
        start = m.start(1) if m.group(1) else m.start(2)
        ln, col = where(start)
        if m.group(1):
            toks.append(_Tok("op", m.group(1), ln, col))
        else:
            toks.append(_Tok("name", m.group(2), ln, col))
        pos = m.end()


class _Parser:
    def __init__(self, text: str, signature: str):
        if signature not in ("e", "I"):
            raise ValueError("signature must be 'e' or 'I'")
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = signature
        self.scope: list[str] = []
        self.parens: list[_Tok] = []

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        if tok.kind == "eof" and self.parens:
            p = self.parens[-1]
            raise FOLSyntaxError("unclosed '('", p.line, p.col)
        raise FOLSyntaxError(message, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        tok = self.tok
        if not self.accept(text):
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            self.error(f"expected {text!r}, found {found}")
        return tok

    def open(self) -> None:
        self.parens.append(self.expect("("))

    def close(self) -> None:
        self.expect(")")
        self.parens.pop()

    def parse(self) -> Sentence:
        form = self.formula()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")
        return Sentence(form, self.sig)

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.accept("|"):
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.accept("&"):
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.tok
        if self.accept("!"):
            return Not(self.unary())
        if tok.kind == "name" and tok.text in ("forall", "exists"):
            self.i += 1
            names = []
            while self.tok.kind == "name" and self.tok.text not in _KEYWORDS:
                names.append(self.tok.text)
                self.i += 1
            if not names:
                self.error("expected a variable name")
            self.expect(".")
            self.scope.extend(names)
            body = self.formula()
            del self.scope[len(self.scope) - len(names):]
            return (Forall if tok.text == "forall" else Exists)(tuple(names), body)
        if tok.kind == "op" and tok.text == "(":
            self.open()
            inner = self.formula()
            self.close()
            return inner
        if tok.kind == "name" and tok.text == "T":
            self.i += 1
            self.open()
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(",")
            c = self.term()
            self.close()
            return Rel((a, b, c))
        if tok.kind == "name" and tok.text == "I":
            if self.sig != "I":
                self.error("signature mismatch: I is not available in the e signature", tok)
            self.i += 1
            self.open()
            a = self.term()
            self.close()
            return Ident(a)
        left = self.term()
        if self.accept("="):
            return Eq(left, self.term())
        if self.accept("!="):
            return Not(Eq(left, self.term()))
        found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
        self.error(f"expected '=' or '!=', found {found}")

    def term(self) -> Term:
        tok = self.tok
        if tok.kind != "name":
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            self.error(f"expected a term, found {found}")
        self.i += 1
        if tok.text == "e":
            if self.sig != "e":
                self.error("signature mismatch: e is not available in the I signature", tok)
            return EConst()
        if tok.text == "f":
            self.open()
            arg = self.term()
            self.close()
            return FApp(arg)
        if tok.text in _KEYWORDS:
            self.error(f"unexpected {tok.text!r}", tok)
        if tok.text not in self.scope:
            self.error(f"unbound variable {tok.text!r}", tok)
        return Var(tok.text)


def parse(text: str, signature: str = "e") -> Sentence:
    """Parse a closed sentence; raises :class:`FOLSyntaxError` with line/column."""
    return _Parser(text, signature).parse()


def parse_file(text: str, signature: str = "e") -> list[Sentence]:
    """One sentence per non-blank line; ``#`` starts a comment."""
    out = []
    for line in text.splitlines():
        body = line.split("#", 1)[0].strip()
        if body:
            out.append(parse(body, signature))
    return out


# -- rendering ----------------------------------------------------------------

def _rterm(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, EConst):
        return "e"
    return f"f({_rterm(t.arg)})"


def _atomic(f: Formula) -> bool:
    return isinstance(f, (Rel, Ident, Eq, Not))


def _wrap(f: Formula) -> str:
    return _rform(f) if _atomic(f) else f"({_rform(f)})"


def _rform(f: Formula) -> str:
    if isinstance(f, Rel):
        return "T(" + ",".join(_rterm(t) for t in f.args) + ")"
    if isinstance(f, Ident):
        return f"I({_rterm(f.arg)})"
    if isinstance(f, Eq):
        return f"{_rterm(f.left)} = {_rterm(f.right)}"
    if isinstance(f, Not):
        inner = f.body
        if isinstance(inner, Eq):
            return f"!({_rform(inner)})"
        return "!" + _wrap(inner)
    if isinstance(f, And):
        return f"{_wrap(f.left)} & {_wrap(f.right)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left)} | {_wrap(f.right)}"
    if isinstance(f, Implies):
        return f"{_wrap(f.left)} -> {_wrap(f.right)}"
    q = "forall" if isinstance(f, Forall) else "exists"
    return f"{q} {' '.join(f.vars)}. {_rform(f.body)}"


def render(s: Union[Sentence, Formula]) -> str:
    return _rform(s.formula if isinstance(s, Sentence) else s)


# -- evaluation ---------------------------------------------------------------

def quantifier_depth(f: Formula) -> int:
    if isinstance(f, (Forall, Exists)):
        return len(f.vars) + quantifier_depth(f.body)
    if isinstance(f, Not):
        return quantifier_depth(f.body)
    if isinstance(f, (And, Or, Implies)):
        return max(quantifier_depth(f.left), quantifier_depth(f.right))
    return 0


class _Ctx:
    __slots__ = ("n", "T", "f", "e", "I")

    def __init__(self, A: Structure, signature: str):
        self.n = A.n
        self.T = A.T
        self.f = A.f
        self.I = A.I
        if isinstance(A, EStructure):
            self.e = A.e
        elif len(A.I) == 1:
            (self.e,) = A.I
        else:
            self.e = None
            if signature == "e":
                raise ValueError("the e signature needs an integral structure")


def _cterm(t: Term, slots: dict):
    if isinstance(t, Var):
        k = slots[t.name]
        return lambda env, ctx: env[k]
    if isinstance(t, EConst):
        return lambda env, ctx: ctx.e
    g = _cterm(t.arg, slots)
    return lambda env, ctx: ctx.f[g(env, ctx)]


def _cform(f: Formula, slots: dict):
    if isinstance(f, Rel):
        a, b, c = (_cterm(t, slots) for t in f.args)

        def rel(env, ctx):
            n = ctx.n
            return ctx.T[(a(env, ctx) * n + b(env, ctx)) * n + c(env, ctx)] == 1
        return rel
    if isinstance(f, Ident):
        g = _cterm(f.arg, slots)
        return lambda env, ctx: g(env, ctx) in ctx.I
    if isinstance(f, Eq):
        l, r = _cterm(f.left, slots), _cterm(f.right, slots)
        return lambda env, ctx: l(env, ctx) == r(env, ctx)
    if isinstance(f, Not):
        g = _cform(f.body, slots)
        return lambda env, ctx: not g(env, ctx)
    if isinstance(f, And):
        l, r = _cform(f.left, slots), _cform(f.right, slots)
        return lambda env, ctx: l(env, ctx) and r(env, ctx)
    if isinstance(f, Or):
        l, r = _cform(f.left, slots), _cform(f.right, slots)
        return lambda env, ctx: l(env, ctx) or r(env, ctx)
    if isinstance(f, Implies):
        l, r = _cform(f.left, slots), _cform(f.right, slots)
        return lambda env, ctx: (not l(env, ctx)) or r(env, ctx)
    # quantifiers: one environment slot per bound occurrence
    inner = dict(slots)
    ks = []
    for name in f.vars:
        k = len(inner)
        while k in inner.values():
            k += 1
        inner[name] = k
        ks.append(k)
    body = _cform(f.body, inner)
    universal = isinstance(f, Forall)

    def quant(env, ctx, _ks=tuple(ks)):
        for vals in itertools.product(range(ctx.n), repeat=len(_ks)):
            for k, v in zip(_ks, vals):
                env[k] = v
            if body(env, ctx) != universal:
                return not universal
        return universal
    return quant


def _slot_count(f: Formula) -> int:
    if isinstance(f, (Forall, Exists)):
        return len(f.vars) + _slot_count(f.body)
    if isinstance(f, Not):
        return _slot_count(f.body)
    if isinstance(f, (And, Or, Implies)):
        return max(_slot_count(f.left), _slot_count(f.right))
    return 0


def compile_sentence(s: Sentence, unsafe: bool = False):
    """Compile to a predicate ``structure -> bool`` (naive quantifier expansion)."""
    run = _cform(s.formula, {})
    width = _slot_count(s.formula) + 1
    depth = quantifier_depth(s.formula)

    def check(A: Structure) -> bool:
        if depth and A.n > 1:
            check_guard(math.ceil(depth * math.log2(A.n)), GUARDS.eval_log2_work,
                        "evaluation work (depth*log2 n)", unsafe)
        return bool(run([0] * width, _Ctx(A, s.signature)))
    return check


def evaluate(s: Sentence, A: Structure, unsafe: bool = False) -> bool:
    return compile_sentence(s, unsafe)(A)


# -- extension axioms ---------------------------------------------------------

@dataclass(frozen=True)
class ExtensionAxiom:
    """Parameters ``(m, c, c_i, c_ij)``; ``cij`` lists ``c_ij`` for ``i <= j`` row by row."""
    m: int
    c: int
    ci: tuple = ()
    cij: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "ci", tuple(self.ci))
        object.__setattr__(self, "cij", tuple(self.cij))
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if len(self.ci) != self.m or len(self.cij) != self.m * (self.m + 1) // 2:
            raise ValueError("pattern lengths do not match m")
        if any(b not in (0, 1) for b in (self.c,) + self.ci + self.cij):
            raise ValueError("pattern entries must be bits")

    def bit(self, i: int, j: int) -> int:
        """``c_ij`` for ``0 <= i <= j < m``."""
        if i > j:
            i, j = j, i
        return self.cij[i * self.m - i * (i - 1) // 2 + (j - i)]

    @classmethod
    def from_matrix(cls, c: int, ci: Sequence[int], matrix: Sequence[Sequence[int]]) -> "ExtensionAxiom":
        m = len(ci)
        return cls(m, c, tuple(ci), tuple(matrix[i][j] for i in range(m) for j in range(i, m)))


def all_patterns(m: int) -> Iterator[ExtensionAxiom]:
    k = m * (m + 1) // 2
    for bits in itertools.product((0, 1), repeat=1 + m + k):
        yield ExtensionAxiom(m, bits[0], bits[1:1 + m], bits[1 + m:])


def _lit(bit: int, f: Formula) -> Formula:
    return Not(f) if bit else f


def _conj(parts: list) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def extension_axiom(p: ExtensionAxiom, distinct: bool = True) -> Sentence:
    """The extension-axiom sentence for ``p``.

    ``forall x1..xm. (/\\ xi != e -> exists y. y != e & /\\ y != xi
    & [!]T(y,y,y) & /\\ [!]T(xi,y,y) & /\\_{i<=j} [!]T(xi,xj,y))``, where a bit
    of 1 negates.  With ``distinct`` the premise also requires the ``xi``
    to be pairwise distinct.
    """
    xs = [Var(f"x{i + 1}") for i in range(p.m)]
    y = Var("y")
    e = EConst()
    body = [Not(Eq(y, e))]
    body += [Not(Eq(y, x)) for x in xs]
    body.append(_lit(p.c, Rel((y, y, y))))
    body += [_lit(p.ci[i], Rel((xs[i], y, y))) for i in range(p.m)]
    body += [_lit(p.bit(i, j), Rel((xs[i], xs[j], y))) for i in range(p.m) for j in range(i, p.m)]
    witness = Exists(("y",), _conj(body))
    if not xs:
        return Sentence(witness, "e")
    premise = [Not(Eq(x, e)) for x in xs]
    if distinct:
        premise += [Not(Eq(xs[i], xs[j])) for i in range(p.m) for j in range(i + 1, p.m)]
    return Sentence(Forall(tuple(x.name for x in xs), Implies(_conj(premise), witness)), "e")


def has_witness(A: Structure, p: ExtensionAxiom, xs: Sequence[int], e: int) -> int | None:
    """Some ``y`` realizing pattern ``p`` over the atoms ``xs``, or ``None``."""
    n = A.n
    T = A.T
    for y in range(n):
        if y == e or y in xs:
            continue
        if (T[(y * n + y) * n + y] == 1) == bool(p.c):
            continue
        ok = True
        for i, x in enumerate(xs):
            if (T[(x * n + y) * n + y] == 1) == bool(p.ci[i]):
                ok = False
                break
            for j in range(i, p.m):
                if (T[(x * n + xs[j]) * n + y] == 1) == bool(p.bit(i, j)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return y
    return None


def extension_holds(A: Structure, p: ExtensionAxiom, distinct: bool = True,
                    atoms: Sequence[int] | None = None) -> bool:
    """Direct witness search for the extension axiom ``p``.

    ``atoms`` restricts the range of the universally quantified variables.
    """
    e = A.e if isinstance(A, EStructure) else min(A.I)
    pool = [a for a in (range(A.n) if atoms is None else atoms) if a != e]
    tuples = itertools.permutations(pool, p.m) if distinct else itertools.product(pool, repeat=p.m)
    return all(has_witness(A, p, xs, e) is not None for xs in tuples)


def witness_table(A: Structure, p: ExtensionAxiom) -> "np.ndarray":
    """Boolean array over ``(x_1, ..., x_m, y)``: ``y`` realizes ``p`` over the ``x_i``.

    Side conditions ``y != e`` and ``y != x_i`` are included; the premise on
    the ``x_i`` is not.
    """
    n, m = A.n, p.m
    e = A.e if isinstance(A, EStructure) else min(A.I)
    T = A.array().astype(bool)
    idx = np.arange(n)
    diag3 = T[idx, idx, idx]
    ok = np.ones((n,) * (m + 1), dtype=bool)
    lead = (np.newaxis,) * m
    ok &= (diag3 != bool(p.c))[lead]
    ok[(slice(None),) * m + (e,)] = False
    xy = T[:, idx, idx]  # T(x, y, y) as [x, y]
    for i in range(m):
        shape = [1] * (m + 1)
        shape[i] = shape[m] = n
        ok &= (xy != bool(p.ci[i])).reshape(shape)
        eq = (idx[:, None] == idx[None, :]).reshape(shape)
        ok &= ~eq
        for j in range(i, m):
            if i == j:
                sub = T[idx, idx, :]  # T(x, x, y) as [x, y]
                ok &= (sub != bool(p.bit(i, i))).reshape(shape)
            else:
                shape2 = [1] * (m + 1)
                shape2[i] = shape2[j] = shape2[m] = n
                ok &= (T != bool(p.bit(i, j))).reshape(shape2)
    return ok


def extension_holds_fast(A: Structure, p: ExtensionAxiom, distinct: bool = True) -> bool:
    """Vectorized :func:`extension_holds`; ``O(n^(m+1))`` memory."""
    n, m = A.n, p.m
    e = A.e if isinstance(A, EStructure) else min(A.I)
    found = witness_table(A, p).any(axis=-1)
    if m == 0:
        return bool(found)
    premise = np.ones((n,) * m, dtype=bool)
    for i in range(m):
        premise[(slice(None),) * i + (e,)] = False
    if distinct and m >= 2:
        grids = np.indices((n,) * m)
        for i in range(m):
            for j in range(i + 1, m):
                premise &= grids[i] != grids[j]
    return bool(np.all(found | ~premise))


def evaluate_restricted(s: Sentence, A: Structure, atoms: Sequence[int]) -> bool:
    """Evaluate ``s`` with its outermost universal block ranging over ``atoms`` only."""
    f = s.formula
    if not isinstance(f, Forall):
        return evaluate(s, A)
    run = _cform(f.body, {v: k for k, v in enumerate(f.vars)})
    ctx = _Ctx(A, s.signature)
    width = len(f.vars) + _slot_count(f.body) + 1
    for vals in itertools.product(list(atoms), repeat=len(f.vars)):
        if not run(list(vals) + [0] * (width - len(vals)), ctx):
            return False
    return True


def evaluate_instance(s: Sentence, A: Structure, values: Sequence[int]) -> bool:
    """Evaluate the body of the outermost universal block with its variables set to ``values``."""
    f = s.formula
    if not isinstance(f, Forall):
        if values:
            raise ValueError("sentence has no outer universal block")
        return evaluate(s, A)
    if len(values) != len(f.vars):
        raise ValueError(f"expected {len(f.vars)} values, got {len(values)}")
    run = _cform(f.body, {v: k for k, v in enumerate(f.vars)})
    width = len(f.vars) + _slot_count(f.body) + 1
    return bool(run(list(values) + [0] * (width - len(values)), _Ctx(A, s.signature)))


# -- class axioms and 0-1 scans ----------------------------------------------

AXIOMS_E = {
    "IP": "forall a b c. T(a,b,c) -> T(f(a),c,b) & T(c,f(b),a)",
    "II": "forall a b. (a = b -> T(a,e,b)) & (T(a,e,b) -> a = b)",
    "symmetric": "forall x. f(x) = x",
}


def zero_one_scan(s: Sentence, sizes: Sequence[int], samples: int = 10_000, seed: int = 0,
                  threads: int = 1, exact: bool | None = False):
    """One labelled-probability estimate of ``s`` per size over uniform e-form samples."""
    from .probability import estimate
    return [estimate(s, n, samples=samples, seed=seed, cls="FSIASe", exact=exact, threads=threads)
            for n in sizes]
