"""Line-oriented session files.

::

    ring Z
    s s0 = [[2]]
    mat f = [[1,1],[0,1]]
    cx C = {(-1,1),(0,1)} d(-1) = [[2]]
    cert K = diag(s0, id1) below(0,1) = [[5]]
    tower T = layer(K, 0) layer(K2, 1) glue(0,1,-1) = [[2]]
    expr e = inv(s0) + inv(s0)
    fwitness W Z=0 Zp=1 T1=0 T2=1 k1=diag() k2=diag(s0) p=0 g=0 alpha1_0=[[0,1,1,-1]] alpha1_1=[[1,1,-2]] alpha2=[[1]]

``#`` starts a comment.  ``s`` declarations are collected before anything
else is read, so they may appear anywhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .addcat import Matrix
from .coeff import DomainError, Ring, ring_from_spec
from .complexes import BoundedComplex
from .equality import FactorizationWitness
from .localization import (Forward, InverseOfS, LocTriple, ZigZag, from_plain, invert_s, triple_add,
                           triple_compose, triple_dsum, triple_neg, zigzag_normalize)
from .triangular import SSet, TriangularCert
from .weights import Layer, Tower, build_tower


class SessionError(Exception):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message, self.line, self.col = message, line, col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        super().__init__(where + message)


@dataclass
class Session:
    ring: Ring
    sset: SSet
    matrices: dict[str, Matrix] = field(default_factory=dict)
    complexes: dict[str, BoundedComplex] = field(default_factory=dict)
    certs: dict[str, TriangularCert] = field(default_factory=dict)
    towers: dict[str, Tower] = field(default_factory=dict)
    exprs: dict[str, "Node"] = field(default_factory=dict)
    witnesses: dict[str, FactorizationWitness] = field(default_factory=dict)

    def s_index(self, name: str) -> int | None:
        try:
            return self.sset.names.index(name)
        except ValueError:
            return None


# --------------------------------------------------------------------------
# low-level literal parsing


def _split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside brackets and parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [p.strip() for p in out]


def parse_matrix(ring: Ring, text: str, shape: tuple[int, int] | None = None) -> Matrix:
    text = text.strip()
    m = re.fullmatch(r"zeros\(\s*(\d+)\s*,\s*(\d+)\s*\)", text)
    if m:
        return Matrix.zero(ring, int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"eye\(\s*(\d+)\s*\)", text)
    if m:
        return Matrix.identity(ring, int(m.group(1)))
    if text == "0":
        if shape is None:
            raise DomainError("'0' needs a known shape")
        return Matrix.zero(ring, *shape)
    if not (text.startswith("[") and text.endswith("]")):
        raise DomainError(f"expected a matrix literal, got {text!r}")
    inner = text[1:-1].strip()
    rows = []
    if inner:
        for part in _split_top(inner):
            if not (part.startswith("[") and part.endswith("]")):
                raise DomainError(f"expected a row like [a, b], got {part!r}")
            body = part[1:-1].strip()
            rows.append([ring.parse(x) for x in _split_top(body)] if body else [])
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise DomainError("rows have different lengths")
    ncols = widths.pop() if widths else 0
    if shape is not None and rows and ncols == 0:
        ncols = shape[1]
    out = Matrix(ring, len(rows), ncols, rows)
    if shape is not None and not rows:
        out = Matrix.zero(ring, *shape) if 0 in shape else out
    if shape is not None and out.shape != shape:
        raise DomainError(f"matrix has shape {out.shape}, expected {shape}")
    return out


_ASSIGN_RE = re.compile(r"(d|below|glue)\(([^)]*)\)\s*=\s*")


def _keyed_matrices(text: str):
    """Pairs ``(key, args, matrix_text)`` from ``key(args) = [[...]]`` sequences."""
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _ASSIGN_RE.match(text, pos)
        if not m:
            raise DomainError(f"expected d(..)/below(..)/glue(..) = matrix near {text[pos:pos + 20]!r}")
        start = m.end()
        end = _matrix_end(text, start)
        out.append((m.group(1), m.group(2), text[start:end]))
        pos = end
        while pos < len(text) and text[pos] == " ":
            pos += 1
    return out


def _matrix_end(text: str, start: int) -> int:
    m = re.match(r"(zeros\([^)]*\)|eye\([^)]*\))", text[start:])
    if m:
        return start + m.end()
    if start >= len(text) or text[start] != "[":
        raise DomainError(f"expected a matrix literal at {text[start:start + 20]!r}")
    depth = 0
    for j in range(start, len(text)):
        if text[j] == "[":
            depth += 1
        elif text[j] == "]":
            depth -= 1
            if depth == 0:
                return j + 1
    raise DomainError("unbalanced brackets in matrix literal")


def _ints(text: str, n: int) -> list[int]:
    parts = _split_top(text)
    if len(parts) != n:
        raise DomainError(f"expected {n} integers, got {text!r}")
    return [int(p) for p in parts]


# --------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class Node:
    op: str  # name | inv | id | add | sub | neg | mul | dsum
    args: tuple = ()
    name: str = ""
    n: int = 0


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    for m in _TOKEN_RE.finditer(text):
        if m.group(1):
            toks.append(("int", m.group(1), m.start(1)))
        elif m.group(2):
            toks.append(("name", m.group(2), m.start(2)))
        elif m.group(3) and not m.group(3).isspace():
            toks.append(("sym", m.group(3), m.start(3)))
    return toks


class _ExprParser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def error(self, msg: str):
        col = self.toks[self.i][2] + 1 if self.i < len(self.toks) else len(self.text) + 1
        raise SessionError(msg, col=col)

    def peek(self, value: str | None = None):
        if self.i >= len(self.toks):
            return None
        t = self.toks[self.i]
        if value is None or t[1] == value:
            return t
        return None

    def take(self, value: str | None = None, kind: str | None = None):
        t = self.peek()
        if t is None or (value is not None and t[1] != value) or (kind is not None and t[0] != kind):
            self.error(f"expected {value or kind}")
        self.i += 1
        return t

    def parse(self) -> Node:
        node = self.expr()
        if self.i != len(self.toks):
            self.error(f"unexpected {self.toks[self.i][1]!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek("+") or self.peek("-"):
            op = self.take()[1]
            node = Node("add" if op == "+" else "sub", (node, self.term()))
        return node

    def term(self) -> Node:
        parts = [self.factor()]
        while self.peek("*"):
            self.take("*")
            parts.append(self.factor())
        return parts[0] if len(parts) == 1 else Node("mul", tuple(parts))

    def factor(self) -> Node:
        if self.peek("-"):
            self.take("-")
            return Node("neg", (self.factor(),))
        if self.peek("("):
            self.take("(")
            node = self.expr()
            self.take(")")
            return node
        t = self.take(kind="name")
        if t[1] == "inv" and self.peek("("):
            self.take("(")
            name = self.take(kind="name")[1]
            self.take(")")
            return Node("inv", name=name)
        if t[1] == "dsum" and self.peek("("):
            self.take("(")
            a = self.expr()
            self.take(",")
            b = self.expr()
            self.take(")")
            return Node("dsum", (a, b))
        if t[1] == "id" and self.peek("("):
            self.take("(")
            n = int(self.take(kind="int")[1])
            self.take(")")
            return Node("id", n=n)
        return Node("name", name=t[1])


def parse_expr(text: str) -> Node:
    return _ExprParser(text).parse()


def _zigzag_token(sess: Session, node: Node):
    if node.op == "inv":
        k = sess.s_index(node.name)
        if k is None:
            raise SessionError(f"inv() needs an element of S, got {node.name!r}")
        return InverseOfS(k)
    if node.op == "id":
        return Forward(Matrix.identity(sess.ring, node.n))
    if node.op == "name" and node.name in sess.matrices:
        return Forward(sess.matrices[node.name])
    return None


def expr_zigzag(sess: Session, node: Node) -> ZigZag | None:
    """The zig-zag of a product of plain atoms, else ``None``."""
    parts = node.args if node.op == "mul" else (node,)
    toks = [_zigzag_token(sess, p) for p in parts]
    if any(t is None for t in toks):
        return None
    try:
        return ZigZag(sess.sset, tuple(toks))
    except DomainError as e:
        raise SessionError(str(e)) from e


def eval_expr(sess: Session, node: Node) -> LocTriple:
    try:
        z = expr_zigzag(sess, node)
        if z is not None:
            return zigzag_normalize(z)
        if node.op == "name":
            if node.name in sess.exprs:
                return eval_expr(sess, sess.exprs[node.name])
            raise SessionError(f"unknown name {node.name!r}")
        if node.op == "mul":
            vals = [eval_expr(sess, a) for a in node.args]
            out = vals[0]
            for v in vals[1:]:
                out = triple_compose(out, v)
            return out
        if node.op == "add":
            return triple_add(eval_expr(sess, node.args[0]), eval_expr(sess, node.args[1]))
        if node.op == "sub":
            return triple_add(eval_expr(sess, node.args[0]), triple_neg(eval_expr(sess, node.args[1])))
        if node.op == "neg":
            return triple_neg(eval_expr(sess, node.args[0]))
        if node.op == "dsum":
            return triple_dsum(eval_expr(sess, node.args[0]), eval_expr(sess, node.args[1]))
    except DomainError as e:
        raise SessionError(str(e)) from e
    raise SessionError(f"cannot evaluate {node.op!r}")


def evaluate(sess: Session, text: str) -> LocTriple:
    return eval_expr(sess, parse_expr(text))


# --------------------------------------------------------------------------
# declarations


def _parse_tags(sess: Session, text: str):
    m = re.fullmatch(r"diag\((.*)\)", text.strip())
    if not m:
        raise DomainError(f"expected diag(...), got {text!r}")
    tags = []
    for part in _split_top(m.group(1)):
        if not part:
            continue
        idm = re.fullmatch(r"id(\d+)", part)
        if idm:
            tags.append(("id", int(idm.group(1))))
            continue
        k = sess.s_index(part)
        if k is None:
            raise DomainError(f"{part!r} is not an element of S")
        tags.append(("S", k))
    return tags


def _cert_ref(sess: Session, text: str) -> TriangularCert:
    text = text.strip()
    if text in sess.certs:
        return sess.certs[text]
    return TriangularCert(sess.sset, _parse_tags(sess, text))


def _decl_cert(sess: Session, rest: str) -> TriangularCert:
    m = re.match(r"(diag\([^)]*\))\s*", rest)
    if not m:
        raise DomainError("cert needs diag(...)")
    tags = _parse_tags(sess, m.group(1))
    below = {}
    for key, args, mtext in _keyed_matrices(rest[m.end():]):
        if key != "below":
            raise DomainError(f"unexpected {key}(...) in cert")
        k, l = _ints(args, 2)
        below[(k, l)] = parse_matrix(sess.ring, mtext)
    return TriangularCert(sess.sset, tags, below)


def _decl_cx(sess: Session, rest: str) -> BoundedComplex:
    m = re.match(r"\{([^}]*)\}\s*", rest)
    if not m:
        raise DomainError("cx needs {(degree,rank),...}")
    ranks = {}
    for pair in re.findall(r"\(([^)]*)\)", m.group(1)):
        deg, rk = _ints(pair, 2)
        if deg in ranks:
            raise DomainError(f"degree {deg} declared twice")
        ranks[deg] = rk
    diffs = {}
    for key, args, mtext in _keyed_matrices(rest[m.end():]):
        if key != "d":
            raise DomainError(f"unexpected {key}(...) in cx")
        (n,) = _ints(args, 1)
        diffs[n] = parse_matrix(sess.ring, mtext)
    return BoundedComplex(sess.ring, ranks, diffs)


def _decl_tower(sess: Session, rest: str) -> Tower:
    layers = []
    pos = 0
    for lm in re.finditer(r"layer\(\s*([A-Za-z_]\w*)\s*,\s*(-?\d+)\s*\)\s*", rest):
        if lm.start() != pos:
            break
        name = lm.group(1)
        if name not in sess.certs:
            raise DomainError(f"unknown certificate {name!r}")
        layers.append(Layer(sess.certs[name], int(lm.group(2))))
        pos = lm.end()
    if not layers:
        raise DomainError("tower needs at least one layer(cert, shift)")
    glue: dict = {}
    for key, args, mtext in _keyed_matrices(rest[pos:]):
        if key != "glue":
            raise DomainError(f"unexpected {key}(...) in tower")
        j, k, n = _ints(args, 3)
        glue.setdefault((j, k), {})[n] = parse_matrix(sess.ring, mtext)
    return build_tower(sess.sset, layers, glue)


_FW_FIELDS = ("Z", "Zp", "T1", "T2", "k1", "k2", "p", "g", "alpha1_0", "alpha1_1", "alpha2")


def _decl_fwitness(sess: Session, rest: str) -> FactorizationWitness:
    vals = {}
    for item in _split_top(rest, " "):
        if not item:
            continue
        if "=" not in item:
            raise DomainError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        if k not in _FW_FIELDS:
            raise DomainError(f"unknown witness field {k!r}")
        vals[k] = v
    missing = [f for f in _FW_FIELDS if f not in vals]
    if missing:
        raise DomainError(f"witness is missing {', '.join(missing)}")
    Z, Zp, T1, T2 = (int(vals[k]) for k in ("Z", "Zp", "T1", "T2"))
    c1, c2 = _cert_ref(sess, vals["k1"]), _cert_ref(sess, vals["k2"])
    R = sess.ring
    blocks = {
        "p": parse_matrix(R, vals["p"], (T2, Z)),
        "g": parse_matrix(R, vals["g"], (Zp, T1)),
        "alpha1_0": parse_matrix(R, vals["alpha1_0"]),
        "alpha1_1": parse_matrix(R, vals["alpha1_1"]),
        "alpha2": parse_matrix(R, vals["alpha2"]),
    }
    return FactorizationWitness(Z=Z, Zp=Zp, T1=T1, T2=T2, k1=c1.assembled, k1_cert=c1,
                                k2=c2.assembled, k2_cert=c2, **blocks)


_DECL_RE = re.compile(r"(ring|s|mat|cx|cert|tower|expr|fwitness)\s+(.*)$")
_NAMED_RE = re.compile(r"([A-Za-z_][A-Za-z_0-9']*)\s*(=)?\s*(.*)$")
_RESERVED = {"inv", "dsum", "id", "diag", "eye", "zeros"}


def parse_session(text: str) -> Session:
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            lines.append((no, line))
    ring: Ring | None = None
    s_decls = []
    for no, line in lines:
        m = _DECL_RE.match(line.strip())
        if not m:
            raise SessionError(f"unknown declaration {line.strip().split()[0]!r}", no, 1)
        if m.group(1) == "ring":
            if ring is not None:
                raise SessionError("ring declared twice", no)
            try:
                ring = ring_from_spec(m.group(2).strip())
            except (DomainError, ValueError) as e:
                raise SessionError(str(e), no) from e
        elif m.group(1) == "s":
            s_decls.append((no, m.group(2)))
    ring = ring or ring_from_spec("Z")

    names: set[str] = set()

    def claim(name: str, no: int):
        if name in names or name in _RESERVED:
            raise SessionError(f"name {name!r} already used", no)
        names.add(name)

    s_names, s_mats = [], []
    for no, rest in s_decls:
        nm = _NAMED_RE.match(rest)
        if not nm or not nm.group(2):
            raise SessionError("expected: s NAME = MATRIX", no)
        claim(nm.group(1), no)
        try:
            s_mats.append(parse_matrix(ring, nm.group(3)))
        except (DomainError, ValueError) as e:
            raise SessionError(str(e), no) from e
        s_names.append(nm.group(1))
    sset = SSet(ring, tuple(s_mats), names=tuple(s_names))
    sess = Session(ring, sset)
    for name, m in zip(s_names, s_mats):
        sess.matrices[name] = m

    for no, line in lines:
        m = _DECL_RE.match(line.strip())
        kind, rest = m.group(1), m.group(2)
        if kind in ("ring", "s"):
            continue
        if kind == "fwitness":
            nm = re.match(r"([A-Za-z_]\w*)\s+(.*)$", rest)
            if not nm:
                raise SessionError("expected: fwitness NAME key=value ...", no)
            name, body = nm.group(1), nm.group(2)
        else:
            nm = _NAMED_RE.match(rest)
            if not nm or not nm.group(2):
                raise SessionError(f"expected: {kind} NAME = ...", no)
            name, body = nm.group(1), nm.group(3)
        claim(name, no)
        try:
            if kind == "mat":
                sess.matrices[name] = parse_matrix(ring, body)
            elif kind == "cx":
                sess.complexes[name] = _decl_cx(sess, body)
            elif kind == "cert":
                sess.certs[name] = _decl_cert(sess, body)
            elif kind == "tower":
                sess.towers[name] = _decl_tower(sess, body)
            elif kind == "expr":
                node = parse_expr(body)
                eval_expr(sess, node)  # validate shapes now
                sess.exprs[name] = node
            elif kind == "fwitness":
                sess.witnesses[name] = _decl_fwitness(sess, body)
        except SessionError as e:
            raise SessionError(e.message, no, e.col) from e
        except (DomainError, ValueError) as e:
            raise SessionError(str(e), no) from e
    return sess
