"""A tiny exact expression language.

Used for condition polynomials and certificates in the case catalog, and for
Darboux expressions on the command line::

    x^(5/2)*y^3*(1+a/2*x)^(-1/2-2*d/a+g/a)
    exp((d*x-b*y+c*z)/(1))^-1
    x*y*(1+a*x-e*y+k*z)^(-1-b/e)

Numbers are integers; rationals are written with ``/``.  Decimal literals are
rejected so that nothing is ever parsed through floating point.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Poly, Ring


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0, line: int = 1):
        self.text = text
        self.pos = pos
        self.line = line
        self.column = pos + 1
        super().__init__(f"{message} (line {line}, column {self.column})")


class EvalError(ValueError):
    pass


_OPS = set("+-*/^()")


def tokenize(text: str):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and (text[j] == "." or text[j] in "eE" and j + 1 < n and text[j + 1].isdigit()):
                raise ParseError("decimal literals are not allowed; write p/q", text, i)
            toks.append(("num", int(text[i:j]), i))
            i = j
        elif ch == ".":
            raise ParseError("decimal literals are not allowed; write p/q", text, i)
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("id", text[i:j], i))
            i = j
        elif ch == "*" and i + 1 < n and text[i + 1] == "*":
            toks.append(("op", "^", i))
            i += 2
        elif ch in _OPS:
            toks.append(("op", ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", text, i)
    toks.append(("end", None, n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", self.text, t[2])
        return t

    def parse(self):
        node = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected token {t[1]!r}", self.text, t[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.unary()
            node = ("mul" if op == "*" else "div", node, rhs)
        return node

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            inner = self.unary()
            return ("neg", inner) if t[1] == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            exponent = self.unary()
            return ("pow", base, exponent)
        return base

    def atom(self):
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            return ("num", Fraction(val))
        if kind == "id":
            if val == "exp":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ("exp", arg)
            return ("var", val)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return ("paren", node)
        raise ParseError("unexpected end of input" if kind == "end" else f"unexpected {val!r}",
                         self.text, pos)


def parse(text: str):
    """Parse ``text`` into a nested-tuple syntax tree."""
    return _Parser(text).parse()


def free_names(node) -> set[str]:
    tag = node[0]
    if tag == "var":
        return {node[1]}
    if tag == "num":
        return set()
    out = set()
    for child in node[1:]:
        out |= free_names(child)
    return out


def eval_scalar(node, env) -> Fraction:
    """Evaluate to a Fraction; every name must be bound in ``env``."""
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "var":
        if node[1] not in env:
            raise EvalError(f"unbound name {node[1]!r} in a numeric context")
        return Fraction(env[node[1]])
    if tag == "paren":
        return eval_scalar(node[1], env)
    if tag == "neg":
        return -eval_scalar(node[1], env)
    if tag == "exp":
        raise EvalError("exp() has no exact rational value")
    a = eval_scalar(node[1], env)
    b = eval_scalar(node[2], env)
    if tag == "add":
        return a + b
    if tag == "sub":
        return a - b
    if tag == "mul":
        return a * b
    if tag == "div":
        if not b:
            raise EvalError("division by zero")
        return a / b
    if tag == "pow":
        if b.denominator != 1:
            raise EvalError("non-integer power of a number")
        if not a and b < 0:
            raise EvalError("division by zero")
        return a ** int(b)
    raise EvalError(f"bad node {tag}")


def eval_poly(node, ring: Ring, env=None) -> Poly:
    """Evaluate to a polynomial over ``ring``.

    Names in ``ring`` become variables; other names are looked up in ``env``
    (values are Fractions).  Division is allowed only by constants.
    """
    env = env or {}
    tag = node[0]
    if tag == "num":
        return ring.const(node[1])
    if tag == "var":
        name = node[1]
        if name in ring:
            return ring.gen(name)
        if name in env:
            v = env[name]
            return v if isinstance(v, Poly) else ring.const(v)
        raise EvalError(f"unknown name {name!r}")
    if tag == "paren":
        return eval_poly(node[1], ring, env)
    if tag == "neg":
        return -eval_poly(node[1], ring, env)
    if tag == "exp":
        raise EvalError("exp() is not a polynomial")
    if tag == "pow":
        base = eval_poly(node[1], ring, env)
        e = eval_scalar(node[2], env)
        if e.denominator != 1 or e < 0:
            raise EvalError("polynomial powers must be non-negative integers")
        return base ** int(e)
    a = eval_poly(node[1], ring, env)
    b = eval_poly(node[2], ring, env)
    if tag == "add":
        return a + b
    if tag == "sub":
        return a - b
    if tag == "mul":
        return a * b
    if tag == "div":
        if not b.is_constant() or not b:
            raise EvalError("polynomial division only by nonzero constants")
        return a / b.constant_term()
    raise EvalError(f"bad node {tag}")


def parse_poly(text: str, ring: Ring, env=None) -> Poly:
    return eval_poly(parse(text), ring, env)


def eval_rational_function(node, ring: Ring, env=None):
    """Evaluate to a (numerator, denominator) pair of polynomials, unreduced."""
    env = env or {}
    tag = node[0]
    if tag in ("num", "var", "exp"):
        return eval_poly(node, ring, env), ring.one()
    if tag == "paren":
        return eval_rational_function(node[1], ring, env)
    if tag == "neg":
        n, d = eval_rational_function(node[1], ring, env)
        return -n, d
    if tag == "pow":
        n, d = eval_rational_function(node[1], ring, env)
        e = eval_scalar(node[2], env)
        if e.denominator != 1:
            raise EvalError("rational functions only take integer powers")
        e = int(e)
        if e < 0:
            n, d, e = d, n, -e
            if not d:
                raise EvalError("division by zero")
        return n ** e, d ** e
    n1, d1 = eval_rational_function(node[1], ring, env)
    n2, d2 = eval_rational_function(node[2], ring, env)
    if tag == "add":
        return n1 * d2 + n2 * d1, d1 * d2
    if tag == "sub":
        return n1 * d2 - n2 * d1, d1 * d2
    if tag == "mul":
        return n1 * n2, d1 * d2
    if tag == "div":
        if not n2:
            raise EvalError("division by zero")
        return n1 * d2, d1 * n2
    raise EvalError(f"bad node {tag}")



def rename(node, mapping):
    """Rename variables throughout a syntax tree."""
    tag = node[0]
    if tag == "var":
        return ("var", mapping.get(node[1], node[1]))
    if tag == "num":
        return node
    return (tag,) + tuple(rename(c, mapping) for c in node[1:])


def to_text(node) -> str:
    """Render a syntax tree back to source text (fully parenthesized where needed)."""
    tag = node[0]
    if tag == "num":
        v = node[1]
        return str(v.numerator) if v.denominator == 1 else f"({v.numerator}/{v.denominator})"
    if tag == "var":
        return node[1]
    if tag == "paren":
        return f"({to_text(node[1])})"
    if tag == "neg":
        return f"-({to_text(node[1])})"
    if tag == "exp":
        return f"exp({to_text(node[1])})"
    sym = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}[tag]
    left = to_text(node[1])
    right = to_text(node[2])
    if tag in ("mul", "div", "pow") and node[1][0] in ("add", "sub", "neg"):
        left = f"({left})"
    if tag == "pow" and node[1][0] in ("mul", "div", "pow"):
        left = f"({left})"
    if tag in ("sub", "mul", "div", "pow") and node[2][0] in ("add", "sub", "neg", "mul", "div"):
        if not (tag == "mul" and node[2][0] in ("mul",)):
            right = f"({right})"
    return f"{left}{sym}{right}"
