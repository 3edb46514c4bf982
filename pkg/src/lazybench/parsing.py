"""Reader for the concrete syntax.

    e ::= \\x y. e | letrec x = e, ... in e | if e then e else e
        | case [T] e of { C x .. -> e ; ... } | spine
    spine ::= head atom*        (seq takes 2 atoms, C takes arity(C))
    atom ::= x | C | ( e ) | [.]

``λ`` is accepted for the backslash and ``--`` starts a comment.
"""

from __future__ import annotations

import re
from typing import List, Optional, Tuple

from .syntax import (HOLE, Alt, App, Case, Constr, Context, Expr, Lam, Letrec,
                     Seq, SignatureError, SignatureTable, STANDARD, Var,
                     ensure_distinct)

KEYWORDS = {"letrec", "in", "seq", "case", "of", "if", "then", "else"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<hole>\[\s*[.·]?\s*\])
  | (?P<arrow>->)
  | (?P<lam>\\|λ)
  | (?P<punct>[().{},;=])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.X)


class ParseError(ValueError):
    def __init__(self, msg: str, offset: Optional[int] = None, text: str = ""):
        if offset is not None:
            line = text.count("\n", 0, offset) + 1
            col = offset - (text.rfind("\n", 0, offset) + 1) + 1
            msg = f"{line}:{col}: {msg}"
        super().__init__(msg)
        self.offset = offset


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", i, text)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            if kind == "ident" and val in KEYWORDS:
                kind = "kw"
            out.append((kind, val, i))
        i = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, sig: SignatureTable, allow_hole: bool, allow_reserved: bool):
        self.text = text
        self.sig = sig
        self.toks = tokenize(text)
        self.i = 0
        self.allow_hole = allow_hole
        self.allow_reserved = allow_reserved

    # token helpers
    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, tok[2], self.text)

    def expect(self, val):
        t = self.next()
        if t[1] != val:
            raise self.error(f"expected {val!r}, found {t[1] or 'end of input'!r}", t)
        return t

    def at(self, val):
        return self.peek()[1] == val and self.peek()[0] != "ident"

    def var_name(self):
        t = self.next()
        if t[0] != "ident" or not t[1][0].islower() and t[1][0] != "_":
            raise self.error(f"expected a variable, found {t[1] or 'end of input'!r}", t)
        if t[1].startswith("_") and not self.allow_reserved:
            raise self.error(f"names starting with '_' are reserved: {t[1]}", t)
        return t[1]

    # grammar
    def expr(self) -> Expr:
        t = self.peek()
        if t[0] == "lam":
            self.next()
            names = [self.var_name()]
            while self.peek()[0] == "ident":
                names.append(self.var_name())
            self.expect(".")
            body = self.expr()
            for n in reversed(names):
                body = Lam(n, body)
            return body
        if t[0] == "kw" and t[1] == "letrec":
            return self.letrec()
        if t[0] == "kw" and t[1] == "if":
            self.next()
            c = self.expr()
            self.expect("then")
            a = self.expr()
            self.expect("else")
            b = self.expr()
            return Case("Bool", c, (Alt("True", (), a), Alt("False", (), b)))
        if t[0] == "kw" and t[1] == "case":
            return self.case()
        return self.spine()

    def letrec(self) -> Expr:
        self.expect("letrec")
        binds = []
        seen = set()
        if self.at("in"):
            raise self.error("letrec needs at least one binding")
        while True:
            tok = self.peek()
            x = self.var_name()
            if x in seen:
                raise self.error(f"duplicate letrec binder {x}", tok)
            seen.add(x)
            self.expect("=")
            binds.append((x, self.expr()))
            if self.at(","):
                self.next()
                continue
            break
        self.expect("in")
        return Letrec(tuple(binds), self.expr())

    def case(self) -> Expr:
        start = self.next()
        tname = None
        t0, t1 = self.peek(), self.peek(1)
        if (t0[0] == "ident" and t0[1][0].isupper() and self.sig.has_type(t0[1])
                and not (self.sig.has_constructor(t0[1]) and t1[1] == "of")):
            tname = self.next()[1]
        scrut = self.expr()
        self.expect("of")
        self.expect("{")
        alts = {}
        first = None
        while not self.at("}"):
            tok = self.peek()
            c = self.next()[1]
            if tok[0] != "ident" or not c[0].isupper():
                raise self.error(f"expected a constructor pattern, found {c!r}", tok)
            if not self.sig.has_constructor(c):
                raise self.error(f"unknown constructor {c}", tok)
            if tname is None:
                tname = self.sig.type_of(c)
            if self.sig.type_of(c) != tname:
                raise self.error(f"alternative {c} does not belong to type {tname}", tok)
            if c in alts:
                raise self.error(f"duplicate alternative {c}", tok)
            vs = []
            while self.peek()[0] == "ident":
                vs.append(self.var_name())
            if len(vs) != self.sig.arity(c):
                raise self.error(f"pattern {c} needs {self.sig.arity(c)} variables, got {len(vs)}", tok)
            if len(set(vs)) != len(vs):
                raise self.error(f"pattern variables of {c} must be distinct", tok)
            self.expect("->")
            alts[c] = Alt(c, tuple(vs), self.expr())
            first = first or tok
            if self.at(";"):
                self.next()
            elif not self.at("}"):
                raise self.error("expected ';' or '}'")
        self.expect("}")
        if tname is None:
            raise self.error("case without alternatives needs a type", start)
        missing = [c for c, _ in self.sig.constructors(tname) if c not in alts]
        if missing:
            raise self.error(f"case over {tname} is missing alternatives for {', '.join(missing)}", start)
        return Case(tname, scrut, tuple(alts[c] for c, _ in self.sig.constructors(tname)))

    def starts_atom(self) -> bool:
        t = self.peek()
        if t[0] == "ident":
            return True
        if t[0] == "hole":
            return True
        return t[0] == "punct" and t[1] == "("

    def starts_open(self) -> bool:
        t = self.peek()
        return t[0] == "lam" or (t[0] == "kw" and t[1] in ("letrec", "case", "if"))

    def atom(self):
        """Returns an Expr or a ('head', name, token) marker for seq/constructors."""
        t = self.next()
        if t[0] == "hole":
            if not self.allow_hole:
                raise self.error("holes are only allowed in contexts", t)
            return HOLE
        if t[0] == "punct" and t[1] == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t[0] == "kw" and t[1] == "seq":
            return ("head", "seq", t)
        if t[0] == "ident":
            if t[1][0].isupper():
                if t[1] == "Bot":
                    raise self.error("Bot is not allowed in source programs", t)
                if not self.sig.has_constructor(t[1]):
                    raise self.error(f"unknown constructor {t[1]}", t)
                return ("head", t[1], t)
            self.i -= 1
            return Var(self.var_name())
        raise self.error(f"unexpected {t[1] or 'end of input'!r}", t)

    def spine(self) -> Expr:
        if not (self.starts_atom() or (self.peek()[0] == "kw" and self.peek()[1] == "seq")):
            raise self.error(f"unexpected {self.peek()[1] or 'end of input'!r}")
        items = []
        while True:
            if self.starts_atom() or (self.peek()[0] == "kw" and self.peek()[1] == "seq"):
                items.append(self.atom())
            elif self.starts_open():
                items.append(self.expr())
                break
            else:
                break
        return self.build(items)

    def build(self, items) -> Expr:
        head, rest = items[0], items[1:]
        k = 0
        if isinstance(head, tuple):
            _, name, tok = head
            n = 2 if name == "seq" else self.sig.arity(name)
            if len(rest) < n:
                raise self.error(f"wrong arity: {name} expects {n} arguments, got {len(rest)}", tok)
            args = [self.operand(a) for a in rest[:n]]
            head = Seq(*args) if name == "seq" else Constr(name, tuple(args))
            k = n
        for a in rest[k:]:
            head = App(head, self.operand(a))
        return head

    def operand(self, a) -> Expr:
        if isinstance(a, tuple):
            _, name, tok = a
            n = 2 if name == "seq" else self.sig.arity(name)
            if n:
                raise self.error(f"wrong arity: {name} expects {n} arguments, got 0", tok)
            return Constr(name, ())
        return a


def parse(text: str, sig: SignatureTable = STANDARD, *, allow_hole: bool = False,
          allow_reserved: bool = False, rename: bool = True) -> Expr:
    """Parse one expression.  Binders are renamed apart when they clash."""
    p = _Parser(text, sig, allow_hole, allow_reserved)
    e = p.expr()
    if p.peek()[0] != "eof":
        raise p.error(f"unexpected {p.peek()[1]!r} after expression")
    return ensure_distinct(e) if rename else e


def parse_context(text: str, sig: SignatureTable = STANDARD) -> Context:
    try:
        return Context(parse(text, sig, allow_hole=True, rename=False))
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from None


__all__ = ["parse", "parse_context", "ParseError", "tokenize", "SignatureError"]
