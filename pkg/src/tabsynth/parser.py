"""Text syntax for expressions, terms, formulae and literals.

Everything is prefix application over a comma list, e.g. ``or(p, q)``,
``nu1(exists(r, p), x)``, ``eq(nu0(l), x)``, ``not(nu1(p, x))``, with
quantifiers written ``forall x. ...`` / ``exists y. ...`` extending as far
right as possible.  Comments run from ``#`` to end of line.

The same token in different positions can denote an object-language
connective or a first-order connective (``or(p, q)`` inside ``nu1`` is a
concept; at formula level it is disjunction).  Parsing builds a generic tree
first and elaborates it against the expected kind.
"""

from __future__ import annotations

from . import syntax as sx


class SpecSyntaxError(sx.TabError):
    def __init__(self, message, line=None, col=None):
        at = "" if line is None else " at %s:%s" % (line, "?" if col is None else col)
        super().__init__(message + at)
        self.line = line
        self.col = col


class Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind, value, line, col):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col

    def __repr__(self):
        return "Token(%s, %r)" % (self.kind, self.value)


_PUNCT = {"(": "lpar", ")": "rpar", ",": "comma", ".": "dot", "|": "bar",
          "/": "slash", ":": "colon", "[": "lbrk", "]": "rbrk"}
_MULTI = {"<->": "equiv", "->": "arrow"}


def tokenize(text, line_offset=1):
    toks = []
    line, col = line_offset, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        two = text[i:i + 3]
        if two == "<->":
            toks.append(Token("equiv", "<->", line, col))
            i += 3
            col += 3
            continue
        if text[i:i + 2] == "->":
            toks.append(Token("arrow", "->", line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            toks.append(Token(_PUNCT[ch], ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise SpecSyntaxError("unexpected character %r" % ch, line, col)
    toks.append(Token("eof", None, line, col))
    return toks


# generic parse tree: ("app", name, [trees]) | ("name", name) | ("quant", q, var, tree)

class TreeParser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t.kind != kind:
            raise SpecSyntaxError("expected %s, found %r" % (kind, t.value), t.line, t.col)
        return t

    def at_end(self):
        return self.peek().kind == "eof"

    def tree(self):
        t = self.peek()
        if t.kind == "name" and t.value in ("forall", "exists") \
                and self.toks[self.i + 1].kind == "name" \
                and self.toks[self.i + 2].kind == "dot":
            # quantifier form `forall x. ...`; `exists(...)` may instead be an
            # object connective application, handled below
            self.next()
            var = self.expect("name")
            self.expect("dot")
            body = self.tree()
            return ("quant", t.value, var.value, body, t)
        if t.kind != "name":
            raise SpecSyntaxError("expected an identifier, found %r" % t.value,
                                  t.line, t.col)
        self.next()
        if self.peek().kind == "lpar":
            self.next()
            args = []
            if self.peek().kind != "rpar":
                args.append(self.tree())
                while self.peek().kind == "comma":
                    self.next()
                    args.append(self.tree())
            self.expect("rpar")
            return ("app", t.value, args, t)
        return ("name", t.value, t)


_FO_CONNECTIVES = {"and", "or", "not", "implies", "iff"}


class Elaborator:
    """Turns generic trees into L-expressions, terms, formulae, literals."""

    def __init__(self, sig, skolems=None):
        self.sig = sig
        self.skolems = dict(skolems or {})

    def _err(self, msg, tok):
        raise SpecSyntaxError(msg, tok.line, tok.col)

    # -- L-expressions ------------------------------------------------------
    def lexpr(self, tree, want_sort=None):
        tok = tree[-1]
        if tree[0] == "quant":
            self._err("quantifier not allowed inside an expression", tok)
        name = tree[1]
        cls = self.sig.classify_name(name)
        if tree[0] == "name":
            if cls is None:
                self._err("unknown symbol %r" % name, tok)
            if cls[0] == "conn" and cls[1].arity == 0:
                e = sx.lapp(cls[1], [])
            elif cls[0] == "var":
                e = sx.lvar(cls[1], name)
            elif cls[0] == "const":
                e = sx.lconst(cls[1], name)
            else:
                self._err("%r is not an object-language expression" % name, tok)
            return self._want(e, want_sort, tok)
        if cls is None or cls[0] != "conn":
            self._err("unknown connective %r" % name, tok)
        conn = cls[1]
        args = tree[2]
        if len(args) != conn.arity:
            self._err("connective %s expects %d arguments, got %d"
                      % (name, conn.arity, len(args)), tok)
        ex = [self.lexpr(a, s) for a, s in zip(args, conn.arg_sorts)]
        return self._want(sx.lapp(conn, ex), want_sort, tok)

    def _want(self, e, want_sort, tok):
        if want_sort is not None and e.sort != want_sort:
            self._err("expression %s has sort %d, expected %d"
                      % (e.text(), e.sort, want_sort), tok)
        return e

    # -- terms --------------------------------------------------------------
    def term(self, tree):
        """A domain term or an L-expression, whichever the tree denotes."""
        tok = tree[-1]
        if tree[0] == "quant":
            self._err("quantifier not allowed inside a term", tok)
        name = tree[1]
        if tree[0] == "app":
            if name == "nu0":
                if len(tree[2]) != 1:
                    self._err("nu0 takes one individual", tok)
                return sx.nu0(self.lexpr(tree[2][0], 0))
            if name in self.skolems:
                fn = self.skolems[name]
                args = tree[2]
                if len(args) != fn.arity:
                    self._err("function %s expects %d arguments" % (name, fn.arity), tok)
                ex = [self.lexpr(a, s) for a, s in zip(args, fn.lsorts)]
                dom = [self.term(a) for a in args[len(fn.lsorts):]]
                for d in dom:
                    if isinstance(d, sx.LExpr):
                        self._err("domain argument expected in %s" % name, tok)
                return sx.funapp(fn, ex + dom)
            return self.lexpr(tree)
        cls = self.sig.classify_name(name)
        if cls is None:
            self._err("unknown symbol %r" % name, tok)
        if cls[0] == "dvar":
            return sx.dvar(name)
        if cls[0] == "dconst":
            return sx.dconst(name)
        return self.lexpr(tree)

    # -- formulae -----------------------------------------------------------
    def formula(self, tree):
        tok = tree[-1]
        if tree[0] == "quant":
            _, q, vname, body, _ = tree
            cls = self.sig.classify_name(vname)
            if cls is None or cls[0] != "dvar":
                self._err("quantifiers bind domain variables only, not %r" % vname, tok)
            inner = self.formula(body)
            return sx.Forall(sx.dvar(vname), inner) if q == "forall" \
                else sx.Exists(sx.dvar(vname), inner)
        name = tree[1]
        if tree[0] == "name":
            if name == "false":
                return sx.FALSE
            self._err("%r is not a formula" % name, tok)
        args = tree[2]
        if name == "not":
            if len(args) != 1:
                self._err("not takes one formula", tok)
            return sx.Not(self.formula(args[0]))
        if name == "and" or name == "or":
            # only a first-order connective in formula position
            if len(args) < 2:
                self._err("%s takes at least two formulae" % name, tok)
            subs = tuple(self.formula(a) for a in args)
            return sx.And(subs) if name == "and" else sx.Or(subs)
        if name == "implies" or name == "iff":
            if len(args) != 2:
                self._err("%s takes two formulae" % name, tok)
            l, r = self.formula(args[0]), self.formula(args[1])
            return sx.Implies(l, r) if name == "implies" else sx.Equiv(l, r)
        return self.atom(tree)

    def atom(self, tree):
        tok = tree[-1]
        name = tree[1]
        args = tree[2] if tree[0] == "app" else []
        if name == "false" and not args:
            return sx.FALSE
        if name.startswith("nu") and name[2:].isdigit():
            n = int(name[2:])
            if n == 0:
                self._err("nu0 is a term, not an atom", tok)
            if n > self.sig.max_sort:
                self._err("no sort %d in this signature" % n, tok)
            if len(args) != n + 1:
                self._err("nu%d takes %d arguments" % (n, n + 1), tok)
            e = self.lexpr(args[0], n)
            ts = [self.term(a) for a in args[1:]]
            return sx.atom(sx.nu(n), [e] + ts)
        if name == "eq":
            if len(args) != 2:
                self._err("eq takes two terms", tok)
            return sx.atom(sx.EQ, [self.term(args[0]), self.term(args[1])])
        cls = self.sig.classify_name(name)
        if cls is not None and cls[0] == "pred":
            arity = self.sig.preds[name]
            if len(args) != arity:
                self._err("predicate %s takes %d arguments" % (name, arity), tok)
            return sx.atom(sx.pred(name), [self.term(a) for a in args])
        self._err("%r is not an atom" % name, tok)

    # -- rule literals ------------------------------------------------------
    def rule_literal(self, tree):
        """An atom, ``not(atom)``, or (internalized calculi) a bare concept."""
        tok = tree[-1]
        name = tree[1] if tree[0] != "quant" else None
        if tree[0] == "app" and name == "not" and len(tree[2]) == 1:
            inner = tree[2][0]
            try:
                return sx.neg_lit(self.atom(inner))
            except SpecSyntaxError:
                pass  # fall through: the whole tree may be a concept
        try:
            if name == "false" and tree[0] == "name":
                return sx.pos_lit(sx.FALSE)
            return sx.pos_lit(self.atom(tree))
        except SpecSyntaxError:
            pass
        try:
            e = self.lexpr(tree, 1)
        except SpecSyntaxError:
            self._err("cannot read literal", tok)
        return sx.pos_lit(sx.atom(sx.HOLDS, [e]))


def _parse_with(text, fn, line_offset=1):
    tp = TreeParser(tokenize(text, line_offset))
    tree = tp.tree()
    if not tp.at_end():
        t = tp.peek()
        raise SpecSyntaxError("trailing input %r" % t.value, t.line, t.col)
    return fn(tree)


def parse_lexpr(sig, text, want_sort=None, line_offset=1):
    return _parse_with(text, lambda t: Elaborator(sig).lexpr(t, want_sort), line_offset)


def parse_formula(sig, text, skolems=None, line_offset=1):
    return _parse_with(text, Elaborator(sig, skolems).formula, line_offset)


def parse_term(sig, text, skolems=None, line_offset=1):
    return _parse_with(text, Elaborator(sig, skolems).term, line_offset)


def parse_rule_literal(sig, text, skolems=None, line_offset=1):
    return _parse_with(text, Elaborator(sig, skolems).rule_literal, line_offset)
