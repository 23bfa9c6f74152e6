"""The ``.spec`` file format: signature plus semantic sentences.

A specification file is line oriented (``#`` comments):

    sorts 3                      # object sorts 0..2
    vars 1 p q                   # variable name families per sort
    connective or 1 1 -> 1
    predicate R 2
    define forall x. nu1(or(p, q), x) <-> or(nu1(p, x), nu1(q, x))
    define+ forall x. nu1(E, x) -> body          # extra one-directional sentence
    define- forall x. body -> nu1(E, x)
    axiom forall x. forall y. forall z. implies(...)

``define`` gives the connective definitions (one per connective, mandatory);
``define+``/``define-`` add optional one-directional sentences, possibly for
compound head expressions; ``axiom`` sentences form the background theory.
The standard equality axioms (reflexivity, symmetry, transitivity and
congruence for every predicate and function) are implicit in every
specification; they surface as the default equality rules during synthesis.
"""

from __future__ import annotations

import importlib.resources

from . import syntax as sx
from .parser import SpecSyntaxError, TreeParser, Elaborator, tokenize


class UndefinedConnective(sx.TabError):
    pass


class DuplicateDefinition(sx.TabError):
    pass


class NotLOpen(sx.TabError):
    pass


class ConnectiveSelfReference(sx.TabError):
    pass


class UnknownPreset(sx.TabError):
    pass


class SpecErrors(sx.TabError):
    """Bundle of errors found while reading a specification."""

    def __init__(self, errors):
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = list(errors)


class Definition:
    """One connective definition: forall xs. nu_n(sigma(ps), xs) <-> body."""

    def __init__(self, conn, head_atom, body, dom_vars):
        self.conn = conn
        self.head_atom = head_atom      # Atom nu_n(sigma(p1..pm), x1..xn)
        self.body = body                # the defining formula
        self.dom_vars = dom_vars        # (x1..xn) in prefix order

    def sentence(self):
        f = sx.Equiv(self.head_atom, self.body)
        for v in reversed(self.dom_vars):
            f = sx.Forall(v, f)
        return f


class DirectedSentence:
    """A pre-split sentence: head -> body (plus) or body -> head (minus)."""

    def __init__(self, polarity, head_atom, body, dom_vars):
        self.polarity = polarity        # "+" or "-"
        self.head_atom = head_atom
        self.body = body
        self.dom_vars = dom_vars

    def sentence(self):
        if self.polarity == "+":
            f = sx.Implies(self.head_atom, self.body)
        else:
            f = sx.Implies(self.body, self.head_atom)
        for v in reversed(self.dom_vars):
            f = sx.Forall(v, f)
        return f


class SemanticSpec:
    def __init__(self, name, signature, definitions, axioms, directed=()):
        self.name = name
        self.signature = signature
        self.definitions = list(definitions)   # in declaration order
        self.axioms = list(axioms)             # background sentences (L-open)
        self.directed = list(directed)         # extra define+/define- sentences

    def definition_of(self, conn_name):
        for d in self.definitions:
            if d.conn.name == conn_name:
                return d
        raise UndefinedConnective(conn_name)


def _parse_quant_prefix(tp, sig):
    """Leading ``forall v.`` tokens of a define line; returns the dvars."""
    dvs = []
    while tp.peek().kind == "name" and tp.peek().value == "forall":
        save = tp.i
        tp.next()
        v = tp.expect("name")
        cls = sig.classify_name(v.value)
        if cls is None or cls[0] != "dvar":
            tp.i = save
            break
        tp.expect("dot")
        dvs.append(sx.dvar(v.value))
    return dvs


def _head_shape(at, line):
    """Check a head atom nu_n(E(p1..pm), x1..xn); returns (expr, dom vars)."""
    if not isinstance(at, sx.Atom) or at.pred[0] != "nu":
        raise SpecSyntaxError("head must be a nu atom", line)
    e = at.args[0]
    seen = []
    for v in at.args[1:]:
        if not sx.is_domain_term(v) or v.kind != "dvar" or v in seen:
            raise SpecSyntaxError("head positions must be distinct domain variables",
                                  line)
        seen.append(v)
    lvars = []
    for x in e.subexprs():
        if x.kind == "var" and x not in lvars:
            lvars.append(x)
    if len(set(lvars)) != len(lvars):
        raise SpecSyntaxError("head expression variables must be distinct", line)
    return e, seen


def parse_spec(text, name="spec"):
    """Parse and validate a specification document."""
    errors = []
    n_sorts = None
    var_pfx, const_pfx, conns, preds = {}, {}, [], {}
    body_lines = []  # (kind, rest-of-line, lineno)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if word == "sorts":
                n_sorts = int(rest)
            elif word in ("vars", "consts"):
                parts = rest.split()
                s = int(parts[0])
                tgt = var_pfx if word == "vars" else const_pfx
                tgt.setdefault(s, [])
                tgt[s].extend(parts[1:])
            elif word == "connective":
                head, _, res = rest.partition("->")
                parts = head.split()
                cname, arg_sorts = parts[0], tuple(int(p) for p in parts[1:])
                conns.append(sx.Conn(cname, arg_sorts, int(res.strip())))
            elif word == "predicate":
                pname, arity = rest.split()
                preds[pname] = int(arity)
            elif word in ("define", "define+", "define-", "axiom"):
                body_lines.append((word, rest, lineno))
            else:
                errors.append(SpecSyntaxError("unknown directive %r" % word, lineno))
        except (ValueError, IndexError):
            errors.append(SpecSyntaxError("malformed %r directive" % word, lineno))
        except sx.TabError as e:
            errors.append(e)
    if n_sorts is None:
        errors.append(SpecSyntaxError("missing 'sorts' directive"))
    if errors:
        raise SpecErrors(errors)

    try:
        sig = sx.LSignature(n_sorts, conns, var_pfx, const_pfx, preds)
    except sx.TabError as e:
        raise SpecErrors([e])

    el = Elaborator(sig)
    definitions, axioms, directed = [], [], []
    for word, rest, lineno in body_lines:
        try:
            tp = TreeParser(tokenize(rest, lineno))
            if word == "axiom":
                f = el.formula(tp.tree())
                if not tp.at_end():
                    raise SpecSyntaxError("trailing input", lineno)
                if not sx.is_l_open_sentence(f):
                    raise NotLOpen("free domain variable in axiom (line %d): %s"
                                   % (lineno, sx.formula_text(f)))
                axioms.append(f)
                continue
            dvs = _parse_quant_prefix(tp, sig)
            lhs = el.formula(tp.tree())
            conn_tok = tp.next()
            if word == "define" and conn_tok.kind != "equiv":
                raise SpecSyntaxError("define uses <->", lineno, conn_tok.col)
            if word in ("define+", "define-") and conn_tok.kind != "arrow":
                raise SpecSyntaxError("%s uses ->" % word, lineno, conn_tok.col)
            rhs = el.formula(tp.tree())
            if not tp.at_end():
                raise SpecSyntaxError("trailing input", lineno)

            if word == "define" or word == "define+":
                head, body = lhs, rhs
            else:
                head, body = rhs, lhs
            e, head_dvs = _head_shape(head, lineno)
            if [v.name for v in head_dvs] != [v.name for v in dvs]:
                raise SpecSyntaxError("quantifier prefix must list the head's "
                                      "domain variables in order", lineno)
            sent_free = sx.free_dvars(body, bound=set(dvs))
            if word == "define":
                if e.kind != "app":
                    raise SpecSyntaxError("define head must apply a connective", lineno)
                if any(a.kind != "var" for a in e.args):
                    raise SpecSyntaxError("define head arguments must be variables",
                                          lineno)
                if sent_free:
                    raise NotLOpen("free domain variable %s in definition body"
                                   % sent_free[0].name)
                if any(x.kind == "app" and x.conn == e.conn
                       for x in sx.lexprs_of_formula(body)):
                    raise ConnectiveSelfReference(e.conn.name)
                definitions.append(Definition(e.conn, head, body, head_dvs))
            else:
                if sent_free:
                    raise NotLOpen("free domain variable %s" % sent_free[0].name)
                directed.append(DirectedSentence("+" if word == "define+" else "-",
                                                 head, body, head_dvs))
        except sx.TabError as exc:
            errors.append(exc)
    if errors:
        raise SpecErrors(errors)

    defined = {}
    for d in definitions:
        if d.conn.name in defined:
            errors.append(DuplicateDefinition(d.conn.name))
        defined[d.conn.name] = d
    for cname in sig.conns:
        if cname not in defined:
            errors.append(UndefinedConnective(cname))
    if errors:
        raise SpecErrors(errors)
    return SemanticSpec(name, sig, definitions, axioms, directed)


def print_spec(spec):
    """Canonical text of a specification; parse(print(s)) == s."""
    sig = spec.signature
    out = ["sorts %d" % sig.n_lsorts]
    for s in range(sig.n_lsorts):
        if sig.var_prefixes[s]:
            out.append("vars %d %s" % (s, " ".join(sig.var_prefixes[s])))
    for s in range(sig.n_lsorts):
        if sig.const_prefixes[s]:
            out.append("consts %d %s" % (s, " ".join(sig.const_prefixes[s])))
    for c in sig.conns.values():
        args = (" " + " ".join(str(a) for a in c.arg_sorts)) if c.arg_sorts else ""
        out.append("connective %s%s -> %d" % (c.name, args, c.res_sort))
    for p, a in sig.preds.items():
        out.append("predicate %s %d" % (p, a))
    for d in spec.definitions:
        pre = "".join("forall %s. " % v.name for v in d.dom_vars)
        out.append("define %s%s <-> %s"
                   % (pre, d.head_atom.text(), sx.formula_text(d.body)))
    for ds in spec.directed:
        pre = "".join("forall %s. " % v.name for v in ds.dom_vars)
        if ds.polarity == "+":
            out.append("define+ %s%s -> %s"
                       % (pre, ds.head_atom.text(), sx.formula_text(ds.body)))
        else:
            out.append("define- %s%s -> %s"
                       % (pre, sx.formula_text(ds.body), ds.head_atom.text()))
    for ax in spec.axioms:
        out.append("axiom %s" % sx.formula_text(ax))
    return "\n".join(out) + "\n"


def preset_text(name):
    res = importlib.resources.files("tabsynth").joinpath("presets/%s.spec" % name)
    if not res.is_file():
        raise UnknownPreset(name)
    return res.read_text(encoding="utf-8")


def preset(name):
    """One of the bundled specifications, exactly as shipped."""
    return parse_spec(preset_text(name), name=name)
