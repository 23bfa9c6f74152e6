"""Compiling a normalized specification into a tableau calculus.

Each directed sentence becomes a decomposition rule: existentials in its body
are Skolemized (negative sentences are first turned into their
contrapositive), the body is rewritten to disjunctive normal form, the head
becomes the main premise, each disjunct a denominator.  Background sentences
become theory rules whose premises are domain-predication equalities
``v = v`` for every variable of the Skolemized matrix; those equalities are
how the engine knows which terms (and expressions) a universal rule may be
instantiated with.  A default block of equality rules and one closure rule
per holds-predicate/predicate constant complete the calculus.
"""

from __future__ import annotations

import re

from . import syntax as sx
from .normalize import NormalizedSpec, check_well_founded, induced_ordering


class NonFirstOrderShape(sx.TabError):
    pass


class DnfTooLarge(sx.TabError):
    pass


class NotWellFounded(sx.TabError):
    pass


DNF_LITERAL_CAP = 4096


class TableauRule:
    def __init__(self, rid, kind, premises, denominators, fresh_functions=(),
                 produces_terms=False, provenance=""):
        self.id = rid
        self.kind = kind  # decomposition+ | decomposition- | theory | equality
        #                   | closure | blocking
        self.premises = tuple(premises)
        self.denominators = tuple(tuple(d) for d in denominators)
        self.fresh_functions = tuple(fresh_functions)
        self.produces_terms = produces_terms
        self.provenance = provenance
        if not self.premises and kind not in ("theory",):
            raise sx.TabError("rule %s has no premises" % rid)
        # variables the premises do not bind instantiate by enumeration over
        # the branch's domain (they arise when the domain-predication
        # premises are disabled)
        prem_vars = _vars_of_literals(self.premises)
        free = []
        for d in self.denominators:
            for v in _vars_of_literals(d):
                if v not in prem_vars and v not in free:
                    free.append(v)
        self.free_vars = tuple(free)

    @property
    def branching_factor(self):
        return len(self.denominators)

    def is_closure(self):
        return not self.denominators

    def text(self):
        prem = ", ".join(l.text() for l in self.premises)
        if self.is_closure():
            den = "false"
        else:
            den = " | ".join(", ".join(l.text() for l in d)
                             for d in self.denominators)
        star = "*" if self.produces_terms else ""
        return "rule %s [%s]%s: %s / %s" % (self.id, self.kind, star, prem, den)


def _vtext(v):
    return v.text() if isinstance(v, sx.LExpr) else v.name


def _vars_of_literals(lits):
    out = set()
    for l in lits:
        for t in l.atom.args:
            for e in sx.lexprs_of_term(t):
                if e.kind == "var":
                    out.add(e)
            for v in sx.dvars_of_term(t):
                out.add(v)
    return out


class UbConfig:
    def __init__(self, enabled=True, depth=0):
        if depth < 0:
            raise sx.TabError("blocking depth must be >= 0")
        self.enabled = enabled
        self.depth = depth

    def __repr__(self):
        return "UbConfig(enabled=%r, depth=%d)" % (self.enabled, self.depth)


class Calculus:
    def __init__(self, name, signature, rules, skolems=None, blocking=None,
                 mode="base", ctx=None, spec_name=None, refined=False):
        self.name = name
        self.signature = signature
        self.rules = list(rules)
        self.skolems = dict(skolems or {})
        self.blocking = blocking
        self.mode = mode              # "base" | "internalized"
        self.ctx = ctx                # TrContext when internalized
        self.spec_name = spec_name
        self.refined = refined        # any transformation applied post-synthesis

    def rule(self, rid):
        for r in self.rules:
            if r.id == rid:
                return r
        return None

    def counts_by_kind(self):
        out = {}
        for r in self.rules:
            k = "decomposition" if r.kind.startswith("decomposition") else r.kind
            out[k] = out.get(k, 0) + 1
        return out

    def replaced(self, rules, refined=True):
        c = Calculus(self.name, self.signature, rules, self.skolems,
                     self.blocking, self.mode, self.ctx, self.spec_name,
                     refined=self.refined or refined)
        return c


# ---------------------------------------------------------------------------
# NNF / Skolemization / DNF

def _nnf(f, pos=True):
    if isinstance(f, sx.Atom):
        return sx.literal(pos, f)
    if isinstance(f, sx.Not):
        return _nnf(f.sub, not pos)
    if isinstance(f, sx.And):
        subs = tuple(_nnf(s, pos) for s in f.subs)
        return ("and", subs) if pos else ("or", subs)
    if isinstance(f, sx.Or):
        subs = tuple(_nnf(s, pos) for s in f.subs)
        return ("or", subs) if pos else ("and", subs)
    if isinstance(f, sx.Implies):
        return _nnf(sx.Or((sx.Not(f.lhs), f.rhs)), pos)
    if isinstance(f, sx.Equiv):
        both = sx.And((sx.Implies(f.lhs, f.rhs), sx.Implies(f.rhs, f.lhs)))
        return _nnf(both, pos)
    if isinstance(f, sx.Forall):
        inner = _nnf(f.body, pos)
        return ("forall", f.var, inner) if pos else ("exists", f.var, inner)
    if isinstance(f, sx.Exists):
        inner = _nnf(f.body, pos)
        return ("exists", f.var, inner) if pos else ("forall", f.var, inner)
    raise TypeError("not a formula: %r" % (f,))


class _SkolemNamer:
    """Deterministic sk_<origin>_<j> names, globally unique per synthesis."""

    def __init__(self):
        self.used = set()
        self.created = []

    def fresh(self, origin_slug, j):
        name = "sk_%s_%d" % (origin_slug, j)
        while name in self.used:
            j += 1
            name = "sk_%s_%d" % (origin_slug, j)
        self.used.add(name)
        return name


def _tree_subst(tree, dsub):
    if isinstance(tree, sx.Literal):
        return sx.substitute_literal(tree, {}, dsub)
    if tree[0] in ("and", "or"):
        return (tree[0], tuple(_tree_subst(s, dsub) for s in tree[1]))
    kind, var, body = tree
    inner = {k: v for k, v in dsub.items() if k != var}
    return (kind, var, _tree_subst(body, inner))


def _skolemize(tree, head_lvars, scope, namer, slug, counter, sig):
    """Remove quantifiers from an NNF tree: existentials become Skolem terms
    over (head L-variables, enclosing universals); universals become free
    variables, renamed apart from everything already in scope."""
    if isinstance(tree, sx.Literal):
        return tree, []
    if tree[0] in ("and", "or"):
        subs, fns = [], []
        for s in tree[1]:
            s2, f2 = _skolemize(s, head_lvars, scope, namer, slug, counter, sig)
            subs.append(s2)
            fns.extend(f2)
        return (tree[0], tuple(subs)), fns
    kind, var, body = tree
    if kind == "exists":
        fn = sx.FnSym(namer.fresh(slug, counter[0]),
                      tuple(v.sort for v in head_lvars), len(scope))
        counter[0] += 1
        term = sx.funapp(fn, list(head_lvars) + list(scope))
        body2 = _tree_subst(body, {var: term})
        t, fns = _skolemize(body2, head_lvars, scope, namer, slug, counter, sig)
        return t, [fn] + fns
    # universal: strip, keeping the variable free (renamed apart if clashing)
    v = var
    if any(v is s for s in scope):
        base = v.name.rstrip("0123456789")
        k = 1
        while any(sx.dvar("%s%d" % (base, k)) is s for s in scope):
            k += 1
        v2 = sx.dvar("%s%d" % (base, k))
        body = _tree_subst(body, {var: v2})
        v = v2
    return _skolemize(body, head_lvars, scope + [v], namer, slug, counter, sig)


def _dnf(tree, cap=DNF_LITERAL_CAP):
    """List of conjunctions (ordered literal lists), naively distributed."""
    if isinstance(tree, sx.Literal):
        return [[tree]]
    kind, subs = tree
    if kind == "or":
        out = []
        for s in subs:
            out.extend(_dnf(s, cap))
            if sum(len(c) for c in out) > cap:
                raise DnfTooLarge("matrix exceeds %d literals" % cap)
        return out
    # and: distribute
    out = [[]]
    for s in subs:
        parts = _dnf(s, cap)
        nxt = []
        for left in out:
            for right in parts:
                nxt.append(left + [l for l in right if l not in left])
        out = nxt
        if sum(len(c) for c in out) > cap:
            raise DnfTooLarge("matrix exceeds %d literals" % cap)
    return out


def _clean_matrix(conjs):
    """Drop contradictory denominators (false, or psi with its negation);
    dedupe denominators, keeping first occurrences."""
    out = []
    for conj in conjs:
        lits = list(dict.fromkeys(conj))
        contradictory = any(l.atom.pred[0] == "false" and l.pos for l in lits) or \
            any(l.negate() in lits for l in lits)
        if contradictory:
            continue
        if lits not in out:
            out.append(lits)
    return out


def _slug(e):
    if e.kind == "app":
        return re.sub(r"[^a-zA-Z0-9]+", "_", e.conn.name)
    return re.sub(r"[^a-zA-Z0-9]+", "_", e.text())


def head_slug(xi):
    e = xi.head_expr
    if e.kind == "app" and all(a.kind == "var" for a in e.args):
        return _slug(e)
    return re.sub(r"[^a-zA-Z0-9]+", "_", e.text()).strip("_")


def implicational_form(xi, namer=None, sig=None, cap=DNF_LITERAL_CAP):
    """(head literal, DNF matrix, fresh Skolem functions) for one sentence."""
    namer = namer or _SkolemNamer()
    head_lit = sx.pos_lit(xi.head_atom) if xi.polarity == "+" \
        else sx.neg_lit(xi.head_atom)
    body = xi.body if xi.polarity == "+" else sx.Not(xi.body)
    tree = _nnf(body, True)
    counter = [0]
    tree, fns = _skolemize(tree, xi.head_lvars(), list(xi.dom_vars), namer,
                           head_slug(xi), counter, sig)
    matrix = _clean_matrix(_dnf(tree, cap))
    return head_lit, matrix, fns


def make_decomposition_rule(xi, namer=None, sig=None, cap=DNF_LITERAL_CAP,
                            domain_predication=True):
    head_lit, matrix, fns = implicational_form(xi, namer, sig, cap)
    extra = []
    if domain_predication:
        head_dvs = set(xi.dom_vars)
        for conj in matrix:
            for l in conj:
                for t in l.atom.args:
                    for v in sx.dvars_of_term(t):
                        if v not in head_dvs and v not in extra:
                            extra.append(v)
    premises = [head_lit] + [sx.pos_lit(sx.atom(sx.EQ, [v, v])) for v in extra]
    rid = head_slug(xi) + ("_pos" if xi.polarity == "+" else "_neg")
    kind = "decomposition+" if xi.polarity == "+" else "decomposition-"
    return TableauRule(rid, kind, premises, matrix, fns,
                       produces_terms=bool(fns),
                       provenance="sentence %s" % sx.formula_text(xi.sentence()))


def make_theory_rule(idx, sentence, namer=None, sig=None, cap=DNF_LITERAL_CAP,
                     domain_predication=True):
    for e in sx.lexprs_of_formula(sentence):
        if e.kind == "app":
            from .normalize import NonAtomicBackground
            raise NonAtomicBackground(e.text())
    lvars = []
    for e in sx.lexprs_of_formula(sentence):
        if e.kind == "var" and e not in lvars:
            lvars.append(e)
    namer = namer or _SkolemNamer()
    tree = _nnf(sentence, True)
    counter = [0]
    tree, fns = _skolemize(tree, lvars, [], namer, "bg%d" % idx, counter, sig)
    matrix = _clean_matrix(_dnf(tree, cap))
    premises = []
    if domain_predication:
        dvs = []
        for conj in matrix:
            for l in conj:
                for t in l.atom.args:
                    for v in sx.dvars_of_term(t):
                        if v not in dvs:
                            dvs.append(v)
        premises = [sx.pos_lit(sx.atom(sx.EQ, [v, v])) for v in lvars] + \
                   [sx.pos_lit(sx.atom(sx.EQ, [v, v])) for v in dvs]
    return TableauRule("theory_%d" % idx, "theory", premises, matrix, fns,
                       produces_terms=bool(fns),
                       provenance="background %s" % sx.formula_text(sentence))


# ---------------------------------------------------------------------------
# default equality and closure rules

class _RuleVars:
    """Fresh standardly-named variables for schema instantiation."""

    def __init__(self, sig):
        self.sig = sig
        self.dnames = ["x", "y", "z"]
        self.dcount = 0
        self.lcount = {s: 0 for s in range(sig.n_lsorts)}

    def dv(self):
        i = self.dcount
        self.dcount += 1
        if i < 3:
            return sx.dvar(self.dnames[i])
        return sx.dvar("%s%d" % (self.dnames[i % 3], i // 3))

    def lv(self, sort):
        pfx = self.sig.var_prefixes[sort] or ("v%d_" % sort,)
        i = self.lcount[sort]
        self.lcount[sort] += 1
        if i < len(pfx):
            return sx.lvar(sort, pfx[i])
        return sx.lvar(sort, "%s%d" % (pfx[i % len(pfx)], i // len(pfx)))


def _occurring_preds(ns):
    seen = []
    for f in [xi.sentence() for xi in ns.s_plus + ns.s_minus] + list(ns.sb):
        for g in sx.subformulas(f):
            if isinstance(g, sx.Atom) and g.pred[0] == "pred" \
                    and g.pred[1] not in seen:
                seen.append(g.pred[1])
    return sorted(seen)


def _occurring_nu_sorts(ns):
    seen = {1}  # the primary sort is always exercised by the input layer
    for f in [xi.sentence() for xi in ns.s_plus + ns.s_minus] + list(ns.sb):
        for g in sx.subformulas(f):
            if isinstance(g, sx.Atom) and g.pred[0] == "nu":
                seen.add(g.pred[1])
    return sorted(seen)


def _eq(a, b):
    return sx.pos_lit(sx.atom(sx.EQ, [a, b]))


def default_equality_rules(sig, ns, skolems=()):
    """The standard block: domain predication for every predicate and every
    holds-predicate, symmetry, transitivity, and congruence rules for
    predicates, holds-predicates and (Skolem) functions.

    Congruence comes in both polarities.  The negative variants are the
    surviving branch of the unrefined congruence rule (its other two
    denominators contradict the premises); without them a negative literal
    on a term equated with an older one could never migrate to the
    representative, and blocking would suppress the only rule able to close
    the branch."""
    rules = []
    preds = ["eq"] + _occurring_preds(ns)
    nus = _occurring_nu_sorts(ns)

    def parg(pname):
        if pname == "eq":
            return 2
        return sig.preds[pname]

    def patom(pname, args):
        if pname == "eq":
            return sx.atom(sx.EQ, args)
        return sx.atom(sx.pred(pname), args)

    for pname in preds:
        rv = _RuleVars(sig)
        xs = [rv.dv() for _ in range(parg(pname))]
        for sign, tag in ((True, "pos"), (False, "neg")):
            rules.append(TableauRule(
                "dp_%s_%s" % (tag, pname), "equality",
                [sx.literal(sign, patom(pname, xs))],
                [[_eq(v, v) for v in xs]],
                provenance="domain predication for %s" % pname))
    for n in nus:
        rv = _RuleVars(sig)
        p = rv.lv(n)
        xs = [rv.dv() for _ in range(n)]
        for sign, tag in ((True, "pos"), (False, "neg")):
            rules.append(TableauRule(
                "dp_%s_nu%d" % (tag, n), "equality",
                [sx.literal(sign, sx.atom(sx.nu(n), [p] + xs))],
                [[_eq(p, p)] + [_eq(v, v) for v in xs]],
                provenance="domain predication for nu%d" % n))

    rv = _RuleVars(sig)
    x, y, z = rv.dv(), rv.dv(), rv.dv()
    rules.append(TableauRule("eq_sym", "equality", [_eq(x, y)], [[_eq(y, x)]],
                             provenance="symmetry"))
    rules.append(TableauRule("eq_trans", "equality", [_eq(x, y), _eq(y, z)],
                             [[_eq(x, z)]], provenance="transitivity"))

    for pname in preds:
        k = parg(pname)
        for i in range(k):
            for sign, tag in ((True, ""), (False, "neg_")):
                if pname == "eq" and not sign:
                    # negative equalities conflict through symmetry and
                    # transitivity alone; no transfer rule is needed
                    continue
                rv = _RuleVars(sig)
                xs = [rv.dv() for _ in range(k)]
                yi = rv.dv()
                ys = xs.copy()
                ys[i] = yi
                rules.append(TableauRule(
                    "congr_%s%s_%d" % (tag, pname, i + 1), "equality",
                    [sx.literal(sign, patom(pname, xs)), _eq(xs[i], yi)],
                    [[sx.literal(sign, patom(pname, ys))]],
                    provenance="congruence for %s" % pname))
    for n in nus:
        for i in range(n):
            for sign, tag in ((True, ""), (False, "neg_")):
                rv = _RuleVars(sig)
                p = rv.lv(n)
                xs = [rv.dv() for _ in range(n)]
                yi = rv.dv()
                ys = xs.copy()
                ys[i] = yi
                rules.append(TableauRule(
                    "congr_%snu%d_%d" % (tag, n, i + 1), "equality",
                    [sx.literal(sign, sx.atom(sx.nu(n), [p] + xs)),
                     _eq(xs[i], yi)],
                    [[sx.literal(sign, sx.atom(sx.nu(n), [p] + ys))]],
                    provenance="congruence for nu%d" % n))
    for fn in skolems:
        for i in range(fn.n_dom):
            rv = _RuleVars(sig)
            ls = [rv.lv(s) for s in fn.lsorts]
            xs = [rv.dv() for _ in range(fn.n_dom)]
            yi = rv.dv()
            t1 = sx.funapp(fn, ls + xs)
            ys = xs.copy()
            ys[i] = yi
            t2 = sx.funapp(fn, ls + ys)
            # the rewritten function term may be new on the branch, so this
            # rule produces terms and falls under the blocking restrictions
            rules.append(TableauRule(
                "congr_fn_%s_%d" % (fn.name, i + 1), "equality",
                [_eq(t1, t1), _eq(xs[i], yi)],
                [[_eq(t1, t2)]],
                produces_terms=True,
                provenance="congruence for %s" % fn.name))
    return rules


def closure_rules(sig, ns):
    rules = []
    for n in _occurring_nu_sorts(ns):
        rv = _RuleVars(sig)
        p = rv.lv(n)
        xs = [rv.dv() for _ in range(n)]
        a = sx.atom(sx.nu(n), [p] + xs)
        rules.append(TableauRule("closure_nu%d" % n, "closure",
                                 [sx.pos_lit(a), sx.neg_lit(a)], [],
                                 provenance="contradiction on nu%d" % n))
    for pname in _occurring_preds(ns):
        rv = _RuleVars(sig)
        xs = [rv.dv() for _ in range(sig.preds[pname])]
        a = sx.atom(sx.pred(pname), xs)
        rules.append(TableauRule("closure_%s" % pname, "closure",
                                 [sx.pos_lit(a), sx.neg_lit(a)], [],
                                 provenance="contradiction on %s" % pname))
    rv = _RuleVars(sig)
    x, y = rv.dv(), rv.dv()
    a = sx.atom(sx.EQ, [x, y])
    rules.append(TableauRule("closure_eq", "closure",
                             [sx.pos_lit(a), sx.neg_lit(a)], [],
                             provenance="contradiction on eq"))
    return rules


def synthesize(ns: NormalizedSpec, assume_well_founded=False,
               cap=DNF_LITERAL_CAP, domain_predication=True) -> Calculus:
    verdict = check_well_founded(induced_ordering(ns))
    if verdict.kind == "cycle":
        raise NotWellFounded("induced ordering has a cycle: %r" % (verdict.witness,))
    if verdict.kind == "unknown" and not assume_well_founded:
        raise NotWellFounded("cannot prove the induced ordering well-founded; "
                             "pass assume_well_founded to proceed")
    sig = ns.signature
    namer = _SkolemNamer()
    dp = domain_predication
    decomp = []
    for xi in sorted(ns.s_plus, key=lambda x: head_slug(x)):
        decomp.append(make_decomposition_rule(xi, namer, sig, cap, dp))
        for xim in ns.s_minus:
            if _same_head(xim, xi):
                decomp.append(make_decomposition_rule(xim, namer, sig, cap, dp))
    # negative sentences whose head has no positive partner
    for xim in sorted(ns.s_minus, key=lambda x: head_slug(x)):
        if not any(_same_head(xim, xip) for xip in ns.s_plus):
            decomp.append(make_decomposition_rule(xim, namer, sig, cap, dp))
    theory = [make_theory_rule(i, ax, namer, sig, cap, dp)
              for i, ax in enumerate(ns.sb)]
    skolems = []
    for r in decomp + theory:
        skolems.extend(r.fresh_functions)
    equality = default_equality_rules(sig, ns, skolems)
    closure = closure_rules(sig, ns)
    rules = decomp + theory + equality + closure
    return Calculus(ns.spec.name, sig, rules,
                    skolems={f.name: f for f in skolems},
                    blocking=None, mode="base", spec_name=ns.spec.name,
                    refined=False)


def _same_head(a, b):
    b1, b2 = {}, {}
    return sx.match_expr(a.head_expr, b.head_expr, b1) and \
        sx.match_expr(b.head_expr, a.head_expr, b2) and a.nu_n == b.nu_n


# ---------------------------------------------------------------------------
# canonical renaming and comparison

def canonical_rule_text(rule):
    """Rule text under canonical injective renaming of L-variables, domain
    variables and Skolem symbols, in traversal order."""
    lmap, dmap, fmap = {}, {}, {}

    def rterm(t):
        if isinstance(t, sx.LExpr):
            return rexpr(t)
        if t.kind == "dvar":
            if t not in dmap:
                dmap[t] = "W%d" % len(dmap)
            return dmap[t]
        if t.kind == "dconst":
            return t.name
        if t.kind == "nu0":
            return "nu0(%s)" % rexpr(t.ind)
        if t.fn not in fmap:
            fmap[t.fn] = "K%d" % len(fmap)
        return "%s(%s)" % (fmap[t.fn], ", ".join(rterm(a) for a in t.args))

    def rexpr(e):
        if e.kind == "var":
            if e not in lmap:
                lmap[e] = "V%d_%d" % (e.sort, len(lmap))
            return lmap[e]
        if e.kind == "const":
            return e.text()
        if not e.args:
            return e.conn.name
        return "%s(%s)" % (e.conn.name, ", ".join(rexpr(a) for a in e.args))

    def rlit(l):
        a = l.atom
        if a.pred[0] == "false":
            s = "false"
        elif a.pred[0] == "holds":
            s = rexpr(a.args[0])
        else:
            s = "%s(%s)" % (sx.pred_text(a.pred),
                            ", ".join(rterm(t) for t in a.args))
        return s if l.pos else "not(%s)" % s

    prem = ", ".join(rlit(l) for l in rule.premises)
    den = " | ".join(", ".join(rlit(l) for l in d) for d in rule.denominators) \
        if rule.denominators else "false"
    return "[%s] %s / %s" % (rule.kind, prem, den)


def calculus_fingerprint(calc):
    """Kind-bucketed multiset of canonical rule texts."""
    out = {}
    for r in calc.rules:
        out.setdefault(r.kind, []).append(canonical_rule_text(r))
    return {k: sorted(v) for k, v in out.items()}


def calculus_equal(a, b):
    return calculus_fingerprint(a) == calculus_fingerprint(b)
