"""Calculus refinement: folding conclusions into premises, rewriting a
calculus into the object language, simplification, and the blocking rule.

Folding (the first refinement) replaces a branching rule by one rule per
literal of the folded denominator, each taking that literal's negation as an
extra premise.  Internalization (the second refinement) rewrites every
literal as a concept of the primary sort, given context templates expressing
the holds-predicates and domain predicates inside the logic itself; domain
terms travel through fresh connectives standing for the Skolem functions.
"""

from __future__ import annotations

import itertools

from . import syntax as sx
from .parser import Elaborator, SpecSyntaxError, TreeParser, tokenize
from .synth import Calculus, TableauRule, UbConfig


class NoSuchRule(sx.TabError):
    pass


class NoDenominator(sx.TabError):
    pass


class IncompleteContext(sx.TabError):
    pass


class NoEqualityAvailable(sx.TabError):
    pass


class RefinementNotWhitelisted(sx.TabError):
    pass


# ---------------------------------------------------------------------------
# folding

def _is_dp(lit):
    return lit.pos and lit.atom.pred[0] == "eq" and \
        lit.atom.args[0] is lit.atom.args[1] and (
            isinstance(lit.atom.args[0], sx.LExpr) and lit.atom.args[0].kind == "var"
            or sx.is_domain_term(lit.atom.args[0]) and lit.atom.args[0].kind == "dvar")


def _var_occurs(v, lit):
    for t in lit.atom.args:
        if isinstance(v, sx.LExpr):
            if any(e is v for e in sx.lexprs_of_term(t)):
                return True
        else:
            if any(d is v for d in sx.dvars_of_term(t)):
                return True
    return False


def fold_whitelisted(rule, folded_lits, signature):
    """Folds that are harmless by construction: theory rules (their
    denominators only mention atomic expressions), and folds whose literals
    contain no expression of a sort that connectives can produce."""
    if rule.kind == "theory":
        return True
    conn_sorts = signature.sorts_with_connectives()
    for lit in folded_lits:
        for t in lit.atom.args:
            for e in sx.lexprs_of_term(t):
                if e.sort in conn_sorts:
                    return False
    return True


def refine_rule(calc, rule_id, fold, drop_dp=False, unsafe=False):
    """Replace ``rule_id`` by the rules that take the folded denominators'
    negated literals as premises; optionally drop redundant domain
    predication premises afterwards."""
    rule = calc.rule(rule_id)
    if rule is None:
        raise NoSuchRule(rule_id)
    if not rule.denominators:
        raise NoDenominator(rule_id)
    fold = sorted(set(fold))
    for i in fold:
        if not (0 <= i < len(rule.denominators)):
            raise NoDenominator("%s has no denominator %d" % (rule_id, i))

    folded = [rule.denominators[i] for i in fold]
    kept = [d for i, d in enumerate(rule.denominators) if i not in fold]
    flat = [l for d in folded for l in d]
    if not fold_whitelisted(rule, flat, calc.signature) and not unsafe:
        raise RefinementNotWhitelisted(
            "folding %s does not preserve model construction by construction; "
            "re-run with the unsafe-refine acknowledgement" % rule_id)

    new_rules = []
    combos = list(itertools.product(*folded))
    for j, combo in enumerate(combos, 1):
        premises = list(rule.premises) + [l.negate() for l in combo]
        if drop_dp:
            keptp = []
            for k, p in enumerate(premises):
                if _is_dp(p):
                    v = p.atom.args[0]
                    others = premises[:k] + premises[k + 1:]
                    if any(_var_occurs(v, o) and not (_is_dp(o) and o.atom.args[0] is v)
                           for o in others):
                        continue
                keptp.append(p)
            premises = keptp
        rid = "%s_%d" % (rule_id, j)
        new_rules.append(TableauRule(
            rid, rule.kind, premises, kept, rule.fresh_functions,
            produces_terms=rule.produces_terms and bool(kept),
            provenance="fold %s of %s" % (",".join(str(i) for i in fold), rule_id)))

    rules = []
    for r in calc.rules:
        if r.id == rule_id:
            rules.extend(new_rules)
        else:
            rules.append(r)
    out = calc.replaced(rules)
    if not fold_whitelisted(rule, flat, calc.signature):
        out.completeness_warning = \
            "fold of %s is outside the whitelist: completeness not guaranteed" % rule_id
    return out


# ---------------------------------------------------------------------------
# internalization context

class Template:
    """A concept template over placeholder variables."""

    def __init__(self, params, expr):
        self.params = tuple(params)   # (p of sort n, l1..ln) or (l1..ln)
        self.expr = expr              # LExpr of the primary sort

    def instantiate(self, args):
        if len(args) != len(self.params):
            raise IncompleteContext("template arity mismatch")
        sub = {}
        for v, a in zip(self.params, args):
            if a.sort != v.sort:
                raise sx.SortMismatch("template argument sort mismatch")
            sub[v] = a
        return sx.substitute_expr(self.expr, sub)

    def match(self, concept):
        """Placeholder values if ``concept`` instantiates this template."""
        binding = {}
        if sx.match_expr(self.expr, concept, binding):
            try:
                return tuple(binding[v] for v in self.params)
            except KeyError:
                return None
        return None


class TrContext:
    def __init__(self, new_conns, fn_conns, c_plus, c_minus, d_plus, d_minus):
        self.new_conns = list(new_conns)    # Conn objects the context adds
        self.fn_conns = dict(fn_conns)      # Skolem fn name -> Conn
        self.c_plus = dict(c_plus)          # sort n -> Template(p, l1..ln)
        self.c_minus = dict(c_minus)
        self.d_plus = dict(d_plus)          # predicate name (or "eq") -> Template
        self.d_minus = dict(d_minus)


def parse_context(text, sig, skolems):
    new_conns, fn_conns = [], {}
    template_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "connective":
            head, _, res = rest.partition("->")
            parts = head.split()
            new_conns.append(sx.Conn(parts[0], tuple(int(p) for p in parts[1:]),
                                     int(res.strip())))
        elif word == "function":
            fname, _, cname = rest.partition("->")
            fname, cname = fname.strip(), cname.strip()
            fn = skolems.get(fname)
            if fn is None:
                raise IncompleteContext("unknown function %s" % fname)
            conn = sx.Conn(cname, fn.lsorts + (0,) * fn.n_dom, 0)
            new_conns.append(conn)
            fn_conns[fname] = conn
        elif word in ("c+", "c-", "d+", "d-"):
            template_lines.append((word, rest, lineno))
        else:
            raise SpecSyntaxError("unknown context directive %r" % word, lineno)
    ext = sig.extended(new_conns)
    el = Elaborator(ext)
    c_plus, c_minus, d_plus, d_minus = {}, {}, {}, {}
    for word, rest, lineno in template_lines:
        key_txt, _, body = rest.partition("=")
        key_parts = key_txt.split("(", 1)
        key = key_parts[0].strip()
        if len(key_parts) != 2 or not key_parts[1].rstrip().endswith(")"):
            raise SpecSyntaxError("template needs a parameter list", lineno)
        param_names = [p.strip() for p in key_parts[1].rstrip()[:-1].split(",")]
        params = []
        for pn in param_names:
            cls = ext.classify_name(pn)
            if cls is None or cls[0] != "var":
                raise SpecSyntaxError("template parameter %r must be an "
                                      "object variable" % pn, lineno)
            params.append(sx.lvar(cls[1], pn))
        tp = TreeParser(tokenize(body.strip(), lineno))
        expr = el.lexpr(tp.tree(), 1)
        if not tp.at_end():
            raise SpecSyntaxError("trailing input in template", lineno)
        tpl = Template(params, expr)
        if word in ("c+", "c-"):
            n = int(key)
            want = [n] + [0] * n
            if [p.sort for p in params] != want:
                raise SpecSyntaxError("c%s %d takes a sort-%d variable then %d "
                                      "individuals" % (word[1], n, n, n), lineno)
            (c_plus if word == "c+" else c_minus)[n] = tpl
        else:
            arity = 2 if key == "eq" else sig.preds.get(key)
            if arity is None:
                raise SpecSyntaxError("unknown predicate %r" % key, lineno)
            if [p.sort for p in params] != [0] * arity:
                raise SpecSyntaxError("d%s %s takes %d individuals"
                                      % (word[1], key, arity), lineno)
            (d_plus if word == "d+" else d_minus)[key] = tpl
    return TrContext(new_conns, fn_conns, c_plus, c_minus, d_plus, d_minus)


def print_context(ctx):
    out = []
    fn_conn_names = {c.name for c in ctx.fn_conns.values()}
    for c in ctx.new_conns:
        if c.name in fn_conn_names:
            continue
        args = (" " + " ".join(str(a) for a in c.arg_sorts)) if c.arg_sorts else ""
        out.append("connective %s%s -> %d" % (c.name, args, c.res_sort))
    for fname, conn in ctx.fn_conns.items():
        out.append("function %s -> %s" % (fname, conn.name))

    def tpl_line(word, key, tpl):
        params = ", ".join(p.name for p in tpl.params)
        out.append("%s %s(%s) = %s" % (word, key, params, tpl.expr.text()))

    for n, tpl in ctx.c_plus.items():
        tpl_line("c+", str(n), tpl)
    for n, tpl in ctx.c_minus.items():
        tpl_line("c-", str(n), tpl)
    for k, tpl in ctx.d_plus.items():
        tpl_line("d+", k, tpl)
    for k, tpl in ctx.d_minus.items():
        tpl_line("d-", k, tpl)
    return "\n".join(out) + "\n"


def load_context(path, sig, skolems):
    with open(path, encoding="utf-8") as fh:
        return parse_context(fh.read(), sig, skolems)


# ---------------------------------------------------------------------------
# internalization

def _rule_sort0_names(rule):
    used = set()
    for lits in (rule.premises,) + rule.denominators:
        for l in lits:
            for t in l.atom.args:
                for e in sx.lexprs_of_term(t):
                    if e.kind == "var" and e.sort == 0:
                        used.add(e.name)
    return used


def _epsilon_for_rule(rule, sig):
    """Injective map from the rule's domain variables to fresh individuals."""
    dvs = []
    for lits in (rule.premises,) + rule.denominators:
        for l in lits:
            for t in l.atom.args:
                for v in sx.dvars_of_term(t):
                    if v not in dvs:
                        dvs.append(v)
    pfx = (sig.var_prefixes[0] or ("l",))[0]
    used = _rule_sort0_names(rule)
    eps, k = {}, 0
    for v in dvs:
        while True:
            name = pfx if k == 0 else "%s%d" % (pfx, k)
            k += 1
            if name not in used:
                break
        eps[v] = sx.lvar(0, name)
    return eps


class _Internalizer:
    def __init__(self, calc, ctx):
        self.calc = calc
        self.ctx = ctx
        self.sig = calc.signature.extended(ctx.new_conns)

    def individual(self, t, eps):
        """The sort-0 expression standing for a domain term."""
        if isinstance(t, sx.LExpr):
            raise IncompleteContext("object expression in domain position")
        if t.kind == "dvar":
            return eps[t]
        if t.kind == "dconst":
            return sx.lconst(0, t.name)
        if t.kind == "nu0":
            return t.ind
        conn = self.ctx.fn_conns.get(t.fn.name)
        if conn is None:
            raise IncompleteContext("no connective for function %s" % t.fn.name)
        args = list(t.args[:len(t.fn.lsorts)])
        args += [self.individual(a, eps) for a in t.args[len(t.fn.lsorts):]]
        return sx.lapp(conn, args)

    def literal(self, lit, eps):
        """The concept literal standing for ``lit``; None when it dissolves
        (reflexive equalities at object sorts carry no information here)."""
        a = lit.atom
        if a.pred[0] == "holds":
            return lit
        if a.pred[0] == "false":
            return lit
        if a.pred[0] == "nu":
            n = a.pred[1]
            tpl = (self.ctx.c_plus if lit.pos else self.ctx.c_minus).get(n)
            if tpl is None:
                raise IncompleteContext("no c%s template for sort %d"
                                        % ("+" if lit.pos else "-", n))
            args = [a.args[0]] + [self.individual(t, eps) for t in a.args[1:]]
            return sx.pos_lit(sx.atom(sx.HOLDS, [tpl.instantiate(args)]))
        if a.pred[0] == "pred":
            tpl = (self.ctx.d_plus if lit.pos else self.ctx.d_minus).get(a.pred[1])
            if tpl is None:
                raise IncompleteContext("no d%s template for %s"
                                        % ("+" if lit.pos else "-", a.pred[1]))
            args = [self.individual(t, eps) for t in a.args]
            return sx.pos_lit(sx.atom(sx.HOLDS, [tpl.instantiate(args)]))
        # equality
        s, t = a.args
        s_dom, t_dom = sx.is_domain_term(s), sx.is_domain_term(t)
        if not s_dom and not t_dom:
            if s is t:
                return None  # reflexive object-sort predication dissolves
            raise IncompleteContext("object-sort equality %s cannot be "
                                    "internalized" % lit.text())
        tpl = (self.ctx.d_plus if lit.pos else self.ctx.d_minus).get("eq")
        if tpl is None:
            raise IncompleteContext("no d%s template for eq"
                                    % ("+" if lit.pos else "-"))
        # put a bare domain variable side first; keeps rules whose premise
        # and conclusion say the same thing literally identical
        if t.kind == "dvar" and s.kind != "dvar":
            s, t = t, s
        args = [self.individual(s, eps), self.individual(t, eps)]
        return sx.pos_lit(sx.atom(sx.HOLDS, [tpl.instantiate(args)]))

    def rule(self, r):
        eps = _epsilon_for_rule(r, self.sig)
        premises = [x for x in (self.literal(l, eps) for l in r.premises)
                    if x is not None]
        denominators = []
        for d in r.denominators:
            nd = [x for x in (self.literal(l, eps) for l in d) if x is not None]
            if not nd:
                return None  # a vacuous denominator makes the rule a no-op
            denominators.append(nd)
        if not premises:
            return None
        out = TableauRule(r.id, r.kind, premises, denominators,
                          r.fresh_functions, r.produces_terms,
                          provenance=r.provenance)
        if out.free_vars:
            # an object-sort predication premise was load bearing: nothing in
            # the object language can express it, so the rule must be folded
            # into a form whose remaining premises carry its variables first
            raise IncompleteContext(
                "rule %s instantiates over object-sort predication the "
                "context cannot express; fold it before internalizing" % r.id)
        return out


def internalize(calc, ctx):
    """Rewrite every rule into the object language; the result speaks only
    concepts of the primary sort."""
    _check_coverage(calc, ctx)
    intern = _Internalizer(calc, ctx)
    rules = []
    for r in calc.rules:
        nr = intern.rule(r)
        if nr is not None:
            rules.append(nr)
    out = Calculus(calc.name, intern.sig, rules, calc.skolems, calc.blocking,
                   mode="internalized", ctx=ctx, spec_name=calc.spec_name,
                   refined=True)
    return out


def _check_coverage(calc, ctx):
    for r in calc.rules:
        for lits in (r.premises,) + r.denominators:
            for l in lits:
                p = l.atom.pred
                if p[0] == "nu":
                    side = ctx.c_plus if l.pos else ctx.c_minus
                    if p[1] not in side:
                        raise IncompleteContext("missing c%s template for sort %d"
                                                % ("+" if l.pos else "-", p[1]))
                elif p[0] == "pred":
                    side = ctx.d_plus if l.pos else ctx.d_minus
                    if p[1] not in side:
                        raise IncompleteContext("missing d%s template for %s"
                                                % ("+" if l.pos else "-", p[1]))
                elif p[0] == "eq":
                    s, t = l.atom.args
                    if sx.is_domain_term(s) or sx.is_domain_term(t):
                        side = ctx.d_plus if l.pos else ctx.d_minus
                        if "eq" not in side:
                            raise IncompleteContext("missing d%s template for eq"
                                                    % ("+" if l.pos else "-"))
                for t in l.atom.args:
                    if sx.is_domain_term(t):
                        for fn in _fns_of_term(t):
                            if fn.name not in ctx.fn_conns:
                                raise IncompleteContext(
                                    "no connective for function %s" % fn.name)


def _fns_of_term(t):
    if isinstance(t, sx.LExpr):
        return
    if t.kind == "fun":
        yield t.fn
        for a in t.args:
            if not isinstance(a, sx.LExpr):
                yield from _fns_of_term(a)


# ---------------------------------------------------------------------------
# simplification

def _rule_is_trivial(rule):
    prem = set(rule.premises)
    return any(d and set(d) <= prem for d in rule.denominators)


def _premises_instance_of(a, b):
    """Are a's premises an instance of b's premises, positionally?"""
    if len(a.premises) != len(b.premises):
        return False
    binding = {}
    return all(sx.match_literal(pb, pa, binding)
               for pb, pa in zip(b.premises, a.premises))


def simplify(calc):
    """Remove rules whose denominators repeat their premises, and closure
    rules whose premises instantiate another closure rule's premises.
    Returns the reduced calculus and the removed rule ids."""
    removed = []
    rules = []
    for r in calc.rules:
        if _rule_is_trivial(r):
            removed.append(r.id)
        else:
            rules.append(r)
    closures = [r for r in rules if r.is_closure()]
    drop = set()
    for r in closures:
        for other in closures:
            if other.id != r.id and other.id not in drop \
                    and _premises_instance_of(r, other):
                drop.add(r.id)
                break
    removed.extend(sorted(drop))
    rules = [r for r in rules if r.id not in drop]
    return calc.replaced(rules), removed


# ---------------------------------------------------------------------------
# blocking

def attach_ub(calc, cfg):
    """Add the equality-conjecture blocking rule; the engine enforces the
    term-introduction restrictions when ``cfg`` is enabled."""
    if not cfg.enabled:
        return calc
    if calc.mode == "internalized":
        ctx = calc.ctx
        if ctx is None or "eq" not in ctx.d_plus or "eq" not in ctx.d_minus:
            raise NoEqualityAvailable("internalized calculus lacks equality "
                                      "templates")
        l1, l2 = sx.lvar(0, "l"), sx.lvar(0, "l1")
        prem = [sx.pos_lit(sx.atom(sx.HOLDS, [ctx.d_plus["eq"].instantiate([v, v])]))
                for v in (l1, l2)]
        dpos = sx.pos_lit(sx.atom(sx.HOLDS, [ctx.d_plus["eq"].instantiate([l1, l2])]))
        dneg = sx.pos_lit(sx.atom(sx.HOLDS, [ctx.d_minus["eq"].instantiate([l1, l2])]))
        ub = TableauRule("ub", "blocking", prem, [[dpos], [dneg]],
                         provenance="equality conjecture blocking")
    else:
        has_eq = any(l.atom.pred[0] == "eq"
                     for r in calc.rules
                     for lits in (r.premises,) + r.denominators
                     for l in lits)
        if not has_eq:
            raise NoEqualityAvailable("calculus never mentions equality")
        x, y = sx.dvar("x"), sx.dvar("y")
        prem = [sx.pos_lit(sx.atom(sx.EQ, [x, x])),
                sx.pos_lit(sx.atom(sx.EQ, [y, y]))]
        a = sx.atom(sx.EQ, [x, y])
        ub = TableauRule("ub", "blocking", prem,
                         [[sx.pos_lit(a)], [sx.neg_lit(a)]],
                         provenance="equality conjecture blocking")
    rules = [r for r in calc.rules if r.id != "ub"] + [ub]
    out = calc.replaced(rules, refined=calc.refined)
    out.blocking = cfg
    return out


# ---------------------------------------------------------------------------
# refinement scripts

class RefineStep:
    def __init__(self, kind, rule_id=None, fold=(), drop_dp=False, depth=0):
        self.kind = kind  # rf | tr | simplify | ub
        self.rule_id = rule_id
        self.fold = tuple(fold)
        self.drop_dp = drop_dp
        self.depth = depth


def parse_script(text):
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "rf":
            if len(parts) < 4 or parts[2] != "fold":
                raise SpecSyntaxError("rf <rule> fold <i>... [drop-dp]", lineno)
            drop = parts[-1] == "drop-dp"
            nums = parts[3:-1] if drop else parts[3:]
            try:
                fold = [int(n) for n in nums]
            except ValueError:
                raise SpecSyntaxError("fold indices must be integers", lineno)
            steps.append(RefineStep("rf", rule_id=parts[1], fold=fold, drop_dp=drop))
        elif parts[0] == "tr":
            steps.append(RefineStep("tr"))
        elif parts[0] == "simplify":
            steps.append(RefineStep("simplify"))
        elif parts[0] == "ub":
            depth = 0
            if len(parts) == 3 and parts[1] == "depth":
                depth = int(parts[2])
            steps.append(RefineStep("ub", depth=depth))
        else:
            raise SpecSyntaxError("unknown refinement step %r" % parts[0], lineno)
    return steps


def print_script(steps):
    out = []
    for s in steps:
        if s.kind == "rf":
            line = "rf %s fold %s" % (s.rule_id, " ".join(str(i) for i in s.fold))
            if s.drop_dp:
                line += " drop-dp"
            out.append(line)
        elif s.kind == "tr":
            out.append("tr")
        elif s.kind == "simplify":
            out.append("simplify")
        else:
            out.append("ub depth %d" % s.depth)
    return "\n".join(out) + "\n"


def apply_script(calc, steps, ctx=None, unsafe=False):
    """Run the steps in order; ``tr`` uses the supplied context."""
    log = []
    for s in steps:
        if s.kind == "rf":
            calc = refine_rule(calc, s.rule_id, s.fold, s.drop_dp, unsafe=unsafe)
            log.append("rf %s" % s.rule_id)
        elif s.kind == "tr":
            if ctx is None:
                raise IncompleteContext("script has a tr step but no context given")
            calc = internalize(calc, ctx)
            log.append("tr")
        elif s.kind == "simplify":
            calc, removed = simplify(calc)
            log.append("simplify removed: %s" % ", ".join(removed))
        else:
            calc = attach_ub(calc, UbConfig(True, s.depth))
            log.append("ub")
    return calc, log
