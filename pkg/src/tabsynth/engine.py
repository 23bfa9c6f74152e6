"""Executing a calculus: branches, rule matching, blocking, verdicts.

A branch is a growing set of ground literals.  Rule premises are matched
one-way against branch literals (no unification of branch terms); every rule
fires at most once per premise instantiation, enforced with fingerprints.
Closure rules (zero denominators) close the branch.

With blocking enabled the engine restricts term-producing rules: once an
equality ``t = t'`` between a younger and an older term is on the branch, no
term-producing rule is applied to literals mentioning the younger term, and
the blocking rule is exhausted over all term pairs before term production
(after the configured number of free term-producing applications).
Exploration is depth-first by default with the denominators in rule order;
equal-conjecture branches therefore come first, which keeps models small.
Branches are independent once created (each owns its state and the calculus
is immutable), so distinct open branches could be explored by parallel
workers; this driver explores them sequentially.
"""

from __future__ import annotations

import heapq
import itertools
import time

from . import syntax as sx


class EmptyInput(sx.TabError):
    pass


class UnknownTerm(sx.TabError):
    pass


# ---------------------------------------------------------------------------
# mode adapters: what counts as a term, a marker, an equality

class BaseMode:
    name = "base"

    def terms_in_literal(self, lit):
        out = []
        for t in lit.atom.args:
            self._terms(t, out)
        return out

    def _terms(self, t, out):
        if isinstance(t, sx.LExpr):
            return
        if t.kind in ("dconst", "nu0", "fun") and sx.term_is_ground(t):
            if t not in out:
                out.append(t)
        if t.kind == "fun":
            for a in t.args:
                self._terms(a, out)

    def marker_term(self, lit):
        """The term t when ``lit`` is the domain marker t = t."""
        a = lit.atom
        if lit.pos and a.pred[0] == "eq" and a.args[0] is a.args[1] \
                and sx.is_domain_term(a.args[0]) and sx.term_is_ground(a.args[0]):
            return a.args[0]
        return None

    def equality(self, lit):
        """(t, t') for a positive equality between distinct ground terms."""
        a = lit.atom
        if lit.pos and a.pred[0] == "eq" and a.args[0] is not a.args[1] \
                and sx.is_domain_term(a.args[0]) and sx.is_domain_term(a.args[1]) \
                and sx.term_is_ground(a.args[0]) and sx.term_is_ground(a.args[1]):
            return (a.args[0], a.args[1])
        return None

    def ub_binding(self, rule, t1, t2):
        v1 = next(iter(_literal_vars(rule.premises[0])))
        v2 = next(iter(_literal_vars(rule.premises[1])))
        return {v1: t1, v2: t2}


class InternalizedMode:
    name = "internalized"

    def __init__(self, ctx):
        self.ctx = ctx
        self.deq_plus = ctx.d_plus.get("eq")

    # branch literals are always fully instantiated, so unlike the base mode
    # there is no well-formedness filtering here: any sort-0 subexpression of
    # a derived concept is an individual of the derivation

    def terms_in_literal(self, lit):
        if lit.atom.pred[0] != "holds":
            return []
        out = []
        for e in lit.atom.args[0].subexprs():
            if e.sort == 0 and e not in out:
                out.append(e)
        return out

    def marker_term(self, lit):
        if lit.atom.pred[0] != "holds" or self.deq_plus is None:
            return None
        m = self.deq_plus.match(lit.atom.args[0])
        if m and m[0] is m[1]:
            return m[0]
        return None

    def equality(self, lit):
        if lit.atom.pred[0] != "holds" or self.deq_plus is None:
            return None
        m = self.deq_plus.match(lit.atom.args[0])
        if m and m[0] is not m[1]:
            return (m[0], m[1])
        return None

    def ub_binding(self, rule, t1, t2):
        v1 = next(iter(_literal_vars(rule.premises[0])))
        v2 = next(iter(_literal_vars(rule.premises[1])))
        return {v1: t1, v2: t2}


def _literal_vars(lit):
    out = []
    for t in lit.atom.args:
        for e in sx.lexprs_of_term(t):
            if e.kind == "var" and e not in out:
                out.append(e)
        for v in sx.dvars_of_term(t):
            if v not in out:
                out.append(v)
    return out


# ---------------------------------------------------------------------------
# branches

def _coarse_key(lit):
    return (lit.pos, sx.pred_text(lit.atom.pred), None)


def _head_key(lit):
    """Fine index key when the first argument is a compound expression;
    None otherwise (atomic data sits only in the coarse bucket)."""
    p = lit.atom.pred
    if p[0] in ("nu", "holds") and lit.atom.args:
        e = lit.atom.args[0]
        if isinstance(e, sx.LExpr) and e.kind == "app":
            return (lit.pos, sx.pred_text(p), e.conn.name)
    return None


class Branch:
    __slots__ = ("bid", "literals", "present", "index", "term_birth", "applied",
                 "seen_next", "tp_count", "closed", "eqs", "blocked",
                 "markers", "lmarkers", "pending", "heap", "scan_upto")

    def __init__(self, bid):
        self.bid = bid
        self.literals = []
        self.present = set()
        self.index = {}
        self.term_birth = {}
        self.applied = set()
        self.seen_next = 0
        self.tp_count = 0
        self.closed = False
        self.eqs = set()       # positive ground equalities (t, t')
        self.blocked = set()   # younger terms equated to an older one
        self.markers = []      # terms with their reflexive marker present
        self.lmarkers = {}     # object sort -> expressions with e = e present
        self.pending = {}      # fingerprint -> (seen, rule, binding, terms)
        self.heap = []         # (priority, seen, fingerprint), lazily pruned
        self.scan_upto = 0     # literals before this index are fully matched

    def clone(self, bid):
        b = Branch(bid)
        b.literals = self.literals.copy()
        b.present = self.present.copy()
        b.index = {k: v.copy() for k, v in self.index.items()}
        b.term_birth = self.term_birth.copy()
        b.applied = self.applied.copy()
        b.seen_next = self.seen_next
        b.tp_count = self.tp_count
        b.closed = self.closed
        b.eqs = self.eqs.copy()
        b.blocked = self.blocked.copy()
        b.markers = self.markers.copy()
        b.lmarkers = {k: v.copy() for k, v in self.lmarkers.items()}
        b.pending = self.pending.copy()
        b.heap = self.heap.copy()
        b.scan_upto = self.scan_upto
        return b

    def add(self, lit, mode):
        if lit in self.present:
            return False
        idx = len(self.literals)
        self.literals.append(lit)
        self.present.add(lit)
        self.index.setdefault(_coarse_key(lit), []).append((lit, idx))
        fine = _head_key(lit)
        if fine is not None:
            self.index.setdefault(fine, []).append((lit, idx))
        if lit.pos and lit.atom.pred[0] == "false":
            self.closed = True
        for t in mode.terms_in_literal(lit):
            if t not in self.term_birth:
                self.term_birth[t] = len(self.term_birth)
        mt = mode.marker_term(lit)
        if mt is not None and mt not in self.markers:
            self.markers.append(mt)
        a = lit.atom
        if lit.pos and a.pred[0] == "eq" and a.args[0] is a.args[1] \
                and isinstance(a.args[0], sx.LExpr):
            bucket = self.lmarkers.setdefault(a.args[0].sort, [])
            if a.args[0] not in bucket:
                bucket.append(a.args[0])
        eq = mode.equality(lit)
        if eq is not None and eq not in self.eqs:
            self.eqs.add(eq)
            t1, t2 = eq
            b1 = self.term_birth.get(t1)
            b2 = self.term_birth.get(t2)
            if b1 is not None and b2 is not None and b1 != b2:
                self.blocked.add(t1 if b1 > b2 else t2)
        return True

    def candidates_with_index(self, pattern):
        key = _head_key(pattern) or _coarse_key(pattern)
        return self.index.get(key, [])

    def term_order(self, t1, t2):
        if t1 not in self.term_birth or t2 not in self.term_birth:
            raise UnknownTerm("term not on this branch")
        a, b = self.term_birth[t1], self.term_birth[t2]
        return "eq-term" if a == b else ("lt" if a < b else "gt")


class Tableau:
    def __init__(self, calc, root_branch, inputs, limits):
        self.calc = calc
        self.root = root_branch
        self.inputs = inputs
        self.limits = limits
        self.next_bid = root_branch.bid + 1


class Verdict:
    def __init__(self, kind, branch=None, stats=None):
        self.kind = kind  # "unsat" | "sat" | "limit"
        self.branch = branch
        self.stats = stats or {}

    def __repr__(self):
        return "Verdict(%s)" % self.kind


# ---------------------------------------------------------------------------
# the engine

class Engine:
    def __init__(self, calc, ns=None, node_budget=10 ** 6, time_budget=None,
                 search="dfs", trace=False):
        self.calc = calc
        self.ns = ns
        self.node_budget = node_budget
        self.time_budget = time_budget
        self.search = search
        self.mode = InternalizedMode(calc.ctx) if calc.mode == "internalized" \
            else BaseMode()
        self.trace_enabled = trace
        self.trace = []
        self.applications = 0
        self.subexpr_violations = []
        self.c1_violations = []
        self.allowed_exprs = None
        self.blocking = calc.blocking
        # the online subexpression check runs for unrefined generated calculi
        self.check_subexpr = ns is not None and not calc.refined \
            and calc.mode == "base"

    # -- construction --------------------------------------------------------
    def init(self, concepts):
        """Build the root: one fresh constant satisfying every input.

        Inputs are concepts or ``(concept, polarity)`` pairs; a negative
        polarity roots the corresponding negated literal (used for validity
        checks in logics without object-level negation).
        """
        signed = [c if isinstance(c, tuple) else (c, True) for c in concepts]
        if not signed:
            raise EmptyInput("no input concepts")
        for c, _ in signed:
            if not isinstance(c, sx.LExpr) or c.sort != 1:
                raise sx.IllSorted("inputs must be concepts (sort 1)")
        if self.check_subexpr:
            from .normalize import induced_ordering
            ordering = induced_ordering(self.ns)
            self.allowed_exprs = set(ordering.sub_closure([c for c, _ in signed]))
        root = Branch(0)
        if self.calc.mode == "internalized":
            anchor = sx.lconst(0, "i0")
            for c, pos in signed:
                tpl = (self.calc.ctx.c_plus if pos else self.calc.ctx.c_minus).get(1)
                if tpl is None:
                    raise sx.TabError("internalized calculus lacks a "
                                      "primary-sort template")
                self._add(root, sx.pos_lit(sx.atom(sx.HOLDS,
                                                   [tpl.instantiate([c, anchor])])))
        else:
            a0 = sx.dconst("a0")
            for c, pos in signed:
                self._add(root, sx.literal(pos, sx.atom(sx.nu(1), [c, a0])))
        return Tableau(self.calc, root, signed,
                       {"nodes": self.node_budget, "secs": self.time_budget})

    def _add(self, branch, lit):
        added = branch.add(lit, self.mode)
        if added and self.allowed_exprs is not None:
            for e in sx.lexprs_of_atom(lit.atom):
                if e not in self.allowed_exprs:
                    self.subexpr_violations.append((lit.text(), e.text()))
        return added

    # -- matching ------------------------------------------------------------
    def applicable_instances(self, rule, branch):
        """(fingerprint, binding, matched literals) for every instance not
        yet applied on the branch."""
        if rule.kind == "blocking":
            yield from self._ub_instances(rule, branch)
            return
        seen = set()
        for fp, binding, matched in self._match_rule(rule, branch, 0):
            if fp not in seen:
                seen.add(fp)
                yield fp, binding, matched

    def _match_rule(self, rule, branch, new_from):
        """Instances where at least one premise matches a literal appended at
        or after index ``new_from`` (0 enumerates everything).  Variables the
        premises leave unbound enumerate over the branch's marked terms and
        expressions (rules built without domain predication)."""
        premises = list(rule.premises)
        n = len(premises)
        if rule.free_vars and new_from:
            # new markers extend the enumeration, so rescan from scratch
            new_from = 0

        def expand_free(binding, matched):
            spaces = []
            for v in rule.free_vars:
                if isinstance(v, sx.LExpr):
                    spaces.append(branch.lmarkers.get(v.sort, ()))
                else:
                    spaces.append(branch.markers)
            for combo in itertools.product(*spaces):
                b2 = dict(binding)
                b2.update(zip(rule.free_vars, combo))
                fp = _fingerprint(rule.id, b2)
                if fp not in branch.applied:
                    yield fp, b2, list(matched)

        def rec(i, binding, matched, used_new):
            if i == n:
                if used_new or new_from == 0:
                    if rule.free_vars:
                        yield from expand_free(binding, matched)
                        return
                    fp = _fingerprint(rule.id, binding)
                    if fp not in branch.applied:
                        yield fp, dict(binding), list(matched)
                return
            pat = premises[i]
            can_new_later = used_new or any(
                _has_new_candidate(branch, premises[j], new_from)
                for j in range(i + 1, n))
            for lit, idx in branch.candidates_with_index(pat):
                is_new = idx >= new_from
                if not is_new and not can_new_later:
                    continue
                b2 = dict(binding)
                if sx.match_literal(pat, lit, b2):
                    matched.append(lit)
                    yield from rec(i + 1, b2, matched, used_new or is_new)
                    matched.pop()

        if n == 0:
            yield from rec(0, {}, [], False) if new_from == 0 else iter(())
            return
        yield from rec(0, {}, [], False)

    def _ub_instances(self, rule, branch):
        # conjecture pairs in birth order over marked terms only
        terms = sorted(branch.markers, key=lambda t: branch.term_birth[t])
        for i in range(len(terms)):
            for j in range(i + 1, len(terms)):
                binding = self.mode.ub_binding(rule, terms[i], terms[j])
                fp = _fingerprint(rule.id, binding)
                if fp not in branch.applied:
                    yield fp, binding, []

    def _suppressed(self, rule, branch, terms):
        """Condition on term-producing rules: no premise may mention a term
        already equated with an older one."""
        if not (self.blocking and self.blocking.enabled):
            return False
        if not rule.produces_terms:
            return False
        return any(t in branch.blocked for t in terms)

    def _priority(self, rule, branch):
        if rule.is_closure():
            return 0
        if rule.kind == "equality":
            return 1
        if rule.kind == "blocking":
            if self.blocking and branch.tp_count < self.blocking.depth:
                return 5
            return 3
        if rule.produces_terms:
            return 4
        return 2 if rule.branching_factor <= 1 else 3

    def _discover(self, branch):
        new_from = branch.scan_upto
        if len(branch.literals) <= new_from and new_from != 0:
            return
        branch.scan_upto = len(branch.literals)
        push = heapq.heappush
        for rule in self.calc.rules:
            if rule.kind == "blocking":
                for fp, binding, _ in self._ub_instances(rule, branch):
                    if fp not in branch.pending and fp not in branch.applied:
                        branch.pending[fp] = (branch.seen_next, rule, binding, ())
                        push(branch.heap, (self._priority(rule, branch),
                                           branch.seen_next, fp))
                        branch.seen_next += 1
                continue
            if new_from and not rule.free_vars \
                    and not any(_has_new_candidate(branch, p, new_from)
                                for p in rule.premises):
                continue
            prio = self._priority(rule, branch)
            for fp, binding, matched in self._match_rule(rule, branch,
                                                         new_from):
                if fp in branch.pending:
                    continue
                terms = ()
                if rule.produces_terms:
                    terms = tuple({t for lit in matched
                                   for t in self.mode.terms_in_literal(lit)})
                branch.pending[fp] = (branch.seen_next, rule, binding, terms)
                push(branch.heap, (prio, branch.seen_next, fp))
                branch.seen_next += 1

    def _denominator_state(self, branch, rule, binding):
        """(resolved, open indices): an instance with a fully present
        denominator asks for nothing; contradicted denominators cannot
        survive on this branch."""
        open_idx = []
        for i, den in enumerate(rule.denominators):
            lits = [sx.instantiate_literal(l, binding) for l in den]
            if all(l in branch.present for l in lits):
                return True, []
            if any(l.negate() in branch.present for l in lits):
                continue
            open_idx.append(i)
        return False, open_idx

    def collect(self, branch):
        """Refresh the pending pool and pick the next step.

        Returns None when saturated, or (kind, rule, fp, binding, data):
        kind "apply" branches normally, "unit" extends in place with the one
        surviving denominator (data is its index), "exhausted" closes the
        branch because every denominator is contradicted.
        """
        self._discover(branch)
        while branch.heap:
            prio, seen, fp = branch.heap[0]
            entry = branch.pending.get(fp)
            if entry is None or fp in branch.applied:
                heapq.heappop(branch.heap)
                continue
            seen2, rule, binding, terms = entry
            current = self._priority(rule, branch)
            if current != prio:
                heapq.heapreplace(branch.heap, (current, seen2, fp))
                continue
            if self._suppressed(rule, branch, terms):
                heapq.heappop(branch.heap)
                del branch.pending[fp]  # blocking only grows; gone for good
                continue
            if rule.branching_factor >= 1:
                resolved, open_idx = self._denominator_state(branch, rule,
                                                             binding)
                if resolved:
                    heapq.heappop(branch.heap)
                    del branch.pending[fp]
                    branch.applied.add(fp)
                    continue
                if not open_idx:
                    return ("exhausted", rule, fp, binding, None)
                if rule.branching_factor > 1 and len(open_idx) == 1:
                    return ("unit", rule, fp, binding, open_idx[0])
            return ("apply", rule, fp, binding, None)
        return None

    # -- application ---------------------------------------------------------
    def apply(self, tableau, branch, rule, fp, binding, only_den=None):
        """Apply one instance; returns the successor branches (empty when the
        rule closes the branch, the same branch when nothing splits).  With
        ``only_den`` the named denominator extends the branch in place (the
        caller established the others cannot survive)."""
        branch.applied.add(fp)
        branch.pending.pop(fp, None)
        self.applications += 1
        if rule.produces_terms:
            if self.blocking and self.blocking.enabled:
                # online check of the blocking discipline: no term-producing
                # step may touch a term already equated with an older one
                for prem in rule.premises:
                    lit = sx.instantiate_literal(prem, binding)
                    for t in self.mode.terms_in_literal(lit):
                        if t in branch.blocked:
                            self.c1_violations.append(
                                (rule.id, sx.term_text(t)))
            branch.tp_count += 1
        if rule.is_closure():
            branch.closed = True
            if self.trace_enabled:
                self._trace("apply %s {%s} den#0 branch#%d -> branch#%d"
                            % (rule.id, _binding_text(binding), branch.bid,
                               branch.bid))
                self._trace("close branch#%d" % branch.bid)
            return []
        if rule.branching_factor == 1 or only_den is not None:
            j = only_den or 0
            for lit in rule.denominators[j]:
                self._add(branch, sx.instantiate_literal(lit, binding))
            if self.trace_enabled:
                self._trace("apply %s {%s} den#%d branch#%d -> branch#%d"
                            % (rule.id, _binding_text(binding), j, branch.bid,
                               branch.bid))
                if branch.closed:
                    self._trace("close branch#%d" % branch.bid)
            return [branch]
        out = []
        src_bid = branch.bid
        for j, den in enumerate(rule.denominators):
            child = branch.clone(tableau.next_bid)
            tableau.next_bid += 1
            for lit in den:
                self._add(child, sx.instantiate_literal(lit, binding))
            if self.trace_enabled:
                self._trace("apply %s {%s} den#%d branch#%d -> branch#%d"
                            % (rule.id, _binding_text(binding), j, src_bid,
                               child.bid))
                if child.closed:
                    self._trace("close branch#%d" % child.bid)
            out.append(child)
        return out

    def close_by_exhaustion(self, branch, rule, fp, binding):
        """Every denominator of the instance is contradicted on the branch."""
        branch.applied.add(fp)
        branch.pending.pop(fp, None)
        self.applications += 1
        branch.closed = True
        if self.trace_enabled:
            self._trace("apply %s {%s} den#x branch#%d -> branch#%d"
                        % (rule.id, _binding_text(binding), branch.bid,
                           branch.bid))
            self._trace("close branch#%d" % branch.bid)

    # -- search --------------------------------------------------------------
    def expand(self, tableau):
        start = time.monotonic()
        work = [tableau.root]
        while work:
            if self.applications >= self.node_budget:
                return Verdict("limit", stats=self.stats())
            if self.time_budget is not None and \
                    time.monotonic() - start > self.time_budget:
                return Verdict("limit", stats=self.stats())
            branch = work.pop(0) if self.search == "bfs" else work.pop()
            while True:
                if self.applications >= self.node_budget:
                    return Verdict("limit", stats=self.stats())
                if self.time_budget is not None and \
                        time.monotonic() - start > self.time_budget:
                    return Verdict("limit", stats=self.stats())
                if branch.closed:
                    break
                best = self.collect(branch)
                if best is None:
                    self._trace("saturated branch#%d" % branch.bid)
                    return Verdict("sat", branch=branch, stats=self.stats())
                kind, rule, fp, binding, extra = best
                if kind == "exhausted":
                    self.close_by_exhaustion(branch, rule, fp, binding)
                    break
                succ = self.apply(tableau, branch, rule, fp, binding,
                                  only_den=extra if kind == "unit" else None)
                if not succ:
                    break  # closed by a closure rule
                if len(succ) == 1 and succ[0] is branch:
                    if branch.closed:
                        break
                    continue
                open_children = [c for c in succ if not c.closed]
                if not open_children:
                    break
                if self.search == "bfs":
                    work.extend(open_children)
                    break
                branch = open_children[0]
                work.extend(reversed(open_children[1:]))
        return Verdict("unsat", stats=self.stats())

    def stats(self):
        return {"applications": self.applications,
                "subexpr_violations": list(self.subexpr_violations),
                "c1_violations": list(self.c1_violations)}

    def _trace(self, line):
        if self.trace_enabled:
            self.trace.append(line)


def _has_new_candidate(branch, pat, new_from):
    lst = branch.candidates_with_index(pat)
    return bool(lst) and lst[-1][1] >= new_from


def _fingerprint(rid, binding):
    items = tuple(sorted((_vname(k), id(v)) for k, v in binding.items()))
    return (rid, items)


def _vname(v):
    return v.name if isinstance(v, sx.LExpr) else "$" + v.name


def _binding_text(binding):
    parts = []
    for k in sorted(binding, key=_vname):
        v = binding[k]
        parts.append("%s:=%s" % (k.name if isinstance(k, sx.LExpr) else k.name,
                                 sx.term_text(v)))
    return "; ".join(parts)


def prove(calc, concepts, ns=None, node_budget=10 ** 6, time_budget=None,
          search="dfs", trace=False):
    eng = Engine(calc, ns=ns, node_budget=node_budget, time_budget=time_budget,
                 search=search, trace=trace)
    tab = eng.init(concepts)
    verdict = eng.expand(tab)
    verdict.engine = eng
    return verdict


# ---------------------------------------------------------------------------
# trace replay

def replay_trace(calc, concepts, trace_text, ns=None):
    """Re-run a recorded derivation, checking each step was applicable.

    Returns the number of application steps replayed; raises on mismatch.
    """
    eng = Engine(calc, ns=ns)
    tab = eng.init(concepts)
    branches = {tab.root.bid: tab.root}
    steps = 0
    verified = set()  # (fingerprint, source bid) already checked applicable
    for line in trace_text.splitlines():
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "apply":
            if parts[0] in ("close", "saturated"):
                continue
            raise sx.TabError("bad trace line: %s" % line)
        rid = parts[1]
        body = line[line.index("{") + 1:line.rindex("}")]
        den_tok = line.split("den#")[1].split()[0]
        src_bid = int(line.split("branch#")[1].split()[0])
        dst_bid = int(line.rsplit("#", 1)[1])
        rule = calc.rule(rid)
        if rule is None:
            raise sx.TabError("trace names unknown rule %s" % rid)
        binding = _parse_binding(calc, body)
        fp = _fingerprint(rid, binding)
        src = branches.get(src_bid)
        if src is None:
            raise sx.TabError("trace targets unknown branch %d" % src_bid)
        if (fp, src_bid) not in verified:
            if fp not in {f for f, _, _ in eng.applicable_instances(rule, src)}:
                raise sx.TabError("step not applicable: %s" % line)
            src.applied.add(fp)
            verified.add((fp, src_bid))
        if den_tok == "x":
            # closure by exhaustion: every denominator must be contradicted
            for den in rule.denominators:
                lits = [sx.instantiate_literal(l, binding) for l in den]
                if not any(l.negate() in src.present for l in lits):
                    raise sx.TabError("exhaustion close not justified: %s" % line)
            src.closed = True
        elif rule.is_closure():
            src.closed = True
        else:
            j = int(den_tok)
            child = src if dst_bid == src_bid else src.clone(dst_bid)
            for lit in rule.denominators[j]:
                child.add(sx.instantiate_literal(lit, binding), eng.mode)
            branches[dst_bid] = child
        steps += 1
    return steps


def _parse_binding(calc, body):
    from .parser import parse_term
    binding = {}
    if not body.strip():
        return binding
    for part in body.split("; "):
        name, _, val = part.partition(":=")
        name = name.strip()
        cls = calc.signature.classify_name(name)
        t = parse_term(calc.signature, val.strip(), calc.skolems)
        if cls and cls[0] == "var":
            binding[sx.lvar(cls[1], name)] = t
        elif cls and cls[0] == "dvar":
            binding[sx.dvar(name)] = t
        else:
            raise sx.TabError("bad binding variable %r" % name)
    return binding
