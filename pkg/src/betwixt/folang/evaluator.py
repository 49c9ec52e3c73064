"""Model checking over finite structures.

Formulas are compiled to Python closures over a mutable environment dict.
Three things keep evaluation of the large generated sentences tractable:

* Candidate generation.  Before looping over the universe for ``E x``,
  ``A x`` or ``E=n x`` the compiler collects literals that every
  satisfying (for ``A``: every falsifying) value of ``x`` must meet.  An
  equality with a bound term, an atom whose other arguments are bound, or
  the cached extension of a closed one-variable subformula then narrows the
  loop.  Generators only ever return a superset; the body is always checked.
* Hoisting.  Conjuncts of a quantifier body that do not mention the bound
  variable are decided once, before the loop.
* Memoisation.  Every quantified subformula is keyed by its alpha-normalised
  text plus the values of its free variables, so the many renamed copies of
  the same definition share work.

The evaluator is tied to one structure; build one per structure and reuse it
for every formula checked against that structure.
"""
from __future__ import annotations

from itertools import product
from operator import itemgetter
from typing import Mapping, Optional

from .rewrite import free_vars
from .structure import FiniteStructure
from .syntax import (
    And,
    Atom,
    Const,
    CountExists,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    SetExists,
    SetForall,
    Truth,
    Var,
)

SET_QUANTIFIER_CAP = 16
LARGE_CANDIDATE_LIST = 24  # static lists longer than this lose to a pattern query

_MISSING = object()


class EvaluationError(ValueError):
    pass


def _set_key(name: str) -> str:
    # element variables are identifiers, so this can never collide
    return "%" + name


# -- canonical keys ----------------------------------------------------------

_CANON: dict = {}


def _canon(f: Formula) -> tuple:
    """(prefix text with alpha-normalised variables, free-variable order)."""
    hit = _CANON.get(id(f))
    if hit is not None and hit[0] is f:
        return hit[1]
    res = _canon_uncached(f)
    _CANON[id(f)] = (f, res)  # keeps f alive so the id stays unique
    return res


def _canon_uncached(f: Formula) -> tuple:
    free_order: list = []
    free_map: dict = {}
    out: list = []

    def tm(t, bound):
        if isinstance(t, Const):
            return "$" + t.name
        name = t.name
        if name in bound:
            return bound[name]
        if name not in free_map:
            free_map[name] = f"f{len(free_map)}"
            free_order.append(name)
        return free_map[name]

    def go(g, bound, sbound):
        if isinstance(g, Truth):
            out.append("T" if g.value else "F")
        elif isinstance(g, Atom):
            rel = sbound.get(g.rel, g.rel)
            out.append(f"{rel}(" + ",".join(tm(a, bound) for a in g.args) + ")")
        elif isinstance(g, Eq):
            out.append(f"=({tm(g.left, bound)},{tm(g.right, bound)})")
        elif isinstance(g, Not):
            out.append("~")
            go(g.body, bound, sbound)
        elif isinstance(g, (And, Or)):
            out.append(("&" if isinstance(g, And) else "|") + f"{len(g.parts)}(")
            for p in g.parts:
                go(p, bound, sbound)
                out.append(",")
            out.append(")")
        elif isinstance(g, Implies):
            out.append(">(")
            go(g.left, bound, sbound)
            out.append(",")
            go(g.right, bound, sbound)
            out.append(")")
        elif isinstance(g, (Exists, Forall, CountExists)):
            b = f"b{len(bound)}"
            head = {Exists: "E", Forall: "A"}.get(type(g)) or f"C{g.n}"
            out.append(f"{head} {b}.")
            go(g.body, {**bound, g.var: b}, sbound)
        else:
            s = f"S{len(sbound)}"
            out.append(f"{'ES' if isinstance(g, SetExists) else 'AS'} {s}.")
            go(g.body, bound, {**sbound, g.var: s})

    go(f, {}, {})
    return "".join(out), tuple(free_order)


# -- necessary literals ------------------------------------------------------

def _literals(f: Formula, positive: bool, nonempty: bool, out: list) -> None:
    """Collect (formula, polarity) pairs implied by ``f`` having truth value ``positive``."""
    if isinstance(f, Truth):
        return
    if isinstance(f, Not):
        _literals(f.body, not positive, nonempty, out)
    elif isinstance(f, And) and positive:
        for p in f.parts:
            _literals(p, True, nonempty, out)
    elif isinstance(f, Or) and not positive:
        for p in f.parts:
            _literals(p, False, nonempty, out)
    elif isinstance(f, Implies) and not positive:
        _literals(f.left, True, nonempty, out)
        _literals(f.right, False, nonempty, out)
    elif isinstance(f, (Exists, Forall, CountExists)):
        # E y. psi true (or A y. psi false) gives a witness y; facts about
        # other variables hold for it.  The dual cases need a nonempty universe.
        witnessed = (
            (isinstance(f, Exists) and positive)
            or (isinstance(f, CountExists) and positive and f.n >= 1)
            or (isinstance(f, Forall) and not positive)
        )
        covering = (isinstance(f, Forall) and positive) or (isinstance(f, Exists) and not positive)
        if witnessed or (covering and nonempty):
            inner: list = []
            _literals(f.body, positive, nonempty, inner)
            out.extend((g, pol) for g, pol in inner if f.var not in free_vars(g))
        elif not isinstance(f, CountExists):
            out.append((f, positive))
    elif isinstance(f, (SetExists, SetForall)):
        return
    else:
        out.append((f, positive))


class Evaluator:
    """Compiled, memoising model checker for one finite structure."""

    def __init__(self, structure: FiniteStructure):
        self.M = structure
        self.universe = tuple(structure.universe)
        self._compiled: dict = {}
        self._canon_ids: dict = {}
        self._canon_cache: dict = {}
        self._memo: dict = {}
        self._extensions: dict = {}
        self._shared: dict = {}

    # -- public API ----------------------------------------------------------

    def holds(self, f: Formula, env: Optional[Mapping] = None) -> bool:
        env = dict(env or {})
        missing = free_vars(f) - set(env)
        if missing:
            raise EvaluationError(f"free variables not assigned: {sorted(missing)}")
        return self._compile_top(f)(env)

    def extension(self, f: Formula, var: str) -> frozenset:
        """Elements ``v`` with ``f[var := v]`` true."""
        extra = free_vars(f) - {var}
        if extra:
            raise EvaluationError(f"free variables not assigned: {sorted(extra)}")
        return self._extension_of(f, var)

    def tuples(self, f: Formula, variables, domain=None) -> frozenset:
        """All tuples over ``domain`` (default: universe) satisfying ``f``."""
        variables = tuple(variables)
        extra = free_vars(f) - set(variables)
        if extra:
            raise EvaluationError(f"free variables not assigned: {sorted(extra)}")
        dom = tuple(self.universe if domain is None else domain)
        fn = self._compile_top(f)
        env: dict = {}
        out = set()
        for combo in product(dom, repeat=len(variables)):
            env.update(zip(variables, combo))
            if fn(env):
                out.add(combo)
        return frozenset(out)

    # -- compilation ---------------------------------------------------------

    def _compile_top(self, f):
        hit = self._compiled.get(id(f))
        if hit is not None and hit[0] is f:
            return hit[1]
        fn = self._compile(f, frozenset())
        self._compiled[id(f)] = (f, fn)
        return fn

    def _cid(self, f) -> tuple:
        hit = self._canon_cache.get(id(f))
        if hit is not None and hit[0] is f:
            return hit[1]
        text, order = _canon(f)
        cid = self._canon_ids.setdefault(text, len(self._canon_ids))
        self._canon_cache[id(f)] = (f, (cid, order))
        return cid, order

    def _term_getter(self, t):
        if isinstance(t, Const):
            if t.name not in self.M.constants:
                raise EvaluationError(f"constant ${t.name} is not interpreted")
            val = self.M.constants[t.name]
            return lambda env: val
        return itemgetter(t.name)

    def _compile(self, f, sets: frozenset):
        if isinstance(f, Truth):
            return (lambda env: True) if f.value else (lambda env: False)
        if isinstance(f, Atom):
            return self._compile_atom(f, sets)
        if isinstance(f, Eq):
            a, b = self._term_getter(f.left), self._term_getter(f.right)
            return lambda env: a(env) == b(env)
        if isinstance(f, Not):
            g = self._compile(f.body, sets)
            return lambda env: not g(env)
        if isinstance(f, And):
            parts = [self._compile(p, sets) for p in f.parts]
            if len(parts) == 2:
                p0, p1 = parts
                return lambda env: p0(env) and p1(env)
            return lambda env: all(p(env) for p in parts)
        if isinstance(f, Or):
            parts = [self._compile(p, sets) for p in f.parts]
            if len(parts) == 2:
                p0, p1 = parts
                return lambda env: p0(env) or p1(env)
            return lambda env: any(p(env) for p in parts)
        if isinstance(f, Implies):
            a, b = self._compile(f.left, sets), self._compile(f.right, sets)
            return lambda env: (not a(env)) or b(env)
        if isinstance(f, (Exists, Forall, CountExists)):
            return self._compile_quantifier(f, sets)
        if isinstance(f, (SetExists, SetForall)):
            return self._compile_set_quantifier(f, sets)
        raise TypeError(f"not a formula: {f!r}")

    def _membership(self, name: str, sets: frozenset):
        """Return a function env -> container for a unary predicate or set variable."""
        if name in sets:
            key = _set_key(name)
            return lambda env: env[key]
        if name in self.M.sets:
            s = self.M.sets[name]
            return lambda env: s
        return None

    def _compile_atom(self, f: Atom, sets):
        getters = [self._term_getter(a) for a in f.args]
        member = self._membership(f.rel, sets)
        if member is not None:
            if len(getters) != 1:
                raise EvaluationError(f"set {f.rel} applied to {len(getters)} arguments")
            g = getters[0]
            return lambda env: g(env) in member(env)
        rel = self.M.relations.get(f.rel)
        if rel is None:
            raise EvaluationError(f"relation {f.rel} is not interpreted")
        if rel.arity != len(f.args):
            raise EvaluationError(f"{f.rel} has arity {rel.arity}, used with {len(f.args)}")
        if all(isinstance(a, Var) for a in f.args):
            names = [a.name for a in f.args]
            if len(names) == 1:
                n0 = names[0]
                return lambda env: (env[n0],) in rel
            ig = itemgetter(*names)
            return lambda env: ig(env) in rel
        return lambda env: tuple(g(env) for g in getters) in rel

    def _compile_set_quantifier(self, f, sets):
        n = len(self.universe)
        if n > SET_QUANTIFIER_CAP:
            raise EvaluationError(
                f"set quantifier over a universe of {n} elements (cap {SET_QUANTIFIER_CAP})"
            )
        body = self._compile(f.body, sets | {f.var})
        key = _set_key(f.var)
        universe = self.universe
        want = isinstance(f, SetExists)

        def run(env):
            old = env.get(key, _MISSING)
            try:
                for mask in range(1 << n):
                    env[key] = frozenset(u for i, u in enumerate(universe) if mask >> i & 1)
                    if body(env) == want:
                        return want
                return not want
            finally:
                if old is _MISSING:
                    env.pop(key, None)
                else:
                    env[key] = old

        return run

    # -- quantifiers ---------------------------------------------------------

    def _compile_quantifier(self, f, sets):
        # alpha-equivalent copies with the same free names share one closure
        cid, order = self._cid(f)
        set_free = self._free_sets(f, sets)
        shared_key = (cid, order, set_free)
        hit = self._shared.get(shared_key)
        if hit is None:
            hit = self._compile_quantifier_fresh(f, sets, cid, order, set_free)
            self._shared[shared_key] = hit
        return hit

    def _compile_quantifier_fresh(self, f, sets, cid, order, set_free):
        x = f.var
        body_f = f.body
        # hoist conjuncts that do not mention x
        indep, dep = [], [body_f]
        if isinstance(body_f, And):
            indep = [p for p in body_f.parts if x not in free_vars(p)]
            dep = [p for p in body_f.parts if x in free_vars(p)]
        guard = self._compile(And(tuple(indep)), sets) if len(indep) > 1 else (
            self._compile(indep[0], sets) if indep else None
        )
        if not dep:
            rest_f = None
        elif len(dep) == 1:
            rest_f = dep[0]
        else:
            rest_f = And(tuple(dep))
        rest = self._compile(rest_f, sets) if rest_f is not None else (lambda env: True)

        # literals for candidate generation: what the loop is looking for
        looking_for = not isinstance(f, Forall)
        lits: list = []
        if rest_f is not None:
            _literals(rest_f, looking_for, bool(self.universe), lits)
        gen, filters = self._plan(x, lits, sets)

        memo = self._memo
        universe = self.universe
        kind = type(f)
        n_wanted = f.n if isinstance(f, CountExists) else None

        def candidates(env):
            pool = gen(env) if gen is not None else universe
            if filters:
                return [v for v in pool if _passes(filters, env, x, v)]
            return pool

        if kind is Exists:
            def core(env):
                if guard is not None and not guard(env):
                    return False
                for v in candidates(env):
                    env[x] = v
                    if rest(env):
                        return True
                return False
        elif kind is Forall:
            def core(env):
                if guard is not None and not guard(env):
                    # A x (false & ...) holds only on an empty universe
                    return not universe
                for v in candidates(env):
                    env[x] = v
                    if not rest(env):
                        return False
                return True
        else:
            def core(env):
                if guard is not None and not guard(env):
                    return n_wanted == 0
                count = 0
                for v in candidates(env):
                    env[x] = v
                    if rest(env):
                        count += 1
                        if count > n_wanted:
                            return False
                return count == n_wanted

        set_keys = tuple(_set_key(s) for s in set_free)
        if set_keys:
            getter = itemgetter(*order, *set_keys) if (len(order) + len(set_keys)) > 1 else None
        else:
            getter = itemgetter(*order) if len(order) > 1 else None
        single = (order + set_keys)[0] if len(order) + len(set_keys) == 1 else None

        def run(env):
            if getter is not None:
                key = (cid, getter(env))
            elif single is not None:
                key = (cid, env[single])
            else:
                key = cid
            r = memo.get(key)
            if r is None:
                old = env.get(x, _MISSING)
                try:
                    r = core(env)
                finally:
                    if old is _MISSING:
                        env.pop(x, None)
                    else:
                        env[x] = old
                memo[key] = r
            return r

        return run

    def _free_sets(self, f, sets) -> tuple:
        """Bound set variables (from an enclosing scope) that ``f`` mentions."""
        from .rewrite import free_set_vars

        if not sets:
            return ()
        used = free_set_vars(f)
        return tuple(sorted(used & sets))

    def _plan(self, x, lits, sets):
        """Pick a candidate generator for ``x`` plus cheap atomic prefilters."""
        filters = [
            (self._compile(g, sets), pol) for g, pol in lits if isinstance(g, (Atom, Eq))
        ]
        best = self._best_generator(x, lits, sets)
        return (best[1] if best is not None else None), filters

    def _best_generator(self, x, lits, sets):
        """Best (priority, generator) over the positive literals, or None."""
        gens = []
        for g, pol in lits:
            if pol:
                cand = self._generator(x, g, sets)
                if cand is not None:
                    gens.append(cand)
        if not gens:
            return None
        gens.sort(key=lambda c: c[0])
        if gens[0][0] == 1:
            # environment-free candidate lists: take the smallest, and fall
            # back to a pattern query when even that one is large
            statics = [c[1] for c in gens if c[0] == 1]
            query = next((c[1] for c in gens if c[0] == 2), None)
            if len(statics) == 1 and query is None:
                return gens[0]

            def smallest(env, statics=statics, query=query):
                best = min((s(env) for s in statics), key=len)
                if query is not None and len(best) > LARGE_CANDIDATE_LIST:
                    other = query(env)
                    if len(other) < len(best):
                        return other
                return best

            return 1 if query is None else 2, smallest
        return gens[0]

    def _generator(self, x, g, sets):
        """(priority, env -> iterable) for a positive literal, or None.

        Priority 0: equality with a bound term.  Priority 1: a list that does
        not depend on the environment.  Priority 2: a pattern query.
        """
        if isinstance(g, Eq):
            l, r = g.left, g.right
            if isinstance(l, Var) and l.name == x and r != l:
                get = self._term_getter(r)
                return 0, lambda env: (get(env),)
            if isinstance(r, Var) and r.name == x and l != r:
                get = self._term_getter(l)
                return 0, lambda env: (get(env),)
            return None
        if isinstance(g, Atom):
            return self._atom_generator(x, g, sets)
        if isinstance(g, Or):
            found = self._or_generator(x, g, sets)
            if found is not None:
                return found
        fv = free_vars(g)
        if fv == {x} and not (self._free_sets(g, sets)):
            ext_holder = []

            def closed(env):
                if not ext_holder:
                    ext_holder.append(tuple(self._extension_of(g, x)))
                return ext_holder[0]

            return 1, closed
        return None

    def _atom_generator(self, x, g: Atom, sets):
        positions = [i for i, a in enumerate(g.args) if isinstance(a, Var) and a.name == x]
        if len(positions) != 1:
            return None
        member = self._membership(g.rel, sets)
        if member is not None:
            if g.rel in sets:
                return 2, member
            s = tuple(self.M.sets[g.rel])
            return 1, lambda env: s
        rel = self.M.relations.get(g.rel)
        if rel is None or not hasattr(rel, "match"):
            return None
        pos = positions[0]
        getters = [None if i == pos else self._term_getter(a) for i, a in enumerate(g.args)]
        static = all(isinstance(a, Const) for i, a in enumerate(g.args) if i != pos)

        if static:
            pattern = tuple(None if gt is None else gt({}) for gt in getters)
            cache = []

            def fixed(env):
                if not cache:
                    res = rel.match(pattern)
                    cache.append(self.universe if res is None else tuple(res))
                return cache[0]

            return 1, fixed

        def query(env):
            res = rel.match(tuple(None if gt is None else gt(env) for gt in getters))
            return self.universe if res is None else res

        return 2, query

    def _or_generator(self, x, g: Or, sets):
        parts = []
        for p in g.parts:
            lits: list = []
            _literals(p, True, bool(self.universe), lits)
            best = self._best_generator(x, lits, sets)
            if best is None:
                return None
            parts.append(best)
        fns = [c[1] for c in parts]
        prio = max(1, max(c[0] for c in parts))

        fixed = all(c[0] == 1 for c in parts)
        cache = []

        def union(env):
            if cache:
                return cache[0]
            seen = {}
            for fn in fns:
                for v in fn(env):
                    seen[v] = None
            out = tuple(seen)
            if fixed:
                cache.append(out)
            return out

        return prio, union

    def _extension_of(self, g, var) -> frozenset:
        cid, order = self._cid(g)
        key = (cid, order.index(var) if var in order else -1)
        hit = self._extensions.get(key)
        if hit is not None:
            return hit
        res = self._structural_extension(g, var)
        if res is None:
            fn = self._compile_top(g)
            env: dict = {}
            out = []
            for v in self.universe:
                env[var] = v
                if fn(env):
                    out.append(v)
            res = frozenset(out)
        self._extensions[key] = res
        return res

    def _structural_extension(self, g, var) -> Optional[frozenset]:
        """Extension computed from the shape of ``g``, or None to fall back to a scan.

        Disjunctions are unions; an existential block is solved witnesses
        first, generating ``var`` last from literals that mention the
        witnesses.  This replaces one quantifier run per universe element by
        one pass over the witnesses.
        """
        if var not in free_vars(g):
            return frozenset(self.universe) if self._compile_top(g)({}) else frozenset()
        if isinstance(g, Or):
            out: set = set()
            for p in g.parts:
                out |= self._extension_of(p, var)
            return frozenset(out)
        if isinstance(g, And):
            lead = next(
                (p for p in g.parts if isinstance(p, (Or, Exists)) and var in free_vars(p)), None
            )
            if lead is None:
                return None
            fn = self._compile_top(g)
            env: dict = {}
            out = []
            for v in self._extension_of(lead, var):
                env[var] = v
                if fn(env):
                    out.append(v)
            return frozenset(out)
        if isinstance(g, Exists):
            return self._witness_first(g, var)
        return None

    def _witness_first(self, g, var) -> Optional[frozenset]:
        order, body = [], g
        while isinstance(body, Exists):
            order.append(body.var)
            body = body.body
        if var in order or len(set(order)) != len(order):
            return None
        order.append(var)
        lits: list = []
        _literals(body, True, bool(self.universe), lits)
        levels = []
        bound: set = set()
        for x in order:
            usable = [(h, pol) for h, pol in lits if free_vars(h) <= bound | {x}]
            gen, filters = self._plan(x, [(h, pol) for h, pol in usable if x in free_vars(h)], frozenset())
            if gen is None:
                return None
            levels.append((x, gen, filters))
            bound.add(x)
        check = self._compile_top(body)
        out: set = set()
        env: dict = {}
        last = len(levels) - 1

        def walk(i):
            x, gen, filters = levels[i]
            for v in gen(env):
                if i == last and v in out:
                    continue
                if filters and not _passes(filters, env, x, v):
                    continue
                env[x] = v
                if i < last:
                    walk(i + 1)
                elif check(env):
                    out.add(v)

        walk(0)
        return frozenset(out)


def _passes(filters, env, x, v) -> bool:
    env[x] = v
    for fn, pol in filters:
        if fn(env) != pol:
            return False
    return True


def evaluate(structure: FiniteStructure, f: Formula, env: Optional[Mapping] = None) -> bool:
    """One-shot evaluation; build an :class:`Evaluator` to reuse work across formulas."""
    return Evaluator(structure).holds(f, env)
