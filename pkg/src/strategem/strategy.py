"""Strategy combinators and the small-step / big-step semantics they run under.

A strategy is a finite tree built from rule atoms, applicability checks,
sequence, choice, the units succeed and fail, labels, and explicit recursion
(Rec binds a variable, Var refers to it). Execution works on immutable states
(environment, focused term, remaining strategy) and is driven by splitting the
remaining strategy into a first atom and the rest.

Rules are opaque partial functions from (environment, focus) to a finite tuple
of successor pairs. An empty tuple means "not applicable". Minor rules are
administrative (navigation, label bookkeeping) and are hidden from big steps
except as prefixes and trailing completions.
"""

from __future__ import annotations

import os
from collections import deque
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Iterator, Optional

DEFAULT_MAX_LEN = 32
DEFAULT_MAX_UNROLL = 8
DEFAULT_STEP_BUDGET = 10_000
DEFAULT_MINOR_STEPS = 32
DEFAULT_NODE_BUDGET = 200_000

BUDGET_ENV_VAR = "STRATEGEM_BUDGET"


class StrategyError(Exception):
    """Base class for engine failures."""


class LeftRecursionError(StrategyError):
    """Splitting revisited a recursion binder without consuming an atom."""

    def __init__(self, message: str = "left-recursive strategy", var: str = None):
        super().__init__(message if var is None else "%s (binder %r)" % (message, var))
        self.var = var


class BudgetExceededError(StrategyError):
    """A step budget ran out before the computation finished."""

    def __init__(self, message: str, used: int = None, trace: tuple = ()):
        super().__init__(message)
        self.used = used
        self.trace = tuple(trace)


_budget_override: ContextVar[Optional[int]] = ContextVar("strategem_budget", default=None)


def default_budget_limit() -> int:
    """Current step budget: context override, then the environment, then 10000."""
    override = _budget_override.get()
    if override is not None:
        return override
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw:
        try:
            value = int(raw)
        except ValueError as exc:
            raise ValueError("%s must be an integer, got %r" % (BUDGET_ENV_VAR, raw)) from exc
        if value <= 0:
            raise ValueError("%s must be positive, got %d" % (BUDGET_ENV_VAR, value))
        return value
    return DEFAULT_STEP_BUDGET


@contextmanager
def with_step_budget(limit: int):
    """Run a block under an explicit transition budget.

    Every transition explored by step, big_step, run and the services counts
    one unit, checks and minor rules included. Exhaustion raises
    BudgetExceededError instead of hanging.
    """
    if limit <= 0:
        raise ValueError("step budget must be positive, got %d" % limit)
    token = _budget_override.set(limit)
    try:
        yield
    finally:
        _budget_override.reset(token)


class Budget:
    """Mutable countdown shared by one service call and its nested runs.

    Checks spawn nested explorations; those share (and decrement) the same
    budget so total work stays bounded. The instance also memoizes check
    outcomes and keeps them coherent within the call.
    """

    __slots__ = ("limit", "used", "check_cache")

    def __init__(self, limit: int = None):
        self.limit = default_budget_limit() if limit is None else limit
        if self.limit <= 0:
            raise ValueError("step budget must be positive, got %d" % self.limit)
        self.used = 0
        self.check_cache: dict = {}

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExceededError(
                "step budget of %d transitions exceeded" % self.limit, used=self.used
            )


def cached_hash(cls):
    # Strategy trees and states get hashed constantly (visited sets, caches);
    # caching the hash in the instance dict keeps that O(1) after first use.
    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(tuple(getattr(self, name) for name in self.__dataclass_fields__))
            h = hash((cls.__name__, h))
            self.__dict__["_hash"] = h
        return h

    cls.__hash__ = __hash__
    return cls


@dataclass(frozen=True, eq=False, repr=False)
class RewriteRule:
    """A named partial transformation on (environment, focus) pairs.

    transform returns a finite tuple of (environment, focus) successors; an
    empty tuple means the rule does not apply. Identity (equality, hashing,
    ordering keys) is the key tuple, never the function object, so rules built
    twice compare equal and serialized output stays stable.
    """

    name: str
    transform: Callable[[Any, Any], tuple]
    minor: bool = False
    key: tuple = None
    term_name: str = None  # spelling in the concrete strategy syntax, if different
    progress: bool = False  # guaranteed strict descent, terminates on finite terms
    expr_fn: Callable = None  # plain term rewriter this rule was lifted from, if any

    def __post_init__(self):
        if self.key is None:
            object.__setattr__(self, "key", (self.name,))

    def __eq__(self, other):
        return isinstance(other, RewriteRule) and self.key == other.key

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return self.term_name or self.name


class Strategy:
    """Base class for strategy tree nodes."""

    __slots__ = ()


@cached_hash
@dataclass(frozen=True)
class Rule(Strategy):
    rule: RewriteRule


@cached_hash
@dataclass(frozen=True)
class Check(Strategy):
    """Applicability check: succeeds exactly when the inner strategy has no run."""

    inner: Strategy


@cached_hash
@dataclass(frozen=True)
class Seq(Strategy):
    left: Strategy
    right: Strategy


@cached_hash
@dataclass(frozen=True)
class Choice(Strategy):
    left: Strategy
    right: Strategy


@cached_hash
@dataclass(frozen=True)
class Succeed(Strategy):
    pass


@cached_hash
@dataclass(frozen=True)
class Fail(Strategy):
    pass


@cached_hash
@dataclass(frozen=True)
class Label(Strategy):
    name: str
    body: Strategy


@cached_hash
@dataclass(frozen=True)
class Rec(Strategy):
    """Explicit fixed point: Var(var) inside body refers back to this node."""

    var: str
    body: Strategy


@cached_hash
@dataclass(frozen=True)
class Var(Strategy):
    name: str


SUCCEED = Succeed()
FAIL = Fail()


@cached_hash
@dataclass(frozen=True)
class Environment:
    """Finite string-to-string map plus the stack of entered labels."""

    bindings: tuple = ()  # sorted (key, value) pairs
    label_path: tuple = ()

    def bind(self, key: str, value: str) -> "Environment":
        pairs = tuple(sorted({**dict(self.bindings), key: value}.items()))
        return Environment(pairs, self.label_path)

    def unbind(self, key: str) -> "Environment":
        pairs = tuple(p for p in self.bindings if p[0] != key)
        return Environment(pairs, self.label_path)

    def get(self, key: str, default: str = None) -> Optional[str]:
        for k, v in self.bindings:
            if k == key:
                return v
        return default

    def push_label(self, name: str) -> "Environment":
        return Environment(self.bindings, self.label_path + (name,))

    def pop_label(self, name: str) -> "Environment":
        if not self.label_path or self.label_path[-1] != name:
            raise ValueError("label stack does not end with %r" % name)
        return Environment(self.bindings, self.label_path[:-1])


@cached_hash
@dataclass(frozen=True)
class State:
    """One point of an exercise: environment, focused term, remaining strategy."""

    env: Environment
    focus: Any
    remaining: Strategy


def state_sort_key(state: State) -> str:
    # reprs of the frozen values are deterministic, which makes repr a usable
    # canonical ordering for materialized result sets
    return repr(state)


# ---------------------------------------------------------------------------
# combinators

def seq(*strategies: Strategy) -> Strategy:
    """Right-nested sequence of the arguments; empty gives Succeed."""
    if not strategies:
        return SUCCEED
    out = strategies[-1]
    for s in reversed(strategies[:-1]):
        out = Seq(s, out)
    return out


def choice(*strategies: Strategy) -> Strategy:
    """Right-nested choice of the arguments; empty gives Fail."""
    if not strategies:
        return FAIL
    out = strategies[-1]
    for s in reversed(strategies[:-1]):
        out = Choice(s, out)
    return out


def orelse(first: Strategy, second: Strategy) -> Strategy:
    """Left-biased choice: the second branch runs only when the first cannot."""
    return Choice(first, Seq(Check(first), second))


def option(s: Strategy) -> Strategy:
    return Choice(s, SUCCEED)


def try_(s: Strategy) -> Strategy:
    return orelse(s, SUCCEED)


def repeat(s: Strategy) -> Strategy:
    """Apply s as long as it is applicable. Uses an explicit fixed point."""
    return Rec("x", try_(Seq(s, Var("x"))))


def _substitute(node: Strategy, var: str, replacement: Strategy) -> Strategy:
    t = type(node)
    if t is Var:
        return replacement if node.name == var else node
    if t is Rec:
        if node.var == var:  # inner binder shadows
            return node
        body = _substitute(node.body, var, replacement)
        return node if body is node.body else Rec(node.var, body)
    if t is Seq or t is Choice:
        left = _substitute(node.left, var, replacement)
        right = _substitute(node.right, var, replacement)
        if left is node.left and right is node.right:
            return node
        return t(left, right)
    if t is Label:
        body = _substitute(node.body, var, replacement)
        return node if body is node.body else Label(node.name, body)
    if t is Check:
        # checks capture variables too (try/repeat put the binder inside one)
        inner = _substitute(node.inner, var, replacement)
        return node if inner is node.inner else Check(inner)
    return node


@lru_cache(maxsize=None)
def _unroll_rec(rec: Rec) -> Strategy:
    return _substitute(rec.body, rec.var, rec)


def unroll(s: Strategy) -> Strategy:
    """One unfolding of a Rec node; identity on everything else."""
    if type(s) is Rec:
        return _unroll_rec(s)
    return s


# ---------------------------------------------------------------------------
# label expansion rules and the check pseudo rule

@lru_cache(maxsize=None)
def enter_rule(label: str) -> RewriteRule:
    def transform(env, focus):
        return ((env.push_label(label), focus),)

    return RewriteRule(
        name="Enter(%s)" % label, transform=transform, minor=True, key=("Enter", label)
    )


@lru_cache(maxsize=None)
def leave_rule(label: str) -> RewriteRule:
    def transform(env, focus):
        if env.label_path and env.label_path[-1] == label:
            return ((env.pop_label(label), focus),)
        return ()

    return RewriteRule(
        name="Leave(%s)" % label, transform=transform, minor=True, key=("Leave", label)
    )


def _app_check_transform(env, focus):
    return ((env, focus),)


# Pseudo minor rule recorded in traces when an applicability check succeeds.
# It never appears inside strategy trees and never shows up in major traces.
APP_CHECK = RewriteRule(
    name="AppCheck", transform=_app_check_transform, minor=True, key=("AppCheck",)
)


# ---------------------------------------------------------------------------
# nullability analyses

@lru_cache(maxsize=None)
def _nullable(s: Strategy, assumed: frozenset) -> bool:
    # strict nullability: the empty sentence is in the language
    t = type(s)
    if t is Succeed:
        return True
    if t is Fail or t is Rule or t is Check or t is Label:
        # labels expand to Enter/Leave atoms, so a labeled strategy never
        # derives the genuinely empty sentence
        return False
    if t is Seq:
        return _nullable(s.left, assumed) and _nullable(s.right, assumed)
    if t is Choice:
        return _nullable(s.left, assumed) or _nullable(s.right, assumed)
    if t is Rec:
        # least fixed point: one iteration from the all-False assumption is
        # exact for a monotone boolean equation
        return _nullable(s.body, assumed | {s.var})
    if t is Var:
        if s.name in assumed:
            return False
        raise ValueError("unbound strategy variable %r" % s.name)
    raise TypeError("not a strategy node: %r" % (s,))


def nullable(s: Strategy) -> bool:
    """True iff the empty sentence is in the language of s."""
    return _nullable(s, frozenset())


@lru_cache(maxsize=None)
def _accepts_empty(s: Strategy, assumed: frozenset) -> bool:
    t = type(s)
    if t is Succeed or t is Check:
        # a lone check is an all-minor sentence (it consumes no major)
        return True
    if t is Fail:
        return False
    if t is Rule:
        return s.rule.minor
    if t is Label:
        # Enter and Leave are minor, so only the body matters
        return _accepts_empty(s.body, assumed)
    if t is Seq:
        return _accepts_empty(s.left, assumed) and _accepts_empty(s.right, assumed)
    if t is Choice:
        return _accepts_empty(s.left, assumed) or _accepts_empty(s.right, assumed)
    if t is Rec:
        return _accepts_empty(s.body, assumed | {s.var})
    if t is Var:
        if s.name in assumed:
            return False
        raise ValueError("unbound strategy variable %r" % s.name)
    raise TypeError("not a strategy node: %r" % (s,))


def accepts_empty(s: Strategy) -> bool:
    """True iff the language of s has a sentence of minor atoms only.

    This is the syntactic test; it ignores whether those minor atoms would
    actually execute from any particular state.
    """
    return _accepts_empty(s, frozenset())


# ---------------------------------------------------------------------------
# split

def _seq_rest(left: Strategy, right: Strategy) -> Strategy:
    # remainders absorb the unit so they match hand-written strategies
    if left is SUCCEED or left == SUCCEED:
        return right
    if right is SUCCEED or right == SUCCEED:
        return left
    return Seq(left, right)


_LEFT_RECURSIVE = object()
_split_cache: dict = {}


def split(s: Strategy) -> tuple:
    """All (atom, rest) decompositions of s.

    Atoms are Rule or Check nodes. Labels expand to their Enter atom with the
    body and the Leave rule appended to the rest. Revisiting a Rec node on one
    expansion path without consuming an atom raises LeftRecursionError; the
    outcome (including that error) is cached per strategy value.
    """
    cached = _split_cache.get(s)
    if cached is _LEFT_RECURSIVE:
        raise LeftRecursionError()
    if cached is not None:
        return cached

    out: dict = {}
    stack = [(s, SUCCEED, frozenset())]
    try:
        while stack:
            node, cont, visiting = stack.pop()
            t = type(node)
            if t is Rule or t is Check:
                out.setdefault((node, cont))
            elif t is Seq:
                # tail results (when the head is nullable) come after head results
                if _nullable(node.left, frozenset()):
                    stack.append((node.right, cont, visiting))
                stack.append((node.left, _seq_rest(node.right, cont), visiting))
            elif t is Choice:
                stack.append((node.right, cont, visiting))
                stack.append((node.left, cont, visiting))
            elif t is Label:
                enter = Rule(enter_rule(node.name))
                rest = _seq_rest(node.body, _seq_rest(Rule(leave_rule(node.name)), cont))
                out.setdefault((enter, rest))
            elif t is Rec:
                if node in visiting:
                    raise LeftRecursionError(var=node.var)
                stack.append((unroll(node), cont, visiting | {node}))
            elif t is Var:
                raise ValueError("unbound strategy variable %r" % node.name)
            # Succeed and Fail have no splits
    except LeftRecursionError:
        _split_cache[s] = _LEFT_RECURSIVE
        raise

    result = tuple(out)
    _split_cache[s] = result
    return result


def split_unguarded(s: Strategy, budget: Budget) -> tuple:
    """split without the left-recursion guard, for demonstrating the time-out.

    A left-recursive strategy makes this loop; the budget turns the loop into
    a BudgetExceededError instead of a hang.
    """
    out: dict = {}
    stack = [(s, SUCCEED)]
    while stack:
        budget.tick()
        node, cont = stack.pop()
        t = type(node)
        if t is Rule or t is Check:
            out.setdefault((node, cont))
        elif t is Seq:
            if _nullable(node.left, frozenset()):
                stack.append((node.right, cont))
            stack.append((node.left, _seq_rest(node.right, cont)))
        elif t is Choice:
            stack.append((node.right, cont))
            stack.append((node.left, cont))
        elif t is Label:
            enter = Rule(enter_rule(node.name))
            out.setdefault((enter, _seq_rest(node.body, _seq_rest(Rule(leave_rule(node.name)), cont))))
        elif t is Rec:
            stack.append((unroll(node), cont))
        elif t is Var:
            raise ValueError("unbound strategy variable %r" % node.name)
    return tuple(out)


# ---------------------------------------------------------------------------
# step semantics

_CHECK_IN_PROGRESS = object()


def step(state: State, budget: Budget = None) -> list:
    """One transition: every (rule, successor state) pair available from state.

    Rule atoms apply their transformation. Check atoms succeed when the
    checked strategy has no run from the current environment and focus; a
    successful check contributes a single AppCheck transition that leaves the
    term untouched and drops the atom.

    A check whose evaluation reaches the very same check at the very same
    environment and focus has no consistent answer (its outcome negates
    itself), so that re-entry raises rather than picking a fixed point.
    """
    budget = budget if budget is not None else Budget()
    out = []
    for atom, rest in split(state.remaining):
        if type(atom) is Rule:
            r = atom.rule
            for env2, focus2 in r.transform(state.env, state.focus):
                budget.tick()
                out.append((r, State(env2, focus2, rest)))
        else:
            key = (state.env, state.focus, atom.inner)
            passed = budget.check_cache.get(key)
            if passed is _CHECK_IN_PROGRESS:
                raise BudgetExceededError(
                    "applicability check depends on its own outcome"
                )
            if passed is None:
                budget.check_cache[key] = _CHECK_IN_PROGRESS
                try:
                    passed = not _has_end_state(
                        State(state.env, state.focus, atom.inner), budget
                    )
                except BaseException:
                    del budget.check_cache[key]
                    raise
                budget.check_cache[key] = passed
            if passed:
                budget.tick()
                out.append((APP_CHECK, State(state.env, state.focus, rest)))
    return out


def _has_end_state(state: State, budget: Budget) -> bool:
    # existence version of run: depth-first over step, stop at the first state
    # whose remaining strategy is strictly nullable
    seen = set()
    stack = [state]
    while stack:
        st = stack.pop()
        if st in seen:
            continue
        seen.add(st)
        if _nullable(st.remaining, frozenset()):
            return True
        budget.tick()
        for _, succ in step(st, budget):
            if succ not in seen:
                stack.append(succ)
    return False


def has_minor_completion(state: State, budget: Budget = None) -> bool:
    """State-level emptiness: some minor-only path reaches a nullable remainder."""
    budget = budget if budget is not None else Budget()
    seen = set()
    stack = [state]
    while stack:
        st = stack.pop()
        if st in seen:
            continue
        seen.add(st)
        if _nullable(st.remaining, frozenset()):
            return True
        budget.tick()
        for r, succ in step(st, budget):
            if r.minor and succ not in seen:
                stack.append(succ)
    return False


def minor_sentences(state: State, budget: int = DEFAULT_MINOR_STEPS,
                    step_budget: Budget = None) -> tuple:
    """All minor-only step sequences from state that end with a nullable remainder.

    Returns (sentence, end state) pairs where a sentence is a tuple of rule
    names (AppCheck included). The empty sentence pairs with the state itself
    when its remaining strategy is already nullable. A minor-only path longer
    than budget raises BudgetExceededError rather than truncating silently.
    """
    if budget <= 0:
        raise ValueError("minor step budget must be positive, got %d" % budget)
    sb = step_budget if step_budget is not None else Budget()
    out: dict = {}
    stack = [(state, ())]
    while stack:
        st, sentence = stack.pop()
        if _nullable(st.remaining, frozenset()):
            out.setdefault((sentence, st))
        minors = [(r, succ) for r, succ in step(st, sb) if r.minor]
        if minors and len(sentence) >= budget:
            raise BudgetExceededError(
                "minor-only path exceeds %d steps" % budget, trace=sentence
            )
        for r, succ in reversed(minors):
            stack.append((succ, sentence + (r.name,)))
    return tuple(out)


# ---------------------------------------------------------------------------
# big step semantics

def big_step_traced(state: State, budget: Budget = None) -> list:
    """Big steps from state as (major rule, end state, full trace) triples.

    A big step is a closure of minor transitions, one major rule, and then,
    when the post-major state has minor-only completions, each completion
    applied to the end ("trailing minor rules"). The trace lists every rule
    name along the way, minors and AppCheck included. Duplicate (rule, state)
    results keep their shortest trace.
    """
    budget = budget if budget is not None else Budget()

    prefixes = {state: ()}
    order = [state]
    queue = deque([state])
    while queue:
        st = queue.popleft()
        for r, succ in step(st, budget):
            if r.minor and succ not in prefixes:
                prefixes[succ] = prefixes[st] + (r.name,)
                order.append(succ)
                queue.append(succ)

    results: dict = {}
    for st in order:
        prefix = prefixes[st]
        for r, succ in step(st, budget):
            if r.minor:
                continue
            completions = minor_sentences(succ, step_budget=budget)
            if completions:
                finals = [(prefix + (r.name,) + sentence, end) for sentence, end in completions]
            else:
                finals = [(prefix + (r.name,), succ)]
            for trace, end in finals:
                key = (r, end)
                best = results.get(key)
                if best is None or (len(trace), trace) < (len(best), best):
                    results[key] = trace
    return [(r, end, trace) for (r, end), trace in results.items()]


def big_step(state: State, budget: Budget = None) -> list:
    """Big steps from state as (major rule, end state) pairs."""
    return [(r, end) for r, end, _ in big_step_traced(state, budget)]


def run(state: State, budget: Budget = None) -> tuple:
    """All end states reachable from state, remaining normalized to Succeed.

    An end state is the target of a minor-only completion of any state in the
    reflexive-transitive big-step closure; in particular a start state whose
    minor rules can finish the strategy outright is its own end state.
    """
    budget = budget if budget is not None else Budget()
    seen = {state}
    stack = [state]
    ends: dict = {}
    while stack:
        st = stack.pop()
        for _, end in minor_sentences(st, step_budget=budget):
            ends.setdefault(State(end.env, end.focus, SUCCEED))
        for _, succ in big_step(st, budget):
            if succ not in seen:
                seen.add(succ)
                stack.append(succ)
    return tuple(sorted(ends, key=state_sort_key))


def recognize(strategy: Strategy, majors, state: State, budget: Budget = None) -> bool:
    """True iff some big-step path through strategy follows exactly this major trace.

    The state supplies the starting environment and focus; its own remaining
    strategy is ignored. majors may hold RewriteRule values or plain names.
    """
    budget = budget if budget is not None else Budget()
    names = [m.name if isinstance(m, RewriteRule) else m for m in majors]
    start = State(state.env, state.focus, strategy)

    def walk_trace(st, i):
        if i == len(names):
            return has_minor_completion(st, budget)
        for r, succ in big_step(st, budget):
            if r.name == names[i] and walk_trace(succ, i + 1):
                return True
        return False

    return walk_trace(start, 0)


# ---------------------------------------------------------------------------
# bounded language enumeration

def language_upto(s: Strategy, max_len: int = DEFAULT_MAX_LEN,
                  max_unroll: int = DEFAULT_MAX_UNROLL,
                  node_budget: int = DEFAULT_NODE_BUDGET) -> frozenset:
    """Sentences of the language of s, bounded in length and Rec unrollings.

    Sentences are tuples of atom nodes (Rule or Check). Labels contribute
    their Enter and Leave atoms, which count toward the length. Each Rec value
    may unfold at most max_unroll times per sentence. Exceeding node_budget
    raises BudgetExceededError.
    """
    if max_len < 0 or max_unroll < 0:
        raise ValueError("bounds must be non-negative")
    visited_nodes = [0]

    def lang(node, unrolls, limit):
        visited_nodes[0] += 1
        if visited_nodes[0] > node_budget:
            raise BudgetExceededError("language enumeration exceeded %d nodes" % node_budget)
        t = type(node)
        if t is Rule or t is Check:
            return {(node,)} if limit >= 1 else set()
        if t is Succeed:
            return {()}
        if t is Fail:
            return set()
        if t is Seq:
            lefts = lang(node.left, unrolls, limit)
            if not lefts:
                return set()
            shortest = min(len(x) for x in lefts)
            rights = lang(node.right, unrolls, limit - shortest)
            return {x + y for x in lefts for y in rights if len(x) + len(y) <= limit}
        if t is Choice:
            return lang(node.left, unrolls, limit) | lang(node.right, unrolls, limit)
        if t is Label:
            if limit < 2:
                return set()
            enter = Rule(enter_rule(node.name))
            leave = Rule(leave_rule(node.name))
            return {(enter,) + x + (leave,) for x in lang(node.body, unrolls, limit - 2)}
        if t is Rec:
            count = unrolls.get(node, 0)
            if count >= max_unroll:
                return set()
            bumped = dict(unrolls)
            bumped[node] = count + 1
            return lang(unroll(node), bumped, limit)
        if t is Var:
            raise ValueError("unbound strategy variable %r" % node.name)
        raise TypeError("not a strategy node: %r" % (node,))

    return frozenset(lang(s, {}, max_len))


def majors_of(sentence: tuple) -> tuple:
    """Project a sentence onto its major rule names, dropping minors and checks."""
    return tuple(a.rule.name for a in sentence if type(a) is Rule and not a.rule.minor)


# ---------------------------------------------------------------------------
# tree utilities

_CHILD_FIELDS = {
    Seq: ("left", "right"),
    Choice: ("left", "right"),
    Check: ("inner",),
    Label: ("body",),
    Rec: ("body",),
}


def children_of(s: Strategy) -> tuple:
    fields = _CHILD_FIELDS.get(type(s), ())
    return tuple(getattr(s, f) for f in fields)


def walk(s: Strategy) -> Iterator[tuple]:
    """Preorder traversal yielding (path, node) pairs; paths are child indices."""
    stack = [((), s)]
    while stack:
        path, node = stack.pop()
        yield path, node
        kids = children_of(node)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((path + (i,), kids[i]))


def rules_of(s: Strategy) -> tuple:
    """Every rule atom in the tree, check bodies included, first occurrence order."""
    seen: dict = {}
    for _, node in walk(s):
        if type(node) is Rule:
            seen.setdefault(node.rule.key, node.rule)
    return tuple(seen.values())
