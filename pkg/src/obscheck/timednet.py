"""Discrete-time process networks with probes, priorities, urgency, bounded
variables, and their exploration into a labeled state graph.

A network is a parallel composition of processes over shared bounded integer
variables.  Ordinary processes move through *event* transitions (guarded,
with assignments) and *elapse* transitions (time windows on the clock of the
current location).  Observer processes never take part in events: they carry
*reaction* transitions bound to probed event labels, and fire as separate
urgent internal steps right after the observed event.

Time is discrete: a distinguished tick edge (label `t`) advances every
process clock by one, clamped at the largest constant relevant to the
current location.  The clamp is sound only when every elapse transition with
a finite upper bound is urgent, which construction and parsing enforce.

Exploration rules, in priority order, from a state (locations, variables,
clocks, pending reactions):

  1. pending reactions, if any, are the only possible steps; firing one moves
     its observer, resets its clock, and drops that observer's pending entries;
  2. otherwise any guard-enabled, non-suppressed event may fire; it applies
     its assignments and queues every reaction on that event whose elapsed
     window holds at this instant;
  3. otherwise-any elapse whose clock lies in its window (and is not
     suppressed) may fire;
  4. the tick may fire only with no pending reaction, no firable urgent
     event, and no urgent elapse sitting at its finite upper bound.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from .lts import Lts

TICK_LABEL = "t"

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


class NetError(ValueError):
    """Invalid network description; carries a line number when parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ExploreError(RuntimeError):
    pass


@dataclass(frozen=True)
class Window:
    """Integer time window; upper=None means unbounded."""

    lo: int
    hi: int | None
    lo_open: bool = False
    hi_open: bool = False

    def contains(self, k: int) -> bool:
        if self.lo_open:
            if k <= self.lo:
                return False
        elif k < self.lo:
            return False
        if self.hi is None:
            return True
        if self.hi_open:
            return k < self.hi
        return k <= self.hi

    def finite_consts(self) -> tuple[int, ...]:
        if self.hi is None:
            return (self.lo,)
        return (self.lo, self.hi)

    def is_integer_empty(self) -> bool:
        lo = self.lo + 1 if self.lo_open else self.lo
        if self.hi is None:
            return False
        hi = self.hi - 1 if self.hi_open else self.hi
        return hi < lo


@dataclass(frozen=True)
class Cmp:
    var: str
    op: str  # one of = != < <= > >=
    value: int

    def holds(self, value: int) -> bool:
        if self.op == "=":
            return value == self.value
        if self.op == "!=":
            return value != self.value
        if self.op == "<":
            return value < self.value
        if self.op == "<=":
            return value <= self.value
        if self.op == ">":
            return value > self.value
        if self.op == ">=":
            return value >= self.value
        raise NetError(f"unknown comparison operator {self.op!r}")


@dataclass(frozen=True)
class Event:
    guard: tuple[Cmp, ...] = ()
    assigns: tuple[tuple[str, int], ...] = ()
    urgent: bool = False
    keepclock: bool = False


@dataclass(frozen=True)
class Elapse:
    window: Window
    urgent: bool = False


@dataclass(frozen=True)
class Reaction:
    event: str
    window: Window = Window(0, None)


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    label: str
    kind: Event | Elapse | Reaction


@dataclass(frozen=True)
class Process:
    name: str
    locations: tuple[str, ...]
    initial: str
    transitions: tuple[Transition, ...]

    @property
    def is_observer(self) -> bool:
        return any(type(t.kind) is Reaction for t in self.transitions)


@dataclass(frozen=True)
class VarDecl:
    lo: int
    hi: int
    init: int


@dataclass
class TimedNet:
    variables: dict[str, VarDecl] = field(default_factory=dict)
    processes: list[Process] = field(default_factory=list)
    priorities: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        self._validate()
        self._loc_index = [
            {loc: i for i, loc in enumerate(p.locations)} for p in self.processes
        ]
        self._cmax = [self._cmax_table(p) for p in self.processes]
        self._var_index = {name: i for i, name in enumerate(self.variables)}

    @staticmethod
    def _cmax_table(proc: Process) -> dict[str, int]:
        table = {loc: 0 for loc in proc.locations}
        for tr in proc.transitions:
            if type(tr.kind) in (Elapse, Reaction):
                for c in tr.kind.window.finite_consts():
                    table[tr.source] = max(table[tr.source], c)
        return table

    def _validate(self) -> None:
        for name, decl in self.variables.items():
            if not _NAME_RE.match(name):
                raise NetError(f"bad variable name {name!r}")
            if decl.lo > decl.hi:
                raise NetError(f"variable {name}: empty domain {decl.lo}..{decl.hi}")
            if not decl.lo <= decl.init <= decl.hi:
                raise NetError(f"variable {name}: initial value outside its domain")
        if not self.processes:
            raise NetError("a network needs at least one process")
        event_labels = set()
        all_labels = set()
        for proc in self.processes:
            locs = set(proc.locations)
            if len(locs) != len(proc.locations):
                raise NetError(f"process {proc.name}: duplicate location")
            if proc.initial not in locs:
                raise NetError(f"process {proc.name}: unknown initial location {proc.initial!r}")
            has_event = False
            has_reaction = False
            for tr in proc.transitions:
                if tr.source not in locs or tr.target not in locs:
                    raise NetError(f"process {proc.name}: transition endpoints must be locations")
                if not _NAME_RE.match(tr.label) or tr.label in (TICK_LABEL, "T"):
                    raise NetError(f"process {proc.name}: label {tr.label!r} is reserved or invalid")
                all_labels.add(tr.label)
                kind = tr.kind
                if type(kind) is Event:
                    has_event = True
                    event_labels.add(tr.label)
                    for cmp in kind.guard:
                        if cmp.var not in self.variables:
                            raise NetError(f"guard on unknown variable {cmp.var!r}")
                    for var, value in kind.assigns:
                        decl = self.variables.get(var)
                        if decl is None:
                            raise NetError(f"assignment to unknown variable {var!r}")
                        if not decl.lo <= value <= decl.hi:
                            raise NetError(f"assignment {var} := {value} leaves its domain")
                    if kind.keepclock and tr.source != tr.target:
                        raise NetError("keepclock only makes sense on a self loop")
                elif type(kind) is Elapse:
                    w = kind.window
                    if kind.urgent:
                        if w.hi is None:
                            raise NetError("an urgent elapse needs a finite upper bound")
                        if w.hi_open or w.lo_open:
                            raise NetError("urgent elapse windows must be closed")
                        if w.lo > w.hi:
                            raise NetError("empty elapse window")
                    else:
                        if w.hi is not None:
                            raise NetError(
                                "an elapse with a finite upper bound must be urgent "
                                "(clock clamping is unsound otherwise)"
                            )
                elif type(kind) is Reaction:
                    has_reaction = True
                    if kind.window.is_integer_empty():
                        raise NetError("reaction window contains no integer instant")
                else:
                    raise NetError(f"unknown transition kind {kind!r}")
            if has_reaction and has_event:
                raise NetError(
                    f"process {proc.name}: observers react to events but never engage in them"
                )
        for proc in self.processes:
            for tr in proc.transitions:
                if type(tr.kind) is Reaction and tr.kind.event not in event_labels:
                    raise NetError(
                        f"process {proc.name}: probe on unknown event {tr.kind.event!r}"
                    )
        for high, low in self.priorities:
            for lab in (high, low):
                if lab not in all_labels:
                    raise NetError(f"priority on unknown label {lab!r}")

    def cmax(self, proc_index: int, location_index: int) -> int:
        proc = self.processes[proc_index]
        return self._cmax[proc_index][proc.locations[location_index]]

    @property
    def probes(self) -> dict[str, list[tuple[int, int]]]:
        """Observed event label -> reaction transitions bound to it."""
        table: dict[str, list[tuple[int, int]]] = {}
        for p, proc in enumerate(self.processes):
            for ti, tr in enumerate(proc.transitions):
                if type(tr.kind) is Reaction:
                    table.setdefault(tr.kind.event, []).append((p, ti))
        return table


# A network state: location index per process, value per variable, clock per
# process, and the sorted tuple of pending (process, transition) reactions.
NetState = tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...], tuple[tuple[int, int], ...]]


def initial_state(net: TimedNet) -> NetState:
    locs = tuple(net._loc_index[p][proc.initial] for p, proc in enumerate(net.processes))
    vals = tuple(decl.init for decl in net.variables.values())
    clocks = (0,) * len(net.processes)
    return (locs, vals, clocks, ())


def describe_state(net: TimedNet, state: NetState) -> dict:
    locs, vals, clocks, pending = state
    return {
        "locations": {
            proc.name: proc.locations[locs[p]] for p, proc in enumerate(net.processes)
        },
        "variables": dict(zip(net.variables, vals)),
        "clocks": {proc.name: clocks[p] for p, proc in enumerate(net.processes)},
        "pending": tuple(
            (net.processes[p].name, net.processes[p].transitions[ti].label)
            for p, ti in pending
        ),
    }


def _successors(net: TimedNet, state: NetState) -> list[tuple[str, NetState]]:
    locs, vals, clocks, pending = state
    if pending:
        out = []
        for p, ti in pending:
            tr = net.processes[p].transitions[ti]
            nl = list(locs)
            nl[p] = net._loc_index[p][tr.target]
            nc = list(clocks)
            nc[p] = 0
            npend = tuple(e for e in pending if e[0] != p)
            out.append((tr.label, (tuple(nl), vals, tuple(nc), npend)))
        return out

    var_index = net._var_index

    # First pass: which event/elapse transitions are enabled, before priorities.
    enabled: list[tuple[int, int, Transition]] = []
    enabled_labels: set[str] = set()
    for p, proc in enumerate(net.processes):
        loc = proc.locations[locs[p]]
        for ti, tr in enumerate(proc.transitions):
            if tr.source != loc:
                continue
            kind = tr.kind
            if type(kind) is Event:
                if all(c.holds(vals[var_index[c.var]]) for c in kind.guard):
                    enabled.append((p, ti, tr))
                    enabled_labels.add(tr.label)
            elif type(kind) is Elapse:
                if kind.window.contains(clocks[p]):
                    enabled.append((p, ti, tr))
                    enabled_labels.add(tr.label)
    suppressed = {low for high, low in net.priorities if high in enabled_labels}

    out = []
    tick_blocked = False
    for p, ti, tr in enabled:
        if tr.label in suppressed:
            continue
        kind = tr.kind
        if type(kind) is Event:
            if kind.urgent:
                tick_blocked = True
            nv = list(vals)
            for var, value in kind.assigns:
                nv[var_index[var]] = value
            nl = list(locs)
            nl[p] = net._loc_index[p][tr.target]
            nc = list(clocks)
            if not (kind.keepclock and tr.source == tr.target):
                nc[p] = 0
            npend = []
            for q, qproc in enumerate(net.processes):
                qloc = qproc.locations[locs[q]]
                for rti, rtr in enumerate(qproc.transitions):
                    if (
                        type(rtr.kind) is Reaction
                        and rtr.source == qloc
                        and rtr.kind.event == tr.label
                        and rtr.kind.window.contains(clocks[q])
                    ):
                        npend.append((q, rti))
            out.append((tr.label, (tuple(nl), tuple(nv), tuple(nc), tuple(sorted(npend)))))
        else:
            nl = list(locs)
            nl[p] = net._loc_index[p][tr.target]
            nc = list(clocks)
            nc[p] = 0
            out.append((tr.label, (tuple(nl), vals, tuple(nc), ())))
            if kind.urgent and clocks[p] == kind.window.hi:
                tick_blocked = True

    if not tick_blocked:
        assert not pending
        nc = tuple(
            min(clocks[p] + 1, net.cmax(p, locs[p])) for p in range(len(net.processes))
        )
        out.append((TICK_LABEL, (locs, vals, nc, ())))
    return out


def explore_full(net: TimedNet, max_states: int = 100_000) -> tuple[Lts, tuple[NetState, ...]]:
    """Breadth-first state graph plus the network state behind each index."""
    init = initial_state(net)
    index: dict[NetState, int] = {init: 0}
    order: list[NetState] = [init]
    transitions: list[tuple[int, str, int]] = []
    queue = deque((0,))
    while queue:
        i = queue.popleft()
        for label, succ in _successors(net, order[i]):
            j = index.get(succ)
            if j is None:
                j = len(order)
                if j >= max_states:
                    raise ExploreError(f"state count exceeded the ceiling of {max_states}")
                index[succ] = j
                order.append(succ)
                queue.append(j)
            transitions.append((i, label, j))
    return Lts(len(order), 0, transitions), tuple(order)


def explore(net: TimedNet, max_states: int = 100_000) -> Lts:
    """Deterministic discrete-time state graph of the network."""
    return explore_full(net, max_states)[0]


# ---------------------------------------------------------------------------
# Built-in networks


def builtin_present(d1: int, d2: int) -> TimedNet:
    """Universal environment composed with the observer for
    "event a after the first b within [d1, d2[".

    The environment is a single location firing a (x := 1), b (x := 2), and
    an urgent silent reset z (guard x != 0, x := 0) so that probes on a and b
    see every interleaving of events and delays.  The observer waits in
    `idle` for the first b, sits in `start` for exactly d1 ticks, then
    watches: a within [0, d2-d1[ leads to `ok`, and once d2-d1 ticks have
    passed the `error` step becomes (and stays) enabled.

    The watch step outprioritizes the events: without that, an `a` fired at
    exactly d1 ticks could slip in before the observer starts watching and
    would be missed even though it satisfies the pattern.
    """
    if not 0 <= d1 < d2:
        raise NetError(f"the window [{d1},{d2}[ is empty or unbounded")
    universal = Process(
        name="Universal",
        locations=("u0",),
        initial="u0",
        transitions=(
            Transition("u0", "u0", "a", Event(assigns=(("x", 1),))),
            Transition("u0", "u0", "b", Event(assigns=(("x", 2),))),
            Transition("u0", "u0", "z", Event(guard=(Cmp("x", "!=", 0),), assigns=(("x", 0),), urgent=True)),
        ),
    )
    observer = Process(
        name="Present",
        locations=("idle", "start", "watch", "ok", "error"),
        initial="idle",
        transitions=(
            Transition("idle", "start", "start", Reaction("b", Window(0, None))),
            Transition("start", "watch", "watch", Elapse(Window(d1, d1), urgent=True)),
            Transition("watch", "ok", "stop", Reaction("a", Window(0, d2 - d1, hi_open=True))),
            Transition("watch", "error", "error", Elapse(Window(d2 - d1, None))),
        ),
    )
    return TimedNet(
        variables={"x": VarDecl(0, 2, 0)},
        processes=[universal, observer],
        priorities=[("watch", "a"), ("watch", "b")],
    )


def builtin_mouse() -> TimedNet:
    """Button emitting `double` when clicked at least twice in strictly less
    than one time unit, watched by a naive observer that errors on any second
    click.  The `delay` elapse outprioritizes `click`, which is what makes
    the window strict."""
    push = Process(
        name="Push",
        locations=("s0", "s1", "s2"),
        initial="s0",
        transitions=(
            Transition("s0", "s1", "click", Event(assigns=(("dbl", 0),))),
            Transition("s1", "s1", "click", Event(assigns=(("dbl", 1),), keepclock=True)),
            Transition("s1", "s2", "delay", Elapse(Window(1, 1), urgent=True)),
            Transition("s2", "s0", "double", Event(guard=(Cmp("dbl", "=", 1),), urgent=True)),
            Transition("s2", "s0", "z", Event(guard=(Cmp("dbl", "=", 0),), urgent=True)),
        ),
    )
    never_twice = Process(
        name="neverTwice",
        locations=("w0", "w1", "err"),
        initial="w0",
        transitions=(
            Transition("w0", "w1", "once", Reaction("click", Window(0, None))),
            Transition("w1", "err", "error", Reaction("click", Window(0, None))),
        ),
    )
    return TimedNet(
        variables={"dbl": VarDecl(0, 1, 0)},
        processes=[push, never_twice],
        priorities=[("delay", "click")],
    )


# ---------------------------------------------------------------------------
# Plain-text network format

_VAR_RE = re.compile(r"var\s+(\w+)\s*:\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*=\s*(-?\d+)$")
_PROCESS_RE = re.compile(r"process\s+(\w+)$")
_INIT_RE = re.compile(r"init\s+(\w+)$")
_PRIORITY_RE = re.compile(r"priority\s+(\w+)\s*>\s*(\w+)$")
_FROM_RE = re.compile(r"from\s+(\w+)\s+(on|elapse|probe)\s+(.*?)\s+to\s+(\w+)$")
_ON_RE = re.compile(
    r"(\w+)"
    r"(?:\s+when\s+(?P<guard>.*?))?"
    r"(?:\s+do\s+(?P<do>.*?))?"
    r"(?P<urgent>\s+urgent)?"
    r"(?P<keepclock>\s+keepclock)?"
    r"(?:\s+label\s+(?P<label>\w+))?$"
)
_ELAPSE_RE = re.compile(
    r"(?P<window>[\[\]][^\[\]]*[\[\]])"
    r"(?P<urgent>\s+urgent)?"
    r"\s+label\s+(?P<label>\w+)$"
)
_PROBE_RE = re.compile(
    r"(\w+)"
    r"(?:\s+when\s+elapsed\s+in\s+(?P<window>[\[\]][^\[\]]*[\[\]]))?"
    r"\s+label\s+(?P<label>\w+)$"
)
_WINDOW_RE = re.compile(r"([\[\]])\s*(\d+)\s*,\s*(\d+|w)\s*([\[\]])$")
_CMP_RE = re.compile(r"(\w+)\s*(=|!=|<=|>=|<|>)\s*(-?\d+)$")
_ASSIGN_RE = re.compile(r"(\w+)\s*:=\s*(-?\d+)$")


def _parse_window(text: str, line: int) -> Window:
    m = _WINDOW_RE.match(text.strip())
    if m is None:
        raise NetError(f"malformed time window {text!r}", line)
    left, lo, hi, right = m.groups()
    lo_open = left == "]"
    if hi == "w":
        if right != "[":
            raise NetError("an unbounded window must end with '['", line)
        return Window(int(lo), None, lo_open=lo_open)
    return Window(int(lo), int(hi), lo_open=lo_open, hi_open=right == "[")


def _parse_guard(text: str, line: int) -> tuple[Cmp, ...]:
    cmps = []
    for part in text.split(","):
        m = _CMP_RE.match(part.strip())
        if m is None:
            raise NetError(f"malformed guard {part.strip()!r}", line)
        cmps.append(Cmp(m.group(1), m.group(2), int(m.group(3))))
    return tuple(cmps)


def _parse_assigns(text: str, line: int) -> tuple[tuple[str, int], ...]:
    assigns = []
    for part in text.split(","):
        m = _ASSIGN_RE.match(part.strip())
        if m is None:
            raise NetError(f"malformed assignment {part.strip()!r}", line)
        assigns.append((m.group(1), int(m.group(2))))
    return tuple(assigns)


def parse_net(text: str) -> TimedNet:
    """Line-oriented format: `var`, `process`, `init`, `from`, `priority`
    declarations; `#` starts a comment.  Validation errors carry the line."""
    variables: dict[str, VarDecl] = {}
    priorities: list[tuple[str, str]] = []
    processes: list[Process] = []
    current: dict | None = None

    def close_current():
        nonlocal current
        if current is None:
            return
        if current["init"] is None:
            raise NetError(f"process {current['name']}: missing init declaration", current["line"])
        locations = list(dict.fromkeys(current["locations"]))
        processes.append(
            Process(
                name=current["name"],
                locations=tuple(locations),
                initial=current["init"],
                transitions=tuple(current["transitions"]),
            )
        )
        current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("var "):
            m = _VAR_RE.match(line)
            if m is None:
                raise NetError(f"malformed variable declaration {line!r}", lineno)
            name, lo, hi, init = m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4))
            if name in variables:
                raise NetError(f"duplicate variable {name!r}", lineno)
            variables[name] = VarDecl(lo, hi, init)
        elif line.startswith("process"):
            m = _PROCESS_RE.match(line)
            if m is None:
                raise NetError(f"malformed process declaration {line!r}", lineno)
            close_current()
            current = {"name": m.group(1), "init": None, "locations": [], "transitions": [], "line": lineno}
        elif line.startswith("init"):
            m = _INIT_RE.match(line)
            if m is None or current is None:
                raise NetError("init outside a process" if current is None else f"malformed init {line!r}", lineno)
            current["init"] = m.group(1)
            current["locations"].append(m.group(1))
        elif line.startswith("priority"):
            m = _PRIORITY_RE.match(line)
            if m is None:
                raise NetError(f"malformed priority declaration {line!r}", lineno)
            priorities.append((m.group(1), m.group(2)))
        elif line.startswith("from"):
            if current is None:
                raise NetError("transition outside a process", lineno)
            m = _FROM_RE.match(line)
            if m is None:
                raise NetError(f"malformed transition {line!r}", lineno)
            source, kind_kw, middle, target = m.groups()
            if kind_kw == "on":
                mm = _ON_RE.match(middle)
                if mm is None:
                    raise NetError(f"malformed event transition {middle!r}", lineno)
                event = mm.group(1)
                label = mm.group("label") or event
                if label != event:
                    raise NetError(
                        f"an event transition is observed through its label; "
                        f"{label!r} differs from {event!r}",
                        lineno,
                    )
                kind = Event(
                    guard=_parse_guard(mm.group("guard"), lineno) if mm.group("guard") else (),
                    assigns=_parse_assigns(mm.group("do"), lineno) if mm.group("do") else (),
                    urgent=bool(mm.group("urgent")),
                    keepclock=bool(mm.group("keepclock")),
                )
            elif kind_kw == "elapse":
                mm = _ELAPSE_RE.match(middle)
                if mm is None:
                    raise NetError(f"malformed elapse transition {middle!r}", lineno)
                label = mm.group("label")
                kind = Elapse(_parse_window(mm.group("window"), lineno), urgent=bool(mm.group("urgent")))
            else:
                mm = _PROBE_RE.match(middle)
                if mm is None:
                    raise NetError(f"malformed probe transition {middle!r}", lineno)
                label = mm.group("label")
                window = _parse_window(mm.group("window"), lineno) if mm.group("window") else Window(0, None)
                kind = Reaction(mm.group(1), window)
            current["locations"].extend((source, target))
            current["transitions"].append(Transition(source, target, label, kind))
        else:
            raise NetError(f"unrecognized line {line!r}", lineno)
    close_current()
    return TimedNet(variables=variables, processes=processes, priorities=priorities)
