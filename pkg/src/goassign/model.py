"""Core data model: multi-layer assignment instances and assignments.

Instance text format (UTF-8, line based, ``#`` starts a comment, blank
lines are ignored)::

    goa 1
    alpha <positive integer>
    agents <name> <name> ...
    items <name> <name> ...
    layer
    <agent-name>: <item> > <item> > ...
    layer
    ...

One preference line per agent inside each ``layer`` block; agents without
a line have an empty list in that layer.  The unassigned sentinel is never
written: it is implicitly the least preferred option of every agent.

Assignment text format: one line per agent, ``<agent-name> <item-name>``
or ``<agent-name> -`` for "no item", agents in table order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

FORMAT_HEADER = "goa 1"

# item index used for "agent holds nothing"
NO_ITEM = -1

_NAME_RE = re.compile(r"^[^\s:>#]+$")


class ParseError(ValueError):
    """Malformed instance or assignment text; carries a 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _check_name(name, what, line=None):
    if not _NAME_RE.match(name):
        raise ParseError(f"invalid {what} name {name!r}", line)


@dataclass(frozen=True)
class Instance:
    """A multi-layer assignment instance.

    ``agents`` and ``items`` are the display-name tables; all other data is
    stored as dense 0-based indices into them.  ``layers[l][a]`` is agent
    ``a``'s preference list in layer ``l``, most preferred first.  Immutable
    after construction and safe to share across workers.
    """

    agents: tuple[str, ...]
    items: tuple[str, ...]
    layers: tuple[tuple[tuple[int, ...], ...], ...]
    alpha: int

    def __post_init__(self):
        if len(self.agents) < 1:
            raise ValueError("instance needs at least one agent")
        for name in self.agents:
            _check_name(name, "agent")
        for name in self.items:
            _check_name(name, "item")
        if len(set(self.agents)) != len(self.agents):
            raise ValueError("duplicate agent name")
        if len(set(self.items)) != len(self.items):
            raise ValueError("duplicate item name")
        if len(self.layers) < 1:
            raise ValueError("instance needs at least one layer")
        if not 1 <= self.alpha <= len(self.layers):
            raise ValueError(
                f"alpha {self.alpha} out of range [1, {len(self.layers)}]"
            )
        m = len(self.items)
        for profile in self.layers:
            if len(profile) != len(self.agents):
                raise ValueError("profile must have one list per agent")
            for lst in profile:
                if len(set(lst)) != len(lst):
                    raise ValueError("duplicate item in preference list")
                for idx in lst:
                    if not 0 <= idx < m:
                        raise ValueError(f"item index {idx} out of range")
        object.__setattr__(self, "_agent_index", {s: i for i, s in enumerate(self.agents)})
        object.__setattr__(self, "_item_index", {s: i for i, s in enumerate(self.items)})

    @property
    def n(self):
        return len(self.agents)

    @property
    def m(self):
        return len(self.items)

    @property
    def ell(self):
        return len(self.layers)

    @property
    def d(self):
        """Maximum preference-list length over all agents and layers."""
        return max((len(lst) for prof in self.layers for lst in prof), default=0)

    def agent_index(self, name):
        return self._agent_index[name]

    def item_index(self, name):
        return self._item_index[name]

    def pref(self, layer, agent):
        return self.layers[layer][agent]


@dataclass(frozen=True)
class Assignment:
    """Per-agent allocation; ``NO_ITEM`` means the agent holds nothing.

    Injective on allocated items, checked at construction.
    """

    alloc: tuple[int, ...]

    def __post_init__(self):
        held = [v for v in self.alloc if v != NO_ITEM]
        if any(v < 0 for v in held):
            raise ValueError("negative item index in assignment")
        if len(set(held)) != len(held):
            raise ValueError("item allocated to two agents")

    @classmethod
    def from_names(cls, inst, mapping):
        """Build from a dict of agent name to item name (or None)."""
        alloc = [NO_ITEM] * inst.n
        for aname, iname in mapping.items():
            if iname is not None:
                alloc[inst.agent_index(aname)] = inst.item_index(iname)
        return cls(tuple(alloc))

    def item_of(self, agent):
        return self.alloc[agent]

    def owner_map(self, m):
        """Item index -> owning agent index, NO_ITEM where unallocated."""
        owner = [NO_ITEM] * m
        for a, v in enumerate(self.alloc):
            if v != NO_ITEM:
                owner[v] = a
        return owner


def all_unassigned(inst):
    return Assignment((NO_ITEM,) * inst.n)


def is_legal_in_layer(inst, layer, p):
    """True iff every allocated item is acceptable to its holder in the layer."""
    if not 0 <= layer < inst.ell:
        raise IndexError(f"layer {layer} out of range [0, {inst.ell})")
    profile = inst.layers[layer]
    for a, v in enumerate(p.alloc):
        if v != NO_ITEM and v not in profile[a]:
            return False
    return True


def _content_lines(text):
    """Yield (line_number, stripped_content) skipping comments and blanks."""
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def parse_instance(text):
    lines = list(_content_lines(text))
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"unexpected end of input, expected {what}",
                             lines[-1][0] if lines else 1)
        entry = lines[pos]
        pos += 1
        return entry

    no, line = take("format header")
    if line != FORMAT_HEADER:
        raise ParseError(f"expected {FORMAT_HEADER!r} header, got {line!r}", no)

    no, line = take("alpha")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "alpha":
        raise ParseError("expected 'alpha <positive integer>'", no)
    try:
        alpha = int(parts[1])
    except ValueError:
        raise ParseError(f"alpha is not an integer: {parts[1]!r}", no) from None
    if alpha < 1:
        raise ParseError(f"alpha must be positive, got {alpha}", no)

    no, line = take("agents")
    parts = line.split()
    if parts[0] != "agents":
        raise ParseError("expected 'agents <name> ...'", no)
    agents = parts[1:]
    if not agents:
        raise ParseError("need at least one agent", no)
    for name in agents:
        _check_name(name, "agent", no)
    if len(set(agents)) != len(agents):
        raise ParseError("duplicate agent name", no)

    no, line = take("items")
    parts = line.split()
    if parts[0] != "items":
        raise ParseError("expected 'items <name> ...'", no)
    items = parts[1:]
    for name in items:
        _check_name(name, "item", no)
    if len(set(items)) != len(items):
        raise ParseError("duplicate item name", no)

    agent_index = {s: i for i, s in enumerate(agents)}
    item_index = {s: i for i, s in enumerate(items)}

    layers = []
    current = None  # agent index -> list, None outside any layer block
    seen_in_layer = set()

    def close_layer():
        if current is not None:
            layers.append(tuple(tuple(current[a]) for a in range(len(agents))))

    while pos < len(lines):
        no, line = lines[pos]
        pos += 1
        if line == "layer":
            close_layer()
            current = {a: [] for a in range(len(agents))}
            seen_in_layer = set()
            continue
        if current is None:
            raise ParseError(f"unexpected line outside a layer block: {line!r}", no)
        if ":" not in line:
            raise ParseError(f"expected '<agent>: <item> > ...', got {line!r}", no)
        head, _, tail = line.partition(":")
        aname = head.strip()
        if aname not in agent_index:
            raise ParseError(f"unknown agent {aname!r}", no)
        a = agent_index[aname]
        if a in seen_in_layer:
            raise ParseError(f"agent {aname!r} listed twice in one layer", no)
        seen_in_layer.add(a)
        lst = []
        tail = tail.strip()
        if tail:
            for token in tail.split(">"):
                iname = token.strip()
                if not iname:
                    raise ParseError("empty item name in preference list", no)
                if iname not in item_index:
                    raise ParseError(f"unknown item {iname!r}", no)
                idx = item_index[iname]
                if idx in lst:
                    raise ParseError(f"item {iname!r} repeated in one list", no)
                lst.append(idx)
        current[a] = lst
    close_layer()

    if not layers:
        raise ParseError("instance has no layer blocks", lines[-1][0] if lines else 1)
    if alpha > len(layers):
        raise ParseError(
            f"alpha {alpha} exceeds the number of layers {len(layers)}",
            lines[-1][0])

    return Instance(tuple(agents), tuple(items), tuple(layers), alpha)


def serialize_instance(inst):
    """Canonical text form; ``parse_instance`` is a left inverse.

    Agents and items in table order, layers in order, one line per agent
    with a non-empty list.
    """
    out = [FORMAT_HEADER, f"alpha {inst.alpha}"]
    out.append("agents " + " ".join(inst.agents) if inst.agents else "agents")
    out.append(("items " + " ".join(inst.items)).rstrip())
    for profile in inst.layers:
        out.append("layer")
        for a, lst in enumerate(profile):
            if lst:
                out.append(f"{inst.agents[a]}: " + " > ".join(inst.items[i] for i in lst))
    return "\n".join(out) + "\n"


def parse_assignment(inst, text):
    alloc = [None] * inst.n
    for no, line in _content_lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected '<agent> <item>' or '<agent> -', got {line!r}", no)
        aname, iname = parts
        if aname not in inst._agent_index:
            raise ParseError(f"unknown agent {aname!r}", no)
        a = inst.agent_index(aname)
        if alloc[a] is not None:
            raise ParseError(f"agent {aname!r} assigned twice", no)
        if iname == "-":
            alloc[a] = NO_ITEM
        else:
            if iname not in inst._item_index:
                raise ParseError(f"unknown item {iname!r}", no)
            alloc[a] = inst.item_index(iname)
    missing = [inst.agents[a] for a, v in enumerate(alloc) if v is None]
    if missing:
        raise ParseError(f"no line for agent(s): {', '.join(missing)}")
    try:
        return Assignment(tuple(alloc))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def serialize_assignment(inst, p):
    out = []
    for a, v in enumerate(p.alloc):
        out.append(f"{inst.agents[a]} {'-' if v == NO_ITEM else inst.items[v]}")
    return "\n".join(out) + "\n"
