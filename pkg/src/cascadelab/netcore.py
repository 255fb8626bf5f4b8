"""Directed contact networks, per-node/per-arc epidemic parameters, and file I/O.

A ContactNetwork is an immutable directed graph over string node identifiers;
internally nodes are mapped to dense indices so the simulation and enumeration
code can run on flat arrays.  EpidemicParams bundles the three probability
maps every model in this package consumes: induction (sigma, per node),
removal (gamma, per node) and transmission (tau, per arc).

Text formats
------------
Edge list: UTF-8 lines, ``#`` starts a comment, whitespace-separated
``u v [tau]``.  A single-token line declares an isolated node (needed so
serialization round-trips node sets that arcs alone cannot express).

Params file: lines ``node sigma gamma``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "NodeState",
    "ContactNetwork",
    "EpidemicParams",
    "build_from_edge_list",
    "serialize_network",
    "parse_node_params",
    "serialize_node_params",
    "make_complete",
    "make_diamond",
    "load_karate",
    "dominates",
]


class NodeState(Enum):
    """Compartment of a node at one time step.

    Distanced is used only by the distancing (FleeSIR) engine; Removed and
    Distanced are absorbing.
    """

    SUSCEPTIBLE = "S"
    INFECTED = "I"
    REMOVED = "R"
    DISTANCED = "D"


class ContactNetwork:
    """Immutable directed graph with stable string node identifiers.

    No self-loops, no duplicate arcs.  Node order is insertion order and is
    the canonical iteration order everywhere (simulation, serialization).
    """

    __slots__ = (
        "nodes", "arcs", "_index", "_arc_index",
        "_out_ptr", "_out_idx", "_out_arc", "_in_ptr", "_in_idx",
    )

    def __init__(self, nodes: Iterable[str], arcs: Iterable[tuple[str, str]]):
        node_list: list[str] = []
        index: dict[str, int] = {}
        for name in nodes:
            name = str(name)
            if name not in index:
                index[name] = len(node_list)
                node_list.append(name)
        arc_list: list[tuple[str, str]] = []
        arc_index: dict[tuple[str, str], int] = {}
        for u, v in arcs:
            u, v = str(u), str(v)
            if u not in index or v not in index:
                missing = u if u not in index else v
                raise ValueError(f"arc ({u}, {v}) references unknown node {missing!r}")
            if u == v:
                raise ValueError(f"self-loop on node {u!r} is not allowed")
            key = (u, v)
            if key in arc_index:
                raise ValueError(f"duplicate arc ({u}, {v})")
            arc_index[key] = len(arc_list)
            arc_list.append(key)

        self.nodes: tuple[str, ...] = tuple(node_list)
        self.arcs: tuple[tuple[str, str], ...] = tuple(arc_list)
        self._index = index
        self._arc_index = arc_index

        n = len(node_list)
        out_lists: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        in_lists: list[list[int]] = [[] for _ in range(n)]
        for a, (u, v) in enumerate(arc_list):
            ui, vi = index[u], index[v]
            out_lists[ui].append((vi, a))
            in_lists[vi].append(ui)

        def csr(lists, width=1):
            ptr = np.zeros(n + 1, dtype=np.int64)
            for i, row in enumerate(lists):
                ptr[i + 1] = ptr[i] + len(row)
            return ptr

        self._out_ptr = csr(out_lists)
        self._out_idx = np.fromiter(
            (vi for row in out_lists for vi, _ in row), dtype=np.int64,
            count=len(arc_list))
        self._out_arc = np.fromiter(
            (a for row in out_lists for _, a in row), dtype=np.int64,
            count=len(arc_list))
        self._in_ptr = csr(in_lists)
        self._in_idx = np.fromiter(
            (ui for row in in_lists for ui in row), dtype=np.int64,
            count=len(arc_list))

    # -- basic queries ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def arc_count(self) -> int:
        return len(self.arcs)

    def index(self, name: str) -> int:
        return self._index[name]

    def name(self, i: int) -> str:
        return self.nodes[i]

    def has_node(self, name: str) -> bool:
        return name in self._index

    def has_arc(self, u: str, v: str) -> bool:
        return (u, v) in self._arc_index

    def arc_id(self, u: str, v: str) -> int:
        return self._arc_index[(u, v)]

    def out_neighbors(self, u: str) -> tuple[str, ...]:
        i = self._index[u]
        lo, hi = self._out_ptr[i], self._out_ptr[i + 1]
        return tuple(self.nodes[j] for j in self._out_idx[lo:hi])

    def in_neighbors(self, v: str) -> tuple[str, ...]:
        i = self._index[v]
        lo, hi = self._in_ptr[i], self._in_ptr[i + 1]
        return tuple(self.nodes[j] for j in self._in_idx[lo:hi])

    def is_symmetric(self) -> bool:
        return all((v, u) in self._arc_index for (u, v) in self.arcs)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update("\x1f".join(self.nodes).encode())
        h.update("\x1e".encode())
        h.update("\x1f".join(f"{u}\x1d{v}" for u, v in self.arcs).encode())
        return h.hexdigest()[:12]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ContactNetwork):
            return NotImplemented
        return self.nodes == other.nodes and set(self.arcs) == set(other.arcs)

    def __hash__(self):
        return hash((self.nodes, frozenset(self.arcs)))

    def __repr__(self) -> str:
        return f"ContactNetwork(n={self.n}, arcs={self.arc_count})"


@dataclass(frozen=True)
class EpidemicParams:
    """Per-node induction/removal and per-arc transmission probabilities.

    All values lie in [0, 1]; sigma and gamma cover every node and tau covers
    every arc of the network the instance was built for.
    """

    sigma: Mapping[str, float]
    gamma: Mapping[str, float]
    tau: Mapping[tuple[str, str], float]

    @staticmethod
    def _expand(network: ContactNetwork, value, keys, what: str) -> dict:
        if isinstance(value, Mapping):
            table = {k: float(value[k]) for k in keys if k in value}
            missing = [k for k in keys if k not in value]
            if missing:
                raise ValueError(f"{what} missing entries for {missing[:5]!r}")
            extra = set(value) - set(keys)
            if extra:
                raise ValueError(f"{what} has entries for unknown keys {sorted(extra)[:5]!r}")
        else:
            table = {k: float(value) for k in keys}
        for k, p in table.items():
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"{what}[{k!r}] = {p} outside [0, 1]")
        return table

    @classmethod
    def make(cls, network: ContactNetwork, sigma=0.0, gamma=0.0, tau=1.0) -> "EpidemicParams":
        """Build params from scalars or complete mappings."""
        return cls(
            sigma=cls._expand(network, sigma, network.nodes, "sigma"),
            gamma=cls._expand(network, gamma, network.nodes, "gamma"),
            tau=cls._expand(network, tau, network.arcs, "tau"),
        )

    @classmethod
    def single_seed(cls, network: ContactNetwork, node: str, gamma=0.0, tau=1.0) -> "EpidemicParams":
        """Params with induction 1 at `node` and 0 elsewhere."""
        if not network.has_node(node):
            raise ValueError(f"unknown seed node {node!r}")
        sigma = {v: (1.0 if v == node else 0.0) for v in network.nodes}
        return cls.make(network, sigma=sigma, gamma=gamma, tau=tau)

    def with_updates(self, network: ContactNetwork, sigma=None, gamma=None, tau=None) -> "EpidemicParams":
        """Copy with any of the three maps replaced (scalar, full or partial map)."""
        def merged(current, new, keys, what):
            if new is None:
                return dict(current)
            if isinstance(new, Mapping):
                out = dict(current)
                for k, p in new.items():
                    if k not in out:
                        raise ValueError(f"{what} update for unknown key {k!r}")
                    out[k] = float(p)
                return out
            return {k: float(new) for k in keys}

        return EpidemicParams.make(
            network,
            sigma=merged(self.sigma, sigma, network.nodes, "sigma"),
            gamma=merged(self.gamma, gamma, network.nodes, "gamma"),
            tau=merged(self.tau, tau, network.arcs, "tau"),
        )

    def validate_for(self, network: ContactNetwork) -> None:
        if set(self.sigma) != set(network.nodes) or set(self.gamma) != set(network.nodes):
            raise ValueError("params node maps do not match the network's node set")
        if set(self.tau) != set(network.arcs):
            raise ValueError("params tau map does not match the network's arc set")

    def digest(self) -> str:
        h = hashlib.sha256()
        for k in sorted(self.sigma):
            h.update(f"s {k} {self.sigma[k]!r};".encode())
        for k in sorted(self.gamma):
            h.update(f"g {k} {self.gamma[k]!r};".encode())
        for u, v in sorted(self.tau):
            h.update(f"t {u} {v} {self.tau[(u, v)]!r};".encode())
        return h.hexdigest()[:12]


def dominates(over: EpidemicParams, under: EpidemicParams) -> bool:
    """True iff `over` is pointwise at least as infectious as `under`.

    That means sigma and tau are >= everywhere and gamma is <= everywhere.
    Raises ValueError when the two instances are not defined on the same
    node/arc sets.
    """
    if set(over.sigma) != set(under.sigma) or set(over.tau) != set(under.tau):
        raise ValueError("params are defined on different networks")
    return (
        all(over.sigma[v] >= under.sigma[v] for v in over.sigma)
        and all(over.gamma[v] <= under.gamma[v] for v in over.gamma)
        and all(over.tau[e] >= under.tau[e] for e in over.tau)
    )


# ---------------------------------------------------------------------------
# Edge-list and params-file I/O
# ---------------------------------------------------------------------------

def build_from_edge_list(text: str, directed: bool = True) -> tuple[ContactNetwork, EpidemicParams]:
    """Parse an edge-list document into a network plus default params.

    Lines are ``u v [tau]`` (tau defaults to 1), ``#`` comments, or a single
    token declaring an isolated node.  With ``directed=False`` every line
    yields both arcs with equal tau.  The returned params carry sigma=0,
    gamma=0 and the parsed taus.
    """
    nodes: list[str] = []
    seen: set[str] = set()
    arcs: list[tuple[str, str]] = []
    taus: dict[tuple[str, str], float] = {}

    def add_node(name: str) -> None:
        if name not in seen:
            seen.add(name)
            nodes.append(name)

    def add_arc(u: str, v: str, tau: float, lineno: int) -> None:
        if u == v:
            raise ValueError(f"line {lineno}: self-loop on node {u!r}")
        key = (u, v)
        if key in taus:
            if taus[key] != tau:
                raise ValueError(
                    f"line {lineno}: duplicate arc ({u}, {v}) with conflicting "
                    f"tau {tau} vs {taus[key]}")
            return
        taus[key] = tau
        arcs.append(key)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) == 1:
            add_node(tokens[0])
            continue
        if len(tokens) > 3:
            raise ValueError(f"line {lineno}: expected 'u v [tau]', got {raw!r}")
        u, v = tokens[0], tokens[1]
        tau = 1.0
        if len(tokens) == 3:
            try:
                tau = float(tokens[2])
            except ValueError:
                raise ValueError(f"line {lineno}: tau {tokens[2]!r} is not a number") from None
            if not (0.0 <= tau <= 1.0):
                raise ValueError(f"line {lineno}: tau {tau} outside [0, 1]")
        add_node(u)
        add_node(v)
        add_arc(u, v, tau, lineno)
        if not directed:
            add_arc(v, u, tau, lineno)

    network = ContactNetwork(nodes, arcs)
    params = EpidemicParams.make(network, sigma=0.0, gamma=0.0, tau=taus)
    return network, params


def serialize_network(network: ContactNetwork, params: EpidemicParams | None = None) -> str:
    """Deterministic edge-list text for `network` (nodes in insertion order).

    Every node is declared on its own line first so parsing reproduces the
    exact node set and order; arcs follow, with a tau column when params are
    given.  Parse back with ``build_from_edge_list(text, directed=True)``.
    """
    lines = ["# nodes"]
    lines.extend(network.nodes)
    lines.append("# arcs")
    for u, v in network.arcs:
        if params is None:
            lines.append(f"{u} {v}")
        else:
            lines.append(f"{u} {v} {params.tau[(u, v)]!r}")
    return "\n".join(lines) + "\n"


def parse_node_params(text: str) -> tuple[dict[str, float], dict[str, float]]:
    """Parse a params file of ``node sigma gamma`` lines into two maps."""
    sigma: dict[str, float] = {}
    gamma: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 3:
            raise ValueError(f"line {lineno}: expected 'node sigma gamma', got {raw!r}")
        name = tokens[0]
        if name in sigma:
            raise ValueError(f"line {lineno}: duplicate entry for node {name!r}")
        try:
            s, g = float(tokens[1]), float(tokens[2])
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric sigma/gamma in {raw!r}") from None
        for what, p in (("sigma", s), ("gamma", g)):
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"line {lineno}: {what} {p} outside [0, 1]")
        sigma[name] = s
        gamma[name] = g
    return sigma, gamma


def serialize_node_params(network: ContactNetwork, params: EpidemicParams) -> str:
    lines = ["# node sigma gamma"]
    for v in network.nodes:
        lines.append(f"{v} {params.sigma[v]!r} {params.gamma[v]!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Bundled and generated datasets
# ---------------------------------------------------------------------------

def make_complete(n: int) -> ContactNetwork:
    """Fully connected network on n nodes (n(n-1) arcs, both directions)."""
    if n < 1:
        raise ValueError("complete network needs at least one node")
    names = [f"v{i}" for i in range(n)]
    arcs = [(names[i], names[j]) for i in range(n) for j in range(n) if i != j]
    return ContactNetwork(names, arcs)


# Default Diamond layout: hub a tied to b and c, which are each tied to the
# leaf nodes d, e, f.  All edges are bidirectional.  Kept as data so an
# alternate layout can be swapped in from an edge-list file.
DIAMOND_EDGES: tuple[tuple[str, str], ...] = (
    ("a", "b"), ("a", "c"),
    ("b", "d"), ("b", "e"), ("b", "f"),
    ("c", "d"), ("c", "e"), ("c", "f"),
)


def make_diamond() -> ContactNetwork:
    """Six-node Diamond benchmark network (undirected, 16 arcs)."""
    arcs: list[tuple[str, str]] = []
    for u, v in DIAMOND_EDGES:
        arcs.append((u, v))
        arcs.append((v, u))
    return ContactNetwork("abcdef", arcs)


def load_karate() -> ContactNetwork:
    """Zachary karate-club network from the bundled edge list (34 nodes)."""
    data = resources.files("cascadelab").joinpath("data/karate.edges").read_text("utf-8")
    network, _ = build_from_edge_list(data, directed=False)
    return network
