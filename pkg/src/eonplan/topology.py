"""Physical network model: nodes, links, fiber spans, amplifiers, demands.

A link is an ordered chain of fiber spans, each followed by a variable-gain
amplifier that exactly compensates the span loss. Topologies are loaded from
a JSON description (see :func:`load_topology`) or synthesized from a bare
node/link list plus a span-length policy (see :func:`synthesize_topology`).
"""

from __future__ import annotations

import csv
import enum
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .constants import (
    DEFAULT_ALPHA_DB_KM,
    DEFAULT_BETA2_PS2_KM,
    DEFAULT_GAMMA_W_KM,
    DEFAULT_NF_DB,
)
from .errors import RoutingError, TopologyError

logger = logging.getLogger(__name__)

#: Tolerance on |sum of span lengths - link length|, in km.
SPAN_SUM_TOLERANCE_KM = 0.01


@dataclass(frozen=True)
class Node:
    id: str
    name: str = ""


@dataclass(frozen=True)
class FiberSpan:
    """One span of fiber; lengths in km, attenuation in dB/km.

    ``beta2_ps2_km`` is the group-velocity dispersion (signed, ps^2/km) and
    ``gamma_w_km`` the Kerr nonlinearity coefficient in 1/(W km).
    """

    length_km: float
    alpha_db_km: float = DEFAULT_ALPHA_DB_KM
    beta2_ps2_km: float = DEFAULT_BETA2_PS2_KM
    gamma_w_km: float = DEFAULT_GAMMA_W_KM

    def __post_init__(self) -> None:
        if self.length_km <= 0:
            raise TopologyError(f"span length must be positive, got {self.length_km}")
        if self.alpha_db_km <= 0:
            raise TopologyError(f"span attenuation must be positive, got {self.alpha_db_km}")
        if self.gamma_w_km < 0:
            raise TopologyError(f"nonlinear coefficient must be >= 0, got {self.gamma_w_km}")

    @property
    def loss_db(self) -> float:
        return self.alpha_db_km * self.length_km


@dataclass(frozen=True)
class Amplifier:
    """Lumped amplifier; gain compensates the preceding span in synthesized nets."""

    gain_db: float
    nf_db: float = DEFAULT_NF_DB

    def __post_init__(self) -> None:
        if self.gain_db < 0:
            raise TopologyError(f"amplifier gain must be >= 0 dB, got {self.gain_db}")
        if self.nf_db <= 0:
            raise TopologyError(f"amplifier noise figure must be > 0 dB, got {self.nf_db}")


@dataclass(frozen=True)
class Link:
    """Bidirectional link between two nodes, modelled in one direction."""

    id: str
    a: str
    b: str
    length_km: float
    spans: tuple[tuple[FiberSpan, Amplifier], ...]

    def __post_init__(self) -> None:
        if not self.spans:
            raise TopologyError(f"link {self.id} has no spans")
        total = sum(span.length_km for span, _ in self.spans)
        if abs(total - self.length_km) > SPAN_SUM_TOLERANCE_KM:
            raise TopologyError(
                f"link {self.id}: span lengths sum to {total:.3f} km, "
                f"declared length is {self.length_km:.3f} km"
            )

    @property
    def endpoints(self) -> tuple[str, str]:
        return (self.a, self.b)


class DemandStatus(enum.Enum):
    PENDING = "pending"
    VALIDATED = "validated"
    BLOCKED = "blocked"


class BlockReason(enum.Enum):
    SPECTRUM = "spectrum"
    OSNR = "osnr"


@dataclass
class Demand:
    """A bidirectional lightpath request; one configuration serves both ways."""

    id: str
    src: str
    dst: str
    path: tuple[str, ...] | None = None
    status: DemandStatus = DemandStatus.PENDING
    block_reason: BlockReason | None = None

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise TopologyError(f"demand {self.id}: source equals destination ({self.src})")

    def block(self, reason: BlockReason) -> None:
        self.status = DemandStatus.BLOCKED
        self.block_reason = reason


@dataclass
class Topology:
    nodes: dict[str, Node]
    links: dict[str, Link]
    _graph: nx.Graph | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        for link in self.links.values():
            for end in link.endpoints:
                if end not in self.nodes:
                    raise TopologyError(f"link {link.id} references unknown node {end!r}")

    @property
    def graph(self) -> nx.Graph:
        """Undirected graph with km lengths; parallel links collapse to the shortest."""
        if self._graph is None:
            g = nx.Graph()
            g.add_nodes_from(self.nodes)
            for link in sorted(self.links.values(), key=lambda l: (l.length_km, l.id)):
                a, b = link.endpoints
                if g.has_edge(a, b):
                    continue
                g.add_edge(a, b, length_km=link.length_km, link_id=link.id)
            self._graph = g
        return self._graph

    def link_between(self, a: str, b: str) -> Link:
        data = self.graph.get_edge_data(a, b)
        if data is None:
            raise RoutingError(f"no link between {a!r} and {b!r}")
        return self.links[data["link_id"]]

    def path_links(self, node_path: Sequence[str]) -> tuple[str, ...]:
        return tuple(
            self.link_between(u, v).id for u, v in zip(node_path[:-1], node_path[1:])
        )

    def path_length_km(self, link_ids: Iterable[str]) -> float:
        return sum(self.links[lid].length_km for lid in link_ids)

    def path_amplifiers(self, link_ids: Iterable[str]) -> list[Amplifier]:
        return [amp for lid in link_ids for _, amp in self.links[lid].spans]


# --------------------------------------------------------------------------
# Span synthesis policies
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EqualSplit:
    """Split a link into ceil(L/max) equal spans."""

    max_span_km: float = 80.0


@dataclass(frozen=True)
class Randomized:
    """Truncated-normal span lengths, rescaled to sum exactly to the link length."""

    seed: int
    mean_km: float = 72.0
    sigma_km: float = 15.0
    min_km: float = 40.0
    max_km: float = 100.0


SpanPolicy = EqualSplit | Randomized


def spanize_link(length_km: float, policy: SpanPolicy) -> list[float]:
    """Return span lengths for a link of ``length_km`` under the given policy.

    The result always sums to ``length_km`` (within float arithmetic). Links
    shorter than the policy maximum become a single span.
    """
    if length_km <= 0:
        raise TopologyError(f"link length must be positive, got {length_km}")
    if isinstance(policy, EqualSplit):
        n = max(1, math.ceil(length_km / policy.max_span_km))
        return [length_km / n] * n
    return _randomized_spans(length_km, policy)


def _randomized_spans(length_km: float, policy: Randomized) -> list[float]:
    if length_km <= policy.max_km:
        return [length_km]
    n_min = math.ceil(length_km / policy.max_km)
    n_max = math.floor(length_km / policy.min_km)
    if n_min > n_max:
        # No span count keeps every span inside [min, max]; fall back to an
        # equal split against the policy maximum.
        return spanize_link(length_km, EqualSplit(policy.max_km))
    n = min(max(round(length_km / policy.mean_km), n_min), n_max)
    rng = np.random.default_rng(policy.seed)
    draws = []
    while len(draws) < n:
        x = rng.normal(policy.mean_km, policy.sigma_km)
        if policy.min_km <= x <= policy.max_km:
            draws.append(x)
    spans = np.asarray(draws)
    # Move the deficit onto spans proportionally to their remaining slack so
    # the sum is exact and every span stays inside [min, max].
    for _ in range(64):
        deficit = length_km - spans.sum()
        if abs(deficit) < 1e-9:
            break
        slack = (policy.max_km - spans) if deficit > 0 else (spans - policy.min_km)
        total_slack = slack.sum()
        spans = spans + deficit * slack / total_slack
        spans = np.clip(spans, policy.min_km, policy.max_km)
    return [float(s) for s in spans]


def build_link(
    link_id: str,
    a: str,
    b: str,
    length_km: float,
    policy: SpanPolicy,
    alpha_db_km: float = DEFAULT_ALPHA_DB_KM,
    beta2_ps2_km: float = DEFAULT_BETA2_PS2_KM,
    gamma_w_km: float = DEFAULT_GAMMA_W_KM,
    nf_db: float = DEFAULT_NF_DB,
) -> Link:
    """Synthesize a link: spans per ``policy``, one loss-compensating amp per span."""
    spans = []
    for span_km in spanize_link(length_km, policy):
        span = FiberSpan(span_km, alpha_db_km, beta2_ps2_km, gamma_w_km)
        spans.append((span, Amplifier(gain_db=span.loss_db, nf_db=nf_db)))
    return Link(link_id, a, b, length_km, tuple(spans))


def synthesize_topology(
    nodes: Iterable[tuple[str, str]],
    links: Iterable[tuple[str, str, str, float]],
    policy: SpanPolicy,
    **fiber_kwargs: float,
) -> Topology:
    """Build a full physical topology from (id, name) nodes and
    (id, a, b, length_km) links."""
    node_list = list(nodes)
    node_map = {nid: Node(nid, name) for nid, name in node_list}
    if len(node_map) != len(node_list):
        raise TopologyError("duplicate node ids")
    link_map: dict[str, Link] = {}
    for lid, a, b, length in links:
        if lid in link_map:
            raise TopologyError(f"duplicate link id {lid!r}")
        link_map[lid] = build_link(lid, a, b, length, policy, **fiber_kwargs)
    return Topology(node_map, link_map)


# --------------------------------------------------------------------------
# File I/O
# --------------------------------------------------------------------------


def _parse_span(entry: dict) -> tuple[FiberSpan, Amplifier]:
    span = FiberSpan(
        entry["length_km"],
        entry.get("alpha_db_km", DEFAULT_ALPHA_DB_KM),
        entry.get("beta2_ps2_km", DEFAULT_BETA2_PS2_KM),
        entry.get("gamma_w_km", DEFAULT_GAMMA_W_KM),
    )
    amp_entry = entry.get("amp", {})
    amp = Amplifier(
        gain_db=amp_entry.get("gain_db", span.loss_db),
        nf_db=amp_entry.get("nf_db", DEFAULT_NF_DB),
    )
    return span, amp


def load_topology(path: str | Path) -> Topology:
    """Load a physical topology JSON file.

    Schema::

        {"nodes": [{"id", "name"}],
         "links": [{"id", "a", "b", "length_km",
                    "spans": [{"length_km", "alpha_db_km", "beta2_ps2_km",
                               "gamma_w_km", "amp": {"gain_db", "nf_db"}}]}]}
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise TopologyError(f"cannot parse topology file {path}: {exc}") from exc

    try:
        nodes = {n["id"]: Node(n["id"], n.get("name", n["id"])) for n in payload["nodes"]}
        if len(nodes) != len(payload["nodes"]):
            raise TopologyError("duplicate node ids in topology file")
        links: dict[str, Link] = {}
        for entry in payload["links"]:
            spans = tuple(_parse_span(s) for s in entry["spans"])
            link = Link(entry["id"], entry["a"], entry["b"], entry["length_km"], spans)
            if link.id in links:
                raise TopologyError(f"duplicate link id {link.id!r}")
            links[link.id] = link
    except KeyError as exc:
        raise TopologyError(f"topology file {path} is missing field {exc}") from exc

    topo = Topology(nodes, links)
    logger.info("loaded topology %s: %d nodes, %d links", path.name, len(nodes), len(links))
    return topo


def save_topology(topology: Topology, path: str | Path) -> None:
    """Write a topology back out in the JSON schema used by :func:`load_topology`."""
    payload = {
        "nodes": [{"id": n.id, "name": n.name} for n in topology.nodes.values()],
        "links": [
            {
                "id": link.id,
                "a": link.a,
                "b": link.b,
                "length_km": link.length_km,
                "spans": [
                    {
                        "length_km": span.length_km,
                        "alpha_db_km": span.alpha_db_km,
                        "beta2_ps2_km": span.beta2_ps2_km,
                        "gamma_w_km": span.gamma_w_km,
                        "amp": {"gain_db": amp.gain_db, "nf_db": amp.nf_db},
                    }
                    for span, amp in link.spans
                ],
            }
            for link in topology.links.values()
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_demands(path: str | Path) -> list[Demand]:
    """Load a ``demand_id,src,dst`` CSV demand file."""
    demands = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            demands.append(Demand(row["demand_id"], row["src"], row["dst"]))
    return demands


def save_demands(demands: Iterable[Demand], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["demand_id", "src", "dst"])
        for d in demands:
            writer.writerow([d.id, d.src, d.dst])


# --------------------------------------------------------------------------
# Routing and demand generation
# --------------------------------------------------------------------------


def shortest_path(topology: Topology, src: str, dst: str) -> tuple[str, ...]:
    """Minimum-length path as an ordered link-id tuple.

    Length ties break on the lexicographically smallest node-id sequence, so
    results are reproducible across runs and platforms.
    """
    for node in (src, dst):
        if node not in topology.nodes:
            raise RoutingError(f"unknown node {node!r}")
    try:
        candidates = nx.all_shortest_paths(topology.graph, src, dst, weight="length_km")
        best = min(candidates)
    except (nx.NetworkXNoPath, nx.NodeNotFound) as exc:
        raise RoutingError(f"no path from {src!r} to {dst!r}") from exc
    return topology.path_links(best)


class DemandMode(enum.Enum):
    ALL_PAIRS = "all-pairs"
    NON_ADJACENT_PAIRS = "non-adjacent"


def generate_demands(topology: Topology, mode: DemandMode = DemandMode.ALL_PAIRS) -> list[Demand]:
    """One demand per unordered node pair, sorted by (src, dst) ids.

    ``NON_ADJACENT_PAIRS`` skips pairs joined by a direct link.
    """
    ids = sorted(topology.nodes)
    demands = []
    graph = topology.graph
    for i, src in enumerate(ids):
        for dst in ids[i + 1 :]:
            if mode is DemandMode.NON_ADJACENT_PAIRS and graph.has_edge(src, dst):
                continue
            demands.append(Demand(f"{src}-{dst}", src, dst))
    return demands


def route_demands(topology: Topology, demands: Iterable[Demand]) -> None:
    """Assign the shortest path to every demand in place."""
    for demand in demands:
        demand.path = shortest_path(topology, demand.src, demand.dst)
