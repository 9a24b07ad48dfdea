"""Travel-time oracle between stops, region membership and trip typing.

Three network modes:

* ``euclidean`` / ``manhattan`` -- travel time is metric distance over a
  constant shuttle speed, rounded up to whole seconds.
* ``graph`` -- directed links with traversal seconds; travel time is the
  shortest-path time (Dijkstra), so the triangle inequality holds by
  construction.

Networks are immutable after construction.  Shortest-path results are
cached per source stop; the cache is idempotent, so concurrent readers
are fine.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum

from .errors import UnknownStopError, UnreachableStopError
from .types import Stop, StopId, TripRequest

EUCLIDEAN = "euclidean"
MANHATTAN = "manhattan"
GRAPH = "graph"


class TripType(Enum):
    """How a trip relates to the shuttle region (see :func:`classify_trip`)."""

    INTRA_REGION = "intra"
    OUTBOUND_CONNECTOR = "outbound"
    INBOUND_CONNECTOR = "inbound"


class TravelNetwork:
    """Immutable stop set plus a travel-time oracle.

    Use the :meth:`euclidean`, :meth:`manhattan` or :meth:`graph`
    constructors rather than ``__init__`` directly.
    """

    def __init__(self, stops, mode: str, speed: float | None = None, links=None):
        stop_list = list(stops)
        ids = [s.id for s in stop_list]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate stop ids: {', '.join(dupes)}")
        self.stops: dict[StopId, Stop] = {s.id: s for s in stop_list}
        self.mode = mode
        self.speed = speed
        self._adj: dict[StopId, list[tuple[StopId, int]]] = {s: [] for s in self.stops}
        self._sssp_cache: dict[StopId, dict[StopId, int]] = {}
        self._tt_cache: dict[tuple[StopId, StopId], int] = {}
        self.links: tuple[tuple[StopId, StopId, int], ...] = ()

        if mode in (EUCLIDEAN, MANHATTAN):
            if speed is None or speed <= 0:
                raise ValueError(f"{mode} mode needs a positive speed (m/s)")
            if links:
                raise ValueError(f"{mode} mode takes no links")
        elif mode == GRAPH:
            cleaned = []
            for a, b, seconds in links or ():
                if a not in self.stops or b not in self.stops:
                    raise UnknownStopError(f"link {a}->{b}: unknown stop")
                if seconds < 0:
                    raise ValueError(f"link {a}->{b}: negative traversal time")
                seconds = int(math.ceil(seconds))
                cleaned.append((a, b, seconds))
                self._adj[a].append((b, seconds))
            self.links = tuple(cleaned)
        else:
            raise ValueError(f"unknown network mode {mode!r}")

    @classmethod
    def euclidean(cls, stops, speed: float) -> "TravelNetwork":
        return cls(stops, EUCLIDEAN, speed=speed)

    @classmethod
    def manhattan(cls, stops, speed: float) -> "TravelNetwork":
        return cls(stops, MANHATTAN, speed=speed)

    @classmethod
    def graph(cls, stops, links) -> "TravelNetwork":
        return cls(stops, GRAPH, links=links)

    def has_stop(self, stop: StopId) -> bool:
        return stop in self.stops

    def stop_ids(self) -> list[StopId]:
        return sorted(self.stops)

    def travel_time(self, a: StopId, b: StopId) -> int:
        """Seconds to travel from ``a`` to ``b`` (0 when a == b)."""
        cached = self._tt_cache.get((a, b))
        if cached is not None:
            return cached
        if a not in self.stops:
            raise UnknownStopError(a)
        if b not in self.stops:
            raise UnknownStopError(b)
        if a == b:
            seconds = 0
        elif self.mode == GRAPH:
            dist = self._single_source(a)
            if b not in dist:
                raise UnreachableStopError(f"no path from {a} to {b}")
            seconds = dist[b]
        else:
            sa, sb = self.stops[a], self.stops[b]
            if self.mode == EUCLIDEAN:
                d = math.hypot(sa.x - sb.x, sa.y - sb.y)
            else:
                d = abs(sa.x - sb.x) + abs(sa.y - sb.y)
            seconds = int(math.ceil(d / self.speed))
        self._tt_cache[(a, b)] = seconds
        return seconds

    def _single_source(self, source: StopId) -> dict[StopId, int]:
        cached = self._sssp_cache.get(source)
        if cached is not None:
            return cached
        dist: dict[StopId, int] = {source: 0}
        heap: list[tuple[int, StopId]] = [(0, source)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist.get(u, math.inf):
                continue
            for v, w in self._adj[u]:
                nd = d + w
                if nd < dist.get(v, math.inf):
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        self._sssp_cache[source] = dist
        return dist

    def all_pairs_times(self) -> dict[StopId, dict[StopId, int]]:
        """All-pairs travel times, consistent with :meth:`travel_time`.

        Raises ``UnreachableStopError`` if the graph is not strongly
        connected.
        """
        matrix: dict[StopId, dict[StopId, int]] = {}
        ids = self.stop_ids()
        for a in ids:
            if self.mode == GRAPH:
                dist = self._single_source(a)
                missing = [b for b in ids if b not in dist]
                if missing:
                    raise UnreachableStopError(f"no path from {a} to {missing[0]}")
                matrix[a] = {b: dist[b] for b in ids}
            else:
                matrix[a] = {b: self.travel_time(a, b) for b in ids}
        return matrix


def all_pairs_times(network: TravelNetwork) -> dict[StopId, dict[StopId, int]]:
    return network.all_pairs_times()


@dataclass(frozen=True)
class Region:
    """A geofenced service area plus its fixed-route gateway stations."""

    member_stops: frozenset[StopId]
    gateway_stations: frozenset[StopId] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "member_stops", frozenset(self.member_stops))
        object.__setattr__(self, "gateway_stations", frozenset(self.gateway_stations))
        overlap = self.member_stops & self.gateway_stations
        if overlap:
            raise ValueError(f"stops cannot be both member and gateway: {sorted(overlap)}")


def classify_trip(request: TripRequest, region: Region) -> TripType:
    """Classify a request by where its endpoints sit relative to the region.

    in->in is an intra-region trip, in->gateway is an outbound connector,
    gateway->in is an inbound connector.  Anything else is not a
    shuttle-serviceable trip and raises ``ValueError``.
    """
    p_in = request.pickup in region.member_stops
    d_in = request.dropoff in region.member_stops
    p_gw = request.pickup in region.gateway_stations
    d_gw = request.dropoff in region.gateway_stations
    if not (p_in or p_gw):
        raise ValueError(f"request {request.id}: pickup {request.pickup} is outside the region and its gateways")
    if not (d_in or d_gw):
        raise ValueError(f"request {request.id}: dropoff {request.dropoff} is outside the region and its gateways")
    if p_in and d_in:
        return TripType.INTRA_REGION
    if p_in and d_gw:
        return TripType.OUTBOUND_CONNECTOR
    if p_gw and d_in:
        return TripType.INBOUND_CONNECTOR
    raise ValueError(f"request {request.id}: gateway-to-gateway trips are not shuttle-serviceable")


def select_gateway(
    origin: StopId,
    region: Region,
    network: TravelNetwork,
    downstream_times: dict[StopId, int],
) -> StopId:
    """Pick the gateway minimizing shuttle leg + remaining-journey time.

    ``downstream_times`` gives the post-transfer remaining-journey
    seconds at each gateway.  Ties break toward the smallest stop id.
    """
    if not region.gateway_stations:
        raise ValueError("region has no gateway stations")
    best: StopId | None = None
    best_total: int | None = None
    for g in sorted(region.gateway_stations):
        if g not in downstream_times:
            raise ValueError(f"no downstream time for gateway {g}")
        total = network.travel_time(origin, g) + downstream_times[g]
        if best_total is None or total < best_total:
            best, best_total = g, total
    return best
