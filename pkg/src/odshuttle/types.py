"""Core domain types shared by every module.

All types are immutable value objects: construction validates local
invariants and raises ``ValueError`` instead of repairing bad input.
Cross-object checks (dangling stop ids, duplicate request ids) live in
:func:`validate_instance` because they need a travel network to resolve
against.

Times are integer seconds since scenario start; durations are integer
seconds rounded up wherever they come out of a distance computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

StopId = str


@dataclass(frozen=True)
class Stop:
    """A named point in the planar network (coordinates in meters)."""

    id: StopId
    x: float
    y: float

    def __post_init__(self):
        if not self.id:
            raise ValueError("stop id must be non-empty")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"stop {self.id}: coordinates must be finite")


@dataclass(frozen=True)
class TripRequest:
    """A passenger demand: travel from ``pickup`` to ``dropoff``.

    ``passengers`` defaults to 1; waiting costs are accumulated per
    request, not per passenger.
    """

    id: str
    pickup: StopId
    dropoff: StopId
    request_time: int
    passengers: int = 1

    def __post_init__(self):
        if not self.id:
            raise ValueError("request id must be non-empty")
        if self.pickup == self.dropoff:
            raise ValueError(f"request {self.id}: pickup equals dropoff ({self.pickup})")
        if self.request_time < 0:
            raise ValueError(f"request {self.id}: request_time must be >= 0")
        if self.passengers < 1:
            raise ValueError(f"request {self.id}: passengers must be >= 1")


@dataclass(frozen=True)
class ShuttleState:
    """A vehicle's committed position and outstanding work.

    ``heading_stop``/``arrival_time`` are the stop the shuttle is
    currently directed at and when it gets there; an idle shuttle heads
    at its own location with arrival "now".  ``pending_pickups`` are
    requests promised but not yet aboard; ``pending_dropoffs`` are
    aboard and awaiting their destination, so the onboard passenger
    count is derived from them.
    """

    id: str
    heading_stop: StopId
    arrival_time: int
    pending_pickups: frozenset[TripRequest] = frozenset()
    pending_dropoffs: frozenset[TripRequest] = frozenset()
    capacity: int = 8

    def __post_init__(self):
        # Accept any iterable for the two request sets.
        object.__setattr__(self, "pending_pickups", frozenset(self.pending_pickups))
        object.__setattr__(self, "pending_dropoffs", frozenset(self.pending_dropoffs))
        if not self.id:
            raise ValueError("shuttle id must be non-empty")
        if self.capacity < 1:
            raise ValueError(f"shuttle {self.id}: capacity must be >= 1")
        if self.pending_pickups & self.pending_dropoffs:
            raise ValueError(f"shuttle {self.id}: a request cannot await pickup and dropoff at once")
        if self.onboard > self.capacity:
            raise ValueError(
                f"shuttle {self.id}: onboard {self.onboard} exceeds capacity {self.capacity}"
            )

    @property
    def onboard(self) -> int:
        """Passengers currently riding: everyone picked up and not yet dropped off."""
        return sum(r.passengers for r in self.pending_dropoffs)


@dataclass(frozen=True)
class AssignmentPlan:
    """One column of the dispatch program: a vehicle plus a request subset.

    ``cost`` is the marginal passenger waiting (seconds) of adding
    ``requests`` to the vehicle's existing commitments; ``sequence`` is
    the stop ordering that realizes it, covering the vehicle's old and
    new work.  The empty plan (no new requests) always costs 0.
    """

    vehicle: str
    requests: frozenset[TripRequest]
    cost: int
    sequence: tuple[StopId, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "requests", frozenset(self.requests))
        object.__setattr__(self, "sequence", tuple(self.sequence))
        if self.cost < 0:
            raise ValueError(f"plan for {self.vehicle}: cost must be >= 0")

    @property
    def request_ids(self) -> tuple[str, ...]:
        return tuple(sorted(r.id for r in self.requests))


@dataclass(frozen=True)
class DispatchSolution:
    """Outcome of one dispatch interval: one plan per vehicle plus the missed set."""

    selected: dict[str, AssignmentPlan]
    missed: frozenset[str]
    objective: int

    def __post_init__(self):
        object.__setattr__(self, "selected", dict(self.selected))
        object.__setattr__(self, "missed", frozenset(self.missed))

    def served_ids(self) -> set[str]:
        ids: set[str] = set()
        for plan in self.selected.values():
            ids.update(r.id for r in plan.requests)
        return ids


def validate_instance(requests, shuttles, network) -> list[str]:
    """Cross-check a dispatch instance; returns a list of problems (empty = ok).

    Re-checks local invariants too, so instances assembled outside the
    constructors (e.g. hand-parsed files) get the same scrutiny.
    """
    errors: list[str] = []
    seen_ids: set[str] = set()
    for r in sorted(requests, key=lambda r: r.id):
        if r.id in seen_ids:
            errors.append(f"duplicate request id {r.id}")
        seen_ids.add(r.id)
        if r.pickup == r.dropoff:
            errors.append(f"request {r.id}: pickup equals dropoff")
        if r.request_time < 0:
            errors.append(f"request {r.id}: negative request_time")
        if r.passengers < 1:
            errors.append(f"request {r.id}: passengers < 1")
        for stop in (r.pickup, r.dropoff):
            if not network.has_stop(stop):
                errors.append(f"request {r.id}: unknown stop {stop}")

    seen_shuttles: set[str] = set()
    for v in sorted(shuttles, key=lambda v: v.id):
        if v.id in seen_shuttles:
            errors.append(f"duplicate shuttle id {v.id}")
        seen_shuttles.add(v.id)
        if not network.has_stop(v.heading_stop):
            errors.append(f"shuttle {v.id}: unknown stop {v.heading_stop}")
        if v.onboard > v.capacity:
            errors.append(f"shuttle {v.id}: onboard {v.onboard} exceeds capacity {v.capacity}")
        if v.pending_pickups & v.pending_dropoffs:
            errors.append(f"shuttle {v.id}: pickup/dropoff sets overlap")
        for r in sorted(v.pending_pickups | v.pending_dropoffs, key=lambda r: r.id):
            for stop in (r.pickup, r.dropoff):
                if not network.has_stop(stop):
                    errors.append(f"shuttle {v.id}: request {r.id} uses unknown stop {stop}")
    return errors
