"""Structured text formats: parse and write everything the CLI touches.

All inputs share one line-oriented syntax: ``#`` starts a comment,
blank lines are skipped, ``[name]`` opens a section, and every other
line is whitespace-separated tokens whose first token is a keyword.

Scenario config sections::

    [scenario]   horizon / dispatch_interval / fleet_size / shuttle_capacity
                 max_requests_per_plan / miss_penalty / max_defer / seed
                 max_requests_per_tick / max_outstanding / bin_seconds
                 fleet_start <stop> ... (shuttles cycle through the list)
    [network]    mode euclidean|manhattan|graph ; speed <m/s> ;
                 stop <id> <x> <y> ; link <from> <to> <seconds>
    [region]     member <id> ... ; gateway <id> [downstream_seconds]
    [demand]     file <path> (pre-generated demand CSV, relative to the
                 config) or a profile: rate <start> <end> <per_hour>,
                 mix <intra> <outbound> <inbound>,
                 member_weight/gateway_weight <id> <w>, seed <n>
                 (profile seed 0 inherits the scenario seed)
    [baseline]   walk_speed <m/s> ;
                 route <name> <one_way_min> <headway_min> <two_way|circular> <stop> ...

Dispatch instances (for ``solve``) use ``[params]``, ``[network]``,
``[fleet]`` (``shuttle <id> <heading_stop> <arrival_s> <capacity>`` plus
``committed_pickup``/``committed_dropoff <shuttle> <request>``) and
``[requests]`` (``request <id> <t> <pickup> <dropoff> <passengers>``,
optional ``penalty <id> <cost>``).  Requests claimed by a
``committed_*`` line belong to that shuttle and leave the open set.

Demand files are CSV: id,request_time,pickup,dropoff,passengers,trip_type.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .demand import DemandProfile
from .errors import ParseError
from .network import Region, TravelNetwork
from .simulator import FixedRoute, ScenarioConfig, TripRecord
from .solver import DispatchProblem, DEFAULT_MISS_PENALTY
from .types import DispatchSolution, ShuttleState, Stop, TripRequest


def _sections(text: str, path="<string>"):
    """Yield (section, line_no, tokens) for every content line."""
    section = ""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            continue
        yield section, line_no, line.split()


def _num(token, line_no, path, kind=float):
    try:
        return kind(token)
    except ValueError:
        raise ParseError(path, line_no, f"expected a number, got {token!r}") from None


# -- network / region ----------------------------------------------------------


def _build_network(mode, speed, stops, links, path, line_no):
    if mode is None:
        raise ParseError(path, line_no, "network section never declared a mode")
    if not stops:
        raise ParseError(path, line_no, "network has no stops")
    try:
        return TravelNetwork(stops, mode, speed=speed, links=links)
    except (ValueError, KeyError) as err:
        raise ParseError(path, line_no, f"bad network: {err}") from None


def parse_network_text(text: str, path="<network>") -> TravelNetwork:
    mode, speed = None, None
    stops, links = [], []
    last = 1
    for _, line_no, tokens in _sections(text, path):
        last = line_no
        key = tokens[0]
        if key == "mode":
            mode = tokens[1]
        elif key == "speed":
            speed = _num(tokens[1], line_no, path)
        elif key == "stop":
            if len(tokens) != 4:
                raise ParseError(path, line_no, "stop lines are: stop <id> <x> <y>")
            stops.append(Stop(tokens[1], _num(tokens[2], line_no, path),
                              _num(tokens[3], line_no, path)))
        elif key == "link":
            if len(tokens) != 4:
                raise ParseError(path, line_no, "link lines are: link <from> <to> <seconds>")
            links.append((tokens[1], tokens[2], _num(tokens[3], line_no, path)))
        else:
            raise ParseError(path, line_no, f"unknown network keyword {key!r}")
    return _build_network(mode, speed, stops, links, path, last)


def write_network_text(network: TravelNetwork) -> str:
    out = [f"mode {network.mode}"]
    if network.speed is not None:
        out.append(f"speed {network.speed}")
    for sid in network.stop_ids():
        s = network.stops[sid]
        out.append(f"stop {s.id} {s.x} {s.y}")
    for a, b, seconds in sorted(network.links):
        out.append(f"link {a} {b} {seconds}")
    return "\n".join(out) + "\n"


def parse_region_text(text: str, path="<region>") -> tuple[Region, dict[str, int]]:
    members, gateways = [], []
    downstream: dict[str, int] = {}
    for _, line_no, tokens in _sections(text, path):
        key = tokens[0]
        if key == "member":
            members.extend(tokens[1:])
        elif key == "gateway":
            if len(tokens) < 2:
                raise ParseError(path, line_no, "gateway lines are: gateway <id> [seconds]")
            gateways.append(tokens[1])
            downstream[tokens[1]] = int(_num(tokens[2], line_no, path)) if len(tokens) > 2 else 0
        else:
            raise ParseError(path, line_no, f"unknown region keyword {key!r}")
    return Region(member_stops=members, gateway_stations=gateways), downstream


def write_region_text(region: Region, downstream: dict[str, int] | None = None) -> str:
    downstream = downstream or {}
    out = [f"member {m}" for m in sorted(region.member_stops)]
    out += [f"gateway {g} {downstream.get(g, 0)}" for g in sorted(region.gateway_stations)]
    return "\n".join(out) + "\n"


# -- demand ---------------------------------------------------------------------

DEMAND_HEADER = ["id", "request_time", "pickup", "dropoff", "passengers", "trip_type"]


def parse_demand_csv(text: str, path="<demand>") -> tuple[list[TripRequest], dict[str, str]]:
    reader = csv.DictReader(io.StringIO(text))
    requests, types = [], {}
    for i, row in enumerate(reader, start=2):
        try:
            req = TripRequest(
                id=row["id"],
                pickup=row["pickup"],
                dropoff=row["dropoff"],
                request_time=int(row["request_time"]),
                passengers=int(row.get("passengers") or 1),
            )
        except (KeyError, TypeError, ValueError) as err:
            raise ParseError(path, i, f"bad demand row: {err}") from None
        requests.append(req)
        if row.get("trip_type"):
            types[req.id] = row["trip_type"]
    return requests, types


def write_demand_csv(requests, types: dict[str, str] | None = None) -> str:
    types = types or {}
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(DEMAND_HEADER)
    for r in requests:
        writer.writerow([r.id, r.request_time, r.pickup, r.dropoff, r.passengers,
                         types.get(r.id, "")])
    return out.getvalue()


# -- scenario config --------------------------------------------------------------

_SCENARIO_INTS = {
    "horizon", "dispatch_interval", "fleet_size", "shuttle_capacity",
    "max_requests_per_plan", "miss_penalty", "max_defer", "seed",
    "max_requests_per_tick", "bin_seconds",
}


def parse_scenario_text(text: str, path="<scenario>", base_dir: Path | None = None) -> ScenarioConfig:
    base_dir = Path(base_dir) if base_dir else Path(".")
    scalars: dict = {}
    fleet_start: list[str] = []
    net_mode, net_speed = None, None
    net_stops, net_links = [], []
    members, gateways, downstream = [], [], {}
    rates, mix = [], None
    member_w: dict[str, float] = {}
    gateway_w: dict[str, float] = {}
    demand_seed = 0
    demand_file = None
    walk_speed = 1.3
    routes: list[FixedRoute] = []
    last = 1

    for section, line_no, tokens in _sections(text, path):
        last = line_no
        key = tokens[0]
        if section == "scenario":
            if key in _SCENARIO_INTS:
                scalars[key] = int(_num(tokens[1], line_no, path))
            elif key == "max_outstanding":
                scalars[key] = None if tokens[1] == "none" else int(_num(tokens[1], line_no, path))
            elif key == "waiting_per_passenger":
                scalars[key] = tokens[1].lower() in ("1", "true", "yes")
            elif key == "fleet_start":
                fleet_start.extend(tokens[1:])
            else:
                raise ParseError(path, line_no, f"unknown scenario keyword {key!r}")
        elif section == "network":
            if key == "mode":
                net_mode = tokens[1]
            elif key == "speed":
                net_speed = _num(tokens[1], line_no, path)
            elif key == "stop":
                net_stops.append(Stop(tokens[1], _num(tokens[2], line_no, path),
                                      _num(tokens[3], line_no, path)))
            elif key == "link":
                net_links.append((tokens[1], tokens[2], _num(tokens[3], line_no, path)))
            else:
                raise ParseError(path, line_no, f"unknown network keyword {key!r}")
        elif section == "region":
            if key == "member":
                members.extend(tokens[1:])
            elif key == "gateway":
                gateways.append(tokens[1])
                downstream[tokens[1]] = int(_num(tokens[2], line_no, path)) if len(tokens) > 2 else 0
            else:
                raise ParseError(path, line_no, f"unknown region keyword {key!r}")
        elif section == "demand":
            if key == "file":
                demand_file = tokens[1]
            elif key == "rate":
                rates.append((int(_num(tokens[1], line_no, path)),
                              int(_num(tokens[2], line_no, path)),
                              _num(tokens[3], line_no, path)))
            elif key == "mix":
                mix = (_num(tokens[1], line_no, path), _num(tokens[2], line_no, path),
                       _num(tokens[3], line_no, path))
            elif key == "member_weight":
                member_w[tokens[1]] = _num(tokens[2], line_no, path)
            elif key == "gateway_weight":
                gateway_w[tokens[1]] = _num(tokens[2], line_no, path)
            elif key == "seed":
                demand_seed = int(_num(tokens[1], line_no, path))
            else:
                raise ParseError(path, line_no, f"unknown demand keyword {key!r}")
        elif section == "baseline":
            if key == "walk_speed":
                walk_speed = _num(tokens[1], line_no, path)
            elif key == "route":
                if len(tokens) < 5:
                    raise ParseError(path, line_no,
                                     "route lines are: route <name> <one_way_min> <headway_min> <shape> [stops...]")
                try:
                    routes.append(FixedRoute(
                        name=tokens[1],
                        one_way_minutes=_num(tokens[2], line_no, path),
                        headway_minutes=_num(tokens[3], line_no, path),
                        shape=tokens[4],
                        served_stops=tuple(tokens[5:]),
                    ))
                except ValueError as err:
                    raise ParseError(path, line_no, str(err)) from None
            else:
                raise ParseError(path, line_no, f"unknown baseline keyword {key!r}")
        else:
            raise ParseError(path, line_no, f"line outside any known section: {' '.join(tokens)}")

    network = _build_network(net_mode, net_speed, net_stops, net_links, path, last)
    region = None
    if members or gateways:
        region = Region(member_stops=members, gateway_stations=gateways)

    demand_requests = None
    demand_types: dict[str, str] = {}
    profile = None
    if demand_file is not None:
        target = base_dir / demand_file
        reqs, demand_types = parse_demand_csv(target.read_text(), path=str(target))
        demand_requests = tuple(reqs)
    elif rates:
        profile = DemandProfile(rates=tuple(rates), mix=mix or (1.0, 0.0, 0.0),
                                member_weights=member_w, gateway_weights=gateway_w,
                                seed=demand_seed)

    if "horizon" not in scalars or "fleet_size" not in scalars:
        raise ParseError(path, last, "scenario section needs at least horizon and fleet_size")
    try:
        return ScenarioConfig(
            network=network,
            region=region,
            downstream_times=downstream,
            demand_profile=profile,
            demand_requests=demand_requests,
            demand_types=demand_types,
            fleet_start=tuple(fleet_start),
            walk_speed=walk_speed,
            routes=tuple(routes),
            **scalars,
        )
    except ValueError as err:
        raise ParseError(path, last, f"bad scenario: {err}") from None


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    return parse_scenario_text(path.read_text(), path=str(path), base_dir=path.parent)


# -- dispatch instances ------------------------------------------------------------


def parse_instance_text(text: str, path="<instance>"):
    """Returns (requests, shuttles, network, params) for the one-shot solver."""
    net_mode, net_speed = None, None
    net_stops, net_links = [], []
    params = {"max_requests_per_plan": 3, "miss_penalty": DEFAULT_MISS_PENALTY}
    shuttle_rows: list[tuple] = []
    committed: list[tuple[str, str, str]] = []  # (kind, shuttle, request)
    request_rows: dict[str, TripRequest] = {}
    penalties: dict[str, int] = {}
    last = 1

    for section, line_no, tokens in _sections(text, path):
        last = line_no
        key = tokens[0]
        if section == "params":
            params[key] = int(_num(tokens[1], line_no, path))
        elif section == "network":
            if key == "mode":
                net_mode = tokens[1]
            elif key == "speed":
                net_speed = _num(tokens[1], line_no, path)
            elif key == "stop":
                net_stops.append(Stop(tokens[1], _num(tokens[2], line_no, path),
                                      _num(tokens[3], line_no, path)))
            elif key == "link":
                net_links.append((tokens[1], tokens[2], _num(tokens[3], line_no, path)))
            else:
                raise ParseError(path, line_no, f"unknown network keyword {key!r}")
        elif section == "fleet":
            if key == "shuttle":
                if len(tokens) != 5:
                    raise ParseError(path, line_no,
                                     "shuttle lines are: shuttle <id> <heading_stop> <arrival_s> <capacity>")
                shuttle_rows.append((tokens[1], tokens[2],
                                     int(_num(tokens[3], line_no, path)),
                                     int(_num(tokens[4], line_no, path))))
            elif key in ("committed_pickup", "committed_dropoff"):
                committed.append((key, tokens[1], tokens[2]))
            else:
                raise ParseError(path, line_no, f"unknown fleet keyword {key!r}")
        elif section == "requests":
            if key == "request":
                if len(tokens) != 6:
                    raise ParseError(path, line_no,
                                     "request lines are: request <id> <t> <pickup> <dropoff> <passengers>")
                try:
                    req = TripRequest(id=tokens[1],
                                      request_time=int(_num(tokens[2], line_no, path)),
                                      pickup=tokens[3], dropoff=tokens[4],
                                      passengers=int(_num(tokens[5], line_no, path)))
                except ValueError as err:
                    raise ParseError(path, line_no, str(err)) from None
                if req.id in request_rows:
                    raise ParseError(path, line_no, f"duplicate request id {req.id}")
                request_rows[req.id] = req
            elif key == "penalty":
                penalties[tokens[1]] = int(_num(tokens[2], line_no, path))
            else:
                raise ParseError(path, line_no, f"unknown requests keyword {key!r}")
        else:
            raise ParseError(path, line_no, f"line outside any known section: {' '.join(tokens)}")

    network = _build_network(net_mode, net_speed, net_stops, net_links, path, last)
    claimed: set[str] = set()
    pickups: dict[str, set] = {}
    dropoffs: dict[str, set] = {}
    for kind, shuttle_id, request_id in committed:
        if request_id not in request_rows:
            raise ParseError(path, last, f"committed request {request_id} never defined")
        claimed.add(request_id)
        bucket = pickups if kind == "committed_pickup" else dropoffs
        bucket.setdefault(shuttle_id, set()).add(request_rows[request_id])
    shuttles = []
    for sid, heading, arrival, capacity in shuttle_rows:
        try:
            shuttles.append(ShuttleState(
                id=sid, heading_stop=heading, arrival_time=arrival, capacity=capacity,
                pending_pickups=pickups.get(sid, set()),
                pending_dropoffs=dropoffs.get(sid, set()),
            ))
        except ValueError as err:
            raise ParseError(path, last, str(err)) from None
    open_requests = [r for rid, r in sorted(request_rows.items()) if rid not in claimed]
    params["penalties"] = penalties
    return open_requests, shuttles, network, params


def write_instance_text(requests, shuttles, network, max_requests_per_plan=3,
                        miss_penalty=DEFAULT_MISS_PENALTY, penalties=None) -> str:
    out = ["[params]",
           f"max_requests_per_plan {max_requests_per_plan}",
           f"miss_penalty {miss_penalty}",
           "", "[network]", write_network_text(network).rstrip(),
           "", "[fleet]"]
    for v in sorted(shuttles, key=lambda v: v.id):
        out.append(f"shuttle {v.id} {v.heading_stop} {v.arrival_time} {v.capacity}")
    for v in sorted(shuttles, key=lambda v: v.id):
        for r in sorted(v.pending_pickups, key=lambda r: r.id):
            out.append(f"committed_pickup {v.id} {r.id}")
        for r in sorted(v.pending_dropoffs, key=lambda r: r.id):
            out.append(f"committed_dropoff {v.id} {r.id}")
    out += ["", "[requests]"]
    everything = list(requests)
    for v in shuttles:
        everything.extend(v.pending_pickups | v.pending_dropoffs)
    for r in sorted(everything, key=lambda r: r.id):
        out.append(f"request {r.id} {r.request_time} {r.pickup} {r.dropoff} {r.passengers}")
    for rid, cost in sorted((penalties or {}).items()):
        out.append(f"penalty {rid} {cost}")
    return "\n".join(out) + "\n"


# -- outputs -------------------------------------------------------------------

TRIPS_HEADER = ["id", "request_time", "pickup_time", "dropoff_time",
                "waiting", "trip_time", "status", "trip_type"]


def write_trips_csv(records: list[TripRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRIPS_HEADER)
    for r in records:
        writer.writerow([
            r.id, r.request_time,
            "" if r.pickup_time is None else r.pickup_time,
            "" if r.dropoff_time is None else r.dropoff_time,
            "" if r.waiting is None else r.waiting,
            "" if r.trip_time is None else r.trip_time,
            r.status, r.trip_type,
        ])
    return out.getvalue()


def write_summary_csv(summary) -> str:
    lines = ["section,key,value"]
    stats = [
        ("completed", summary.completed),
        ("abandoned", summary.abandoned),
        ("pending", summary.pending),
        ("mean_waiting", f"{summary.mean_waiting:.1f}"),
        ("median_waiting", f"{summary.median_waiting:.1f}"),
        ("p90_waiting", f"{summary.p90_waiting:.1f}"),
        ("mean_trip", f"{summary.mean_trip:.1f}"),
        ("median_trip", f"{summary.median_trip:.1f}"),
        ("p90_trip", f"{summary.p90_trip:.1f}"),
        ("bin_seconds", summary.bin_seconds),
    ]
    if summary.utilization is not None:
        stats.append(("utilization", f"{summary.utilization:.3f}"))
    lines += [f"stat,{key},{value}" for key, value in stats]
    lines += [f"bin,{start},{mean:.1f}" for start, mean in sorted(summary.bin_mean_trip.items())]
    return "\n".join(lines) + "\n"


def write_solution_text(problem: DispatchProblem, solution: DispatchSolution) -> str:
    out = [f"objective {solution.objective}"]
    for vid in sorted(solution.selected):
        plan = solution.selected[vid]
        ids = ",".join(plan.request_ids) or "-"
        seq = ",".join(plan.sequence) or "-"
        out.append(f"vehicle {vid} cost {plan.cost} requests {ids} sequence {seq}")
    for rid in sorted(solution.missed):
        out.append(f"missed {rid} {problem.penalty(rid)}")
    return "\n".join(out) + "\n"


def write_plans_text(plan_set) -> str:
    out = ["index vehicle cost requests sequence"]
    for i, plan in enumerate(plan_set.plans):
        ids = ",".join(plan.request_ids) or "-"
        seq = ",".join(plan.sequence) or "-"
        out.append(f"{i} {plan.vehicle} {plan.cost} {ids} {seq}")
    return "\n".join(out) + "\n"


def parse_routes_text(text: str, path="<routes>") -> list[FixedRoute]:
    routes = []
    for _, line_no, tokens in _sections(text, path):
        if tokens[0] != "route":
            raise ParseError(path, line_no, f"unknown routes keyword {tokens[0]!r}")
        if len(tokens) < 5:
            raise ParseError(path, line_no,
                             "route lines are: route <name> <one_way_min> <headway_min> <shape> [stops...]")
        try:
            routes.append(FixedRoute(
                name=tokens[1],
                one_way_minutes=_num(tokens[2], line_no, path),
                headway_minutes=_num(tokens[3], line_no, path),
                shape=tokens[4],
                served_stops=tuple(tokens[5:]),
            ))
        except ValueError as err:
            raise ParseError(path, line_no, str(err)) from None
    if not routes:
        raise ParseError(path, 1, "no route lines found")
    return routes
