"""Transport topology, path computation and the slice-aware flow table.

Paths are lists of switch ids. A route over an N-switch path needs one
rule per switch per direction, so installing it yields 2N flow rules,
each tagged with the slice VLAN.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections import deque

from ..errors import NoPath, RuleConflict


@dataclass(frozen=True)
class FlowRule:
    switch: str
    vlan: int
    src: str
    dst: str
    action: str          # "fwd:<next-node>" or "deliver:<host>"
    priority: int = 100

    def match_key(self) -> tuple:
        return (self.switch, self.vlan, self.src, self.dst)

    def to_dict(self) -> dict:
        return {"switch": self.switch, "vlan": self.vlan, "src": self.src,
                "dst": self.dst, "action": self.action, "priority": self.priority}


class Topology:
    def __init__(self, spec: dict):
        self.switches: list[str] = list(spec["switches"])
        self.links: list[tuple[str, str, float]] = [
            (a, b, float(lat)) for a, b, lat in spec["links"]]
        self.attach_points: dict = dict(spec.get("attach_points", {}))
        self.detour: list[str] = list(spec.get("detour", []))
        self.sites: dict = dict(spec.get("sites", {}))
        self._adj: dict[str, list[str]] = {s: [] for s in self.switches}
        for a, b, _ in self.links:
            self._adj.setdefault(a, []).append(b)
            self._adj.setdefault(b, []).append(a)
        for neighbours in self._adj.values():
            neighbours.sort()

    def has_node(self, node: str) -> bool:
        return node in self._adj

    def link_latency_ms(self, a: str, b: str) -> float:
        for x, y, lat in self.links:
            if {x, y} == {a, b}:
                return lat
        raise KeyError(f"no link {a}-{b}")

    def shortest_path(self, src: str, dst: str) -> list[str]:
        """Minimal-hop path; among equal-length paths the lexicographically
        smallest node sequence wins, so results are deterministic."""
        if not self.has_node(src) or not self.has_node(dst):
            raise NoPath(f"unknown endpoint {src!r} or {dst!r}")
        dist = self._bfs_dist(dst)
        if src not in dist:
            raise NoPath(f"{dst} unreachable from {src}")
        path = [src]
        node = src
        while node != dst:
            node = min(n for n in self._adj[node] if dist.get(n, -1) == dist[node] - 1)
            path.append(node)
        return path

    def _bfs_dist(self, target: str) -> dict[str, int]:
        dist = {target: 0}
        queue = deque([target])
        while queue:
            node = queue.popleft()
            for neighbour in self._adj[node]:
                if neighbour not in dist:
                    dist[neighbour] = dist[node] + 1
                    queue.append(neighbour)
        return dist

    def resilient_path(self, src: str, dst: str) -> list[str]:
        """Shortest path stretched through the configured detour switches."""
        if not self.detour:
            return self.shortest_path(src, dst)
        waypoints = [src, *self.detour, dst]
        path: list[str] = []
        for a, b in zip(waypoints, waypoints[1:]):
            leg = self.shortest_path(a, b)
            path.extend(leg if not path else leg[1:])
        seen = set()
        for node in path:
            if node in seen:
                raise NoPath(f"detour through {self.detour} revisits {node}")
            seen.add(node)
        return path

    def compute_path(self, src: str, dst: str, policy: str) -> list[str]:
        if policy == "shortest":
            return self.shortest_path(src, dst)
        if policy == "resilient":
            return self.resilient_path(src, dst)
        raise ValueError(f"unknown path policy {policy!r}")


def build_route_rules(path: list[str], vlan: int, src_host: str, dst_host: str,
                      priority: int = 100) -> list[FlowRule]:
    """Full-duplex route: one rule per switch in each direction."""
    rules: list[FlowRule] = []
    for i, switch in enumerate(path):
        nxt = f"fwd:{path[i + 1]}" if i + 1 < len(path) else f"deliver:{dst_host}"
        rules.append(FlowRule(switch=switch, vlan=vlan, src=src_host,
                              dst=dst_host, action=nxt, priority=priority))
    for i, switch in enumerate(reversed(path)):
        rpath = list(reversed(path))
        nxt = f"fwd:{rpath[i + 1]}" if i + 1 < len(rpath) else f"deliver:{src_host}"
        rules.append(FlowRule(switch=switch, vlan=vlan, src=dst_host,
                              dst=src_host, action=nxt, priority=priority))
    return rules


class FlowTable:
    """Installed flow rules with owner tracking for shared VLAN routes."""

    def __init__(self):
        self._rules: dict[tuple, dict] = {}
        self._next_id = 0

    def install(self, rules: list[FlowRule], owner: str) -> list[str]:
        """Install rules for ``owner``. Reinstalling an identical rule adds
        the owner without creating a new entry; a same-match rule with a
        different action is rejected."""
        for rule in rules:
            existing = self._rules.get(rule.match_key())
            if existing and existing["rule"].action != rule.action:
                raise RuleConflict(
                    f"rule for {rule.match_key()} already installed with "
                    f"action {existing['rule'].action!r}",
                    switch=rule.switch, vlan=rule.vlan)
        ids = []
        for rule in rules:
            entry = self._rules.get(rule.match_key())
            if entry is None:
                self._next_id += 1
                entry = {"id": f"fr-{self._next_id}", "rule": rule, "owners": set()}
                self._rules[rule.match_key()] = entry
            entry["owners"].add(owner)
            ids.append(entry["id"])
        return ids

    def remove_owner(self, owner: str) -> list[str]:
        removed = []
        for key in list(self._rules):
            entry = self._rules[key]
            entry["owners"].discard(owner)
            if not entry["owners"]:
                removed.append(entry["id"])
                del self._rules[key]
        return removed

    def rules(self) -> list[dict]:
        return [dict(entry, rule=entry["rule"]) for entry in self._rules.values()]

    def by_vlan(self, vlan: int) -> list[dict]:
        return [entry for entry in self._rules.values()
                if entry["rule"].vlan == vlan]

    def live_ids(self) -> set[str]:
        return {entry["id"] for entry in self._rules.values()}

    def owners_of_vlan(self, vlan: int) -> set[str]:
        owners: set[str] = set()
        for entry in self.by_vlan(vlan):
            owners.update(entry["owners"])
        return owners

    def size(self) -> int:
        return len(self._rules)
