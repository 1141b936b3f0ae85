"""Deterministic discrete-event stand-in for the container platform and
the SDN transport controller, driven by a virtual clock."""

from .clock import VirtualClock
from .topology import FlowRule, Topology, build_route_rules
from .simulator import InfraSimulator, SimWorkload

__all__ = [
    "VirtualClock",
    "Topology",
    "FlowRule",
    "build_route_rules",
    "InfraSimulator",
    "SimWorkload",
]
