"""Piecewise-constant switching signals and switched dynamic networks.

Signals are right-continuous: at a switch instant the new index already
applies. FloorModulo realizes sigma(t) = floor(rate*t) (mod modulus) + offset
with dwell time 1/rate; Breakpoints lists explicit switch times. Both
guarantee a strictly positive minimum dwell, so any finite interval holds
finitely many switches.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

from .graphs import graph_from_json, graph_to_json, is_connected, union_graph


@dataclass(frozen=True)
class FloorModulo:
    rate: float
    modulus: int
    offset: int = 0
    t0: float = 0.0

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("rate must be positive")
        if self.modulus < 1:
            raise ValueError("modulus must be a positive integer")

    @property
    def tau_min(self):
        return 1.0 / self.rate

    def index_range(self):
        return self.offset, self.offset + self.modulus - 1


@dataclass(frozen=True)
class Breakpoints:
    times: tuple
    indices: tuple
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if len(self.indices) != len(self.times) + 1:
            raise ValueError("need exactly one more index than switch times")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("switch times must be strictly increasing")
        if self.times and self.times[0] <= self.t0:
            raise ValueError("first switch time must come after t0")
        if any(a == b for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("consecutive indices must differ")

    @property
    def tau_min(self):
        pts = (self.t0,) + self.times
        return min(b - a for a, b in zip(pts, pts[1:])) if self.times else math.inf

    def index_range(self):
        return min(self.indices), max(self.indices)


def active_index(sig, t):
    """Graph index selected by the signal at time t (right-continuous)."""
    if t < sig.t0:
        raise ValueError(f"t={t} precedes the signal start t0={sig.t0}")
    if isinstance(sig, FloorModulo):
        return math.floor(sig.rate * t) % sig.modulus + sig.offset
    return sig.indices[bisect_right(sig.times, t)]


def switch_times(sig, t_a, t_b):
    """All switch instants inside the half-open interval (t_a, t_b]."""
    if t_b < t_a:
        raise ValueError("inverted interval")
    if isinstance(sig, FloorModulo):
        if sig.modulus == 1:
            return []
        c = sig.rate
        # smallest j with j/c > t_a; float guard loops absorb rounding at
        # the boundary
        j = math.floor(t_a * c) + 1
        while j - 1 >= 0 and (j - 1) / c > t_a:
            j -= 1
        while j / c <= t_a:
            j += 1
        jh = math.floor(t_b * c)
        while jh / c > t_b:
            jh -= 1
        while (jh + 1) / c <= t_b:
            jh += 1
        return [k / c for k in range(j, jh + 1)]
    lo = bisect_right(sig.times, t_a)
    hi = bisect_right(sig.times, t_b)
    return list(sig.times[lo:hi])


class DynamicNetwork:
    """A graph family plus the signal that schedules it."""

    def __init__(self, graphs, signal):
        graphs = tuple(graphs)
        if not graphs:
            raise ValueError("family must be nonempty")
        n = graphs[0].n
        if any(g.n != n for g in graphs):
            raise ValueError("family members must share the vertex count")
        lo, hi = signal.index_range()
        if lo < 0 or hi >= len(graphs):
            raise ValueError(
                f"signal indices span [{lo},{hi}] but the family has "
                f"{len(graphs)} members"
            )
        self.graphs = graphs
        self.signal = signal
        self.n = n

    def active_graph(self, t):
        return self.graphs[active_index(self.signal, t)]


def is_tau_jointly_connected(net, tau, horizon):
    """Check every window [t_bar, t_bar+tau] unions to a connected graph.

    Window starts are anchored at t0 and the switch times in
    [t0, t0+horizon-tau]; active sets only change at switch instants, so
    this equals the dense quantification over all t_bar in that range.
    Returns (verdict, earliest violating window start or None).
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if horizon < tau:
        raise ValueError("horizon must be at least tau")
    sig = net.signal
    t0 = sig.t0
    anchors = [t0] + switch_times(sig, t0, t0 + horizon - tau)
    for t_bar in anchors:
        idxs = {active_index(sig, t_bar)}
        idxs.update(active_index(sig, s) for s in switch_times(sig, t_bar, t_bar + tau))
        if not is_connected(union_graph([net.graphs[i] for i in idxs])):
            return False, t_bar
    return True, None


def signal_to_json(sig):
    if isinstance(sig, FloorModulo):
        obj = {
            "type": "floor_modulo",
            "rate": sig.rate,
            "modulus": sig.modulus,
            "offset": sig.offset,
        }
    else:
        obj = {
            "type": "breakpoints",
            "times": list(sig.times),
            "indices": list(sig.indices),
        }
    if sig.t0 != 0.0:
        obj["t0"] = sig.t0
    return obj


def signal_from_json(obj):
    t0 = float(obj.get("t0", 0.0))
    if obj["type"] == "floor_modulo":
        return FloorModulo(
            rate=float(obj["rate"]),
            modulus=int(obj["modulus"]),
            offset=int(obj.get("offset", 0)),
            t0=t0,
        )
    if obj["type"] == "breakpoints":
        return Breakpoints(
            times=tuple(obj["times"]), indices=tuple(obj["indices"]), t0=t0
        )
    raise ValueError(f"unknown signal type {obj.get('type')!r}")


def network_to_json(net):
    return {
        "signal": signal_to_json(net.signal),
        "graphs": [graph_to_json(g) for g in net.graphs],
    }


def network_from_json(obj):
    return DynamicNetwork(
        [graph_from_json(g) for g in obj["graphs"]],
        signal_from_json(obj["signal"]),
    )
