"""Frequency-domain nodal solver for small linear networks.

An independent cross-check for the closed-form front-end and servo
expressions: networks of resistors, capacitors, and voltage-controlled
current sources are assembled into a complex admittance matrix per
frequency and solved densely (LU with partial pivoting via LAPACK).
Noise analysis injects one source per noise-stamped element and
power-sums the transfers to the output pair.

Node 0 is ground and is eliminated from the system; every other node must
be reachable from ground through conducting elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import constants
from .errors import TopologyError
from .noise import shot_current_density

MAX_NODES = 64

NOISE_KINDS = ("thermal", "shot", "flat_current", "flat_voltage")


@dataclass(frozen=True)
class Resistor:
    name: str
    node_pos: int
    node_neg: int
    ohms: float

    def __post_init__(self):
        if self.ohms <= 0.0:
            raise ValueError(f"{self.name}: resistance must be positive")


@dataclass(frozen=True)
class Capacitor:
    name: str
    node_pos: int
    node_neg: int
    farads: float

    def __post_init__(self):
        if self.farads <= 0.0:
            raise ValueError(f"{self.name}: capacitance must be positive")


@dataclass(frozen=True)
class VCCS:
    """Current gm * (v(ctrl_pos) - v(ctrl_neg)) driven from out_pos to out_neg."""

    name: str
    out_pos: int
    out_neg: int
    ctrl_pos: int
    ctrl_neg: int
    transconductance: float

    def __post_init__(self):
        if self.transconductance <= 0.0:
            raise ValueError(f"{self.name}: transconductance must be positive")


Element = Union[Resistor, Capacitor, VCCS]


@dataclass(frozen=True)
class NoiseStamp:
    """Marks an element as carrying a stochastic source.

    kind / value pairs:
      thermal       - value is the temperature in K (resistors only)
      shot          - value is the DC current in A
      flat_current  - value is a current density in A/rtHz
      flat_voltage  - value is a voltage density in V/rtHz (R or C only)
    """

    element: str
    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.value < 0.0:
            raise ValueError("noise stamp value must be nonnegative")
        if self.kind == "thermal" and self.value == 0.0:
            raise ValueError("thermal stamp needs a positive temperature")


@dataclass(frozen=True)
class CurrentInjection:
    """Test current driven into node_pos and out of node_neg."""

    node_pos: int
    node_neg: int
    amps: complex = 1.0


@dataclass(frozen=True)
class SeriesVoltageInjection:
    """Test voltage inserted in series with a named R or C element.

    Applied internally as the Norton equivalent: a current volts * Y_elem
    into the element's positive node.
    """

    element: str
    volts: complex = 1.0


Injection = Union[CurrentInjection, SeriesVoltageInjection]


def _element_nodes(elem: Element) -> tuple[int, ...]:
    if isinstance(elem, VCCS):
        return (elem.out_pos, elem.out_neg, elem.ctrl_pos, elem.ctrl_neg)
    return (elem.node_pos, elem.node_neg)


@dataclass(frozen=True)
class Network:
    """A small linear circuit with an output node pair and noise stamps."""

    elements: tuple[Element, ...]
    output: tuple[int, int]
    stamps: tuple[NoiseStamp, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "stamps", tuple(self.stamps))
        if not self.elements:
            raise ValueError("network must contain at least one element")
        names = [e.name for e in self.elements]
        if len(set(names)) != len(names):
            raise ValueError("element names must be unique")
        nodes = {0}
        for elem in self.elements:
            for n in _element_nodes(elem):
                if n < 0:
                    raise ValueError(f"{elem.name}: negative node index")
                nodes.add(n)
        if max(nodes) > MAX_NODES:
            raise ValueError(f"node indices must not exceed {MAX_NODES}")
        if any(n not in nodes for n in self.output):
            raise ValueError("output nodes must appear in the network")
        by_name = {e.name: e for e in self.elements}
        for stamp in self.stamps:
            elem = by_name.get(stamp.element)
            if elem is None:
                raise ValueError(f"noise stamp references unknown element {stamp.element!r}")
            if stamp.kind == "thermal" and not isinstance(elem, Resistor):
                raise ValueError("thermal stamps apply to resistors only")
            if stamp.kind == "flat_voltage" and isinstance(elem, VCCS):
                raise ValueError("flat_voltage stamps apply to resistors or capacitors")
        self._check_grounded(nodes)

    def _check_grounded(self, nodes: set[int]) -> None:
        # Union-find over conducting branches (R, C, VCCS output pair).
        parent = {n: n for n in nodes}

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        def union(a: int, b: int) -> None:
            parent[find(a)] = find(b)

        for elem in self.elements:
            if isinstance(elem, VCCS):
                union(elem.out_pos, elem.out_neg)
            else:
                union(elem.node_pos, elem.node_neg)
        floating = sorted(n for n in nodes if find(n) != find(0))
        if floating:
            raise TopologyError(f"nodes not connected to ground: {floating}")

    def element(self, name: str) -> Element:
        for elem in self.elements:
            if elem.name == name:
                return elem
        raise KeyError(name)

    @property
    def node_count(self) -> int:
        return max(max(_element_nodes(e), default=0) for e in self.elements)


def _admittance(elem: Element, f: float) -> complex:
    if isinstance(elem, Resistor):
        return 1.0 / elem.ohms
    if isinstance(elem, Capacitor):
        return 2j * math.pi * f * elem.farads
    raise TypeError(f"{elem.name} has no two-terminal admittance")


def _assemble(net: Network, f: float) -> np.ndarray:
    n = net.node_count
    Y = np.zeros((n, n), dtype=complex)

    def add(i: int, j: int, y: complex) -> None:
        if i > 0 and j > 0:
            Y[i - 1, j - 1] += y

    for elem in net.elements:
        if isinstance(elem, (Resistor, Capacitor)):
            y = _admittance(elem, f)
            add(elem.node_pos, elem.node_pos, y)
            add(elem.node_neg, elem.node_neg, y)
            add(elem.node_pos, elem.node_neg, -y)
            add(elem.node_neg, elem.node_pos, -y)
        else:
            gm = elem.transconductance
            add(elem.out_pos, elem.ctrl_pos, gm)
            add(elem.out_pos, elem.ctrl_neg, -gm)
            add(elem.out_neg, elem.ctrl_pos, -gm)
            add(elem.out_neg, elem.ctrl_neg, gm)
    return Y


def _injection_vector(net: Network, f: float, injected: Injection) -> np.ndarray:
    n = net.node_count
    b = np.zeros(n, dtype=complex)

    def push(node: int, amps: complex) -> None:
        if node > 0:
            b[node - 1] += amps

    if isinstance(injected, CurrentInjection):
        push(injected.node_pos, injected.amps)
        push(injected.node_neg, -injected.amps)
    else:
        elem = net.element(injected.element)
        amps = injected.volts * _admittance(elem, f)
        push(elem.node_pos, amps)
        push(elem.node_neg, -amps)
    return b


def _solve(net: Network, f: float, b: np.ndarray) -> np.ndarray:
    Y = _assemble(net, f)
    try:
        x = np.linalg.solve(Y, b)
    except np.linalg.LinAlgError as exc:
        raise TopologyError(f"singular admittance matrix at {f} Hz: {exc}") from exc
    b_norm = float(np.linalg.norm(b))
    residual = float(np.linalg.norm(Y @ x - b))
    if b_norm > 0.0 and residual > 1e-12 * b_norm:
        raise TopologyError(
            f"ill-conditioned network at {f} Hz: residual {residual:.3e} "
            f"exceeds 1e-12 * |b| = {1e-12 * b_norm:.3e}"
        )
    return x


def _output_voltage(net: Network, x: np.ndarray) -> complex:
    pos, neg = net.output
    v_pos = x[pos - 1] if pos > 0 else 0.0
    v_neg = x[neg - 1] if neg > 0 else 0.0
    return complex(v_pos - v_neg)


def ac_solve(net: Network, f: float, injected: Injection) -> complex:
    """Complex voltage at the output pair for a single injected source."""
    if f <= 0.0:
        raise ValueError("frequency must be positive")
    return _output_voltage(net, _solve(net, f, _injection_vector(net, f, injected)))


def _stamp_current_density(net: Network, stamp: NoiseStamp, f: float) -> float:
    elem = net.element(stamp.element)
    if stamp.kind == "thermal":
        return math.sqrt(4.0 * constants.K_B * stamp.value / elem.ohms)
    if stamp.kind == "shot":
        return shot_current_density(stamp.value)
    if stamp.kind == "flat_current":
        return stamp.value
    # flat_voltage: Norton-transform through the element's admittance
    return stamp.value * abs(_admittance(elem, f))


def noise_solve(net: Network, f: float) -> float:
    """Output-referred noise density in V/rtHz at frequency f.

    Each noise-stamped element contributes independently: its density is
    injected as a current across the element's terminals, the transfer to
    the output pair is solved, and the contributions add in power.
    """
    if f <= 0.0:
        raise ValueError("frequency must be positive")
    if not net.stamps:
        raise ValueError("network has no noise stamps")
    power = 0.0
    for stamp in net.stamps:
        elem = net.element(stamp.element)
        nodes = _element_nodes(elem)[:2]
        density = _stamp_current_density(net, stamp, f)
        transfer = ac_solve(net, f, CurrentInjection(nodes[0], nodes[1], 1.0))
        power += (density * abs(transfer)) ** 2
    return math.sqrt(power)
