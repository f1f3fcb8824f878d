"""Plain-text netlist ingestion for the nodal solver.

Grammar (one directive per line, whitespace-separated tokens, ``#``
starts a comment, blank lines ignored):

    R <name> <node+> <node-> <ohms>
    C <name> <node+> <node-> <farads>
    G <name> <out+> <out-> <ctrl+> <ctrl-> <gm>
    NOISE <element-name> <kind> <value>
    OUTPUT <node+> <node->

Noise kinds and their value argument:

    thermal <kelvin>          (resistors only)
    shot <amps>
    flat_current <A/rtHz>
    flat_voltage <V/rtHz>     (resistors or capacitors)

Directive keywords are case-insensitive.  Node indices are nonnegative
integers with 0 as ground.  Values are floats with an optional
case-sensitive engineering suffix from T G M k m u n p f
(e.g. ``1G`` = 1e9, ``12p`` = 12e-12).  Errors report line and column.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import ParseError, TopologyError
from .mna import VCCS, Capacitor, Network, NoiseStamp, Resistor

_SUFFIXES = {
    "T": 1e12,
    "G": 1e9,
    "M": 1e6,
    "k": 1e3,
    "m": 1e-3,
    "u": 1e-6,
    "n": 1e-9,
    "p": 1e-12,
    "f": 1e-15,
}

_TOKEN_RE = re.compile(r"\S+")


class _Token:
    __slots__ = ("text", "line", "column")

    def __init__(self, text: str, line: int, column: int):
        self.text = text
        self.line = line
        self.column = column


def _tokenize(line: str, lineno: int) -> list[_Token]:
    code = line.split("#", 1)[0]
    return [_Token(m.group(), lineno, m.start() + 1) for m in _TOKEN_RE.finditer(code)]


def parse_value(tok: _Token) -> float:
    text = tok.text
    suffix = 1.0
    if text and text[-1] in _SUFFIXES:
        suffix = _SUFFIXES[text[-1]]
        text = text[:-1]
    try:
        return float(text) * suffix
    except ValueError:
        raise ParseError(f"bad numeric value {tok.text!r}", tok.line, tok.column) from None


def _parse_node(tok: _Token) -> int:
    try:
        node = int(tok.text)
    except ValueError:
        raise ParseError(f"bad node index {tok.text!r}", tok.line, tok.column) from None
    if node < 0:
        raise ParseError(f"node index must be nonnegative, got {node}", tok.line, tok.column)
    return node


def _expect(tokens: list[_Token], count: int, usage: str) -> None:
    if len(tokens) != count:
        tok = tokens[0]
        raise ParseError(
            f"expected {count - 1} arguments after {tok.text!r} (usage: {usage})",
            tok.line,
            tok.column,
        )


def parse_netlist(text: str) -> Network:
    """Parse netlist source text into a :class:`Network`."""
    elements = []
    stamps = []
    output = None
    names = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokenize(raw, lineno)
        if not tokens:
            continue
        keyword = tokens[0].text.upper()
        if keyword == "R":
            _expect(tokens, 5, "R name n+ n- ohms")
            _check_fresh_name(tokens[1], names)
            elements.append(
                _build(Resistor, tokens[0], tokens[1].text,
                       _parse_node(tokens[2]), _parse_node(tokens[3]), parse_value(tokens[4]))
            )
        elif keyword == "C":
            _expect(tokens, 5, "C name n+ n- farads")
            _check_fresh_name(tokens[1], names)
            elements.append(
                _build(Capacitor, tokens[0], tokens[1].text,
                       _parse_node(tokens[2]), _parse_node(tokens[3]), parse_value(tokens[4]))
            )
        elif keyword == "G":
            _expect(tokens, 7, "G name out+ out- ctrl+ ctrl- gm")
            _check_fresh_name(tokens[1], names)
            elements.append(
                _build(VCCS, tokens[0], tokens[1].text,
                       _parse_node(tokens[2]), _parse_node(tokens[3]),
                       _parse_node(tokens[4]), _parse_node(tokens[5]), parse_value(tokens[6]))
            )
        elif keyword == "NOISE":
            _expect(tokens, 4, "NOISE element kind value")
            if tokens[1].text not in names:
                raise ParseError(
                    f"noise stamp references unknown element {tokens[1].text!r}",
                    tokens[1].line,
                    tokens[1].column,
                )
            kind = tokens[2].text.lower()
            stamps.append(
                _build(NoiseStamp, tokens[2], tokens[1].text, kind, parse_value(tokens[3]))
            )
        elif keyword == "OUTPUT":
            _expect(tokens, 3, "OUTPUT n+ n-")
            if output is not None:
                raise ParseError("duplicate OUTPUT directive", tokens[0].line, tokens[0].column)
            output = (_parse_node(tokens[1]), _parse_node(tokens[2]))
        else:
            raise ParseError(
                f"unknown directive {tokens[0].text!r}", tokens[0].line, tokens[0].column
            )
        if keyword in ("R", "C", "G"):
            names.add(tokens[1].text)

    if output is None:
        raise ParseError("missing OUTPUT directive")
    try:
        return Network(elements=tuple(elements), output=output, stamps=tuple(stamps))
    except (ValueError, TopologyError) as exc:
        raise ParseError(str(exc)) from exc


def _check_fresh_name(tok: _Token, names: set[str]) -> None:
    if tok.text in names:
        raise ParseError(f"duplicate element name {tok.text!r}", tok.line, tok.column)


def _build(cls, tok: _Token, *args):
    try:
        return cls(*args)
    except ValueError as exc:
        raise ParseError(str(exc), tok.line, tok.column) from exc


def load_netlist(path: str | Path) -> Network:
    """Read and parse a netlist file."""
    return parse_netlist(Path(path).read_text(encoding="utf-8"))
