"""Token and alphabet types.

Tokens are tagged values.  They are NamedTuples rather than dataclasses
because equality and hashing sit on the hot path of the simulator.
"""

from typing import NamedTuple

from .errors import MalformedEncoding


class Token(NamedTuple):
    kind: str
    payload: tuple = ()

    def __repr__(self):
        if not self.payload:
            return self.kind.upper() if self.kind in ("halt", "blank", "carry", "divider") else self.kind
        return "%s%r" % (self.kind, self.payload)


def bit(v):
    assert v in (0, 1)
    return Token("bit", (v,))


def intval(v):
    return Token("int", (v,))


def node(i):
    return Token("node", (i,))


def edge(u, v):
    return Token("edge", (u, v))


def search_mark(cur, nd, visited, active):
    return Token("mark", (cur, nd, visited, active))


def tape_sym(sym, heads=frozenset()):
    """One TM tape cell: symbol plus the set of (tape, head) pairs parked on it."""
    return Token("tape", (sym, frozenset(heads)))


def tm_state(q):
    return Token("state", (q,))


CARRY = Token("carry")
BLANK = Token("blank")
DIVIDER = Token("divider")
HALT = Token("halt")

BIT0 = bit(0)
BIT1 = bit(1)


class Alphabet:
    """A named finite token set split into input part (sigma) and CoT part (gamma).

    The CoT alphabet must stay within a constant factor of the input
    alphabet (gamma_size <= C * sigma_size).
    """

    def __init__(self, name, sigma, gamma, C=8):
        self.name = name
        self.sigma = tuple(sigma)
        self.gamma = tuple(gamma)
        self.C = C
        if HALT in self.sigma:
            raise MalformedEncoding("halt symbol cannot be part of the input alphabet")
        if HALT not in self.gamma:
            raise MalformedEncoding("CoT alphabet must contain the halt symbol")
        if self.gamma_size > C * self.sigma_size:
            raise MalformedEncoding(
                "gamma size %d exceeds %d * sigma size %d"
                % (self.gamma_size, C, self.sigma_size))

    @property
    def sigma_size(self):
        return len(self.sigma)

    @property
    def gamma_size(self):
        return len(self.gamma)

    def __contains__(self, tok):
        return tok in self.sigma or tok in self.gamma


def token_to_json(tok):
    if tok.kind == "tape":
        sym, heads = tok.payload
        return {"kind": "tape", "sym": sym, "heads": sorted(heads)}
    return {"kind": tok.kind, "payload": list(tok.payload)}


def token_from_json(obj):
    if obj["kind"] == "tape":
        return tape_sym(obj["sym"], frozenset(tuple(h) for h in obj["heads"]))
    return Token(obj["kind"], tuple(obj["payload"]))
