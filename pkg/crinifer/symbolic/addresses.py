"""
External and signed addresses, the shift, and the orders at infinity
"""
import functools
import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from ..maps.branches import SIDE_DIRECTION, SIDE_SIGN
from ..utils.errors import AddressError, AddressSyntaxError, UndeterminedOrderError
from ..utils.helpers import ccw_offset, is_cyclically_ordered
from ..utils.models import Ordering, Sign

_LETTER_TOKEN = re.compile(r"^(?P<side>[RLUD])(?P<k>-?\d+)?$")
_INTEGER_TOKEN = re.compile(r"^-?\d+$")


@dataclass(frozen=True, order=False)
class Symbol:
    """A fundamental domain label: side of the plane and branch index"""
    side: str
    branch: int = 0

    @property
    def kind(self) -> str:
        if self.side == "":
            return "exp"
        return "cosh" if self.side in ("R", "L") else "sin"

    def __str__(self) -> str:
        if self.side == "":
            return str(self.branch)
        return self.side + (str(self.branch) if self.branch else "")

    def __repr__(self) -> str:
        return f"Symbol({self})"


def parse_symbol(token: str) -> Symbol:
    """Parse one symbol token such as 'R', 'L-1', 'D2' or '-3'"""
    match = _LETTER_TOKEN.match(token)
    if match:
        return Symbol(match.group("side"), int(match.group("k") or 0))
    if _INTEGER_TOKEN.match(token):
        return Symbol("", int(token))
    raise ValueError(f"invalid symbol {token!r}")


def _primitive(word: Tuple[Symbol, ...]) -> Tuple[Symbol, ...]:
    n = len(word)
    for period in range(1, n + 1):
        if n % period == 0 and word == word[:period] * (n // period):
            return word[:period]
    return word


@dataclass(frozen=True, eq=False)
class ExternalAddress:
    """A finite symbol prefix followed by an optional periodic tail"""
    prefix: Tuple[Symbol, ...] = ()
    tail: Tuple[Symbol, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "tail", tuple(self.tail))
        if not self.prefix and not self.tail:
            raise AddressError("address needs at least one symbol", 0)
        kinds = {s.kind for s in self.prefix + self.tail}
        if len(kinds) > 1:
            raise ValueError(f"address mixes symbol families {sorted(kinds)}")

    @property
    def kind(self) -> str:
        return (self.prefix + self.tail)[0].kind

    @property
    def is_periodic(self) -> bool:
        return bool(self.tail)

    @property
    def period(self) -> Optional[int]:
        return len(self.tail) if self.tail else None

    @property
    def depth(self) -> Optional[int]:
        """Truncation depth of a finite address; None with a periodic tail"""
        return None if self.tail else len(self.prefix)

    def symbol(self, n: int) -> Symbol:
        """The n-th symbol F_n"""
        if n < 0:
            raise AddressError("negative symbol index", n)
        if n < len(self.prefix):
            return self.prefix[n]
        if not self.tail:
            raise AddressError("index beyond truncation depth", n)
        return self.tail[(n - len(self.prefix)) % len(self.tail)]

    def symbols(self, count: int) -> List[Symbol]:
        return [self.symbol(n) for n in range(count)]

    def available(self, count: int) -> int:
        """How many of the first `count` symbols exist"""
        if self.tail:
            return count
        return min(count, len(self.prefix))

    def shift(self) -> "ExternalAddress":
        """Drop F_0; periodic tails rotate"""
        if self.prefix:
            if len(self.prefix) == 1 and not self.tail:
                raise AddressError("cannot shift a depth-1 finite address", 1)
            return ExternalAddress(self.prefix[1:], self.tail)
        return ExternalAddress((), self.tail[1:] + self.tail[:1])

    def shifted(self, times: int) -> "ExternalAddress":
        address = self
        for _ in range(times):
            address = address.shift()
        return address

    def truncate(self, depth: int) -> "ExternalAddress":
        """Finite address of the first `depth` symbols"""
        if depth < 1:
            raise AddressError("truncation depth must be at least 1", depth)
        return ExternalAddress(tuple(self.symbols(self.available(depth))))

    def normalized(self) -> "ExternalAddress":
        """Shortest prefix and primitive tail describing the same sequence"""
        if not self.tail:
            return self
        tail = _primitive(self.tail)
        prefix = list(self.prefix)
        while prefix and prefix[-1] == tail[-1]:
            tail = (tail[-1],) + tail[:-1]
            prefix.pop()
        return ExternalAddress(tuple(prefix), tail)

    def _identity(self):
        normal = self.normalized()
        return normal.prefix, normal.tail

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExternalAddress):
            return NotImplemented
        return self._identity() == other._identity()

    def __hash__(self) -> int:
        return hash(self._identity())

    def __str__(self) -> str:
        parts = [str(s) for s in self.prefix]
        if self.tail:
            parts.append("(" + ".".join(str(s) for s in self.tail) + ")")
        return ".".join(parts)

    def __repr__(self) -> str:
        return f"ExternalAddress('{self}')"


def parse_address(literal: str) -> ExternalAddress:
    """Parse an address literal such as 'R.L.(R.L)' or '0.1.-1.(0)'"""
    text = literal
    if not text or not text.strip():
        raise AddressSyntaxError(literal, 0, "empty address")

    open_at = text.find("(")
    close_at = text.find(")")
    if open_at == -1:
        if close_at != -1:
            raise AddressSyntaxError(literal, close_at, "unbalanced ')'")
        prefix_text, tail_text, tail_offset = text, None, 0
    else:
        if text.count("(") > 1:
            raise AddressSyntaxError(literal, text.find("(", open_at + 1), "second '('")
        if close_at == -1:
            raise AddressSyntaxError(literal, len(text), "unterminated periodic tail")
        if close_at != len(text) - 1:
            raise AddressSyntaxError(literal, close_at + 1, "text after periodic tail")
        if open_at > 0 and text[open_at - 1] != ".":
            raise AddressSyntaxError(literal, open_at, "expected '.' before '('")
        prefix_text = text[:open_at - 1] if open_at > 0 else ""
        tail_text, tail_offset = text[open_at + 1:close_at], open_at + 1
        if not tail_text:
            raise AddressSyntaxError(literal, open_at + 1, "empty periodic tail")

    def tokens(chunk: str, offset: int) -> List[Symbol]:
        symbols = []
        position = offset
        for token in chunk.split("."):
            if not token:
                raise AddressSyntaxError(literal, position, "empty symbol")
            try:
                symbols.append(parse_symbol(token))
            except ValueError:
                raise AddressSyntaxError(literal, position, f"invalid symbol {token!r}") from None
            position += len(token) + 1
        return symbols

    prefix = tokens(prefix_text, 0) if prefix_text else []
    tail = tokens(tail_text, tail_offset) if tail_text is not None else []
    kinds = {s.kind for s in prefix + tail}
    if len(kinds) > 1:
        raise AddressSyntaxError(literal, 0, "symbols from different families")
    return ExternalAddress(tuple(prefix), tuple(tail))


@dataclass(frozen=True)
class SignedAddress:
    """An external address with a sign selecting one of two continuations"""
    address: ExternalAddress
    sign: Sign

    def shift(self) -> "SignedAddress":
        return SignedAddress(self.address.shift(), self.sign)

    def __str__(self) -> str:
        return f"{self.address}{self.sign.value}"


# -- orders ---------------------------------------------------------------

class _Delta:
    """The cut curve delta, the least element after cutting at infinity"""

    def __repr__(self) -> str:
        return "DELTA"


DELTA = _Delta()

DEFAULT_DELTA = {"cosh": -math.pi / 2, "sin": math.pi, "exp": math.pi}


class SymbolOrder:
    """Cyclic order of fundamental domains at infinity, cut at delta

    Each symbol maps to a key (angle of its tracts counter-clockwise from
    delta, position within that direction); keys order the domains linearly
    once the circle at infinity is cut at delta.
    """

    def __init__(self, delta_direction: float):
        self.delta_direction = float(delta_direction)

    def key(self, item) -> Tuple:
        if item is DELTA:
            return (-1.0, 0)
        symbol = getattr(item, "symbol", item)
        rank = round(ccw_offset(SIDE_DIRECTION[symbol.side], self.delta_direction), 9)
        return (rank, SIDE_SIGN[symbol.side] * symbol.branch)

    def compare_symbols(self, a: Symbol, b: Symbol) -> Ordering:
        ka, kb = self.key(a), self.key(b)
        if ka == kb:
            return Ordering.EQ
        return Ordering.LT if ka < kb else Ordering.GT

    def __repr__(self) -> str:
        return f"SymbolOrder(delta_direction={self.delta_direction!r})"


def default_order(kind: str) -> SymbolOrder:
    return SymbolOrder(DEFAULT_DELTA[kind])


def cyclic_order_at_infinity(f1, f2, f3, order: Optional[SymbolOrder] = None) -> bool:
    """True iff f2 lies between f1 and f3 in positive orientation"""
    if order is None:
        kind = next(getattr(f, "symbol", f).kind for f in (f1, f2, f3) if f is not DELTA)
        order = default_order(kind)
    k1, k2, k3 = order.key(f1), order.key(f2), order.key(f3)
    if len({k1, k2, k3}) < 3:
        raise ValueError("cyclic order needs three distinct elements")
    return is_cyclically_ordered(k1, k2, k3)


def lex_compare(
    a: ExternalAddress, b: ExternalAddress, order: Optional[SymbolOrder] = None
) -> Ordering:
    """Lexicographic order induced by cutting the cyclic order at delta"""
    if a.kind != b.kind:
        raise ValueError("addresses from different families are not comparable")
    order = order or default_order(a.kind)

    if a.is_periodic and b.is_periodic:
        limit = max(len(a.prefix), len(b.prefix)) + math.lcm(len(a.tail), len(b.tail))
        finite_limit = None
    else:
        depths = [d for d in (a.depth, b.depth) if d is not None]
        limit = min(depths)
        finite_limit = limit

    for n in range(limit):
        result = order.compare_symbols(a.symbol(n), b.symbol(n))
        if result is not Ordering.EQ:
            return result

    if finite_limit is None:
        return Ordering.EQ
    if a.depth is not None and a.depth == b.depth:
        return Ordering.EQ
    return Ordering.UNDETERMINED


def lex_key(order: Optional[SymbolOrder] = None):
    """sort key for addresses whose comparisons are all determined"""

    def compare(a: ExternalAddress, b: ExternalAddress) -> int:
        result = lex_compare(a, b, order)
        if result is Ordering.UNDETERMINED:
            raise UndeterminedOrderError(f"{a} and {b} undetermined at available depth")
        return {Ordering.LT: -1, Ordering.EQ: 0, Ordering.GT: 1}[result]

    return functools.cmp_to_key(compare)


def periodic_addresses(
    symbols: Sequence[Union[Symbol, str]], max_period: int, order: Optional[SymbolOrder] = None
) -> Iterator[ExternalAddress]:
    """All purely periodic addresses of period <= max_period, in lexicographic order"""
    if max_period < 1:
        raise ValueError("max_period must be at least 1")
    alphabet = [s if isinstance(s, Symbol) else parse_symbol(s) for s in symbols]
    found = []
    for period in range(1, max_period + 1):
        for word in itertools.product(alphabet, repeat=period):
            if _primitive(word) == word:
                found.append(ExternalAddress((), word))
    if not found:
        return iter(())
    order = order or default_order(found[0].kind)
    return iter(sorted(found, key=lex_key(order)))


def shift_closure(addresses: Iterable[ExternalAddress]) -> List[ExternalAddress]:
    """Addresses together with all their shifts (periodic addresses only)"""
    closure: List[ExternalAddress] = []
    pending = list(addresses)
    while pending:
        address = pending.pop(0).normalized()
        if address in closure:
            continue
        closure.append(address)
        if address.is_periodic:
            pending.append(address.shift())
    return closure
