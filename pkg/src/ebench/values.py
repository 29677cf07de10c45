"""Finite set-theoretic values: atoms, naturals, pairs and finite sets.

Values are immutable and totally ordered; finite sets keep their elements in
canonical order, so structurally equal values always render to the same text.
The canonical text (format version ``ebv1``) doubles as the hashing key and as
the wire format of the animator service; it is documented in
docs/serialization.md and is a strict subset of the model language's
expression syntax, so any rendered value can be pasted back into a model file.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional

from .errors import EvalTypeError, NotAFunction, OutOfDomain

SERIAL_VERSION = "ebv1"

# rank components of the total order
_RANK_NAT = 0
_RANK_ATOM = 1
_RANK_PAIR = 2
_RANK_SET = 3


class Value:
    """Base class; concrete values are Nat, Atom, Pair and FinSet."""

    __slots__ = ("_key", "_hash")

    _key: tuple
    _hash: int

    def sort_key(self) -> tuple:
        return self._key

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Value) and self._key == other._key

    def __lt__(self, other: "Value") -> bool:
        return self._key < other._key

    def __le__(self, other: "Value") -> bool:
        return self._key <= other._key

    def __repr__(self) -> str:
        return canonical_text(self)


class Nat(Value):
    __slots__ = ("n",)

    def __init__(self, n: int):
        if n < 0:
            raise EvalTypeError(f"naturals cannot be negative: {n}")
        self.n = n
        self._key = (_RANK_NAT, n)
        self._hash = hash(self._key)


class Atom(Value):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._key = (_RANK_ATOM, name)
        self._hash = hash(self._key)


class Pair(Value):
    __slots__ = ("left", "right")

    def __init__(self, left: Value, right: Value):
        self.left = left
        self.right = right
        self._key = (_RANK_PAIR, left._key, right._key)
        self._hash = hash(self._key)


class FinSet(Value):
    """Duplicate-free finite set; elements held sorted in canonical order."""

    __slots__ = ("elements",)

    def __init__(self, elements: Iterable[Value] = ()):
        elems = sorted(elements, key=Value.sort_key)
        dedup = []
        prev_key = None
        for e in elems:
            if e._key != prev_key:
                dedup.append(e)
                prev_key = e._key
        self.elements = tuple(dedup)
        self._key = (_RANK_SET, len(self.elements)) + tuple(e._key for e in self.elements)
        self._hash = hash(self._key)

    def __iter__(self) -> Iterator[Value]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, v: Value) -> bool:
        # binary search over the sorted element keys
        lo, hi = 0, len(self.elements)
        key = v._key
        while lo < hi:
            mid = (lo + hi) // 2
            if self.elements[mid]._key < key:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(self.elements) and self.elements[lo]._key == key


EMPTY_SET = FinSet()
TRUE = Atom("TRUE")
FALSE = Atom("FALSE")


def boolean(b: bool) -> Atom:
    return TRUE if b else FALSE


# ---------------------------------------------------------------------------
# functions-as-pair-sets


def is_function(v: Value) -> bool:
    """True iff v is a finite set of pairs with pairwise distinct lefts."""
    if not isinstance(v, FinSet):
        return False
    seen = set()
    for e in v.elements:
        if not isinstance(e, Pair):
            return False
        if e.left._key in seen:
            return False
        seen.add(e.left._key)
    return True


def apply_function(f: Value, x: Value) -> Value:
    """Return the unique b with (x |-> b) in f.

    Raises NotAFunction if f is not functional, OutOfDomain if x has no image.
    """
    if not isinstance(f, FinSet):
        raise NotAFunction(f"cannot apply non-set value {f!r}")
    result: Optional[Value] = None
    for e in f.elements:
        if not isinstance(e, Pair):
            raise NotAFunction(f"cannot apply relation containing non-pair {e!r}")
        if e.left == x:
            if result is not None:
                raise NotAFunction(f"two images for {x!r}")
            result = e.right
    # functionality must hold on the whole set, not just at x
    seen = set()
    for e in f.elements:
        if e.left._key in seen:
            raise NotAFunction(f"duplicate left component {e.left!r}")
        seen.add(e.left._key)
    if result is None:
        raise OutOfDomain(f"{x!r} not in domain of {f!r}")
    return result


def fun_domain(v: FinSet) -> FinSet:
    return FinSet(e.left for e in v.elements if isinstance(e, Pair))


def fun_range(v: FinSet) -> FinSet:
    return FinSet(e.right for e in v.elements if isinstance(e, Pair))


# ---------------------------------------------------------------------------
# canonical text


def canonical_text(v: Value) -> str:
    """Render v in canonical ebv1 text (model-language literal syntax)."""
    if isinstance(v, Nat):
        return str(v.n)
    if isinstance(v, Atom):
        return v.name
    if isinstance(v, Pair):
        return f"({canonical_text(v.left)} |-> {canonical_text(v.right)})"
    if isinstance(v, FinSet):
        return "{" + ", ".join(canonical_text(e) for e in v.elements) + "}"
    raise EvalTypeError(f"not a value: {v!r}")


def canonical_bytes(v: Value) -> bytes:
    return (SERIAL_VERSION + ":" + canonical_text(v)).encode("utf-8")


# ---------------------------------------------------------------------------
# canonical text parser (round-trip for serialization)


class _ValueReader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, what: str) -> Exception:
        return ValueError(f"bad value text at offset {self.pos}: expected {what}")

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\n":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, lit: str) -> None:
        self.skip_ws()
        if not self.text.startswith(lit, self.pos):
            raise self.error(repr(lit))
        self.pos += len(lit)

    def value(self) -> Value:
        c = self.peek()
        if c == "{":
            self.expect("{")
            elems = []
            if self.peek() != "}":
                elems.append(self.value())
                while self.peek() == ",":
                    self.expect(",")
                    elems.append(self.value())
            self.expect("}")
            return FinSet(elems)
        if c == "(":
            self.expect("(")
            left = self.value()
            self.expect("|->")
            right = self.value()
            self.expect(")")
            return Pair(left, right)
        if c.isdigit():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            return Nat(int(self.text[start : self.pos]))
        if c.isalpha() or c == "_":
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self.pos += 1
            return Atom(self.text[start : self.pos])
        raise self.error("a value")


def parse_value(text: str) -> Value:
    """Parse canonical (or equivalent) value text back into a Value."""
    reader = _ValueReader(text)
    v = reader.value()
    reader.skip_ws()
    if reader.pos != len(reader.text):
        raise reader.error("end of text")
    return v


def parse_value_bytes(data: bytes) -> Value:
    text = data.decode("utf-8")
    prefix = SERIAL_VERSION + ":"
    if not text.startswith(prefix):
        raise ValueError(f"unknown serialization version in {text[:12]!r}")
    return parse_value(text[len(prefix) :])
