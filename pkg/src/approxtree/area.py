"""Circuit-area cost of a hardwired comparator, and tree-level totals.

A comparator computing (X <= T) against a constant T collapses, after
constant propagation, to a chain of AND/OR gates whose shape depends on
the bit pattern of T. That makes area a non-linear function of the
threshold value: some constants are much cheaper to hardwire than others.
The analytical model prices that simplified chain with configurable gate
weights; a measurement LUT can replace it when synthesized data exists.
Tree area is the sum over comparators (routing logic excluded: it is
constant across candidates for a fixed tree).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .quantizer import QuantizedTree


@dataclass(frozen=True)
class GateWeights:
    """Unit costs in gate equivalents."""

    inv: float = 1.0
    and2: float = 2.0
    or2: float = 2.0

    def __post_init__(self):
        if min(self.inv, self.and2, self.or2) <= 0:
            raise InputError("gate weights must be positive")


def analytical_area(p: int, thr: int, w: GateWeights = GateWeights()) -> float:
    """Gate cost of the constant-propagated predicate (X <= T), X unsigned p-bit.

    Built LSB to MSB on the greater-than carry: start from constant false;
    at a bit where T has a 1 the carry is ANDed with that input bit, at a 0
    it is ORed. A constant-false carry absorbs the AND (still constant) and
    turns the OR into a wire, so bits below the lowest 0 of T are free; the
    all-ones threshold never leaves the constant and costs nothing.
    """
    if not 0 <= thr <= (1 << p) - 1:
        raise InputError(f"threshold {thr} not representable in {p} bits")
    total = 0.0
    carry_const = True  # greater-than carry still constant false
    for i in range(p):
        bit = (thr >> i) & 1
        if carry_const:
            if bit == 0:
                carry_const = False  # carry becomes the input bit: a wire
        else:
            total += w.and2 if bit else w.or2
    if carry_const:
        return 0.0  # predicate is constant true
    return total + w.inv


@dataclass(frozen=True)
class AreaLut:
    """Measured comparator areas keyed by (precision, integer threshold)."""

    table: dict[tuple[int, int], float]
    precisions: tuple[int, ...]
    unit: str = "GE"

    def __post_init__(self):
        for p in self.precisions:
            for t in range(1 << p):
                if (p, t) not in self.table:
                    raise InputError(f"area LUT missing entry for precision {p}, threshold {t}")
        for (p, t), a in self.table.items():
            if not (a >= 0 and a == a and a != float("inf")):
                raise InputError(f"invalid area {a} at precision {p}, threshold {t}")


def lut_load(path) -> AreaLut:
    """Load a "precision,threshold,area" CSV, optionally preceded by a
    "# unit: <label>" comment line."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except FileNotFoundError:
        raise InputError(f"area LUT not found: {path}") from None

    unit = "GE"
    table: dict[tuple[int, int], float] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.lower().startswith("unit:"):
                unit = body[5:].strip()
            continue
        parts = [c.strip() for c in line.split(",")]
        if parts == ["precision", "threshold", "area"]:
            continue
        if len(parts) != 3:
            raise InputError(f"LUT line {lineno}: expected 3 columns, got {len(parts)}")
        try:
            p, t, a = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise InputError(f"LUT line {lineno}: non-numeric entry") from None
        if a < 0:
            raise InputError(f"LUT line {lineno}: negative area {a}")
        if (p, t) in table:
            raise InputError(f"LUT line {lineno}: duplicate entry for ({p}, {t})")
        table[(p, t)] = a

    if not table:
        raise InputError(f"area LUT is empty: {path}")
    precisions = tuple(sorted({p for p, _ in table}))
    return AreaLut(table=table, precisions=precisions, unit=unit)


def comparator_area(model, p: int, thr: int) -> float:
    """Area of one comparator under either model kind."""
    if isinstance(model, AreaLut):
        try:
            return model.table[(p, thr)]
        except KeyError:
            raise InputError(f"area LUT does not cover precision {p}, threshold {thr}") from None
    return analytical_area(p, thr, model)


def tree_area(qtree: QuantizedTree, model) -> float:
    return sum(
        comparator_area(model, qtree.precisions[i], qtree.int_thresholds[i])
        for i in qtree.tree.split_ids
    )
