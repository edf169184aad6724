"""
Finite group model for harmonic_bimodules.

A group is stored as its Cayley table with the identity pinned to index 0.
Haar measure is the counting measure and the modular function is identically
one, so the regular representations below are plain permutation matrices.
"""

import itertools
import json
import logging
import math
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Dict, Hashable, List, Sequence, Tuple

import numpy as np

from ..exceptions import GroupAxiomException, GroupFormatException, GroupSizeException

logger = logging.getLogger(__name__)

DEFAULT_MAX_ORDER = 64


@dataclass(frozen=True)
class GroupElement:
    """
    Index of an element inside its owning group.

    Attributes:
        index: Position in the Cayley table, 0 is the identity.
    """

    index: int

    def __repr__(self) -> str:
        return f"GroupElement(index={self.index!r})"


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """
    Finite group given by its Cayley table.

    Attributes:
        table: n x n integer array, table[i, j] is the index of g_i * g_j.
        labels: Display strings of the elements.
        name: Short name used in reports (e.g. "S3").
    """

    table: np.ndarray
    labels: Tuple[str, ...]
    name: str = "G"

    def __post_init__(self) -> None:
        table = np.array(self.table, dtype=int)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    def element(self, index: int) -> GroupElement:
        """Return the element with the given index, checking the bound."""
        if not 0 <= int(index) < self.order:
            raise IndexError(f"Element index {index} outside [0, {self.order}).")
        return GroupElement(int(index))

    def elements(self) -> List[GroupElement]:
        return [GroupElement(i) for i in range(self.order)]

    def multiply(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    @cached_property
    def inverses(self) -> np.ndarray:
        """inverses[i] is the index of g_i^{-1}."""
        rows, cols = np.nonzero(self.table == 0)
        inv = np.empty(self.order, dtype=int)
        inv[rows] = cols
        inv.setflags(write=False)
        return inv

    def inverse(self, a: int) -> int:
        return int(self.inverses[a])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def conjugacy_classes(self) -> List[List[int]]:
        """Conjugacy classes as sorted index lists, ordered by smallest member."""
        seen: set = set()
        classes = []
        for g in range(self.order):
            if g in seen:
                continue
            cls = sorted({int(self.table[self.table[h, g], self.inverses[h]]) for h in range(self.order)})
            seen.update(cls)
            classes.append(cls)
        return classes

    def generated_subgroup(self, generators: Sequence[int]) -> List[int]:
        """Indices of the subgroup generated by `generators`."""
        members = {0}
        frontier = [0]
        gens = [int(g) for g in generators]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = int(self.table[x, g])
                if y not in members:
                    members.add(y)
                    frontier.append(y)
        return sorted(members)

    # -------------------------------------------------------------------------
    # Regular representations
    # -------------------------------------------------------------------------

    @cached_property
    def left_regular_all(self) -> np.ndarray:
        """Array (n, n, n); entry [s] is the matrix of lambda_s."""
        n = self.order
        mats = np.zeros((n, n, n), dtype=complex)
        rows = np.arange(n)
        for s in range(n):
            mats[s, rows, self.table[self.inverses[s], rows]] = 1.0
        mats.setflags(write=False)
        return mats

    @cached_property
    def right_regular_all(self) -> np.ndarray:
        """Array (n, n, n); entry [r] is the matrix of rho_r."""
        n = self.order
        mats = np.zeros((n, n, n), dtype=complex)
        rows = np.arange(n)
        for r in range(n):
            mats[r, rows, self.table[rows, r]] = 1.0
        mats.setflags(write=False)
        return mats

    # -------------------------------------------------------------------------
    # Validation
    # -------------------------------------------------------------------------

    def validate(self) -> None:
        """
        Check the group axioms on the Cayley table.

        Raises:
            GroupAxiomException: naming the first failing entry or triple.
        """
        t = self.table
        n = t.shape[0]
        if t.ndim != 2 or t.shape != (n, n) or n == 0:
            raise GroupAxiomException(f"Cayley table must be square and non-empty, got shape {t.shape}.")
        if len(self.labels) != n:
            raise GroupAxiomException(f"Expected {n} labels, got {len(self.labels)}.")

        bad = np.argwhere((t < 0) | (t >= n))
        if bad.size:
            i, j = bad[0]
            raise GroupAxiomException(f"Closure fails: table[{i}][{j}] = {t[i, j]} outside [0, {n}).")

        for j in range(n):
            if t[0, j] != j or t[j, 0] != j:
                raise GroupAxiomException(
                    f"Identity fails at index {j}: table[0][{j}] = {t[0, j]}, table[{j}][0] = {t[j, 0]}."
                )

        zero_counts = np.sum(t == 0, axis=1)
        for i in range(n):
            if zero_counts[i] != 1:
                raise GroupAxiomException(
                    f"Inverse fails for element {i}: {zero_counts[i]} entries of row {i} equal the identity."
                )

        left = t[t, :]  # left[i, j, k] = (g_i g_j) g_k
        right = t[:, t]  # right[i, j, k] = g_i (g_j g_k)
        bad = np.argwhere(left != right)
        if bad.size:
            i, j, k = bad[0]
            raise GroupAxiomException(
                f"Associativity fails for triple ({i}, {j}, {k}): "
                f"(g{i} g{j}) g{k} = {left[i, j, k]} but g{i} (g{j} g{k}) = {right[i, j, k]}."
            )
        logger.debug("Group %s of order %d passed axiom checks", self.name, n)

    # -------------------------------------------------------------------------
    # Serialization / JSON handling
    # -------------------------------------------------------------------------

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "order": self.order,
            "labels": list(self.labels),
            "table": self.table.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def save_to_file(self, filepath: str | Path) -> None:
        Path(filepath).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load_from_file(cls, filepath: str | Path) -> "FiniteGroup":
        path = Path(filepath)
        return load_group(path.read_bytes(), default_name=path.stem)

    def __repr__(self) -> str:
        return f"FiniteGroup(name={self.name!r}, order={self.order!r})"


# ----------------------------------------------------------------------
# Loading
# ----------------------------------------------------------------------
def load_group(source: bytes | str, default_name: str = "G") -> FiniteGroup:
    """
    Parse a group file and check the axioms.

    Args:
        source: UTF-8 JSON document {"order": n, "labels": [...], "table": [[...]]}.
        default_name: Name used when the document has no "name" field.

    Raises:
        GroupFormatException: The document is not a valid group file.
        GroupAxiomException: The table is not a group with identity at index 0.
    """
    try:
        text = source.decode("utf-8") if isinstance(source, bytes) else source
        data = json.loads(text)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise GroupFormatException(f"Group file is not valid UTF-8 JSON: {e}")

    if not isinstance(data, dict) or "table" not in data:
        raise GroupFormatException("Group file must be an object with a 'table' field.")

    table = data["table"]
    if not isinstance(table, list) or not all(isinstance(row, list) for row in table):
        raise GroupFormatException("'table' must be a list of lists.")
    n = len(table)
    if any(len(row) != n for row in table):
        raise GroupFormatException("'table' must be square.")
    if not all(isinstance(x, int) and not isinstance(x, bool) for row in table for x in row):
        raise GroupFormatException("'table' entries must be integers.")
    if "order" in data and data["order"] != n:
        raise GroupFormatException(f"'order' is {data['order']} but the table has {n} rows.")

    labels = data.get("labels", [str(i) for i in range(n)])
    if not isinstance(labels, list):
        raise GroupFormatException("'labels' must be a list of strings.")

    group = FiniteGroup(
        table=np.array(table, dtype=int).reshape(n, n),
        labels=tuple(str(x) for x in labels),
        name=str(data.get("name", default_name)),
    )
    group.validate()
    return group


# ----------------------------------------------------------------------
# Builtin families
# ----------------------------------------------------------------------
def _from_elements(
    elements: Sequence[Hashable],
    multiply: Callable[[Hashable, Hashable], Hashable],
    labels: Sequence[str],
    name: str,
) -> FiniteGroup:
    """Build a Cayley table; elements[0] must be the identity."""
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    table = np.empty((n, n), dtype=int)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            table[i, j] = index[multiply(a, b)]
    return FiniteGroup(table=table, labels=tuple(labels), name=name)


def _check_order(order: int, max_order: int, kind: str) -> None:
    if order > max_order:
        raise GroupSizeException(f"{kind} has order {order}, above the cap {max_order}.")


def cyclic(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic n requires n >= 1")
    _check_order(n, max_order, f"cyclic {n}")
    name = "trivial" if n == 1 else f"Z{n}"
    return _from_elements(list(range(n)), lambda a, b: (a + b) % n, [str(i) for i in range(n)], name)


def dihedral(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Symmetries of the regular n-gon, order 2n; elements r^k s^e."""
    if n < 1:
        raise ValueError("dihedral n requires n >= 1")
    _check_order(2 * n, max_order, f"dihedral {n}")
    elements = [(k, e) for e in (0, 1) for k in range(n)]

    def mul(a, b):
        (k1, e1), (k2, e2) = a, b
        return ((k1 + (-1) ** e1 * k2) % n, (e1 + e2) % 2)

    labels = [(f"r{k}" if k else "") + ("s" if e else "") or "e" for k, e in elements]
    return _from_elements(elements, mul, labels, f"D{n}")


def symmetric(k: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if not 1 <= k <= 5:
        raise ValueError("symmetric k requires 1 <= k <= 5")
    _check_order(math.factorial(k), max_order, f"symmetric {k}")
    elements = list(itertools.permutations(range(k)))

    def mul(p, q):
        return tuple(p[q[x]] for x in range(k))

    labels = ["[" + ",".join(str(x) for x in p) + "]" for p in elements]
    return _from_elements(elements, mul, labels, f"S{k}")


_QUATERNION_UNITS = {
    # (a, b) -> (sign, c) with units 0=1, 1=i, 2=j, 3=k
    (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
    (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
    (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
    (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
}


def quaternion8(max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    _check_order(8, max_order, "quaternion8")
    elements = [(sign, unit) for unit in range(4) for sign in (1, -1)]

    def mul(a, b):
        sign, unit = _QUATERNION_UNITS[(a[1], b[1])]
        return (a[0] * b[0] * sign, unit)

    names = "1ijk"
    labels = [("-" if sign < 0 else "") + names[unit] for sign, unit in elements]
    return _from_elements(elements, mul, labels, "Q8")


def product(a: FiniteGroup, b: FiniteGroup, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Direct product; element (i, j) sits at index i * |b| + j."""
    _check_order(a.order * b.order, max_order, f"product({a.name},{b.name})")
    elements = [(i, j) for i in range(a.order) for j in range(b.order)]

    def mul(x, y):
        return (a.multiply(x[0], y[0]), b.multiply(x[1], y[1]))

    labels = [f"({a.labels[i]},{b.labels[j]})" for i, j in elements]
    return _from_elements(elements, mul, labels, f"{a.name}x{b.name}")


def klein4(max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    group = product(cyclic(2), cyclic(2), max_order=max_order)
    return FiniteGroup(table=group.table, labels=("e", "a", "b", "ab"), name="klein4")


BUILTIN_GROUPS = {
    "trivial": lambda cap: cyclic(1, cap),
    "Z2": lambda cap: cyclic(2, cap),
    "Z3": lambda cap: cyclic(3, cap),
    "Z4": lambda cap: cyclic(4, cap),
    "Z5": lambda cap: cyclic(5, cap),
    "Z6": lambda cap: cyclic(6, cap),
    "Z7": lambda cap: cyclic(7, cap),
    "Z8": lambda cap: cyclic(8, cap),
    "klein4": klein4,
    "S3": lambda cap: symmetric(3, cap),
    "D4": lambda cap: dihedral(4, cap),
    "Q8": quaternion8,
    "Z2xZ4": lambda cap: product(cyclic(2), cyclic(4), cap),
}

_CYCLIC = re.compile(r"^(?:Z|cyclic)(\d+)$", re.IGNORECASE)
_DIHEDRAL = re.compile(r"^(?:D|dihedral)(\d+)$", re.IGNORECASE)
_SYMMETRIC = re.compile(r"^(?:S|symmetric)(\d+)$", re.IGNORECASE)


def make_builtin(kind: str, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """
    Build a group from a short spec.

    Accepted forms: "trivial", "Zn"/"cyclicn", "Dn"/"dihedraln" (order 2n),
    "Sk"/"symmetrick", "Q8"/"quaternion8", "klein4"/"V4", and products
    joined by "x" such as "Z2xZ4".

    Raises:
        GroupSizeException: The order exceeds `max_order`.
        ValueError: The spec is not recognised.
    """
    spec = kind.strip()
    lowered = spec.lower()
    if lowered == "trivial":
        return cyclic(1, max_order)
    if lowered in ("q8", "quaternion8"):
        return quaternion8(max_order)
    if lowered in ("klein4", "v4"):
        return klein4(max_order)
    if m := _CYCLIC.match(spec):
        return cyclic(int(m.group(1)), max_order)
    if m := _DIHEDRAL.match(spec):
        return dihedral(int(m.group(1)), max_order)
    if m := _SYMMETRIC.match(spec):
        return symmetric(int(m.group(1)), max_order)
    if "x" in lowered:
        factors = [make_builtin(part, max_order) for part in re.split(r"[xX]", spec) if part]
        if len(factors) < 2:
            raise ValueError(f"Unrecognised group spec: {kind!r}")
        result = factors[0]
        for factor in factors[1:]:
            result = product(result, factor, max_order)
        return result
    raise ValueError(f"Unrecognised group spec: {kind!r}")


def resolve_group(spec: str, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """A builtin spec, or a path to a group file when `spec` ends in .json."""
    if spec.endswith(".json"):
        group = FiniteGroup.load_from_file(spec)
        _check_order(group.order, max_order, spec)
        return group
    return make_builtin(spec, max_order)


# ----------------------------------------------------------------------
# Regular representations
# ----------------------------------------------------------------------
def left_regular(group: FiniteGroup, s: GroupElement | int) -> np.ndarray:
    """Permutation matrix of (lambda_s f)(t) = f(s^{-1} t)."""
    index = s.index if isinstance(s, GroupElement) else int(s)
    group.element(index)
    return np.array(group.left_regular_all[index])


def right_regular(group: FiniteGroup, r: GroupElement | int) -> np.ndarray:
    """Permutation matrix of (rho_r f)(s) = f(s r)."""
    index = r.index if isinstance(r, GroupElement) else int(r)
    group.element(index)
    return np.array(group.right_regular_all[index])
