"""Finite groups as validated Cayley tables, plus the built-in group zoo.

Elements are integers 0..n-1 with 0 the identity; table[a, b] is the product
a*b. Groups are immutable once constructed and hashable by table bytes.
"""
from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import BudgetExceeded, IdentityNotZero, NotAGroup, ValidationError
from .linalg import invariant_factors, row_hnf

MAX_ORDER = 1024


class FiniteGroup:
    """A finite group given by its full multiplication table."""

    __slots__ = ("order", "table", "inv", "element_orders", "_hash", "_gens", "name")

    def __init__(self, table: np.ndarray, name: str = "", validate: bool = True):
        table = np.asarray(table, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise NotAGroup("table must be square")
        n = table.shape[0]
        if n == 0 or n > MAX_ORDER:
            raise NotAGroup(f"order must be in 1..{MAX_ORDER}")
        if table.min() < 0 or table.max() >= n:
            raise NotAGroup("table entries out of range")
        self.order = n
        self.table = table
        self.name = name
        if validate:
            self._validate()
        inv = np.full(n, -1, dtype=np.int64)
        rows, cols = np.nonzero(table == 0)
        inv[rows] = cols
        self.inv = inv
        orders = np.ones(n, dtype=np.int64)
        for g in range(n):
            x, o = g, 1
            while x != 0:
                x = int(table[x, g])
                o += 1
            orders[g] = o
        self.element_orders = orders
        self._hash = None
        self._gens = None

    def _validate(self):
        t = self.table
        n = self.order
        ident = np.arange(n, dtype=np.int64)
        for e in range(n):
            if np.array_equal(t[e], ident) and np.array_equal(t[:, e], ident):
                if e != 0:
                    raise IdentityNotZero(f"identity is index {e}, not 0")
                break
        else:
            raise NotAGroup("no two-sided identity element")
        if not np.array_equal(t[0], ident) or not np.array_equal(t[:, 0], ident):
            raise IdentityNotZero("index 0 is not the identity")
        srt = np.sort(t, axis=1)
        if not np.array_equal(srt, np.tile(ident, (n, 1))):
            raise NotAGroup("a row is not a permutation (missing inverses)")
        srt = np.sort(t, axis=0)
        if not np.array_equal(srt, np.tile(ident[:, None], (1, n))):
            raise NotAGroup("a column is not a permutation")
        # associativity in blocks to bound memory at larger orders
        step = max(1, (1 << 22) // (n * n))
        for lo in range(0, n, step):
            hi = min(n, lo + step)
            left = t[t[lo:hi]]            # (hi-lo, n, n): (a*b)*c
            right = t[lo:hi][:, t]        # a*(b*c)
            if not np.array_equal(left, right):
                raise NotAGroup("multiplication is not associative")

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def conjugate(self, g: int, h: int) -> int:
        """g^-1 h g."""
        return int(self.table[self.table[self.inv[g], h], g])

    @property
    def is_2group(self) -> bool:
        n = self.order
        return n & (n - 1) == 0

    def elements(self) -> range:
        return range(self.order)

    def generators(self) -> List[int]:
        """Deterministic generating set; minimal for p-groups."""
        if self._gens is not None:
            return list(self._gens)
        p = _prime_power_base(self.order)
        if self.order == 1:
            gens: List[int] = []
        elif p is not None:
            gens = _pgroup_min_generators(self, p)
        else:
            gens = []
            cl = {0}
            while len(cl) < self.order:
                best = max((g for g in range(self.order) if g not in cl),
                           key=lambda g: (int(self.element_orders[g]), -g))
                gens.append(best)
                cl = closure(self, gens)
        self._gens = tuple(gens)
        return list(gens)

    def hash_digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"group:{self.order}:".encode())
        h.update(self.table.astype(np.uint16).tobytes())
        return h.hexdigest()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.order, self.table.tobytes()))
        return self._hash

    def __eq__(self, other):
        return (isinstance(other, FiniteGroup) and self.order == other.order
                and np.array_equal(self.table, other.table))

    def __repr__(self):
        tag = self.name or "group"
        return f"FiniteGroup({tag}, order={self.order})"


def _prime_power_base(n: int) -> Optional[int]:
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            while n % p == 0:
                n //= p
            return p if n == 1 else None
    return None


def _pgroup_min_generators(group: FiniteGroup, p: int) -> List[int]:
    """Coset representatives of a basis of G modulo its Frattini subgroup.

    For a p-group the Frattini subgroup is generated by p-th powers and
    commutators, and any lift of a basis of the quotient generates G.
    """
    t, inv = group.table, group.inv
    seed = set()
    for g in range(group.order):
        x = g
        for _ in range(p - 1):
            x = int(t[x, g])
        seed.add(x)
    for a in range(group.order):
        row = t[t[t[inv[a], inv], a], np.arange(group.order)]
        seed.update(int(x) for x in row)
    phi = closure(group, seed)
    quot, coset_of = quotient_group(group, sorted(phi))
    chosen: List[int] = []
    span = {0}
    for q in range(1, quot.order):
        if q not in span:
            chosen.append(q)
            span = closure(quot, chosen)
            if len(span) == quot.order:
                break
    reps = {int(coset_of[g]): g for g in range(group.order - 1, -1, -1)}
    return [reps[q] for q in chosen]


def closure(group: FiniteGroup, seed: Iterable[int]) -> set:
    """Subgroup generated by the seed elements."""
    t = group.table
    got = {0}
    frontier = [0]
    seed = [int(s) for s in seed]
    for s in seed:
        if s not in got:
            got.add(s)
            frontier.append(s)
    while frontier:
        nxt = []
        members = np.fromiter(got, dtype=np.int64)
        for f in frontier:
            for p in t[f, members]:
                p = int(p)
                if p not in got:
                    got.add(p)
                    nxt.append(p)
        frontier = nxt
    return got


class Subgroup:
    """A subgroup of a parent group, stored by its sorted element list."""

    __slots__ = ("parent", "elements", "order", "_left_reps", "_as_group")

    def __init__(self, parent: FiniteGroup, elements: Sequence[int], check: bool = True):
        el = np.array(sorted(int(x) for x in set(elements)), dtype=np.int64)
        if check:
            if el.size == 0 or el[0] != 0:
                raise NotAGroup("subgroup must contain the identity")
            members = set(int(x) for x in el)
            prods = parent.table[np.ix_(el, el)]
            if not set(int(x) for x in prods.flat) <= members:
                raise NotAGroup("element set is not closed under multiplication")
        self.parent = parent
        self.elements = el
        self.order = int(el.size)
        self._left_reps = None
        self._as_group = None

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    def contains(self, g: int) -> bool:
        i = int(np.searchsorted(self.elements, g))
        return i < self.order and int(self.elements[i]) == g

    def coset_reps(self) -> np.ndarray:
        """Left-coset representatives (g for cosets gH), identity first."""
        if self._left_reps is None:
            n = self.parent.order
            seen = np.zeros(n, dtype=bool)
            reps = []
            for g in range(n):
                if not seen[g]:
                    reps.append(g)
                    seen[self.parent.table[g, self.elements]] = True
            self._left_reps = np.array(reps, dtype=np.int64)
        return self._left_reps

    def right_coset_reps(self) -> np.ndarray:
        """Right-coset representatives (cosets Hg), identity first."""
        n = self.parent.order
        seen = np.zeros(n, dtype=bool)
        reps = []
        for g in range(n):
            if not seen[g]:
                reps.append(g)
                seen[self.parent.table[self.elements, g]] = True
        return np.array(reps, dtype=np.int64)

    def as_group(self) -> Tuple[FiniteGroup, np.ndarray]:
        """The subgroup as a standalone group plus local->global element map."""
        if self._as_group is None:
            to_global = self.elements
            pos = {int(g): i for i, g in enumerate(to_global)}
            sub = self.parent.table[np.ix_(to_global, to_global)]
            local = np.array([[pos[int(x)] for x in row] for row in sub], dtype=np.int64)
            grp = FiniteGroup(local, name=f"sub{self.order}", validate=False)
            self._as_group = (grp, to_global)
        return self._as_group

    def conjugated(self, g: int) -> "Subgroup":
        t = self.parent.table
        gi = self.parent.inv[g]
        els = t[t[gi, self.elements], g]
        return Subgroup(self.parent, els, check=False)

    def key(self) -> Tuple[int, ...]:
        return tuple(int(x) for x in self.elements)

    def __repr__(self):
        return f"Subgroup(order={self.order} of {self.parent.order})"


def _conjugacy_key(group: FiniteGroup, elements: np.ndarray) -> Tuple[int, ...]:
    """Lexicographically smallest conjugate element tuple; canonical class id."""
    t, inv = group.table, group.inv
    best = None
    for g in range(group.order):
        conj = np.sort(t[t[inv[g], elements], g])
        key = tuple(int(x) for x in conj)
        if best is None or key < best:
            best = key
    return best


def subgroup_classes(group: FiniteGroup, cap: int = 10000) -> List[Subgroup]:
    """Conjugacy-class representatives of all subgroups.

    Layered closure: start from cyclic subgroups, join class representatives
    against every cyclic subgroup, dedupe by canonical conjugate key. Each
    representative is the lexicographically smallest member of its class.
    """
    cyclics = {}
    for g in range(group.order):
        c = tuple(sorted(closure(group, [g])))
        cyclics.setdefault(c, None)
    cyclic_sets = [np.array(c, dtype=np.int64) for c in sorted(cyclics)]

    reps: Dict[Tuple[int, ...], np.ndarray] = {}
    for c in cyclic_sets:
        key = _conjugacy_key(group, c)
        if key not in reps:
            reps[key] = np.array(key, dtype=np.int64)
    layer = list(reps.values())
    while layer:
        new = []
        for h in layer:
            hset = set(int(x) for x in h)
            for c in cyclic_sets:
                if set(int(x) for x in c) <= hset:
                    continue
                j = closure(group, list(h) + list(c))
                key = _conjugacy_key(group, np.fromiter(j, dtype=np.int64))
                if key not in reps:
                    if len(reps) >= cap:
                        raise BudgetExceeded(f"more than {cap} subgroup classes")
                    arr = np.array(key, dtype=np.int64)
                    reps[key] = arr
                    new.append(arr)
        layer = new
    out = [Subgroup(group, els, check=False) for els in reps.values()]
    out.sort(key=lambda s: (s.order, s.key()))
    return out


def quotient_group(group: FiniteGroup, normal_elements: Sequence[int]):
    """Quotient by a normal subgroup; returns (quotient, coset_index_map)."""
    k = np.array(sorted(set(int(x) for x in normal_elements)), dtype=np.int64)
    kset = set(int(x) for x in k)
    t = group.table
    for g in range(group.order):
        conj = t[t[group.inv[g], k], g]
        if not set(int(x) for x in conj) <= kset:
            raise NotAGroup("subgroup is not normal")
    coset_of = np.full(group.order, -1, dtype=np.int64)
    reps = []
    for g in range(group.order):
        if coset_of[g] < 0:
            cid = len(reps)
            reps.append(g)
            coset_of[t[g, k]] = cid
    m = len(reps)
    reps = np.array(reps, dtype=np.int64)
    qt = np.zeros((m, m), dtype=np.int64)
    for a in range(m):
        qt[a] = coset_of[t[reps[a], reps]]
    return FiniteGroup(qt, name=f"{group.name}/N" if group.name else "quotient"), coset_of


def commutator_subgroup(group: FiniteGroup) -> set:
    t, inv = group.table, group.inv
    comms = set()
    for a in range(group.order):
        for b in range(group.order):
            comms.add(int(t[t[t[inv[a], inv[b]], a], b]))
    return closure(group, comms)


def abelianization(group: FiniteGroup) -> List[int]:
    """Invariant factors of G/[G,G] (1s dropped), via Smith form of the
    relation matrix e_i + e_j - e_{i*j} of the commutator quotient."""
    derived = commutator_subgroup(group)
    quot, _ = quotient_group(group, sorted(derived))
    m = quot.order
    rels = [np.zeros(m, dtype=np.int64)]
    rels[0][0] = 1
    for i in range(m):
        for j in range(i, m):
            r = np.zeros(m, dtype=np.int64)
            r[i] += 1
            r[j] += 1
            r[int(quot.table[i, j])] -= 1
            rels.append(r)
    hnf, _, _ = row_hnf(np.array(rels))
    facs = invariant_factors(hnf)
    free = m - hnf.shape[0]
    assert free == 0, "commutator quotient of a finite group must be finite"
    return facs


# ---------------------------------------------------------------------------
# Built-in groups
# ---------------------------------------------------------------------------


def _f8_mul(x: int, y: int) -> int:
    """Multiplication in F8 = F2[t]/(t^3+t+1), elements as 3-bit masks."""
    r = 0
    while y:
        if y & 1:
            r ^= x
        y >>= 1
        x <<= 1
        if x & 8:
            x ^= 0b1011
    return r


def _f8_theta(a: int) -> int:
    sq = _f8_mul(a, a)
    return _f8_mul(sq, sq)


def sylow2_sz8() -> FiniteGroup:
    """The 2-Sylow subgroup of Sz(8), order 64.

    Elements are pairs (a, b) over F8 with (a,b)*(c,d) = (a+c, theta(a)c+b+d),
    theta(a) = a^4; index = 8*a + b, so (0,0) = 0 is the identity.
    """
    n = 64
    t = np.zeros((n, n), dtype=np.int64)
    for a in range(8):
        for b in range(8):
            for c in range(8):
                for d in range(8):
                    ra = a ^ c
                    rb = _f8_mul(_f8_theta(a), c) ^ b ^ d
                    t[8 * a + b, 8 * c + d] = 8 * ra + rb
    return FiniteGroup(t, name="sz8-sylow")


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n, dtype=np.int64)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, name=f"C{n}")


def direct_product(a: FiniteGroup, b: FiniteGroup, name: str = "") -> FiniteGroup:
    na, nb = a.order, b.order
    ia = np.arange(na * nb, dtype=np.int64) // nb
    ib = np.arange(na * nb, dtype=np.int64) % nb
    t = a.table[np.ix_(ia, ia)] * nb + b.table[np.ix_(ib, ib)]
    return FiniteGroup(t, name=name or f"{a.name}x{b.name}")


def dihedral_group(order: int) -> FiniteGroup:
    if order % 2 or order < 4:
        raise ValidationError("dihedral order must be even and >= 4")
    m = order // 2
    t = np.zeros((order, order), dtype=np.int64)
    for i1 in range(m):
        for j1 in range(2):
            for i2 in range(m):
                for j2 in range(2):
                    i = (i1 + (i2 if j1 == 0 else -i2)) % m
                    j = j1 ^ j2
                    t[i1 + m * j1, i2 + m * j2] = i + m * j
    return FiniteGroup(t, name=f"D(order {order})")


def quaternion_group(order: int) -> FiniteGroup:
    if order not in (8, 16, 32):
        raise ValidationError("generalized quaternion order must be 8, 16 or 32")
    m = order // 2
    half = m // 2  # b^2 = a^(m/2), ba = a^-1 b
    t = np.zeros((order, order), dtype=np.int64)
    for i1 in range(m):
        for j1 in range(2):
            for i2 in range(m):
                for j2 in range(2):
                    i = (i1 + (i2 if j1 == 0 else -i2)) % m
                    if j1 and j2:
                        i = (i + half) % m
                    j = j1 ^ j2
                    t[i1 + m * j1, i2 + m * j2] = i + m * j
    return FiniteGroup(t, name=f"Q{order}")


def _builtin_factories() -> Dict[str, "callable"]:
    return {
        "C2": lambda: cyclic_group(2),
        "C4": lambda: cyclic_group(4),
        "C8": lambda: cyclic_group(8),
        "C16": lambda: cyclic_group(16),
        "V4": lambda: direct_product(cyclic_group(2), cyclic_group(2), "V4"),
        "C4xC2": lambda: direct_product(cyclic_group(4), cyclic_group(2)),
        "C2xC2xC2": lambda: direct_product(
            direct_product(cyclic_group(2), cyclic_group(2)), cyclic_group(2), "C2xC2xC2"),
        "C4xC4": lambda: direct_product(cyclic_group(4), cyclic_group(4)),
        "D4": lambda: dihedral_group(8),
        "Q8": lambda: quaternion_group(8),
        "D8": lambda: dihedral_group(16),
        "Q16": lambda: quaternion_group(16),
        "sz8-sylow": sylow2_sz8,
    }


BUILTIN_GROUPS = tuple(sorted(_builtin_factories()))


@lru_cache(maxsize=None)
def builtin_group(name: str) -> FiniteGroup:
    try:
        return _builtin_factories()[name]()
    except KeyError:
        raise ValidationError(f"unknown builtin group {name!r}; "
                              f"known: {', '.join(BUILTIN_GROUPS)}") from None


def group_from_json(payload) -> FiniteGroup:
    if not isinstance(payload, dict):
        raise ValidationError("group file must hold a JSON object")
    try:
        order = int(payload["order"])
        table = payload["table"]
    except (KeyError, TypeError, ValueError):
        raise ValidationError('group file needs integer "order" and "table"') from None
    if (not isinstance(table, list) or len(table) != order
            or any(not isinstance(r, list) or len(r) != order for r in table)):
        raise ValidationError("table must be an order x order array of indices")
    return FiniteGroup(np.array(table, dtype=np.int64))


def load_group(source: str) -> FiniteGroup:
    """Resolve 'builtin:<name>' or a JSON file path to a group."""
    if source.startswith("builtin:"):
        return builtin_group(source.split(":", 1)[1])
    try:
        with open(source) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read group file {source}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"group file {source} is not valid JSON: {exc}") from None
    return group_from_json(payload)
