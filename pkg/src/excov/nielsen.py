"""Branch cycle tuples, braid moves, and their orbit bookkeeping.

A cover of the line ramified over r points leaves a combinatorial residue:
an r-tuple of permutations with product one whose entries generate the
monodromy group.  This module manipulates those tuples directly: genus
from the index sum, the braid twists that permute tuples with the same
invariants, orbit counts under declared equivalences, and the small
catalogue of families the rest of the package scans analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterable, Optional, Sequence, Union

from .errors import CapExceededError, ValidationError
from .grouptheory import GROUP_CAP, Perm, PermGroup, group_from_gens

# -- tuples -------------------------------------------------------------------------


@dataclass(frozen=True)
class NielsenTuple:
    """Permutation tuple with its declared group and class fingerprints.

    class_reps pins the multiset of conjugacy classes the entries must lie
    in (cycle type alone does not identify a class outside the symmetric
    group); entries default to fingerprinting themselves.
    """

    perms: tuple[Perm, ...]
    group: PermGroup
    class_reps: Optional[tuple[Perm, ...]] = None

    def __post_init__(self):
        if not self.perms:
            raise ValidationError("empty tuple")
        n = self.perms[0].degree
        for g in self.perms:
            if g.degree != n:
                raise ValidationError("mixed degrees in tuple")
        if self.group.degree != n:
            raise ValidationError("group degree does not match tuple")

    @property
    def r(self) -> int:
        return len(self.perms)

    @property
    def degree(self) -> int:
        return self.perms[0].degree

    def product(self) -> Perm:
        out = Perm.identity(self.degree)
        for g in self.perms:
            out = out * g
        return out

    def conjugate(self, h: Perm) -> "NielsenTuple":
        hi = h.inverse()
        return NielsenTuple(
            tuple(hi * g * h for g in self.perms), self.group, self.class_reps
        )


def _class_of(rep: Perm, group: PermGroup) -> frozenset:
    return frozenset((h.inverse() * rep * h).images for h in group)


def validate_tuple(t: NielsenTuple) -> list[str]:
    """Empty list when the tuple is a branch cycle description for its group."""
    problems = []
    if not t.product().is_identity():
        problems.append("product-one fails: entries do not multiply to the identity")
    if any(g not in t.group for g in t.perms):
        problems.append("generation fails: an entry lies outside the declared group")
    else:
        # entries inside the group, so this closure is bounded by its order
        generated = group_from_gens(list(t.perms))
        if generated.order != t.group.order:
            problems.append(
                f"generation fails: entries generate order {generated.order}, "
                f"declared group has order {t.group.order}"
            )
    reps = t.class_reps if t.class_reps is not None else t.perms
    if len(reps) != t.r:
        problems.append("class-membership fails: fingerprint length mismatch")
    else:
        classes = [_class_of(rep, t.group) for rep in reps]
        unused = list(range(t.r))
        for g in t.perms:
            hit = next((j for j in unused if g.images in classes[j]), None)
            if hit is None:
                problems.append(
                    f"class-membership fails: {g} lies in no declared class"
                )
                break
            unused.remove(hit)
    return problems


def rh_genus(t: NielsenTuple) -> int:
    """Source genus from the index sum; errors when no cover can exist."""
    n = t.degree
    gens = list(t.perms)
    orbit = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = g.act(x)
            if y not in orbit:
                orbit.add(y)
                frontier.append(y)
    if len(orbit) != n:
        raise ValidationError("not a branch cycle description: group not transitive")
    ind_sum = sum(n - len(g.cycles()) - g.fixed_count() for g in t.perms)
    if ind_sum % 2:
        raise ValidationError("not a branch cycle description: odd index sum")
    genus = ind_sum // 2 - n + 1
    if genus < 0:
        raise ValidationError("not a branch cycle description: negative genus")
    return genus


# -- braid action ---------------------------------------------------------------------


def braid_act(t: NielsenTuple, i: int) -> NielsenTuple:
    """Twist at position i (1-based): (.., a, b, ..) -> (.., a b a^-1, a, ..)."""
    if not 1 <= i <= t.r - 1:
        raise ValidationError(f"braid index {i} outside 1..{t.r - 1}")
    a, b = t.perms[i - 1], t.perms[i]
    new = list(t.perms)
    new[i - 1] = a * b * a.inverse()
    new[i] = a
    return NielsenTuple(tuple(new), t.group, t.class_reps)


def braid_unact(t: NielsenTuple, i: int) -> NielsenTuple:
    """Inverse twist: (.., a, b, ..) -> (.., b, b^-1 a b, ..)."""
    if not 1 <= i <= t.r - 1:
        raise ValidationError(f"braid index {i} outside 1..{t.r - 1}")
    a, b = t.perms[i - 1], t.perms[i]
    new = list(t.perms)
    new[i - 1] = b
    new[i] = b.inverse() * a * b
    return NielsenTuple(tuple(new), t.group, t.class_reps)


def _conjugators(t: NielsenTuple, equivalence) -> list[Perm]:
    if equivalence is None or equivalence == "none":
        return [Perm.identity(t.degree)]
    if equivalence == "inner":
        return list(t.group.elements)
    return list(equivalence)  # explicit normalizer elements


def _canonical(perms: tuple[Perm, ...], conjugators: list[Perm]) -> tuple:
    best = None
    for h in conjugators:
        hi = h.inverse()
        key = tuple((hi * g * h).images for g in perms)
        if best is None or key < best:
            best = key
    return best


def _orbit(start: NielsenTuple, moves, conjugators: list[Perm], cap: int):
    seen = {_canonical(start.perms, conjugators)}
    queue = [start]
    while queue:
        cur = queue.pop()
        for mv in moves:
            nxt = mv(cur)
            key = _canonical(nxt.perms, conjugators)
            if key not in seen:
                if len(seen) >= cap:
                    raise CapExceededError(f"braid orbit exceeds cap {cap}")
                seen.add(key)
                queue.append(nxt)
    # canonical forms are conjugate to visited tuples, hence equally valid
    return [
        NielsenTuple(tuple(Perm(img) for img in key), start.group, start.class_reps)
        for key in sorted(seen)
    ]


def braid_orbit(
    t: NielsenTuple, equivalence="inner", cap: int = GROUP_CAP
) -> list[NielsenTuple]:
    """Orbit under all twists, one representative per equivalence class.

    equivalence: "none", "inner" (conjugation by the declared group), or an
    explicit list of conjugating permutations (e.g. a known normalizer).
    Twists are invertible on the finite orbit, so forward moves suffice.
    """
    conj = _conjugators(t, equivalence)
    moves = [lambda x, i=i: braid_act(x, i) for i in range(1, t.r)]
    return _orbit(t, moves, conj, cap)


def q2_reduced_orbit(
    t: NielsenTuple, equivalence="inner", cap: int = GROUP_CAP
) -> list[NielsenTuple]:
    """Orbit of a length-4 tuple under the reduced-equivalence subgroup.

    The two generators are the square of the full twist q1 q2 q3 and the
    mixed move q1 q3^-1; only their induced partition is reported, nothing
    is claimed about the kernel of the action.
    """
    if t.r != 4:
        raise ValidationError("reduced orbits are defined for length-4 tuples")

    def gen_a(x):
        for _ in range(2):
            for i in (1, 2, 3):
                x = braid_act(x, i)
        return x

    def gen_b(x):
        return braid_unact(braid_act(x, 1), 3)

    return _orbit(t, [gen_a, gen_b], _conjugators(t, equivalence), cap)


# -- stock families -------------------------------------------------------------------


def cyclic_branch_pair(n: int) -> NielsenTuple:
    """Two inverse n-cycles: the branch cycles of one full twist."""
    if n < 2:
        raise ValidationError("need n >= 2")
    s = Perm(tuple((i + 1) % n for i in range(n)))
    return NielsenTuple((s, s.inverse()), group_from_gens([s]))


def _involution_pair(n: int) -> tuple[Perm, Perm]:
    # the two reflections whose product steps the n-cycle forward
    g1 = [0] * n
    g2 = [0] * n
    for i in range(n):
        g1[i] = (-i - 1) % n
        g2[i] = (-i) % n
    return Perm(tuple(g1)), Perm(tuple(g2))


def dickson_branch_triple(n: int) -> NielsenTuple:
    """Two reflections and the inverse n-cycle, for odd n: a genus-0 triple.

    On 1-based letters the reflections pair k with n+1-k and k with n+2-k;
    their product is (1 2 ... n), so the triple multiplies to the identity
    and generates the dihedral group of order 2n.
    """
    if n < 3 or n % 2 == 0:
        raise ValidationError("need odd n >= 3")
    g1, g2 = _involution_pair(n)
    ginf = (g1 * g2).inverse()
    return NielsenTuple((g1, g2, ginf), group_from_gens([g1, g2]))


@dataclass(frozen=True)
class TowerCycles:
    """Branch cycles for an iterated fiber product of reflection covers."""

    tuple: NielsenTuple
    levels: int
    degree: int  # n per level: the construction multiplies degrees


def dickson_tower_cycles(
    n: int, levels: Union[int, Sequence], cap: int = GROUP_CAP
) -> TowerCycles:
    """Level-blocked branch cycles on n^m letters, m = number of levels.

    Each level contributes the reflection pair acting on its own coordinate
    (cross-level twisting is a free choice absorbed by equivalence, taken
    trivial here); the closing entry is the inverse of the full product and
    comes out as n^(m-1) disjoint n-cycles.  The degree reported is the
    constructed n^m; no formula for an infinite-level limit is assumed.
    """
    m = levels if isinstance(levels, int) else len(levels)
    if n < 3 or n % 2 == 0:
        raise ValidationError("need odd n >= 3")
    if m < 1:
        raise ValidationError("need at least one level")
    N = n ** m
    if N > cap:
        raise CapExceededError(f"degree {n}^{m} exceeds cap {cap}")
    g1, g2 = _involution_pair(n)

    def lift(g: Perm, level: int) -> Perm:
        stride = n ** level
        images = [0] * N
        for x in range(N):
            digit = (x // stride) % n
            images[x] = x + (g.act(digit) - digit) * stride
        return Perm(tuple(images))

    entries = []
    for j in range(m):
        entries.append(lift(g1, j))
        entries.append(lift(g2, j))
    prod = Perm.identity(N)
    for g in entries:
        prod = prod * g
    entries.append(prod.inverse())
    tup = NielsenTuple(tuple(entries), group_from_gens(entries, cap=cap))
    closing = entries[-1]
    want = N // n
    if sorted(len(c) for c in closing.cycles()) != [n] * want:
        raise ValidationError(
            "construction check failed: closing entry is not a union of "
            f"{want} cycles of length {n}"
        )
    if not tup.product().is_identity():
        raise ValidationError("construction check failed: product is not one")
    return TowerCycles(tup, m, N)


# -- sign-vector tuples over (Z/p^(k+1))^2 ---------------------------------------------


@dataclass(frozen=True)
class ModularClasses:
    """Point-reflection 4-tuples up to the stated equivalences.

    tuples lists one normalized representative per inner class as four
    vectors (v1 = 0 by translation); the braid count partitions those
    classes under the three twists, the absolute count under the full
    linear normalizer.
    """

    p: int
    k: int
    tuples: tuple[tuple[tuple[int, int], ...], ...]
    inner_class_count: int
    inner_braid_orbit_count: int
    abs_class_count: int


def _mat_apply(m, v, mod):
    return ((m[0] * v[0] + m[1] * v[1]) % mod, (m[2] * v[0] + m[3] * v[1]) % mod)


def _primitive_root(m: int, p: int) -> int:
    # (Z/p^j)^* is cyclic; test generators by factoring the group order
    order = m // p * (p - 1)
    fac = []
    x = order
    d = 2
    while d * d <= x:
        if x % d == 0:
            fac.append(d)
            while x % d == 0:
                x //= d
        d += 1
    if x > 1:
        fac.append(x)
    for g in range(2, m):
        if g % p == 0:
            continue
        if all(pow(g, order // f, m) != 1 for f in fac):
            return g
    raise ValidationError(f"no generator mod {m}")


def modular_nielsen(p: int, k: int = 0) -> ModularClasses:
    """Classify 4-tuples of point reflections x -> v - x of (Z/p^(k+1))^2.

    Product-one forces v1 - v2 + v3 - v4 = 0 and generation needs the
    differences to span; translation normalizes v1 to 0 and the central
    sign folds (v2, v3) with (-v2, -v3).
    """
    if p < 3 or p % 2 == 0 or any(p % d == 0 for d in range(3, p, 2) if d * d <= p):
        raise ValidationError("p must be an odd prime")
    if k < 0 or p ** (k + 1) > 13:
        raise ValidationError("size guard: p^(k+1) must stay <= 13")
    m = p ** (k + 1)

    def canon(v2, v3):
        neg = ((-v2[0]) % m, (-v2[1]) % m), ((-v3[0]) % m, (-v3[1]) % m)
        return min((v2, v3), neg)

    classes = set()
    for a in range(m):
        for b in range(m):
            for c in range(m):
                for d in range(m):
                    if (a * d - b * c) % p == 0:
                        continue  # differences fail to span
                    classes.add(canon((a, b), (c, d)))
    inner = sorted(classes)
    index = {v: i for i, v in enumerate(inner)}

    def braid_maps(v2, v3):
        # the three twists in normalized symbols; two of them coincide
        yield canon(v2, ((v3[0] + v2[0]) % m, (v3[1] + v2[1]) % m))
        yield canon(
            ((2 * v2[0] - v3[0]) % m, (2 * v2[1] - v3[1]) % m), v2
        )

    braid_orbits = 0
    seen = [False] * len(inner)
    for s in range(len(inner)):
        if seen[s]:
            continue
        braid_orbits += 1
        seen[s] = True
        queue = [inner[s]]
        while queue:
            v2, v3 = queue.pop()
            for nxt in braid_maps(v2, v3):
                i = index[nxt]
                if not seen[i]:
                    seen[i] = True
                    queue.append(nxt)

    g = _primitive_root(m, p)
    mats = [(1, 1, 0, 1), (1, 0, 1, 1), (g, 0, 0, 1)]
    abs_orbits = 0
    seen = [False] * len(inner)
    for s in range(len(inner)):
        if seen[s]:
            continue
        abs_orbits += 1
        seen[s] = True
        queue = [inner[s]]
        while queue:
            v2, v3 = queue.pop()
            for mt in mats:
                nxt = canon(_mat_apply(mt, v2, m), _mat_apply(mt, v3, m))
                i = index[nxt]
                if not seen[i]:
                    seen[i] = True
                    queue.append(nxt)

    tuples = []
    for v2, v3 in inner:
        v4 = ((v3[0] - v2[0]) % m, (v3[1] - v2[1]) % m)
        tuples.append(((0, 0), v2, v3, v4))
    return ModularClasses(
        p=p,
        k=k,
        tuples=tuple(tuples),
        inner_class_count=len(inner),
        inner_braid_orbit_count=braid_orbits,
        abs_class_count=abs_orbits,
    )


def modular_tuple_perms(p: int, k: int, v2, v3) -> NielsenTuple:
    """Realize a normalized symbol as actual point reflections on m^2 letters."""
    m = p ** (k + 1)

    def reflect(v) -> Perm:
        images = [0] * (m * m)
        for x in range(m):
            for y in range(m):
                nx, ny = (v[0] - x) % m, (v[1] - y) % m
                images[x * m + y] = nx * m + ny
        return Perm(tuple(images))

    v4 = ((v3[0] - v2[0]) % m, (v3[1] - v2[1]) % m)
    perms = tuple(reflect(v) for v in ((0, 0), v2, v3, v4))
    shift_x = Perm(tuple(((x + 1) % m) * m + y for x in range(m) for y in range(m)))
    shift_y = Perm(tuple(x * m + (y + 1) % m for x in range(m) for y in range(m)))
    group = group_from_gens([perms[0], shift_x, shift_y])
    return NielsenTuple(perms, group)


# -- class rationality and difference sets ---------------------------------------------


@dataclass(frozen=True)
class RationalUnionReport:
    ok: bool
    failing: tuple[int, ...]  # exponents k with no conjugation realizing C^k


def rational_union_check(
    class_reps: Sequence[Perm], group: PermGroup, normalizer: Iterable[Perm]
) -> RationalUnionReport:
    """Can every coprime power of the class list be conjugated back into it?

    For each k coprime to the element orders, searches h among the supplied
    normalizer elements and a reindexing pi with h C_pi(i) h^-1 = C_i^k.
    """
    reps = list(class_reps)
    if not reps:
        raise ValidationError("need at least one class representative")
    norm = list(normalizer)
    classes = [_class_of(rep, group) for rep in reps]
    modulus = math.lcm(*(rep.order() for rep in reps))
    failing = []
    for kexp in range(2, modulus + 1):
        if math.gcd(kexp, modulus) != 1:
            continue
        targets = [_class_of(rep ** kexp, group) for rep in reps]
        found = False
        for h in norm:
            hi = h.inverse()
            conj = [frozenset((hi * Perm(img) * h).images for img in cl) for cl in classes]
            for pi in permutations(range(len(reps))):
                if all(conj[pi[i]] == targets[i] for i in range(len(reps))):
                    found = True
                    break
            if found:
                break
        if not found:
            failing.append(kexp)
    return RationalUnionReport(ok=not failing, failing=tuple(failing))


def difference_sets(n: int, k: int, lam: int) -> list[tuple[int, ...]]:
    """All k-subsets of Z/n covering each nonzero difference lam times,
    one sorted representative per translation class."""
    if n < 2 or k < 1 or k > n or lam < 1:
        raise ValidationError("need n >= 2 and 1 <= k <= n and lam >= 1")
    if k * (k - 1) != lam * (n - 1):
        return []  # counting obstruction: k(k-1) ordered differences
    found = set()
    for subset in combinations(range(n), k):
        counts = [0] * n
        for a in subset:
            for b in subset:
                if a != b:
                    counts[(a - b) % n] += 1
        if any(counts[d] != lam for d in range(1, n)):
            continue
        canon = min(
            tuple(sorted((a + t) % n for a in subset)) for t in range(n)
        )
        found.add(canon)
    return sorted(found)
