"""Permutation groups and coset fixed-point criteria.

The scanning modules measure bijectivity over ever-larger extensions; this
module predicts those measurements from a finite model: a permutation group
G together with a normalizing element tau whose cosets G*tau^t stand in for
the extensions of degree t.  Exceptionality, range equality, and fiber
component counts all become statements about fixed points on those cosets.

All groups here are materialized element lists.  That is deliberate: every
model this package builds (dihedral, affine, plane collineations) is tiny,
and explicit lists keep the coset loops exact and auditable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

from .errors import CapExceededError, InternalInvariantError, ValidationError
from .frobset import FrobeniusSet, from_residues

GROUP_CAP = 10 ** 6


# -- permutations ---------------------------------------------------------------


@dataclass(frozen=True)
class Perm:
    """A permutation of {0..n-1} as an image tuple, acting on the right.

    (i)(g1*g2) = ((i)g1)g2, so g1*g2 means "apply g1 first".
    """

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(n)):
            raise ValidationError(f"not a permutation of 0..{n - 1}: {self.images}")

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, text: str, degree: Optional[int] = None) -> "Perm":
        """Parse 1-based cycle notation like "(1 2 3)(4 5)"."""
        s = text.replace(",", " ").strip()
        if s in ("", "()"):
            if degree is None:
                raise ValidationError("identity cycle string needs an explicit degree")
            return cls.identity(degree)
        cycles: list[list[int]] = []
        if not s.startswith("("):
            raise ValidationError(f"cycle notation must start with '(': {text!r}")
        depth = 0
        cur: list[int] = []
        for tok in s.replace("(", " ( ").replace(")", " ) ").split():
            if tok == "(":
                if depth:
                    raise ValidationError(f"nested '(' in {text!r}")
                depth, cur = 1, []
            elif tok == ")":
                if not depth:
                    raise ValidationError(f"unmatched ')' in {text!r}")
                depth = 0
                cycles.append(cur)
            else:
                try:
                    v = int(tok)
                except ValueError:
                    raise ValidationError(f"bad label {tok!r} in {text!r}") from None
                if v < 1:
                    raise ValidationError(f"labels are 1-based, got {v} in {text!r}")
                cur.append(v)
        if depth:
            raise ValidationError(f"unclosed '(' in {text!r}")
        top = max((max(c) for c in cycles if c), default=0)
        n = degree if degree is not None else top
        if top > n:
            raise ValidationError(f"label {top} exceeds degree {n} in {text!r}")
        images = list(range(n))
        seen: set[int] = set()
        for c in cycles:
            for v in c:
                if v in seen:
                    raise ValidationError(f"label {v} repeats in {text!r}")
                seen.add(v)
            for a, b in zip(c, c[1:] + c[:1]):
                images[a - 1] = b - 1
        return cls(tuple(images))

    @classmethod
    def from_one_line(cls, images_1based: Sequence[int]) -> "Perm":
        return cls(tuple(v - 1 for v in images_1based))

    @property
    def degree(self) -> int:
        return len(self.images)

    def act(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Perm") -> "Perm":
        if other.degree != self.degree:
            raise ValidationError(
                f"degree mismatch: {self.degree} vs {other.degree}"
            )
        o = other.images
        return Perm(tuple(o[i] for i in self.images))

    def inverse(self) -> "Perm":
        inv = [0] * self.degree
        for i, v in enumerate(self.images):
            inv[v] = i
        return Perm(tuple(inv))

    def __pow__(self, e: int) -> "Perm":
        if e < 0:
            return self.inverse() ** (-e)
        out = Perm.identity(self.degree)
        acc = self
        while e:
            if e & 1:
                out = out * acc
            acc = acc * acc
            e >>= 1
        return out

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.images))

    def fixed_count(self) -> int:
        return sum(1 for i, v in enumerate(self.images) if i == v)

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, 0-based, each starting at its least point."""
        seen = [False] * self.degree
        out = []
        for i in range(self.degree):
            if seen[i] or self.images[i] == i:
                seen[i] = True
                continue
            c = [i]
            seen[i] = True
            j = self.images[i]
            while j != i:
                c.append(j)
                seen[j] = True
                j = self.images[j]
            out.append(tuple(c))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        """All cycle lengths including fixed points, descending."""
        lens = [len(c) for c in self.cycles()]
        lens += [1] * self.fixed_count()
        return tuple(sorted(lens, reverse=True))

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles())) if self.cycles() else 1

    def cycle_string(self) -> str:
        cs = self.cycles()
        if not cs:
            return "()"
        return "".join("(" + " ".join(str(v + 1) for v in c) + ")" for c in cs)

    def __repr__(self) -> str:
        return f"Perm{self.cycle_string()}"


def parse_perm(text: str, degree: Optional[int] = None) -> Perm:
    """Cycle notation or a 1-based one-line image list like "2,3,1"."""
    s = text.strip()
    if s.startswith("(") or s == "()":
        return Perm.from_cycles(s, degree)
    try:
        images = [int(v) for v in s.replace("[", "").replace("]", "").split(",")]
    except ValueError:
        raise ValidationError(f"cannot parse permutation {text!r}") from None
    if degree is not None and len(images) != degree:
        raise ValidationError(
            f"one-line form has {len(images)} entries, expected {degree}"
        )
    return Perm.from_one_line(images)


# -- materialized groups ----------------------------------------------------------


class PermGroup:
    """A finite permutation group as an explicit element list (BFS order)."""

    def __init__(self, degree: int, generators: Sequence[Perm], cap: int = GROUP_CAP):
        for g in generators:
            if g.degree != degree:
                raise ValidationError(
                    f"generator degree {g.degree} does not match {degree}"
                )
        self.degree = degree
        self.generators = tuple(generators)
        ident = Perm.identity(degree)
        elements = [ident]
        seen = {ident.images}
        frontier = [ident]
        while frontier:
            nxt = []
            for h in frontier:
                for g in self.generators:
                    w = h * g
                    if w.images not in seen:
                        if len(seen) >= cap:
                            raise CapExceededError(
                                f"group closure exceeds cap {cap}"
                            )
                        seen.add(w.images)
                        elements.append(w)
                        nxt.append(w)
            frontier = nxt
        self.elements = tuple(elements)
        self._set = seen

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Perm]:
        return iter(self.elements)

    def __contains__(self, g: Perm) -> bool:
        return isinstance(g, Perm) and g.images in self._set

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order})"


def group_from_gens(gens: Sequence[Perm], cap: int = GROUP_CAP) -> PermGroup:
    if not gens:
        raise ValidationError("need at least one generator")
    return PermGroup(gens[0].degree, gens, cap=cap)


# -- orbit machinery ---------------------------------------------------------------


def _point_orbits(gens: Sequence[Perm], n: int) -> list[list[int]]:
    seen = [False] * n
    orbits = []
    for s in range(n):
        if seen[s]:
            continue
        orb = [s]
        seen[s] = True
        queue = [s]
        while queue:
            x = queue.pop()
            for g in gens:
                y = g.act(x)
                if not seen[y]:
                    seen[y] = True
                    orb.append(y)
                    queue.append(y)
        orbits.append(orb)
    return orbits


def _is_transitive(gens: Sequence[Perm], n: int) -> bool:
    orbs = _point_orbits(gens, n)
    return len(orbs) == 1


def _is_primitive(gens: Sequence[Perm], n: int) -> bool:
    """Transitive and without a nontrivial block system.

    For each b, grow the finest G-congruence gluing 0 to b; a congruence
    class strictly between a point and everything is a block system.
    """
    if n == 1:
        return True
    for b in range(1, n):
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        work = [(0, b)]
        parent[find(b)] = find(0)
        while work:
            x, y = work.pop()
            for g in gens:
                gx, gy = find(g.act(x)), find(g.act(y))
                if gx != gy:
                    parent[gx] = gy
                    work.append((gx, gy))
        size = sum(1 for x in range(n) if find(x) == find(0))
        if size < n:
            return False
    return True


def _is_doubly_transitive(gens: Sequence[Perm], n: int) -> bool:
    if n < 2 or not _is_transitive(gens, n):
        return False
    start = (0, 1)
    seen = {start}
    queue = [start]
    while queue:
        x, y = queue.pop()
        for g in gens:
            p = (g.act(x), g.act(y))
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return len(seen) == n * (n - 1)


def _equivariant_map(
    gens: Sequence[Perm], base: int, target: int
) -> Optional[dict[int, int]]:
    """Propagate c(base)=target through c(x^g)=c(x)^g; None on conflict."""
    c = {base: target}
    queue = [base]
    while queue:
        x = queue.pop()
        for g in gens:
            y, cy = g.act(x), g.act(c[x])
            if y in c:
                if c[y] != cy:
                    return None
            else:
                c[y] = cy
                queue.append(y)
    if len(set(c.values())) != len(c):
        return None
    return c


def _centralizer_trivial(gens: Sequence[Perm], n: int) -> bool:
    """Is the centralizer in the full symmetric group just the identity?

    A centralizing permutation restricts to equivariant bijections between
    orbits, and conversely any nontrivial such bijection extends by the
    identity (pairing a cross-orbit map with its inverse).
    """
    orbits = _point_orbits(gens, n)
    for i, A in enumerate(orbits):
        for j, B in enumerate(orbits):
            if len(A) != len(B):
                continue
            for target in B:
                if i == j and target == A[0]:
                    continue  # propagates to the identity on A
                if _equivariant_map(gens, A[0], target) is not None:
                    return False
    return True


def analyze_rep(G: PermGroup) -> dict[str, bool]:
    """Transitivity ladder and self-normalization of a permutation action."""
    gens = G.generators if G.generators else (Perm.identity(G.degree),)
    n = G.degree
    transitive = _is_transitive(gens, n)
    return {
        "transitive": transitive,
        "primitive": transitive and _is_primitive(gens, n),
        "doubly_transitive": _is_doubly_transitive(gens, n),
        "self_normalizing": _centralizer_trivial(gens, n),
    }


# -- monodromy models ---------------------------------------------------------------


@dataclass(frozen=True)
class MonodromyData:
    """A group with a distinguished normalizing element and its coset period.

    d is the least positive power of tau landing inside the group, so the
    cosets group*tau^t repeat with period d and t is read modulo d.
    """

    group: PermGroup
    tau: Perm
    d: int = field(default=0)

    def __post_init__(self):
        if self.tau.degree != self.group.degree:
            raise ValidationError("tau degree does not match the group")
        tinv = self.tau.inverse()
        for g in self.group.generators:
            if tinv * g * self.tau not in self.group:
                raise ValidationError("tau does not normalize the group")
        d = 1
        power = self.tau
        while power not in self.group:
            power = power * self.tau
            d += 1
        if self.d and self.d != d:
            raise ValidationError(
                f"declared coset period {self.d} but tau enters the group at {d}"
            )
        object.__setattr__(self, "d", d)

    def coset(self, t: int) -> Iterator[Perm]:
        tt = self.tau ** (t % self.d)
        for g in self.group:
            yield g * tt


def _closed_residues(passing: set[int], d: int, what: str) -> FrobeniusSet:
    units = [u for u in range(1, d + 1) if math.gcd(u, d) == 1]
    for t in passing:
        for u in units:
            if (u * t) % d not in passing:
                raise InternalInvariantError(
                    f"{what} residues {sorted(passing)} mod {d} not unit-closed"
                )
    return from_residues(d, passing)


def coset_exceptionality(M: MonodromyData, mode: str = "exceptional") -> FrobeniusSet:
    """Residues t where every element of group*tau^t fixes exactly
    (mode "exceptional") or at least (mode "pr-exceptional") one point."""
    if mode not in ("exceptional", "pr-exceptional"):
        raise ValidationError(f"unknown mode {mode!r}")
    exact = mode == "exceptional"
    passing = set()
    for t in range(M.d):
        ok = True
        for h in M.coset(t):
            c = h.fixed_count()
            if (c != 1) if exact else (c < 1):
                ok = False
                break
        if ok:
            passing.add(t)
    return _closed_residues(passing, M.d, mode)


def cyclic_cover_model(n: int, q: int) -> MonodromyData:
    """Translations of Z/n with tau = multiplication by q.

    Predicts the power map x^n over a field of order q: the coset at t
    consists of the maps x -> q^t*x + b, with a unique fixed point exactly
    when q^t is not 1 mod n.
    """
    if n < 1 or q < 2 or math.gcd(n, q) != 1:
        raise ValidationError("need n >= 1 and q >= 2 with gcd(n, q) = 1")
    shift = Perm(tuple((i + 1) % n for i in range(n)))
    tau = Perm(tuple((i * q) % n for i in range(n)))
    return MonodromyData(PermGroup(n, (shift,)), tau)


def dickson_cover_model(n: int, q: int) -> MonodromyData:
    """Signed translations x -> +-x + b of Z/n with tau = multiplication by q."""
    if n < 3 or n % 2 == 0 or q < 2 or math.gcd(n, q) != 1:
        raise ValidationError("need odd n >= 3 and gcd(n, q) = 1")
    shift = Perm(tuple((i + 1) % n for i in range(n)))
    flip = Perm(tuple((-i) % n for i in range(n)))
    tau = Perm(tuple((i * q) % n for i in range(n)))
    return MonodromyData(PermGroup(n, (shift, flip)), tau)


# -- fiber products -----------------------------------------------------------------


def fiber_tensor(gens1: Sequence[Perm], gens2: Sequence[Perm]) -> list[Perm]:
    """Pairwise product action on V1 x V2, index (i, j) -> i*n2 + j."""
    if len(gens1) != len(gens2):
        raise ValidationError("parallel generator lists differ in length")
    out = []
    for a, b in zip(gens1, gens2):
        n1, n2 = a.degree, b.degree
        images = [0] * (n1 * n2)
        for i in range(n1):
            ai = a.act(i) * n2
            for j in range(n2):
                images[i * n2 + j] = ai + b.act(j)
        out.append(Perm(tuple(images)))
    return out


def component_count(perms: Sequence[Perm], off_diagonal: bool = False) -> int:
    """Orbit count of the generated group, optionally off the diagonal.

    With off_diagonal the permutations must act on V x V (a square degree)
    and preserve the set of pairs (i, j), i != j.
    """
    if not perms:
        raise ValidationError("need at least one permutation")
    N = perms[0].degree
    for g in perms:
        if g.degree != N:
            raise ValidationError("mixed degrees in component_count")
    if off_diagonal:
        n = math.isqrt(N)
        if n * n != N:
            raise ValidationError(f"degree {N} is not a square, cannot split pairs")
        diagonal = {i * n + i for i in range(n)}
        for g in perms:
            for x in diagonal:
                if g.act(x) not in diagonal:
                    raise ValidationError(
                        "action does not preserve the diagonal; off-diagonal "
                        "orbits are undefined"
                    )
        domain = [x for x in range(N) if x not in diagonal]
    else:
        domain = list(range(N))
    seen: set[int] = set()
    count = 0
    for s in domain:
        if s in seen:
            continue
        count += 1
        seen.add(s)
        queue = [s]
        while queue:
            x = queue.pop()
            for g in perms:
                y = g.act(x)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
    return count


# -- paired actions (range and fiber-count tests) -----------------------------------


class PairedMonodromy:
    """Two parallel actions of one group, under a common normalizing tau.

    Internally a single group on n1 + n2 letters whose generators act
    blockwise; tau either preserves the blocks (parallel images) or, when
    n1 = n2, may swap them wholesale.  A swapping coset exchanges the two
    fibers, so no range comparison can hold there.
    """

    def __init__(self, n1: int, n2: int, group: PermGroup, tau: Perm, swaps: bool):
        self.n1 = n1
        self.n2 = n2
        self.group = group
        self.tau = tau
        self.swaps = swaps
        d = 1
        power = tau
        while power not in group:
            power = power * tau
            d += 1
        self.d = d

    @classmethod
    def from_parallel(
        cls,
        gens1: Sequence[Perm],
        gens2: Sequence[Perm],
        tau1: Perm,
        tau2: Perm,
    ) -> "PairedMonodromy":
        combined = fiber_sum(gens1, gens2)
        tau = _block_sum(tau1, tau2)
        return cls._build(tau1.degree, tau2.degree, combined, tau)

    @classmethod
    def from_combined(
        cls, gens1: Sequence[Perm], gens2: Sequence[Perm], tau: Perm
    ) -> "PairedMonodromy":
        combined = fiber_sum(gens1, gens2)
        n1 = gens1[0].degree if gens1 else 0
        n2 = gens2[0].degree if gens2 else 0
        if not gens1 or not gens2:
            raise ValidationError("both actions need at least one generator")
        return cls._build(n1, n2, combined, tau)

    @classmethod
    def _build(cls, n1, n2, combined, tau):
        if tau.degree != n1 + n2:
            raise ValidationError(f"tau must act on {n1 + n2} letters")
        first_images = {tau.act(i) for i in range(n1)}
        if first_images <= set(range(n1)):
            swaps = False
        elif first_images.isdisjoint(range(n1)):
            if n1 != n2:
                raise ValidationError("block swap needs equal degrees")
            swaps = True
        else:
            raise ValidationError("tau splits a fiber across both blocks")
        group = group_from_gens(combined)
        tinv = tau.inverse()
        for g in group.generators:
            if tinv * g * tau not in group:
                raise ValidationError("tau does not normalize the paired group")
        return cls(n1, n2, group, tau, swaps)

    def fix_pair(self, h: Perm) -> tuple[int, int]:
        f1 = sum(1 for i in range(self.n1) if h.act(i) == i)
        f2 = sum(
            1 for i in range(self.n1, self.n1 + self.n2) if h.act(i) == i
        )
        return f1, f2


def fiber_sum(gens1: Sequence[Perm], gens2: Sequence[Perm]) -> list[Perm]:
    """Blockwise sum: each parallel pair acts on the disjoint union."""
    if len(gens1) != len(gens2):
        raise ValidationError("parallel generator lists differ in length")
    return [_block_sum(a, b) for a, b in zip(gens1, gens2)]


def _block_sum(a: Perm, b: Perm) -> Perm:
    n1 = a.degree
    return Perm(tuple(list(a.images) + [v + n1 for v in b.images]))


def _trace_residues(P: PairedMonodromy, agree, what: str) -> FrobeniusSet:
    passing = set()
    for t in range(P.d):
        if P.swaps and t % 2 == 1:
            continue  # this coset exchanges the two fibers outright
        tt = P.tau ** t
        if all(agree(*P.fix_pair(g * tt)) for g in P.group):
            passing.add(t)
    return _closed_residues(passing, P.d, what)


def davenport_trace_test(P: PairedMonodromy) -> FrobeniusSet:
    """Residues where both actions hit or both miss, for every coset element."""
    return _trace_residues(P, lambda a, b: (a > 0) == (b > 0), "range agreement")


def idp_trace_test(P: PairedMonodromy) -> FrobeniusSet:
    """Residues where the two fixed-point counts agree exactly."""
    return _trace_residues(P, lambda a, b: a == b, "fiber-count agreement")


def sdp_check(P: PairedMonodromy) -> bool:
    """Does the exact-count agreement hold at every residue?"""
    got = idp_trace_test(P)
    return got.modulus == 1 and not got.is_empty()


# -- the smallest projective plane ----------------------------------------------------


def _f2_matvec(m: tuple[tuple[int, ...], ...], v: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sum(r[j] * v[j] for j in range(3)) % 2 for r in m)


def _f2_inverse_transpose(m):
    # adjugate over F_2 equals the cofactor matrix; det must be 1
    def minor(r, c):
        rows = [i for i in range(3) if i != r]
        cols = [j for j in range(3) if j != c]
        return (
            m[rows[0]][cols[0]] * m[rows[1]][cols[1]]
            + m[rows[0]][cols[1]] * m[rows[1]][cols[0]]
        ) % 2

    det = sum(m[0][c] * minor(0, c) for c in range(3)) % 2
    if det != 1:
        raise InternalInvariantError("singular matrix in plane construction")
    # inverse = adjugate = transpose of cofactors; transpose again = cofactors
    return tuple(tuple(minor(r, c) for c in range(3)) for r in range(3))


def _vector(label: int) -> tuple[int, int, int]:
    return ((label >> 2) & 1, (label >> 1) & 1, label & 1)


def _label(v: tuple[int, ...]) -> int:
    return (v[0] << 2) | (v[1] << 1) | v[2]


def fano_actions() -> tuple[list[Perm], list[Perm]]:
    """Parallel generators of the plane of order 2 on points and on lines.

    Points are the 7 nonzero vectors of a 3-dimensional binary space, lines
    the 7 nonzero functionals, both labeled 1..7 by binary value.  The two
    generators are an order-7 cycle (companion of x^3 + x + 1) and a
    transvection; together they generate the full collineation group.
    """
    cyc = ((0, 0, 1), (1, 0, 1), (0, 1, 0))  # rows of the companion matrix
    trans = ((1, 1, 0), (0, 1, 0), (0, 0, 1))
    points, lines = [], []
    for m in (cyc, trans):
        mit = _f2_inverse_transpose(m)
        points.append(
            Perm(tuple(_label(_f2_matvec(m, _vector(i + 1))) - 1 for i in range(7)))
        )
        lines.append(
            Perm(tuple(_label(_f2_matvec(mit, _vector(i + 1))) - 1 for i in range(7)))
        )
    return points, lines


def block_swap(n: int) -> Perm:
    """The involution exchanging two n-letter blocks index-for-index."""
    return Perm(tuple(list(range(n, 2 * n)) + list(range(n))))


# -- JSON plumbing ------------------------------------------------------------------


def monodromy_from_json(obj: dict) -> Union[MonodromyData, PairedMonodromy]:
    """Build coset data from {degree, geomGens, tau, d?, action2?}.

    action2 holds {degree, geomGens, tau?} for parallel second images; with
    it present the result is a paired model, tau2 defaulting to a block
    swap being disallowed (it must be stated).
    """
    try:
        degree = int(obj["degree"])
        gens = [parse_perm(s, degree) for s in obj["geomGens"]]
    except KeyError as e:
        raise ValidationError(f"missing field {e.args[0]!r}") from None
    second = obj.get("action2")
    if second is None:
        tau = parse_perm(obj["tau"], degree) if "tau" in obj else Perm.identity(degree)
        M = MonodromyData(group_from_gens(gens), tau)
        if "d" in obj and int(obj["d"]) != M.d:
            raise ValidationError(
                f"declared d = {obj['d']} but tau enters the group at {M.d}"
            )
        return M
    degree2 = int(second["degree"])
    gens2 = [parse_perm(s, degree2) for s in second["geomGens"]]
    if "tau" in obj and "tau" in second:
        tau1 = parse_perm(obj["tau"], degree)
        tau2 = parse_perm(second["tau"], degree2)
        return PairedMonodromy.from_parallel(gens, gens2, tau1, tau2)
    if "tauCombined" in obj:
        tau = parse_perm(obj["tauCombined"], degree + degree2)
        return PairedMonodromy.from_combined(gens, gens2, tau)
    tau1 = Perm.identity(degree)
    tau2 = Perm.identity(degree2)
    return PairedMonodromy.from_parallel(gens, gens2, tau1, tau2)
