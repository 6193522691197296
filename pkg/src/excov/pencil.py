"""Hyperelliptic pencil error sums and the value-collision identity.

Attach to a polynomial f over an odd prime field the pencil of curves
y^2 = f(x) + lambda.  Each member misses its median point count by some
error E_lambda, and the sum of the squared errors collapses to a value
statistic of f itself: W = p * N_f, with N_f the number of off-diagonal
collisions f(x) = f(y).  Scaled by p, the collision count estimates how
many components of the collision curve survive over the base field, and
that estimate can be cross-checked against a translation model.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceededError, InternalInvariantError, ValidationError
from .grouptheory import MonodromyData, fiber_tensor
from .projmap import Poly

PENCIL_PRIME_CAP = 499  # the double loop is quadratic in p


@dataclass(frozen=True)
class PencilReport:
    p: int
    coeffs: tuple[int, ...]  # of f, low to high, as residues
    e_values: tuple[int, ...]  # E_lambda for lambda = 0 .. p-1
    w: int
    n_f: int
    identity_ok: bool
    k_f_estimate: int
    deviation: int  # |N_f - k_f_estimate * p|

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "coeffs": list(self.coeffs),
            "e_values": list(self.e_values),
            "w": self.w,
            "n_f": self.n_f,
            "identity_ok": self.identity_ok,
            "k_f_estimate": self.k_f_estimate,
            "deviation": self.deviation,
        }


def pencil_scan(f: Poly) -> PencilReport:
    """Error sums of the pencil y^2 = f(x) + lambda over the prime field of f.

    E_lambda comes from summing the quadratic character of f(x) + lambda
    over x, W from squaring, and N_f from the value histogram of f; the
    exact identity W = p * N_f is asserted, not merely reported.
    """
    ctx = f.ctx
    p = ctx.p
    if ctx.order != p:
        raise ValidationError("pencil scans run over prime fields only")
    if p == 2:
        raise ValidationError("even characteristic has no quadratic character")
    if p > PENCIL_PRIME_CAP:
        raise CapExceededError(f"p = {p} exceeds the pencil cap {PENCIL_PRIME_CAP}")
    if f.degree < 1:
        raise ValidationError("need deg f >= 1")

    chi = [0] * p  # quadratic character by Euler's criterion
    for v in range(1, p):
        chi[v] = 1 if pow(v, (p - 1) // 2, p) == 1 else -1

    values = [f(ctx.from_int(x)).index for x in range(p)]
    counts = [0] * p
    for v in values:
        counts[v] += 1
    n_f = sum(c * (c - 1) for c in counts)

    e_values = []
    for lam in range(p):
        e_values.append(sum(chi[(v + lam) % p] for v in values))
    w = sum(e * e for e in e_values)

    if w != p * n_f:
        raise InternalInvariantError(
            f"squared error sum {w} differs from p * N_f = {p * n_f}"
        )
    k = (2 * n_f + p) // (2 * p)  # nearest integer to N_f / p
    return PencilReport(
        p=p,
        coeffs=tuple(c.index for c in f.coeffs),
        e_values=tuple(e_values),
        w=w,
        n_f=n_f,
        identity_ok=True,
        k_f_estimate=k,
        deviation=abs(n_f - k * p),
    )


def stable_component_count(model: MonodromyData) -> int:
    """Off-diagonal orbits of the geometric group that the t=1 coset fixes.

    Orbits of the diagonal action on pairs play the role of components of
    the collision locus over the algebraic closure; only the orbits sent
    to themselves by the Frobenius element survive over the base field.
    """
    gens = list(model.group.generators)
    pair_gens = fiber_tensor(gens, gens)
    n = model.group.degree
    N = n * n
    cell = [-1] * N
    next_label = 0
    for s in range(N):
        if cell[s] >= 0 or s // n == s % n:
            continue
        cell[s] = next_label
        frontier = [s]
        while frontier:
            x = frontier.pop()
            for g in pair_gens:
                y = g.act(x)
                if cell[y] < 0:
                    cell[y] = next_label
                    frontier.append(y)
        next_label += 1
    tau_pair = fiber_tensor([model.tau], [model.tau])[0]
    stable = 0
    for label in range(next_label):
        members = [x for x in range(N) if cell[x] == label]
        if all(cell[tau_pair.act(x)] == label for x in members):
            stable += 1
    return stable


@dataclass(frozen=True)
class KfCrossCheck:
    report: PencilReport
    model_count: int
    bound: float  # (deg f)^2 * (2 sqrt(p) + 1)
    ok: bool

    def to_json_dict(self) -> dict:
        return {
            "report": self.report.to_json_dict(),
            "model_count": self.model_count,
            "bound": self.bound,
            "ok": self.ok,
        }


def kf_cross_check(f: Poly, model: MonodromyData) -> KfCrossCheck:
    """Compare the collision estimate of f against a monodromy model.

    Passes when |N_f - model_count * p| stays inside the generous
    square-root envelope (deg f)^2 (2 sqrt p + 1); this is a sanity check
    on the model, not a certified bound.
    """
    report = pencil_scan(f)
    k_model = stable_component_count(model)
    bound = f.degree ** 2 * (2 * report.p ** 0.5 + 1)
    ok = abs(report.n_f - k_model * report.p) <= bound
    return KfCrossCheck(report=report, model_count=k_model, bound=bound, ok=ok)
