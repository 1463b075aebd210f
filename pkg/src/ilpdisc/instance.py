"""Problem instances, results, the JSON instance format, and a seeded generator."""

import json
import random
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from . import linalg
from .errors import RankDeficient

OPTIMAL = "optimal"
FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class IlpInstance:
    """``max c^T x  s.t.  A x = b,  x >= 0 integer``."""

    A: Tuple[Tuple[int, ...], ...]
    b: Tuple[int, ...]
    c: Tuple[int, ...]

    @classmethod
    def make(cls, A, b, c) -> "IlpInstance":
        return cls(tuple(tuple(int(v) for v in row) for row in A),
                   tuple(int(v) for v in b), tuple(int(v) for v in c))

    @property
    def k(self) -> int:
        return len(self.A)

    @property
    def n(self) -> int:
        return len(self.A[0]) if self.A else 0

    def validate(self):
        if self.k < 1 or self.n < 1 or any(len(r) != self.n for r in self.A):
            raise ValueError("A must be a nonempty rectangular matrix")
        if len(self.b) != self.k or len(self.c) != self.n:
            raise ValueError("b and c lengths must match A")
        if self.n < self.k or linalg.rank([list(r) for r in self.A]) < self.k:
            raise RankDeficient("A must have full row rank")

    def residual(self, x) -> List[int]:
        return [sum(a * v for a, v in zip(row, x)) - bi for row, bi in zip(self.A, self.b)]

    def is_solution(self, x) -> bool:
        return len(x) == self.n and all(v >= 0 for v in x) and not any(self.residual(x))

    def objective(self, x) -> int:
        return sum(ci * v for ci, v in zip(self.c, x))

    def with_rhs(self, b) -> "IlpInstance":
        return IlpInstance(self.A, tuple(int(v) for v in b), self.c)


@dataclass
class SolveResult:
    status: str
    objective: Optional[int] = None
    x: Optional[List[int]] = None
    stats: dict = field(default_factory=dict)


# JSON instance files ---------------------------------------------------------------

def instance_to_dict(inst: IlpInstance, comment: Optional[str] = None) -> dict:
    d = {"k": inst.k, "n": inst.n, "A": [list(r) for r in inst.A],
         "b": list(inst.b), "c": list(inst.c)}
    if comment:
        d["comment"] = comment
    return d


def instance_from_dict(d: dict) -> IlpInstance:
    try:
        k, n = int(d["k"]), int(d["n"])
        A = d["A"]
        if A and not isinstance(A[0], list):
            A = [A[i * n:(i + 1) * n] for i in range(k)]
        if len(A) != k or any(len(r) != n for r in A):
            raise ValueError(f"A is not {k}x{n}")
        b = d["b"]
        c = d.get("c", [0] * n)
        if len(b) != k or len(c) != n:
            raise ValueError("b or c has the wrong length")
        for v in [x for r in A for x in r] + list(b) + list(c):
            if not isinstance(v, int) or isinstance(v, bool):
                raise ValueError(f"non-integer entry {v!r}")
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed instance: {exc}") from exc
    inst = IlpInstance.make(A, b, c)
    inst.validate()
    return inst


def load_instance(path) -> IlpInstance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def dump_instance(inst: IlpInstance, comment=None) -> str:
    return json.dumps(instance_to_dict(inst, comment))


# generation ------------------------------------------------------------------

def random_instance(k: int, n: int, max_entry: int, rng: random.Random,
                    feasible: bool = False, positive_row: bool = False,
                    max_x: int = 2, max_c: int = 5) -> IlpInstance:
    """Full-row-rank instance; resamples ``A`` until its rank is ``k``.

    ``positive_row`` forces the first row of ``A`` to be strictly positive,
    which bounds the feasible region by ``b[0]``.  With ``feasible`` the
    right-hand side is ``A x0`` for a random ``x0 >= 0``.
    """
    while True:
        A = [[rng.randint(-max_entry, max_entry) for _ in range(n)] for _ in range(k)]
        if positive_row:
            A[0] = [rng.randint(1, max_entry) for _ in range(n)]
        if linalg.rank(A) == k:
            break
    c = [rng.randint(-max_c, max_c) for _ in range(n)]
    if feasible:
        x0 = [rng.randint(0, max_x) for _ in range(n)]
        b = [sum(a * v for a, v in zip(row, x0)) for row in A]
    else:
        b = [sum(a * rng.randint(0, max_x) for a in row) + rng.randint(-1, 1) for row in A]
    return IlpInstance.make(A, b, c)


def delta_family_instance(k: int, delta: int, rng: random.Random) -> IlpInstance:
    """Nonnegative instance with ``Delta(A) == delta`` (for ``delta >= 2``).

    Columns are the unit vectors, ``(1,...,1,delta)`` and ``(1,...,1)``.
    """
    cols = [[int(i == j) for i in range(k)] for j in range(k)]
    cols.append([1] * (k - 1) + [delta])
    cols.append([1] * k)
    A = [[col[i] for col in cols] for i in range(k)]
    n = len(cols)
    x0 = [rng.randint(0, 3) for _ in range(n)]
    b = [sum(a * v for a, v in zip(row, x0)) for row in A]
    c = [rng.randint(-3, 5) for _ in range(n)]
    return IlpInstance.make(A, b, c)
