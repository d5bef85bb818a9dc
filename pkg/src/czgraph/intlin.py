"""Exact integer linear algebra: Hermite/Smith normal forms and Diophantine
systems with certificates.

Everything here is fraction-free elimination over Python ints with explicit
unimodular transform tracking.  The matrices that show up in practice are
tiny (a few dozen rows), so clarity wins over asymptotics; there are no
modular or floating-point shortcuts anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class DimensionError(ValueError):
    pass


class IntMatrix:
    """Dense integer matrix, row-major, immutable."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence[int]):
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise DimensionError(
                f"entry count {len(entries)} does not match shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.entries = tuple(int(e) for e in entries)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        data = [list(r) for r in rows]
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise DimensionError("ragged rows")
        else:
            width = cols or 0
        flat = [int(x) for row in data for x in row]
        return cls(len(data), width, flat)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, [0] * (rows * cols))

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(idx)
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list[int]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def col(self, j: int) -> list[int]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def to_rows(self) -> list[list[int]]:
        return [self.row(i) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def matmul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by "
                                 f"{other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                out.append(sum(ri[k] * other[k, j] for k in range(self.cols)))
        return IntMatrix(self.rows, other.cols, out)

    def apply(self, vec: Sequence[int]) -> list[int]:
        if len(vec) != self.cols:
            raise DimensionError(f"vector of length {len(vec)} against {self.cols} columns")
        return [sum(self[i, k] * int(vec[k]) for k in range(self.cols))
                for i in range(self.rows)]

    def __eq__(self, other) -> bool:
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_rows()!r})"


def determinant(A: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if A.rows != A.cols:
        raise DimensionError("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return 1
    m = A.to_rows()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def hermite_normal_form(A: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns (H, U) with H = U*A, U unimodular, H in row echelon form with
    positive pivots and entries above each pivot reduced into [0, pivot).
    The nonzero rows of H are a basis of the row lattice of A.
    """
    m, n = A.rows, A.cols
    H = A.to_rows()
    U = IntMatrix.identity(m).to_rows()

    def sub(i: int, j: int, q: int) -> None:
        if q:
            H[i] = [a - q * b for a, b in zip(H[i], H[j])]
            U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    r = 0
    for c in range(n):
        while True:
            nz = [i for i in range(r, m) if H[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: (abs(H[i][c]), i))
            if i0 != r:
                H[r], H[i0] = H[i0], H[r]
                U[r], U[i0] = U[i0], U[r]
            finished = True
            for i in range(r + 1, m):
                if H[i][c]:
                    sub(i, r, H[i][c] // H[r][c])
                    if H[i][c]:
                        finished = False
            if finished:
                break
        if r < m and H[r][c]:
            if H[r][c] < 0:
                H[r] = [-a for a in H[r]]
                U[r] = [-a for a in U[r]]
            for i in range(r):
                sub(i, r, H[i][c] // H[r][c])
            r += 1
    return IntMatrix.from_rows(H, cols=n), IntMatrix.from_rows(U, cols=m)


def hnf_basis(vectors: Iterable[Sequence[int]], width: int | None = None) -> list[list[int]]:
    """Nonzero rows of the HNF of the given row vectors (a lattice basis)."""
    vecs = [list(v) for v in vectors]
    if not vecs:
        return []
    H, _ = hermite_normal_form(IntMatrix.from_rows(vecs, cols=width))
    return [row for row in H.to_rows() if any(row)]


@dataclass(frozen=True)
class DiophantineResult:
    """Outcome of an integer linear system A x = b.

    When feasible, `solution` satisfies A*solution = b exactly and
    `kernel_basis` generates the full integer kernel of A, so the solution
    set is solution + Z-span(kernel_basis).
    """

    feasible: bool
    solution: tuple[int, ...] | None
    kernel_basis: tuple[tuple[int, ...], ...]


def _pivot_positions(H: IntMatrix) -> list[tuple[int, int]]:
    out = []
    for i in range(H.rows):
        row = H.row(i)
        for j, v in enumerate(row):
            if v:
                out.append((i, j))
                break
    return out


def solve_diophantine(A: IntMatrix, b: Sequence[int]) -> DiophantineResult:
    """Decide b in the integer column span of A, with witness and kernel.

    Works from the HNF of A^T: the pivot rows give forced back-substitution
    coefficients, the transform rows beyond the rank give the kernel.
    """
    if len(b) != A.rows:
        raise DimensionError(f"rhs length {len(b)} does not match {A.rows} rows")
    H, U = hermite_normal_form(A.transpose())
    pivots = _pivot_positions(H)
    rank = len(pivots)
    kernel = tuple(tuple(U.row(i)) for i in range(rank, A.cols))

    residual = [int(x) for x in b]
    y = [0] * A.cols
    for i, p in pivots:
        h = H[i, p]
        if residual[p] % h != 0:
            return DiophantineResult(False, None, kernel)
        q = residual[p] // h
        y[i] = q
        if q:
            row = H.row(i)
            residual = [a - q * v for a, v in zip(residual, row)]
    if any(residual):
        return DiophantineResult(False, None, kernel)
    # b = y*H = y*U*A^T, hence x = U^T y solves A x = b.
    x = U.transpose().apply(y)
    return DiophantineResult(True, tuple(x), kernel)


def lattice_membership(generators: Sequence[Sequence[int]],
                       target: Sequence[int]) -> tuple[bool, tuple[int, ...] | None]:
    """Decide target in Z-span(generators); on success return coefficients.

    All vectors must have equal length.  The coefficient vector is indexed
    like `generators` and satisfies sum(c_i * g_i) = target exactly.
    """
    gens = [list(g) for g in generators]
    tgt = [int(t) for t in target]
    if not gens:
        return (not any(tgt)), (() if not any(tgt) else None)
    width = len(gens[0])
    if any(len(g) != width for g in gens) or len(tgt) != width:
        raise DimensionError("generator/target length mismatch")
    A = IntMatrix.from_rows(gens).transpose()
    result = solve_diophantine(A, tgt)
    if not result.feasible:
        return False, None
    return True, result.solution


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended gcd: returns (g, u, v) with u*a + v*b = g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def smith_normal_form(A: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form D = U*A*V with U, V unimodular and d_i | d_{i+1}.

    Diagonalizes by alternating row and column HNF passes (each pass is
    unimodular and they stabilize quickly at this scale), then repairs the
    divisibility chain with explicit 2x2 transforms.  Used as an independent
    cross-check of the HNF-based Diophantine solver.
    """
    U = IntMatrix.identity(A.rows)
    V = IntMatrix.identity(A.cols)
    D = A
    for _ in range(200):
        H, U1 = hermite_normal_form(D)
        U = U1.matmul(U)
        Ht, V1 = hermite_normal_form(H.transpose())
        V = V.matmul(V1.transpose())
        D = Ht.transpose()
        if _is_diagonal(D):
            break
    else:
        raise RuntimeError("Smith normal form did not diagonalize")

    Dr = D.to_rows()
    Ur = U.to_rows()
    Vr = V.to_rows()
    rank = sum(1 for i in range(min(A.rows, A.cols)) if Dr[i][i])
    # Repair d_i | d_{i+1}: for diag(a, b) with g = gcd, l = lcm,
    # [[u, v], [-b/g, a/g]] * diag(a, b) * [[1, -v*b/g], [1, u*a/g]] = diag(g, l).
    done = False
    while not done:
        done = True
        for i in range(rank - 1):
            a, b = Dr[i][i], Dr[i + 1][i + 1]
            if b % a == 0:
                continue
            done = False
            g, u, v = _xgcd(a, b)
            lcm = a * b // g
            Dr[i][i], Dr[i + 1][i + 1] = g, lcm
            row_a, row_b = Ur[i], Ur[i + 1]
            Ur[i] = [u * x + v * y for x, y in zip(row_a, row_b)]
            Ur[i + 1] = [(-b // g) * x + (a // g) * y for x, y in zip(row_a, row_b)]
            for r in range(A.cols):
                ci, cj = Vr[r][i], Vr[r][i + 1]
                Vr[r][i] = ci + cj
                Vr[r][i + 1] = (-v * b // g) * ci + (u * a // g) * cj
    return (IntMatrix.from_rows(Dr, cols=A.cols),
            IntMatrix.from_rows(Ur, cols=A.rows),
            IntMatrix.from_rows(Vr, cols=A.cols))


def _is_diagonal(D: IntMatrix) -> bool:
    return all(D[i, j] == 0
               for i in range(D.rows) for j in range(D.cols) if i != j)
