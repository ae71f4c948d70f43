"""Finite Coxeter systems realized as reflection groups.

A system is built numerically (roots as unit vectors for the cosine form),
then all group arithmetic happens exactly through permutations of root
indices.  This keeps floating point out of every downstream combinatorial
computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CapExceeded,
    DegenerateForm,
    DifferentAmbient,
    InvalidMatrix,
    NotAReflection,
)

TOL = 1e-9

DEFAULT_ELEMENT_CAP = 1_000_000
DEFAULT_ROOT_CAP = 10_000


# ---------------------------------------------------------------------------
# Coxeter matrices


@dataclass(frozen=True)
class CoxeterMatrix:
    """Symmetric integer matrix m_ij with m_ii = 1 and m_ij >= 2 off the
    diagonal (0 encodes an infinite bond).

    Rank 0 is allowed and denotes the trivial type, used for degenerate
    thick frames.
    """

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        for i, row in enumerate(self.entries):
            if len(row) != n:
                raise InvalidMatrix(f"row {i} has length {len(row)}, expected {n}")
            for j, m in enumerate(row):
                if not isinstance(m, int):
                    raise InvalidMatrix(f"entry ({i},{j}) is not an integer")
                if i == j and m != 1:
                    raise InvalidMatrix(f"diagonal entry ({i},{i}) must be 1")
                if i != j and m != 0 and m < 2:
                    raise InvalidMatrix(f"entry ({i},{j}) must be >= 2 or 0")
                if m != self.entries[j][i]:
                    raise InvalidMatrix(f"matrix not symmetric at ({i},{j})")

    @property
    def rank(self) -> int:
        return len(self.entries)

    def entry(self, i: int, j: int) -> int:
        return self.entries[i][j]

    @property
    def is_finite_type_candidate(self) -> bool:
        """True when no bond is marked infinite."""
        return all(m != 0 for row in self.entries for m in row)

    def block_sum(self, other: "CoxeterMatrix") -> "CoxeterMatrix":
        """Direct sum: generators of ``other`` commute with those of ``self``."""
        n, k = self.rank, other.rank
        rows = []
        for i in range(n):
            rows.append(tuple(self.entries[i]) + tuple(2 for _ in range(k)))
        for i in range(k):
            rows.append(tuple(2 for _ in range(n)) + tuple(other.entries[i]))
        return CoxeterMatrix(tuple(rows))

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]]) -> "CoxeterMatrix":
        return CoxeterMatrix(tuple(tuple(int(m) for m in row) for row in rows))

    @staticmethod
    def trivial() -> "CoxeterMatrix":
        return CoxeterMatrix(())

    @staticmethod
    def from_name(name: str) -> "CoxeterMatrix":
        """Parse names like ``"C2"``, ``"H3"`` or products like ``"A1xA1xA1"``."""
        parts = [p for p in name.strip().split("x") if p]
        if not parts:
            raise InvalidMatrix(f"empty type name {name!r}")
        matrix = _atom_matrix(parts[0])
        for part in parts[1:]:
            matrix = matrix.block_sum(_atom_matrix(part))
        return matrix

    def __str__(self):
        return "[" + "; ".join(" ".join(str(m) for m in row) for row in self.entries) + "]"


def _chain_matrix(bonds: Sequence[int]) -> CoxeterMatrix:
    n = len(bonds) + 1
    rows = [[2] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = 1
    for i, m in enumerate(bonds):
        rows[i][i + 1] = rows[i + 1][i] = m
    return CoxeterMatrix.from_rows(rows)


def _atom_matrix(atom: str) -> CoxeterMatrix:
    atom = atom.strip().upper()
    if len(atom) < 2 or not atom[1:].isdigit():
        raise InvalidMatrix(f"unknown type atom {atom!r}")
    family, n = atom[0], int(atom[1:])
    if family == "A" and n >= 1:
        return _chain_matrix([3] * (n - 1))
    if family in ("B", "C") and n >= 2:
        return _chain_matrix([3] * (n - 2) + [4])
    if family == "D" and n == 4:
        rows = [[1, 3, 2, 2], [3, 1, 3, 3], [2, 3, 1, 2], [2, 3, 2, 1]]
        return CoxeterMatrix.from_rows(rows)
    if family == "F" and n == 4:
        return _chain_matrix([3, 4, 3])
    if family == "G" and n == 2:
        return _chain_matrix([6])
    if family == "H" and n == 3:
        return _chain_matrix([5, 3])
    if family == "H" and n == 4:
        return _chain_matrix([5, 3, 3])
    if family == "I" and n >= 3:
        # I2(m) written as "I<m>"
        return _chain_matrix([n])
    raise InvalidMatrix(f"unknown type atom {atom!r}")


# ---------------------------------------------------------------------------
# Bilinear form


def bilinear_form(matrix: CoxeterMatrix) -> np.ndarray:
    """Cosine form of the reflection representation.

    B(e_i, e_j) = -cos(pi / m_ij) for finite bonds, -1 for infinite ones.
    """
    n = matrix.rank
    form = np.empty((n, n), dtype=float)
    for i in range(n):
        for j in range(n):
            m = matrix.entry(i, j)
            form[i, j] = -1.0 if m == 0 else -math.cos(math.pi / m)
    return form


# ---------------------------------------------------------------------------
# Coxeter systems


@dataclass(frozen=True)
class Element:
    """Group element stored as a permutation of root indices."""

    perm: tuple[int, ...]
    length: int
    word: tuple[int, ...]


class CoxeterSystem:
    """A finite Coxeter group with its full root set and element list.

    Roots are indexed with all positive roots first; root ``N + i`` is the
    negative of root ``i`` where ``N`` is ``positive_count``.  Elements act
    on roots through ``Element.perm``.
    """

    def __init__(self, matrix, form, roots, positive_count, elements, index_of, longest):
        self.matrix = matrix
        self.form = form
        self.roots = roots
        self.positive_count = positive_count
        self.generators = tuple(range(matrix.rank))  # root indices of simple roots
        self.elements = elements
        self._index_of = index_of
        self.longest = longest
        self._inverse = None
        self._mult_table = None
        self._reflection_by_root = None
        self._root_by_reflection = None

    # -- basic queries ----------------------------------------------------

    @property
    def rank(self) -> int:
        return self.matrix.rank

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> int:
        return 0

    def generator_element(self, s: int) -> int:
        """Element index of the simple reflection s."""
        if self.rank == 0:
            raise IndexError("trivial system has no generators")
        return self._gen_elements[s]

    def opposite_root(self, i: int) -> int:
        n = self.positive_count
        return i + n if i < n else i - n

    def is_positive_root(self, i: int) -> bool:
        return i < self.positive_count

    # -- group arithmetic --------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        """Index of the product ab."""
        if self._mult_table is not None:
            return self._mult_table[a][b]
        pa = self.elements[a].perm
        pb = self.elements[b].perm
        return self._index_of[tuple(pa[i] for i in pb)]

    def inv(self, a: int) -> int:
        if self._inverse is None:
            inverse = [0] * len(self.elements)
            for idx, el in enumerate(self.elements):
                p = el.perm
                q = [0] * len(p)
                for i, j in enumerate(p):
                    q[j] = i
                inverse[idx] = self._index_of[tuple(q)]
            self._inverse = inverse
        return self._inverse[a]

    def conj(self, a: int, b: int) -> int:
        """a b a^{-1}."""
        return self.mul(self.mul(a, b), self.inv(a))

    def build_mult_table(self) -> None:
        """Cache the full multiplication table (worth it below ~1000 elements)."""
        if self._mult_table is not None:
            return
        perms = [el.perm for el in self.elements]
        index_of = self._index_of
        table = []
        for pa in perms:
            row = [index_of[tuple(pa[i] for i in pb)] for pb in perms]
            table.append(row)
        self._mult_table = table

    def word_to_element(self, word: Iterable[int]) -> int:
        e = self.identity
        for s in word:
            e = self.mul(e, self.generator_element(s))
        return e

    def element_order(self, a: int) -> int:
        order, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            order += 1
        return order

    def act(self, a: int, root_index: int) -> int:
        return self.elements[a].perm[root_index]

    # -- reflections -------------------------------------------------------

    def _build_reflections(self) -> None:
        if self._reflection_by_root is not None:
            return
        refl_by_root = {}
        root_by_refl = {}
        n = self.positive_count
        for i in range(n):
            beta = self.roots[i]
            images = self.roots - 2.0 * (self.roots @ (self.form @ beta))[:, None] * beta
            perm = tuple(self._root_index(v) for v in images)
            idx = self._index_of.get(perm)
            if idx is None:
                raise InvalidMatrix("root reflection escaped the enumerated group")
            refl_by_root[i] = idx
            root_by_refl[idx] = i
        self._reflection_by_root = refl_by_root
        self._root_by_reflection = root_by_refl

    @property
    def reflections(self) -> frozenset[int]:
        """Element indices of all reflections (one per positive root)."""
        self._build_reflections()
        return frozenset(self._root_by_reflection)

    def reflection_of_root(self, root_index: int) -> int:
        self._build_reflections()
        if root_index >= self.positive_count:
            root_index = self.opposite_root(root_index)
        return self._reflection_by_root[root_index]

    def root_of_reflection(self, element_index: int) -> int:
        """Positive root index fixed-hyperplane-wise by the reflection."""
        self._build_reflections()
        try:
            return self._root_by_reflection[element_index]
        except KeyError:
            raise NotAReflection(f"element {element_index} is not a reflection")

    def is_reflection(self, element_index: int) -> bool:
        self._build_reflections()
        return element_index in self._root_by_reflection

    def _root_index(self, v: np.ndarray) -> int:
        d = np.abs(self.roots - v).max(axis=1)
        i = int(np.argmin(d))
        if d[i] > 1e-6:
            raise InvalidMatrix("image of a root is not a root")
        return i

    def describe(self) -> str:
        return (
            f"rank {self.rank}, order {self.order}, "
            f"{self.positive_count} reflections, "
            f"longest element length {self.elements[self.longest].length}"
        )


def build_system(
    matrix: CoxeterMatrix,
    element_cap: int = DEFAULT_ELEMENT_CAP,
    root_cap: int = DEFAULT_ROOT_CAP,
) -> CoxeterSystem:
    """Realize a finite Coxeter group from its matrix.

    Roots are enumerated by closing the simple roots under the generator
    reflections (deduplicated at 1e-9); elements by breadth-first closure of
    the induced root permutations.  Raises CapExceeded when either closure
    outgrows its cap, InvalidMatrix for malformed or infinite-bond input.
    """
    if not matrix.is_finite_type_candidate:
        raise InvalidMatrix("infinite bonds (entry 0) are not supported")
    n = matrix.rank
    form = bilinear_form(matrix)

    if n == 0:
        system = CoxeterSystem(
            matrix=matrix,
            form=form.reshape(0, 0),
            roots=np.zeros((0, 0)),
            positive_count=0,
            elements=[Element(perm=(), length=0, word=())],
            index_of={(): 0},
            longest=0,
        )
        system._gen_elements = ()
        return system

    # Root closure.  Simple root i is the basis vector e_i; a generator acts
    # by v -> v - 2 B(e_s, v) e_s.
    def reflect(s, v):
        w = v.copy()
        w -= 2.0 * float(form[s] @ v) * _unit(n, s)
        return w

    def key(v):
        return tuple(0.0 if abs(x) < TOL else round(x, 9) for x in v)

    positives: list[np.ndarray] = [_unit(n, i) for i in range(n)]
    seen: dict[tuple, int] = {key(v): i for i, v in enumerate(positives)}

    head = 0
    while head < len(positives):
        v = positives[head]
        head += 1
        for s in range(n):
            w = reflect(s, v)
            if key(w) in seen or key(-w) in seen:
                continue
            # store the positive representative of the new +/- pair
            if _is_nonneg(-w):
                w = -w
            elif not _is_nonneg(w):
                raise InvalidMatrix("root with mixed signs; representation inconsistent")
            seen[key(w)] = len(positives)
            positives.append(w)
            if 2 * len(positives) > root_cap:
                raise CapExceeded(f"root closure exceeded cap {root_cap}")

    pos = np.array(positives)
    roots = np.vstack([pos, -pos])
    count = len(positives)

    def root_index(v) -> int:
        k = key(v)
        if k in seen:
            return seen[k]
        k = key(-v)
        if k in seen:
            return seen[k] + count
        raise InvalidMatrix("image of a root is not a root")

    gen_perms = []
    for s in range(n):
        images = roots - 2.0 * (roots @ form[s])[:, None] * _unit(n, s)
        gen_perms.append(tuple(root_index(v) for v in images))

    # Element closure (breadth-first over right multiplication, so BFS words
    # are reduced and BFS depth equals Coxeter length).
    identity = tuple(range(2 * count))
    elements = [Element(perm=identity, length=0, word=())]
    index_of = {identity: 0}
    head = 0
    while head < len(elements):
        el = elements[head]
        head += 1
        for s in range(n):
            gp = gen_perms[s]
            new = tuple(el.perm[gp[i]] for i in range(2 * count))
            if new in index_of:
                continue
            if len(elements) >= element_cap:
                raise CapExceeded(f"element closure exceeded cap {element_cap}")
            index_of[new] = len(elements)
            elements.append(Element(perm=new, length=el.length + 1, word=el.word + (s,)))

    longest = None
    for idx, el in enumerate(elements):
        if all(el.perm[i] >= count for i in range(count)):
            longest = idx
            break
    if longest is None:
        raise InvalidMatrix("no longest element found; group not finite?")

    system = CoxeterSystem(
        matrix=matrix,
        form=form,
        roots=roots,
        positive_count=count,
        elements=elements,
        index_of=index_of,
        longest=longest,
    )
    system._gen_elements = tuple(index_of[gp] for gp in gen_perms)
    return system


def _unit(n: int, i: int) -> np.ndarray:
    v = np.zeros(n)
    v[i] = 1.0
    return v


def _is_nonneg(v: np.ndarray) -> bool:
    return bool((v > -TOL).all())


@lru_cache(maxsize=None)
def system_from_name(name: str) -> CoxeterSystem:
    return build_system(CoxeterMatrix.from_name(name))


# ---------------------------------------------------------------------------
# Reflection subgroups


@dataclass(frozen=True)
class ReflectionSubgroup:
    """A subgroup generated by reflections of an ambient system.

    ``reflections`` is closed under conjugation by itself.  Canonical
    generators are the reflections whose walls bound the subgroup chamber
    containing the ambient fundamental chamber, ordered by positive root
    index.  ``embedding`` maps subgroup simple generator j to the ambient
    element ``canonical_generators[j]``.
    """

    ambient: CoxeterSystem
    reflections: frozenset[int]
    canonical_generators: tuple[int, ...]
    matrix: CoxeterMatrix

    @property
    def rank(self) -> int:
        return len(self.canonical_generators)

    @property
    def embedding(self) -> tuple[int, ...]:
        return self.canonical_generators

    def element_indices(self) -> frozenset[int]:
        """All ambient element indices of the generated subgroup."""
        sys = self.ambient
        group = {sys.identity}
        frontier = [sys.identity]
        while frontier:
            nxt = []
            for g in frontier:
                for r in self.canonical_generators:
                    h = sys.mul(g, r)
                    if h not in group:
                        group.add(h)
                        nxt.append(h)
            frontier = nxt
        return frozenset(group)

    def canonical_index(self, element_index: int):
        """Position of an ambient reflection among the canonical generators."""
        try:
            return self.canonical_generators.index(element_index)
        except ValueError:
            return None


def fundamental_interior_point(sys: CoxeterSystem) -> np.ndarray:
    """The point x0 with B(e_i, x0) = 1 for every simple root; it lies
    strictly inside the fundamental chamber."""
    return np.linalg.solve(sys.form, np.ones(sys.rank))


def reflection_subgroup(sys: CoxeterSystem, reflection_set: Iterable[int]) -> ReflectionSubgroup:
    """Close a reflection set under self-conjugation and compute its
    canonical generators and Coxeter matrix.

    A reflection r is canonical when the segment from x0 (interior to the
    fundamental chamber) to r(x0) crosses no subgroup hyperplane other than
    the wall of r itself.
    """
    refl = set(reflection_set)
    for r in refl:
        if not sys.is_reflection(r):
            raise NotAReflection(f"element {r} is not a reflection")

    changed = True
    while changed:
        changed = False
        for a in list(refl):
            for b in list(refl):
                c = sys.conj(a, b)
                if c not in refl:
                    refl.add(c)
                    changed = True

    if not refl:
        return ReflectionSubgroup(
            ambient=sys,
            reflections=frozenset(),
            canonical_generators=(),
            matrix=CoxeterMatrix.trivial(),
        )

    x0 = fundamental_interior_point(sys)
    roots = {r: sys.roots[sys.root_of_reflection(r)] for r in refl}
    values_x0 = {r: float(sys.form @ roots[r] @ x0) for r in refl}

    canonical = []
    for r in sorted(refl, key=sys.root_of_reflection):
        beta = roots[r]
        rx0 = x0 - 2.0 * float(beta @ sys.form @ x0) * beta
        crossings = 0
        for s in refl:
            v0 = values_x0[s]
            v1 = float(roots[s] @ sys.form @ rx0)
            if abs(v0) < TOL or abs(v1) < TOL:
                raise DegenerateForm("interior point landed on a subgroup wall")
            if (v0 > 0) != (v1 > 0):
                crossings += 1
        if crossings == 1:
            canonical.append(r)

    k = len(canonical)
    rows = [[1] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            m = sys.element_order(sys.mul(canonical[i], canonical[j]))
            rows[i][j] = rows[j][i] = m
    return ReflectionSubgroup(
        ambient=sys,
        reflections=frozenset(refl),
        canonical_generators=tuple(canonical),
        matrix=CoxeterMatrix.from_rows(rows),
    )


# ---------------------------------------------------------------------------
# Geometric splitting


@dataclass(frozen=True)
class Splitting:
    """Orthogonal decomposition V = V_bar + U induced by a reflection
    subgroup: U is the intersection of the canonical generator hyperplanes,
    V_bar its B-orthogonal complement."""

    subspace_bar: np.ndarray  # shape (k, n), B-orthonormal rows
    subspace_u: np.ndarray  # shape (n - k, n), B-orthonormal rows
    k: int


def geometric_splitting(sub: ReflectionSubgroup) -> Splitting:
    sys = sub.ambient
    n = sys.rank
    eigvals = np.linalg.eigvalsh(sys.form) if n else np.array([1.0])
    if eigvals.min() < TOL:
        raise DegenerateForm("bilinear form is not positive definite")

    if sub.rank == 0:
        u = _b_orthonormalize(np.eye(n), sys.form)
        return Splitting(subspace_bar=np.zeros((0, n)), subspace_u=u, k=0)

    normals = np.array(
        [sys.form @ sys.roots[sys.root_of_reflection(r)] for r in sub.canonical_generators]
    )
    u_basis = _null_space(normals, n)
    if u_basis.shape[0] != n - sub.rank:
        raise DegenerateForm(
            f"hyperplane intersection has dimension {u_basis.shape[0]}, expected {n - sub.rank}"
        )
    if u_basis.shape[0]:
        bar_basis = _null_space(u_basis @ sys.form, n)
    else:
        bar_basis = np.eye(n)
    return Splitting(
        subspace_bar=_b_orthonormalize(bar_basis, sys.form),
        subspace_u=_b_orthonormalize(u_basis, sys.form),
        k=sub.rank,
    )


def _null_space(rows: np.ndarray, n: int) -> np.ndarray:
    if rows.size == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(rows)
    rank = int((s > TOL).sum())
    return vt[rank:]


def _b_orthonormalize(basis: np.ndarray, form: np.ndarray) -> np.ndarray:
    out = []
    for v in basis:
        w = v.astype(float).copy()
        for u in out:
            w -= float(u @ form @ w) * u
        norm = math.sqrt(max(float(w @ form @ w), 0.0))
        if norm > TOL:
            out.append(w / norm)
    return np.array(out) if out else np.zeros((0, basis.shape[1]))


# ---------------------------------------------------------------------------
# Conjugacy of embeddings and the opposition involution


def embeddings_conjugate(sub1: ReflectionSubgroup, sub2: ReflectionSubgroup) -> bool:
    """Brute-force search for an ambient element conjugating one reflection
    set onto the other."""
    if sub1.ambient is not sub2.ambient:
        raise DifferentAmbient("subgroups live in different ambient systems")
    sys = sub1.ambient
    r1, r2 = sub1.reflections, sub2.reflections
    if len(r1) != len(r2):
        return False
    for g in range(sys.order):
        if all(sys.conj(g, r) in r2 for r in r1):
            return True
    return False


def opposition_involution(sys: CoxeterSystem) -> tuple[int, ...]:
    """Permutation of simple generator indices induced by -w0."""
    if sys.rank == 0:
        return ()
    w0 = sys.elements[sys.longest].perm
    perm = []
    for i in range(sys.rank):
        j = sys.opposite_root(w0[i])
        if j >= sys.rank:
            raise InvalidMatrix("-w0 does not permute the simple roots")
        perm.append(j)
    return tuple(perm)
