"""Chamber-system buildings: panels, walls, galleries, foldings, validation.

A building of type W is stored as a typed chamber system: for every
generator s of W the chambers are partitioned into s-panels, and the
apartment system is an explicit list of injections from the elements of W
into the chamber set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .coxeter import CoxeterMatrix, CoxeterSystem, build_system, system_from_name
from .errors import (
    Disconnected,
    InvalidSide,
    MixedWall,
    NotAReflection,
    PanelTooSmall,
)


@dataclass(frozen=True)
class Thickness:
    """Panel thickness: thin means exactly two chambers, thick at least three."""

    count: int

    @property
    def thick(self) -> bool:
        return self.count >= 3

    @property
    def thin(self) -> bool:
        return self.count == 2

    def __str__(self):
        return f"Thick({self.count})" if self.thick else "Thin"


@dataclass(frozen=True)
class Wall:
    """The wall of a reflection in an apartment, with the building panels
    it carries as (generator, panel id) pairs."""

    apartment: int
    reflection: int
    panels: tuple[tuple[int, int], ...]


class ChamberComplex:
    """Typed chamber system with an apartment atlas.

    panels[s] lists the s-panels as sorted chamber tuples; every chamber
    belongs to exactly one s-panel for each s.  apartments[i][e] is the
    chamber carrying element e of W in apartment i.
    """

    def __init__(self, system: CoxeterSystem, num_chambers: int, panels, apartments, labels=None):
        self.system = system
        self.num_chambers = int(num_chambers)
        self.panels = tuple(tuple(tuple(sorted(p)) for p in panels_s) for panels_s in panels)
        self.apartments = tuple(tuple(a) for a in apartments)
        self.labels = tuple(labels) if labels is not None else None
        if len(self.panels) != system.rank:
            raise ValueError("one panel family per generator required")
        self._panel_of = []
        for s, panels_s in enumerate(self.panels):
            lookup = {}
            for pid, p in enumerate(panels_s):
                for c in p:
                    if c in lookup:
                        raise ValueError(f"chamber {c} in two {s}-panels")
                    lookup[c] = pid
            self._panel_of.append(lookup)

    # -- accessors ----------------------------------------------------------

    @property
    def rank(self) -> int:
        return self.system.rank

    @property
    def type_matrix(self) -> CoxeterMatrix:
        return self.system.matrix

    def panel_id(self, s: int, chamber: int) -> int:
        return self._panel_of[s][chamber]

    def panel_chambers(self, s: int, panel_id: int) -> tuple[int, ...]:
        return self.panels[s][panel_id]

    def neighbors(self, chamber: int):
        """Yield (s, other_chamber) over all panel-mates of the chamber."""
        for s in range(self.rank):
            for c in self.panels[s][self._panel_of[s][chamber]]:
                if c != chamber:
                    yield s, c

    def apartment_chambers(self, i: int) -> frozenset[int]:
        return frozenset(self.apartments[i])

    def label(self, chamber: int):
        return self.labels[chamber] if self.labels is not None else chamber

    def __repr__(self):
        return (
            f"ChamberComplex(rank={self.rank}, chambers={self.num_chambers}, "
            f"apartments={len(self.apartments)})"
        )


# ---------------------------------------------------------------------------
# Constructions


def coxeter_complex(sys: CoxeterSystem) -> ChamberComplex:
    """The thin building of W: chambers are the elements, s-panels the pairs
    {w, ws}, with the identity map as single apartment."""
    panels = []
    for s in range(sys.rank):
        g = sys.generator_element(s)
        seen = set()
        panels_s = []
        for w in range(sys.order):
            if w in seen:
                continue
            ws = sys.mul(w, g)
            seen.update((w, ws))
            panels_s.append((w, ws))
        panels.append(panels_s)
    return ChamberComplex(
        system=sys,
        num_chambers=sys.order,
        panels=panels,
        apartments=[tuple(range(sys.order))],
    )


def rank1_building(num_chambers: int) -> ChamberComplex:
    """Rank-1 building on k >= 2 chambers: one panel containing all of them,
    apartments are the chamber pairs."""
    if num_chambers < 2:
        raise ValueError("a rank-1 building needs at least 2 chambers")
    sys = system_from_name("A1")
    apartments = [(a, b) for a in range(num_chambers) for b in range(a + 1, num_chambers)]
    return ChamberComplex(
        system=sys,
        num_chambers=num_chambers,
        panels=[[tuple(range(num_chambers))]],
        apartments=apartments,
    )


def join(cx1: ChamberComplex, cx2: ChamberComplex) -> ChamberComplex:
    """Simplicial join as a chamber-wise product; generators of the second
    factor are re-indexed after those of the first."""
    sys = build_system(cx1.type_matrix.block_sum(cx2.type_matrix))
    r1 = cx1.rank
    n2 = cx2.num_chambers

    def cid(c1, c2):
        return c1 * n2 + c2

    panels = []
    for s in range(r1):
        panels.append(
            [tuple(cid(c, d) for c in p) for p in cx1.panels[s] for d in range(n2)]
        )
    for s in range(cx2.rank):
        panels.append(
            [tuple(cid(c, d) for d in p) for c in range(cx1.num_chambers) for p in cx2.panels[s]]
        )

    apartments = []
    for a1 in cx1.apartments:
        for a2 in cx2.apartments:
            amap = []
            for e in range(sys.order):
                word = sys.elements[e].word
                w1 = cx1.system.word_to_element([s for s in word if s < r1])
                w2 = cx2.system.word_to_element([s - r1 for s in word if s >= r1])
                amap.append(cid(a1[w1], a2[w2]))
            apartments.append(tuple(amap))

    labels = None
    if cx1.num_chambers and n2:
        labels = [
            (cx1.label(c1), cx2.label(c2))
            for c1 in range(cx1.num_chambers)
            for c2 in range(n2)
        ]
    return ChamberComplex(
        system=sys,
        num_chambers=cx1.num_chambers * n2,
        panels=panels,
        apartments=apartments,
        labels=labels,
    )


# ---------------------------------------------------------------------------
# Thickness, walls, foldings


def panel_thickness(cx: ChamberComplex, s: int, panel_id: int) -> Thickness:
    size = len(cx.panels[s][panel_id])
    if size < 2:
        raise PanelTooSmall(f"{s}-panel {panel_id} has {size} chambers")
    return Thickness(size)


def wall(cx: ChamberComplex, apartment: int, reflection: int) -> Wall:
    """Collect the building panels carried by the wall of a reflection in an
    apartment: the panels between A(w) and A(rw) over all w."""
    sys = cx.system
    if not sys.is_reflection(reflection):
        raise NotAReflection(f"element {reflection} is not a reflection")
    amap = cx.apartments[apartment]
    gen_of = {sys.generator_element(s): s for s in range(sys.rank)}
    panels = set()
    for w in range(sys.order):
        t = sys.conj(sys.inv(w), reflection)
        s = gen_of.get(t)
        if s is not None:
            panels.add((s, cx.panel_id(s, amap[w])))
    return Wall(apartment=apartment, reflection=reflection, panels=tuple(sorted(panels)))


def wall_thickness(cx: ChamberComplex, apartment: int, reflection: int) -> Thickness:
    """Classify a wall; all its panels must agree on thick versus thin,
    otherwise the input is not a building and MixedWall is raised.

    The returned count is the smallest panel size on the wall.
    """
    w = wall(cx, apartment, reflection)
    sizes = [len(cx.panels[s][pid]) for s, pid in w.panels]
    if not sizes:
        raise NotAReflection("reflection carries no panels in this apartment")
    kinds = {size >= 3 for size in sizes}
    if len(kinds) > 1:
        raise MixedWall(
            f"wall of reflection {reflection} in apartment {apartment} mixes thick and thin panels"
        )
    return Thickness(min(sizes))


def fold(cx: ChamberComplex, apartment: int, reflection: int, side: int) -> dict[int, int]:
    """Folding of an apartment onto the half determined by a wall.

    side=+1 keeps the half containing A(identity); side=-1 the other half.
    Returns the chamber map on the apartment image (idempotent onto the
    chosen half).
    """
    if side not in (1, -1):
        raise InvalidSide("side must be +1 or -1")
    sys = cx.system
    beta = sys.root_of_reflection(reflection)  # raises NotAReflection
    amap = cx.apartments[apartment]
    mapping = {}
    for w in range(sys.order):
        # chamber wC0 lies on the positive side of the wall iff w^{-1}(beta) > 0
        positive = sys.is_positive_root(sys.act(sys.inv(w), beta))
        if (side == 1) == positive:
            mapping[amap[w]] = amap[w]
        else:
            mapping[amap[w]] = amap[sys.mul(reflection, w)]
    return mapping


# ---------------------------------------------------------------------------
# Galleries


def minimal_galleries(cx: ChamberComplex, c: int, c2: int) -> list[tuple[int, ...]]:
    """All minimal galleries between two chambers, by breadth-first search
    over the panel adjacency graph."""
    if c == c2:
        return [(c,)]
    dist = {c: 0}
    preds: dict[int, list[int]] = {c: []}
    frontier = [c]
    while frontier and c2 not in dist:
        nxt = []
        for u in frontier:
            for _, v in cx.neighbors(u):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    preds[v] = [u]
                    nxt.append(v)
                elif dist[v] == dist[u] + 1:
                    preds[v].append(u)
        frontier = nxt
    if c2 not in dist:
        raise Disconnected(f"no gallery from {c} to {c2}")

    galleries = []

    def unwind(v, tail):
        if v == c:
            galleries.append(tuple([c] + tail[::-1]))
            return
        for u in preds[v]:
            unwind(u, tail + [v])

    unwind(c2, [])
    return galleries


def gallery_distance(cx: ChamberComplex, c: int, c2: int) -> int:
    if c == c2:
        return 0
    dist = {c: 0}
    frontier = [c]
    while frontier:
        nxt = []
        for u in frontier:
            for _, v in cx.neighbors(u):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    if v == c2:
                        return dist[v]
                    nxt.append(v)
        frontier = nxt
    raise Disconnected(f"no gallery from {c} to {c2}")


# ---------------------------------------------------------------------------
# Building validation


@dataclass
class ValidationReport:
    """Outcome of the building-axiom sweep.  Violations are data: the report
    is returned, never raised.  Validation is relative to the apartment
    system supplied with the complex."""

    ok: bool = True
    issues: list[str] = field(default_factory=list)
    checked_pairs: int = 0
    checked_apartment_pairs: int = 0

    def add(self, message: str):
        self.ok = False
        self.issues.append(message)

    def __str__(self):
        if self.ok:
            return (
                f"valid building (relative to {self.checked_apartment_pairs} apartment pairs, "
                f"{self.checked_pairs} chamber pairs)"
            )
        head = f"{len(self.issues)} violation(s):"
        return "\n".join([head] + [f"  - {m}" for m in self.issues[:20]])


def validate_building(cx: ChamberComplex) -> ValidationReport:
    """Brute-force check of the chamber-system and building axioms over the
    supplied apartment system."""
    report = ValidationReport()
    sys = cx.system

    for s, panels_s in enumerate(cx.panels):
        covered = set()
        for pid, p in enumerate(panels_s):
            if len(p) < 2:
                report.add(f"{s}-panel {pid} has fewer than 2 chambers")
            covered.update(p)
        if covered != set(range(cx.num_chambers)):
            report.add(f"{s}-panels do not cover every chamber")

    sys.build_mult_table()
    gen = [sys.generator_element(s) for s in range(sys.rank)]

    for i, amap in enumerate(cx.apartments):
        if len(amap) != sys.order:
            report.add(f"apartment {i} does not map every element of W")
            continue
        if len(set(amap)) != len(amap):
            report.add(f"apartment {i} is not injective")
            continue
        for w in range(sys.order):
            for s in range(sys.rank):
                ws = sys.mul(w, gen[s])
                if cx.panel_id(s, amap[w]) != cx.panel_id(s, amap[ws]):
                    report.add(
                        f"apartment {i}: chambers of w and ws not {s}-adjacent (w={w})"
                    )
                    break
            else:
                continue
            break

    # (B1) every chamber pair is covered by an apartment
    covered_pairs = set()
    for amap in cx.apartments:
        chs = sorted(set(amap))
        for x in range(len(chs)):
            a = chs[x]
            for y in range(x, len(chs)):
                covered_pairs.add((a, chs[y]))
    total = cx.num_chambers * (cx.num_chambers + 1) // 2
    report.checked_pairs = total
    if len(covered_pairs) != total:
        for a in range(cx.num_chambers):
            for b in range(a, cx.num_chambers):
                if (a, b) not in covered_pairs:
                    report.add(f"chambers {a} and {b} share no apartment")
                    break
            else:
                continue
            break

    # (B2) apartments sharing two chambers admit a type-preserving
    # isomorphism fixing both.  A type-preserving isomorphism between
    # apartment images corresponds to left multiplication on W, so for the
    # pair (a, b) the only candidate is g = A'^{-1}(a) * A^{-1}(a)^{-1}.
    inv_maps = [{c: w for w, c in enumerate(amap)} for amap in cx.apartments]
    by_chamber: dict[int, list[int]] = {}
    for i, amap in enumerate(cx.apartments):
        for c in set(amap):
            by_chamber.setdefault(c, []).append(i)
    apartment_pairs = set()
    for apts in by_chamber.values():
        for x in range(len(apts)):
            for y in range(x + 1, len(apts)):
                apartment_pairs.add((apts[x], apts[y]))
    report.checked_apartment_pairs = len(apartment_pairs)
    mul = sys.mul
    inv = sys.inv
    for i, j in sorted(apartment_pairs):
        common = sorted(set(cx.apartments[i]) & set(cx.apartments[j]))
        inv_i, inv_j = inv_maps[i], inv_maps[j]
        for x in range(len(common)):
            a = common[x]
            g = mul(inv_j[a], inv(inv_i[a]))
            for y in range(x + 1, len(common)):
                b = common[y]
                if mul(g, inv_i[b]) != inv_j[b]:
                    report.add(
                        f"apartments {i},{j}: no isomorphism fixing chambers {a} and {b}"
                    )
                    if len(report.issues) > 50:
                        return report
    return report
