"""Thick-frame reduction of spherical buildings and its inverse, the
subdivided suspension along a reflection-subgroup embedding.

Reduction glues chambers along thin panels into thin-classes, collects the
reflections along thick walls of a base apartment into a subgroup, and
re-types the class adjacencies as a building over that subgroup.  Panel
types are assigned in the base apartment and transported along galleries
via Weyl-distance coordinates, with a global consistency sweep; any
contradiction means the input was not a building.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .chamber import ChamberComplex, ValidationReport, validate_building, wall_thickness
from .coxeter import (
    CoxeterMatrix,
    CoxeterSystem,
    ReflectionSubgroup,
    build_system,
    embeddings_conjugate,
    reflection_subgroup,
)
from .errors import (
    EmbeddingNotNormalizable,
    InconsistentTyping,
    NotThick,
    TypeMismatch,
)


# ---------------------------------------------------------------------------
# Thin classes


@dataclass(frozen=True)
class ThinClasses:
    """Partition of the chambers into thin-classes: the connected components
    of the graph whose edges are the panels of size exactly two."""

    partition: tuple[int, ...]  # chamber -> class id
    classes: tuple[frozenset[int], ...]

    @property
    def count(self) -> int:
        return len(self.classes)


def thin_classes(cx: ChamberComplex) -> ThinClasses:
    parent = list(range(cx.num_chambers))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for panels_s in cx.panels:
        for p in panels_s:
            if len(p) == 2:
                union(p[0], p[1])

    roots = sorted({find(c) for c in range(cx.num_chambers)})
    class_id = {r: i for i, r in enumerate(roots)}
    partition = tuple(class_id[find(c)] for c in range(cx.num_chambers))
    members: list[set[int]] = [set() for _ in roots]
    for c, cl in enumerate(partition):
        members[cl].add(c)
    return ThinClasses(partition=partition, classes=tuple(frozenset(m) for m in members))


# ---------------------------------------------------------------------------
# Weyl-distance coordinates


def weyl_coordinates(cx: ChamberComplex, base_chamber: int) -> list[int]:
    """delta(base, c) for every chamber c, computed by breadth-first search
    along typed panels.  The gate property of buildings is verified on every
    panel; violations raise InconsistentTyping."""
    sys = cx.system
    sys.build_mult_table()
    gen = [sys.generator_element(s) for s in range(sys.rank)]
    coord: list[Optional[int]] = [None] * cx.num_chambers
    coord[base_chamber] = sys.identity
    frontier = [base_chamber]
    while frontier:
        nxt = []
        for c in frontier:
            w = coord[c]
            for s in range(sys.rank):
                ws = sys.mul(w, gen[s])
                for d in cx.panels[s][cx.panel_id(s, c)]:
                    if coord[d] is None:
                        coord[d] = ws
                        nxt.append(d)
        frontier = nxt
    if any(w is None for w in coord):
        raise InconsistentTyping("chamber system is not gallery-connected")

    length = [sys.elements[w].length for w in range(sys.order)]
    for s in range(sys.rank):
        for p in cx.panels[s]:
            words = [coord[c] for c in p]
            lengths = [length[w] for w in words]
            lo = min(lengths)
            gates = [w for w, l in zip(words, lengths) if l == lo]
            rest = {w for w, l in zip(words, lengths) if l != lo}
            if len(gates) != 1 or len(rest) > 1:
                raise InconsistentTyping(
                    f"panel {p} of type {s} violates the gate property"
                )
            if rest and next(iter(rest)) != sys.mul(gates[0], gen[s]):
                raise InconsistentTyping(
                    f"panel {p} of type {s} has inconsistent Weyl coordinates"
                )
    return coord  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# Frame result


@dataclass
class FrameResult:
    """Thick frame of a building: the quotient complex over thin-classes,
    the subgroup generated by thick-wall reflections of the base apartment
    (one representative of its conjugacy class), the class map and the
    apartment correspondence."""

    frame: ChamberComplex
    class_map: tuple[int, ...]
    subgroup: ReflectionSubgroup
    apartment_map: tuple[int, ...]
    thin: ThinClasses
    thick_wall_reflections: tuple[int, ...]

    @property
    def degenerate(self) -> bool:
        return self.frame.rank == 0


def _trivial_frame(cx: ChamberComplex, tc: ThinClasses) -> FrameResult:
    sys = build_system(CoxeterMatrix.trivial())
    frame = ChamberComplex(
        system=sys,
        num_chambers=1,
        panels=[],
        apartments=[(0,)],
        labels=[frozenset(range(cx.num_chambers))],
    )
    return FrameResult(
        frame=frame,
        class_map=tuple(0 for _ in range(cx.num_chambers)),
        subgroup=reflection_subgroup(cx.system, []),
        apartment_map=tuple(0 for _ in cx.apartments),
        thin=tc,
        thick_wall_reflections=(),
    )


def thick_frame(cx: ChamberComplex, base_apartment: int = 0) -> FrameResult:
    """Scharlau reduction of a building to its thick frame.

    Thick walls are read off the base apartment; the subgroup they generate
    provides the frame type.  Frame chambers are the thin-classes; the
    s_j-panels are the classes meeting a common thick panel, typed through
    the Weyl coordinates of the chambers crossing them.
    """
    sys = cx.system
    tc = thin_classes(cx)

    if sys.rank == 0:
        return _trivial_frame(cx, tc)

    thick_refl = tuple(
        r for r in sorted(sys.reflections) if wall_thickness(cx, base_apartment, r).thick
    )
    if not thick_refl:
        return _trivial_frame(cx, tc)

    sub = reflection_subgroup(sys, thick_refl)
    if set(sub.reflections) != set(thick_refl):
        raise InconsistentTyping(
            "thick-wall reflections are not closed under self-conjugation"
        )
    sub_system = build_system(sub.matrix)

    # Ambient <-> abstract tables for the subgroup and the transversal D of
    # elements whose chambers lie in the subgroup region of the identity.
    sys.build_mult_table()
    abstract_to_ambient = [
        _embed_word(sys, sub.canonical_generators, sub_system.elements[u].word)
        for u in range(sub_system.order)
    ]
    ambient_to_abstract = {a: u for u, a in enumerate(abstract_to_ambient)}
    if len(ambient_to_abstract) != sub_system.order:
        raise InconsistentTyping("subgroup embedding is not faithful")
    transversal = _subgroup_transversal(sys, sub)

    factor = {}
    for u, amb_u in enumerate(abstract_to_ambient):
        for d in transversal:
            w = sys.mul(amb_u, d)
            if w in factor:
                raise InconsistentTyping("subgroup factorization is not unique")
            factor[w] = (u, d)
    if len(factor) != sys.order:
        raise InconsistentTyping("subgroup and transversal do not factor the group")

    base_chamber = cx.apartments[base_apartment][sys.identity]
    coord = weyl_coordinates(cx, base_chamber)
    dpart = [factor[w][1] for w in coord]

    # thin panels must stay inside one subgroup region
    for s in range(sys.rank):
        g = sys.generator_element(s)
        for p in cx.panels[s]:
            if len(p) == 2:
                if factor[coord[p[0]]][0] != factor[coord[p[1]]][0]:
                    raise InconsistentTyping(
                        f"thin panel {p} crosses a thick wall of the base apartment"
                    )

    canonical_pos = {r: j for j, r in enumerate(sub.canonical_generators)}
    frame_panels: list[set[frozenset[int]]] = [set() for _ in range(sub.rank)]
    for s in range(sys.rank):
        g = sys.generator_element(s)
        for p in cx.panels[s]:
            if len(p) == 2:
                continue
            types = set()
            for c in p:
                t = sys.conj(dpart[c], g)
                j = canonical_pos.get(t)
                if j is None:
                    raise InconsistentTyping(
                        f"thick panel {p} crosses non-canonical reflection {t}"
                    )
                types.add(j)
            if len(types) != 1:
                raise InconsistentTyping(f"thick panel {p} received types {sorted(types)}")
            frame_panels[types.pop()].add(frozenset(tc.partition[c] for c in p))

    panels = []
    for j in range(sub.rank):
        family = sorted(tuple(sorted(fp)) for fp in frame_panels[j])
        seen = set()
        for fp in family:
            for cl in fp:
                if cl in seen:
                    raise InconsistentTyping(
                        f"class {cl} lies in two distinct frame panels of type {j}"
                    )
                seen.add(cl)
        if seen != set(range(tc.count)):
            raise InconsistentTyping(f"frame panels of type {j} do not cover all classes")
        panels.append(family)

    frame = ChamberComplex(
        system=sub_system,
        num_chambers=tc.count,
        panels=panels,
        apartments=[],  # filled below
        labels=tc.classes,
    )

    frame_apartments: list[tuple[int, ...]] = []
    apartment_index: dict[tuple[int, ...], int] = {}
    apartment_map = []
    for amap in cx.apartments:
        fmap = _induced_frame_apartment(frame, sub_system, tc, amap)
        idx = apartment_index.get(fmap)
        if idx is None:
            idx = len(frame_apartments)
            apartment_index[fmap] = idx
            frame_apartments.append(fmap)
        apartment_map.append(idx)

    frame = ChamberComplex(
        system=sub_system,
        num_chambers=tc.count,
        panels=panels,
        apartments=frame_apartments,
        labels=tc.classes,
    )
    return FrameResult(
        frame=frame,
        class_map=tc.partition,
        subgroup=sub,
        apartment_map=tuple(apartment_map),
        thin=tc,
        thick_wall_reflections=thick_refl,
    )


def _embed_word(sys: CoxeterSystem, generators, word) -> int:
    e = sys.identity
    for j in word:
        e = sys.mul(e, generators[j])
    return e


def _subgroup_transversal(sys: CoxeterSystem, sub: ReflectionSubgroup) -> list[int]:
    """D = {d in W : d C0 lies in the subgroup region of C0}: breadth-first
    closure from the identity never crossing a subgroup wall."""
    gen = [sys.generator_element(s) for s in range(sys.rank)]
    transversal = [sys.identity]
    seen = {sys.identity}
    head = 0
    while head < len(transversal):
        d = transversal[head]
        head += 1
        for g in gen:
            t = sys.conj(d, g)  # reflection crossed between dC0 and dgC0
            if t in sub.reflections:
                continue
            dg = sys.mul(d, g)
            if dg not in seen:
                seen.add(dg)
                transversal.append(dg)
    return transversal


def _induced_frame_apartment(frame, sub_system, tc, amap) -> tuple[int, ...]:
    """Walk the frame image of an input apartment, anchored at the class of
    the apartment's identity chamber.  The image must restrict to a thin
    sub-chamber-system, or the input was not a building."""
    image = {tc.partition[c] for c in amap}
    anchor = tc.partition[amap[0]]
    fmap: list[Optional[int]] = [None] * sub_system.order
    fmap[sub_system.identity] = anchor
    frontier = [sub_system.identity]
    while frontier:
        nxt = []
        for u in frontier:
            cl = fmap[u]
            for j in range(sub_system.rank):
                panel = frame.panels[j][frame.panel_id(j, cl)]
                inside = [x for x in panel if x in image]
                if len(inside) != 2:
                    raise InconsistentTyping(
                        f"apartment image is not thin along type {j} at class {cl}"
                    )
                other = inside[0] if inside[1] == cl else inside[1]
                uj = sub_system.mul(u, sub_system.generator_element(j))
                if fmap[uj] is None:
                    fmap[uj] = other
                    nxt.append(uj)
                elif fmap[uj] != other:
                    raise InconsistentTyping("apartment walk is inconsistent")
        frontier = nxt
    if any(x is None for x in fmap) or set(fmap) != image:
        raise InconsistentTyping("apartment image does not match the frame apartment")
    return tuple(fmap)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# Subdivided suspension


def is_thick(cx: ChamberComplex) -> bool:
    return all(len(p) >= 3 for panels_s in cx.panels for p in panels_s)


def suspend(
    frame_building: ChamberComplex,
    ambient: CoxeterSystem,
    embedding: ReflectionSubgroup,
) -> ChamberComplex:
    """Subdivided suspension: the non-thick building of type W whose thick
    frame is the given building, along an embedding of its type into W as a
    reflection subgroup.

    Chambers are pairs (frame chamber, d) over the transversal D of the
    subgroup region containing the fundamental chamber; crossing a wall of
    the subgroup lifts the corresponding frame panel, crossing any other
    wall moves inside D through a thin panel.
    """
    if embedding.ambient is not ambient:
        raise TypeMismatch("embedding was built over a different ambient system")
    if not is_thick(frame_building):
        raise NotThick("the frame building must be thick")
    if ambient.rank < embedding.rank:
        raise TypeMismatch("ambient rank below subgroup rank")

    cgens = _normalize_embedding(frame_building.type_matrix, embedding)
    sub_system = frame_building.system
    ambient.build_mult_table()

    transversal = _subgroup_transversal(ambient, embedding)
    dpos = {d: i for i, d in enumerate(transversal)}
    nd = len(transversal)
    if embedding.rank and nd * len(embedding.element_indices()) != ambient.order:
        raise EmbeddingNotNormalizable("transversal does not complement the subgroup")

    nfc = frame_building.num_chambers

    def cid(cbar: int, didx: int) -> int:
        return cbar * nd + didx

    canonical_pos = {r: j for j, r in enumerate(cgens)}
    gen = [ambient.generator_element(s) for s in range(ambient.rank)]
    panels: list[list[tuple[int, ...]]] = []
    for s in range(ambient.rank):
        panels_s: list[tuple[int, ...]] = []
        for di, d in enumerate(transversal):
            t = ambient.conj(d, gen[s])
            ds = ambient.mul(d, gen[s])
            if t not in embedding.reflections:
                # thin panel pairing d with ds inside D
                dsi = dpos[ds]
                if dsi < di:
                    continue
                panels_s.extend((cid(c, di), cid(c, dsi)) for c in range(nfc))
            else:
                j = canonical_pos.get(t)
                if j is None:
                    raise EmbeddingNotNormalizable(
                        "crossed reflection is not a canonical generator"
                    )
                panels_s.extend(
                    tuple(cid(c, di) for c in p) for p in frame_building.panels[j]
                )
        panels.append(panels_s)

    # factorization w = u * d over the normalized embedding
    abstract_to_ambient = [
        _embed_word(ambient, cgens, sub_system.elements[u].word)
        for u in range(sub_system.order)
    ]
    factor: dict[int, tuple[int, int]] = {}
    for u, amb_u in enumerate(abstract_to_ambient):
        for di, d in enumerate(transversal):
            factor[ambient.mul(amb_u, d)] = (u, di)
    if len(factor) != ambient.order:
        raise EmbeddingNotNormalizable("embedding does not factor the ambient group")

    apartments = []
    for fmap in frame_building.apartments:
        apartments.append(
            tuple(cid(fmap[factor[w][0]], factor[w][1]) for w in range(ambient.order))
        )

    labels = [(frame_building.label(c), d) for c in range(nfc) for d in transversal]
    return ChamberComplex(
        system=ambient,
        num_chambers=nfc * nd,
        panels=panels,
        apartments=apartments,
        labels=labels,
    )


def _normalize_embedding(frame_matrix: CoxeterMatrix, embedding: ReflectionSubgroup):
    """Reorder the canonical generators so their Coxeter matrix matches the
    frame type exactly."""
    if embedding.rank != frame_matrix.rank:
        raise TypeMismatch(
            f"embedding rank {embedding.rank} != frame rank {frame_matrix.rank}"
        )
    from itertools import permutations

    k = embedding.rank
    entries = embedding.matrix.entries
    for perm in permutations(range(k)):
        if all(
            entries[perm[i]][perm[j]] == frame_matrix.entry(i, j)
            for i in range(k)
            for j in range(k)
        ):
            return tuple(embedding.canonical_generators[perm[j]] for j in range(k))
    raise TypeMismatch("embedding type does not match the frame type")


# ---------------------------------------------------------------------------
# Isomorphism search


def diagram_automorphisms(matrix: CoxeterMatrix):
    """Permutations of the generators preserving the Coxeter matrix."""
    from itertools import permutations

    n = matrix.rank
    out = []
    for perm in permutations(range(n)):
        if all(
            matrix.entry(perm[i], perm[j]) == matrix.entry(i, j)
            for i in range(n)
            for j in range(n)
        ):
            out.append(perm)
    return out


def retype(cx: ChamberComplex, perm) -> ChamberComplex:
    """Relabel panel types through a diagram automorphism (apartments are
    rebuilt against the permuted generator words)."""
    panels = [cx.panels[perm[s]] for s in range(cx.rank)]
    sys = cx.system
    apartments = []
    for amap in cx.apartments:
        new = [
            amap[sys.word_to_element([perm[s] for s in sys.elements[e].word])]
            for e in range(sys.order)
        ]
        apartments.append(tuple(new))
    return ChamberComplex(sys, cx.num_chambers, panels, apartments, labels=cx.labels)


def find_isomorphism(
    cx1: ChamberComplex, cx2: ChamberComplex, up_to_diagram: bool = False
) -> Optional[dict[int, int]]:
    """Type-preserving chamber-system isomorphism by backtracking, or None.

    With up_to_diagram the panel types of the first complex may be permuted
    by a diagram automorphism first.  Feasible for desk-scale complexes (up
    to roughly a thousand chambers): candidates are pruned through panel
    sizes and already-mapped panel mates.
    """
    if up_to_diagram:
        for perm in diagram_automorphisms(cx1.type_matrix):
            found = find_isomorphism(retype(cx1, perm), cx2)
            if found is not None:
                return found
        return None
    if cx1.type_matrix.entries != cx2.type_matrix.entries:
        return None
    if cx1.num_chambers != cx2.num_chambers:
        return None
    for s in range(cx1.rank):
        if sorted(map(len, cx1.panels[s])) != sorted(map(len, cx2.panels[s])):
            return None
    n = cx1.num_chambers
    if n == 0:
        return {}

    rank = cx1.rank
    if rank == 0:
        return {0: 0} if n == 1 else None

    # breadth-first chamber order so each new chamber touches mapped ones
    order = [0]
    seen = {0}
    head = 0
    while head < len(order):
        c = order[head]
        head += 1
        for _, d in cx1.neighbors(c):
            if d not in seen:
                seen.add(d)
                order.append(d)
    if len(order) != n:
        return None  # disconnected complexes are out of scope

    sig1 = [tuple(len(cx1.panels[s][cx1.panel_id(s, c)]) for s in range(rank)) for c in range(n)]
    sig2 = [tuple(len(cx2.panels[s][cx2.panel_id(s, c)]) for s in range(rank)) for c in range(n)]

    mapping: dict[int, int] = {}
    used: set[int] = set()

    def candidates(c):
        cands = None
        for s in range(rank):
            mates = [
                mapping[d]
                for d in cx1.panels[s][cx1.panel_id(s, c)]
                if d != c and d in mapping
            ]
            if mates:
                panel = set(cx2.panels[s][cx2.panel_id(s, mates[0])])
                if any(m not in panel for m in mates):
                    return []
                cands = panel if cands is None else cands & panel
        if cands is None:
            cands = set(range(n))
        return [x for x in sorted(cands) if x not in used and sig2[x] == sig1[c]]

    def extend(k: int) -> bool:
        if k == n:
            return True
        c = order[k]
        for x in candidates(c):
            mapping[c] = x
            used.add(x)
            if _locally_consistent(cx1, cx2, mapping, c) and extend(k + 1):
                return True
            del mapping[c]
            used.remove(x)
        return False

    if extend(0):
        return dict(mapping)
    return None


def _locally_consistent(cx1, cx2, mapping, c) -> bool:
    for s in range(cx1.rank):
        p1 = cx1.panels[s][cx1.panel_id(s, c)]
        p2 = set(cx2.panels[s][cx2.panel_id(s, mapping[c])])
        for d in p1:
            if d in mapping and mapping[d] not in p2:
                return False
    return True


def isomorphic(cx1: ChamberComplex, cx2: ChamberComplex) -> bool:
    return find_isomorphism(cx1, cx2) is not None


# ---------------------------------------------------------------------------
# Roundtrip verification


@dataclass
class RoundtripReport:
    """Outcome of suspend -> validate -> reduce against the original data."""

    chamber_count: int
    expected_count: int
    validation: ValidationReport
    frame_isomorphic: bool
    subgroup_conjugate: bool
    apartments_bijective: bool
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.chamber_count == self.expected_count
            and self.validation.ok
            and self.frame_isomorphic
            and self.subgroup_conjugate
            and self.apartments_bijective
        )

    def __str__(self):
        flags = [
            ("chamber count", self.chamber_count == self.expected_count),
            ("building axioms", self.validation.ok),
            ("frame isomorphic", self.frame_isomorphic),
            ("subgroup conjugate", self.subgroup_conjugate),
            ("apartment bijection", self.apartments_bijective),
        ]
        lines = [f"  {'ok ' if v else 'FAIL'} {k}" for k, v in flags]
        return "\n".join(lines + [f"  note: {m}" for m in self.notes])


def verify_roundtrip(
    frame_building: ChamberComplex,
    ambient: CoxeterSystem,
    embedding: ReflectionSubgroup,
) -> RoundtripReport:
    """Suspend, validate the result, reduce it back, and compare with the
    input frame and embedding."""
    suspension = suspend(frame_building, ambient, embedding)
    validation = validate_building(suspension)
    result = thick_frame(suspension)

    sub_order = len(embedding.element_indices()) if embedding.rank else 1
    expected = frame_building.num_chambers * ambient.order // sub_order

    frame_iso = isomorphic(result.frame, frame_building)
    if result.subgroup.rank or embedding.rank:
        conjugate = embeddings_conjugate(result.subgroup, embedding)
    else:
        conjugate = True

    n_input = len({frozenset(a) for a in suspension.apartments})
    n_frame = len({frozenset(a) for a in result.frame.apartments})
    bijective = n_input == n_frame == len(
        {frozenset(a) for a in frame_building.apartments}
    )

    report = RoundtripReport(
        chamber_count=suspension.num_chambers,
        expected_count=expected,
        validation=validation,
        frame_isomorphic=frame_iso,
        subgroup_conjugate=conjugate,
        apartments_bijective=bijective,
    )
    report.notes.append(
        f"suspension has {suspension.num_chambers} chambers over transversal size "
        f"{ambient.order // sub_order}"
    )
    return report
