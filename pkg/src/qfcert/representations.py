"""Genus-2 surface-group representations into hyperbolic isometries.

The reference point of the construction is the surface obtained from the
regular hyperbolic octagon with vertex angle pi/4 (all eight vertices
identified; area 4 pi by Gauss-Bonnet).  The four translations pairing
opposite sides are R^k T R^-k, k = 0..3, where T translates by twice the
apothem along the axis through the side-k midpoints and R rotates by
pi/4 about the center.  Those translations generate the fundamental
group but do not themselves satisfy the product-of-commutators relator;
the presentation generators are short words in them,

    a1 = g1,  b1 = g2,  a2 = g2 g4^-1 g1^-1,  b2 = g1 g3 g2^-1,

the shortlex-least choice (exhaustive search over words of length <= 3)
whose commutator relator lands on +-identity and whose exponent-sum
matrix is unimodular.  Unimodularity certifies generation: a subgroup of
infinite index in a surface group is free and cannot have full homology
rank, and a proper finite-index subgroup has too much homology, so the
four words generate; since surface groups are Hopfian, the induced
endomorphism is an isomorphism and the representation is faithful.  All
four images are hyperbolic with the same translation length.

Bending: conjugate so the separating commutator [a1, b1] has axis
(0, infinity), then twist the second handle's generators by the elliptic
rotation E = diag(e^{i angle/2}, e^{-i angle/2}) about that axis.  E
commutes with the diagonalized commutator image, so the relator is
preserved exactly; the resulting representations leave the hyperbolic
plane and acquire complex traces.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _wordarrays as wa
from .moebius import (
    BASEPOINT,
    Geodesic3,
    IsometryKind,
    MoebiusMap,
    Point3,
    classify,
    dist_h3,
    dist_to_geodesic,
    translation_length,
)
from .surface_group import (
    GroupPresentation,
    Word,
    enumerate_words,
    free_reduce_letters,
)

RELATOR_TOL = 1e-9
FUCHSIAN_IMAG_TOL = 1e-12
COMPLEX_TRACE_TOL = 1e-6
# bending envelope with documented quasi-Fuchsian expectations
BEND_ANGLE_ENVELOPE = 1.0

# octagon constants: apothem arccosh(cot(pi/8)), side-pairing translation
# by twice the apothem
OCTAGON_TRANSLATION_LENGTH = 2.0 * math.acosh(1.0 + math.sqrt(2.0))

# presentation generators as words in the opposite-side pairing maps
_GENERATOR_ASSIGNMENT: dict[int, tuple[int, ...]] = {
    1: (1,),
    2: (2,),
    3: (2, -4, -1),
    4: (1, 3, -2),
}


class RepresentationError(ValueError):
    """Raised for invalid representations or failed searches."""


@dataclass(frozen=True, eq=False)
class Representation:
    """Homomorphism of the genus-2 surface group into Moebius maps.

    images maps every letter (positive and negative) to a MoebiusMap.
    kind is "fuchsian" (real entries) or "bent" (angle records the twist).
    """

    presentation: GroupPresentation
    images: dict[int, MoebiusMap]
    kind: str
    angle: float = 0.0
    basepoint: Point3 = BASEPOINT

    def __post_init__(self) -> None:
        if self.kind not in ("fuchsian", "bent"):
            raise RepresentationError("unknown representation kind %r" % (self.kind,))
        images = dict(self.images)
        for x in range(1, self.presentation.generator_count + 1):
            if x not in images:
                raise RepresentationError("missing image for generator %d" % x)
            if -x not in images:
                images[-x] = images[x].inverse()
        object.__setattr__(self, "images", images)
        resid = self.relator_residual()
        if resid > RELATOR_TOL:
            raise RepresentationError(
                "relator image is %.3e away from +-identity (tolerance %.0e)"
                % (resid, RELATOR_TOL)
            )
        if self.kind == "fuchsian":
            worst = max(
                abs(e.imag)
                for x in range(1, self.presentation.generator_count + 1)
                for e in images[x].entries()
            )
            if worst > FUCHSIAN_IMAG_TOL:
                raise RepresentationError(
                    "fuchsian representation has imaginary entries up to %.3e" % worst
                )

    def relator_residual(self) -> float:
        m = self(self.presentation.relator())
        return m.distance_to(MoebiusMap.identity())

    def __call__(self, w: Word) -> MoebiusMap:
        return evaluate(self, w)

    def generator_matrix_array(self) -> np.ndarray:
        """(8, 2, 2) complex array in rank order for batch evaluation."""
        out = np.empty((8, 2, 2), dtype=complex)
        for r in range(8):
            m = self.images[int(wa.RANK_TO_LETTER[r])]
            out[r] = [[m.a, m.b], [m.c, m.d]]
        return out


def evaluate(rep: Representation, w: Word) -> MoebiusMap:
    rep.presentation.validate(w)
    m = MoebiusMap.identity()
    for x in w.letters:
        m = m @ rep.images[x]
    return m


def fuchsian_octagon() -> Representation:
    """The reference representation described in the module docstring."""
    ell = OCTAGON_TRANSLATION_LENGTH
    phi = math.pi / 8.0
    c, s = math.cos(phi), math.sin(phi)
    rot = np.array([[c, s], [-s, c]])
    trans = np.diag([math.exp(ell / 2.0), math.exp(-ell / 2.0)])
    pairing = {}
    for k in range(4):
        rk = np.linalg.matrix_power(rot, k)
        m = rk @ trans @ rk.T
        pairing[k + 1] = m
        pairing[-(k + 1)] = np.linalg.inv(m)

    images: dict[int, MoebiusMap] = {}
    for letter, word in _GENERATOR_ASSIGNMENT.items():
        m = np.eye(2)
        for x in word:
            m = m @ pairing[x]
        images[letter] = MoebiusMap(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
    return Representation(
        presentation=GroupPresentation(genus=2),
        images=images,
        kind="fuchsian",
    )


def bending_curve_word() -> Word:
    """The separating curve the bending deformation twists along."""
    return Word((1, 2, -1, -2))


def bend(rep: Representation, angle: float) -> Representation:
    """Twist the second handle by an elliptic rotation about [a1, b1]'s axis.

    The returned representation is conjugated so that axis is (0, inf)
    with the attracting end at infinity.  angle = 0 gives a conjugate of
    rep (identical spectrum); nonzero angles give complex traces.
    """
    if rep.kind != "fuchsian":
        raise RepresentationError("bending starts from a fuchsian representation")
    if not abs(angle) < math.pi:
        raise RepresentationError("bend angle must satisfy |angle| < pi")
    core = evaluate(rep, bending_curve_word())
    cl = classify(core)
    if cl.kind not in (IsometryKind.HYPERBOLIC, IsometryKind.LOXODROMIC):
        raise RepresentationError("bending curve image is not a translation")
    # normalize: repelling -> 0, attracting -> inf; endpoints are real so
    # the conjugator keeps fuchsian data real
    x, e = cl.data.fix_minus, cl.data.fix_plus
    n = MoebiusMap(x.w2, -x.w1, e.w2, -e.w1)
    half = cmath.exp(0.5j * angle)
    twist = MoebiusMap(half, 0.0, 0.0, 1.0 / half)
    images: dict[int, MoebiusMap] = {}
    for letter in (1, 2):
        images[letter] = rep.images[letter].conjugate_by(n)
    for letter in (3, 4):
        moved = rep.images[letter].conjugate_by(n)
        images[letter] = moved.conjugate_by(twist)
    return Representation(
        presentation=rep.presentation,
        images=images,
        kind="bent",
        angle=float(angle),
        basepoint=rep.basepoint,
    )


def stable_length(rep: Representation, w: Word) -> float:
    """Translation length of the image; the per-step orbit displacement limit."""
    if not free_reduce_letters(w.letters):
        raise RepresentationError("stable length needs a nontrivial word")
    return translation_length(evaluate(rep, w))


def orbit_distance(rep: Representation, w: Word) -> float:
    return dist_h3(evaluate(rep, w)(rep.basepoint), rep.basepoint)


def _rescaled(mat: np.ndarray, scale: float) -> tuple[np.ndarray, float]:
    peak = float(np.abs(mat).max())
    if not math.isfinite(peak) or peak == 0.0:
        raise RepresentationError("matrix power lost all precision")
    return mat / peak, scale + math.log(peak)


def power_displacement(m: MoebiusMap, n: int, y: Point3) -> float:
    """d(m^n . y, y), stable for powers whose entries overflow doubles.

    Squares with an explicit log-scale factor instead of renormalizing by
    the (catastrophically cancelled) determinant, then reads the distance
    from the Frobenius norm: for det-1 g, cosh d(g.j, j) = ||g||_F^2 / 2,
    and a point y is handled by conjugating with the map j -> y.
    """
    if n < 1:
        raise RepresentationError("power must be positive")
    acc, acc_s = np.eye(2, dtype=complex), 0.0
    base, base_s = _rescaled(np.array([[m.a, m.b], [m.c, m.d]], dtype=complex), 0.0)
    k = n
    while True:
        if k & 1:
            acc, acc_s = _rescaled(acc @ base, acc_s + base_s)
        k >>= 1
        if not k:
            break
        base, base_s = _rescaled(base @ base, 2.0 * base_s)
    rt = math.sqrt(y.t)
    to_y = np.array([[rt, y.z / rt], [0.0, 1.0 / rt]], dtype=complex)
    from_y = np.array([[1.0 / rt, -y.z / rt], [0.0, rt]], dtype=complex)
    conj = from_y @ acc @ to_y
    log_cosh = 2.0 * acc_s + math.log(float((np.abs(conj) ** 2).sum()) / 2.0)
    if log_cosh > 40.0:
        return log_cosh + math.log(2.0)
    return math.acosh(max(1.0, math.exp(log_cosh)))


def orbit_length_estimate(rep: Representation, w: Word, n: int = 64,
                          y: Point3 | None = None) -> float:
    """(1/n) d(pi(w^n) y, y) — the defining displacement average.

    The limit over n is independent of y; at finite n the estimate
    carries an O(dist(y, axis)/n) bias, so y defaults to the point of
    the axis nearest the representation basepoint.
    """
    m = evaluate(rep, w)
    if y is None:
        cl = classify(m)
        if cl.data is None:
            y = rep.basepoint
        else:
            geo = Geodesic3(cl.data.fix_minus, cl.data.fix_plus)
            _, y = dist_to_geodesic(rep.basepoint, geo)
    return power_displacement(m, n, y) / float(n)


@dataclass(frozen=True, eq=False)
class LengthSpectrum:
    """Translation lengths on conjugacy-class representatives."""

    rep_id: str
    entries: dict[Word, float]
    normalization: str = "raw"
    h: float | None = None

    def lengths(self) -> list[float]:
        return list(self.entries.values())


def compute_spectrum(rep: Representation, maxlen: int) -> LengthSpectrum:
    if maxlen < 1:
        raise RepresentationError("maxlen must be at least 1")
    entries: dict[Word, float] = {}
    for w in enumerate_words(
        rep.presentation, maxlen, mode="conjugacy", evaluate=lambda u: evaluate(rep, u)
    ):
        entries[w] = translation_length(evaluate(rep, w))
    return LengthSpectrum(rep_id=representation_hash(rep), entries=entries)


def normalize_spectrum(spec: LengthSpectrum, h: float) -> LengthSpectrum:
    if not (h > 0.0):
        raise RepresentationError("normalization rate must be positive")
    if spec.normalization != "raw":
        raise RepresentationError("spectrum is already normalized")
    return LengthSpectrum(
        rep_id=spec.rep_id,
        entries={w: h * v for w, v in spec.entries.items()},
        normalization="entropy_normalized",
        h=h,
    )


@dataclass(frozen=True, eq=False)
class GrowthEstimate:
    """Exponential orbit-growth rate from ball counts."""

    h: float
    radii: list[float]
    counts: list[int]
    residual: float


def _orbit_distances_of(mats: np.ndarray, y: Point3) -> np.ndarray:
    """Distances d(m.y, y) for a batch of matrices."""
    a = mats[:, 0, 0]
    b = mats[:, 0, 1]
    c = mats[:, 1, 0]
    d = mats[:, 1, 1]
    czd = c * y.z + d
    den = np.abs(czd) ** 2 + (np.abs(c) * y.t) ** 2
    z = ((a * y.z + b) * np.conj(czd) + a * np.conj(c) * y.t * y.t) / den
    t = y.t / den
    cosh_d = 1.0 + (np.abs(z - y.z) ** 2 + (t - y.t) ** 2) / (2.0 * t * y.t)
    return np.arccosh(np.maximum(1.0, cosh_d))


def orbit_point_distances(rep: Representation, prune_radius: float | None = None,
                          max_word_length: int | None = None,
                          chunk: int = 1 << 16) -> np.ndarray:
    """Sorted orbit distances of distinct group elements from the basepoint.

    Breadth-first over words, deduplicating elements by their canonical
    matrices (quantized at 1e-6, far below the separation of distinct
    elements at these radii).  When prune_radius is set, elements beyond
    it are dropped and not extended; elements beyond the radius still
    enter the dedup table so no spelling revisits them.
    """
    if prune_radius is None and max_word_length is None:
        raise RepresentationError("unbounded enumeration: set a prune radius or length cap")
    gens = rep.generator_matrix_array()
    y = rep.basepoint

    frontier = np.eye(2, dtype=complex)[None, :, :]
    seen = np.sort(wa.rows_as_void(wa.quantize_keys(wa.canonical_sign(frontier))))
    dists: list[np.ndarray] = [np.zeros(1)]
    depth = 0
    while frontier.shape[0]:
        depth += 1
        if max_word_length is not None and depth > max_word_length:
            break
        if depth > 64:
            raise RepresentationError("orbit enumeration failed to terminate")
        level_keys = seen[:0]
        level_mats: list[np.ndarray] = []
        level_dists: list[np.ndarray] = []
        for lo in range(0, frontier.shape[0], chunk):
            part = frontier[lo:lo + chunk]
            cand = np.einsum("nij,gjk->ngik", part, gens).reshape(-1, 2, 2)
            cand = wa.canonical_sign(cand)
            v = wa.rows_as_void(wa.quantize_keys(cand))
            uniq_v, uniq_idx = np.unique(v, return_index=True)
            new_mask = ~wa.member_of_sorted(uniq_v, seen)
            new_mask &= ~wa.member_of_sorted(uniq_v, level_keys)
            if not new_mask.any():
                continue
            level_keys = np.sort(np.concatenate([level_keys, uniq_v[new_mask]]))
            fresh = cand[uniq_idx[new_mask]]
            dist = _orbit_distances_of(fresh, y)
            if prune_radius is not None:
                keep = dist <= prune_radius
                fresh = fresh[keep]
                dist = dist[keep]
            if fresh.shape[0]:
                level_mats.append(fresh)
                level_dists.append(dist)
        if level_keys.size == 0:
            break
        seen = np.sort(np.concatenate([seen, level_keys]))
        if level_mats:
            frontier = np.concatenate(level_mats)
            dists.extend(level_dists)
        else:
            frontier = frontier[:0]
    return np.sort(np.concatenate(dists))


def estimate_growth(rep: Representation, Rmax: float, margin: float = 4.0) -> GrowthEstimate:
    """Exponential growth rate of orbit-ball counts N(R), R up to Rmax.

    Words are pruned once their orbit distance exceeds Rmax + margin;
    the growth rate is the least-squares slope of log N(R) over the
    upper half of the radius grid.
    """
    if Rmax < 6.0:
        raise RepresentationError("Rmax below 6 leaves too few usable grid points")
    dists = orbit_point_distances(rep, prune_radius=Rmax + margin)
    radii = [1.0 + 0.5 * k for k in range(int(round((Rmax - 1.0) / 0.5)) + 1)]
    counts = [int(np.searchsorted(dists, r, side="left")) for r in radii]
    upper = [(r, n) for r, n in zip(radii, counts) if r >= radii[len(radii) // 2] and n > 0]
    if len(upper) < 3:
        raise RepresentationError("not enough grid points with nonzero counts")
    xs = np.array([r for r, _ in upper])
    ys = np.log(np.array([n for _, n in upper], dtype=float))
    coeffs = np.polyfit(xs, ys, 1)
    fit = np.polyval(coeffs, xs)
    residual = float(np.sqrt(np.mean((ys - fit) ** 2)))
    return GrowthEstimate(h=float(coeffs[0]), radii=radii, counts=counts, residual=residual)


def find_complex_trace_element(rep: Representation, maxlen: int) -> Word:
    """Shortlex-first word whose image has decisively non-real trace."""
    for w in enumerate_words(rep.presentation, maxlen, mode="reduced"):
        m = evaluate(rep, w)
        if abs(m.trace.imag) > COMPLEX_TRACE_TOL:
            if classify(m).kind is IsometryKind.LOXODROMIC:
                return w
    raise RepresentationError(
        "no word of length <= %d has non-real trace; the representation "
        "looks conjugate into the real maps" % maxlen
    )


@dataclass(frozen=True, eq=False)
class JorgensenReport:
    """Necessary-condition screen for discreteness on word pairs."""

    checked: int
    skipped: int
    violations: list[tuple[Word, Word, float]]

    @property
    def ok(self) -> bool:
        return not self.violations


def jorgensen_spot_check(rep: Representation, maxlen: int) -> JorgensenReport:
    """Check |tr^2 A - 4| + |tr [A,B] - 2| >= 1 over image pairs.

    Pairs generating elementary subgroups (shared fixed point, or either
    map too close to the identity or non-translation type) are skipped:
    the inequality is a theorem only for nonelementary discrete pairs.
    """
    words = list(enumerate_words(rep.presentation, maxlen, mode="conjugacy"))
    data = []
    for w in words:
        m = evaluate(rep, w)
        cl = classify(m)
        if cl.kind in (IsometryKind.HYPERBOLIC, IsometryKind.LOXODROMIC):
            data.append((w, m, cl.data))
    checked = 0
    skipped = 0
    violations: list[tuple[Word, Word, float]] = []
    for i, (word_a, ma, da) in enumerate(data):
        for word_b, mb, db in data[i + 1:]:
            shared = min(
                da.fix_minus.chordal(db.fix_minus),
                da.fix_minus.chordal(db.fix_plus),
                da.fix_plus.chordal(db.fix_minus),
                da.fix_plus.chordal(db.fix_plus),
            )
            if shared < 1e-6:
                skipped += 1
                continue
            comm = ma @ mb @ ma.inverse() @ mb.inverse()
            value = abs(ma.trace ** 2 - 4.0) + abs(comm.trace - 2.0)
            checked += 1
            if value < 1.0 - 1e-9:
                violations.append((word_a, word_b, float(value)))
    return JorgensenReport(checked=checked, skipped=skipped, violations=violations)


def jorgensen_pair_value(ma: MoebiusMap, mb: MoebiusMap) -> float:
    comm = ma @ mb @ ma.inverse() @ mb.inverse()
    return abs(ma.trace ** 2 - 4.0) + abs(comm.trace - 2.0)


# -- serialization -----------------------------------------------------------


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def representation_to_dict(rep: Representation) -> dict:
    pres = rep.presentation
    images = {}
    for x in range(1, pres.generator_count + 1):
        m = rep.images[x]
        images[pres.letter_name(x)] = [_complex_pair(e) for e in m.entries()]
    return {
        "schema": "qfcert/1",
        "type": "representation",
        "genus": pres.genus,
        "kind": rep.kind,
        "angle": float(rep.angle),
        "basepoint": [float(rep.basepoint.z.real), float(rep.basepoint.z.imag),
                      float(rep.basepoint.t)],
        "images": images,
    }


def representation_from_dict(payload: dict) -> Representation:
    if payload.get("schema") != "qfcert/1" or payload.get("type") != "representation":
        raise RepresentationError("not a qfcert/1 representation payload")
    pres = GroupPresentation(genus=int(payload["genus"]))
    images: dict[int, MoebiusMap] = {}
    for x in range(1, pres.generator_count + 1):
        name = pres.letter_name(x)
        try:
            rows = payload["images"][name]
        except KeyError as exc:
            raise RepresentationError("missing image for %s" % name) from exc
        entries = [complex(re, im) for re, im in rows]
        images[x] = MoebiusMap(*entries)
    bp = payload.get("basepoint", [0.0, 0.0, 1.0])
    return Representation(
        presentation=pres,
        images=images,
        kind=str(payload["kind"]),
        angle=float(payload.get("angle", 0.0)),
        basepoint=Point3(complex(bp[0], bp[1]), bp[2]),
    )


def representation_json(rep: Representation) -> str:
    return json.dumps(representation_to_dict(rep), sort_keys=True, indent=2) + "\n"


def representation_hash(rep: Representation) -> str:
    blob = json.dumps(representation_to_dict(rep), sort_keys=True,
                      separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def with_basepoint(rep: Representation, y: Point3) -> Representation:
    return replace(rep, basepoint=y)


def conjugate_representation(rep: Representation, g: MoebiusMap) -> Representation:
    """The same marked group in the g-chart: every image becomes g m g^-1.

    Keeps the kind tag, so conjugating a fuchsian representation needs a
    real g (complex conjugators leave the real-entry class).
    """
    images = {k: v.conjugate_by(g) for k, v in rep.images.items() if k > 0}
    return Representation(
        presentation=rep.presentation,
        images=images,
        kind=rep.kind,
        angle=rep.angle,
        basepoint=rep.basepoint,
    )
