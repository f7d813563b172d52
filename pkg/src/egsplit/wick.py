"""Contraction enumeration between two interaction vertices.

A vertex is an ordered list of field factors.  A contraction pattern pairs
factors of the first vertex with partner factors of the second one; the
pattern carries its Fermi sign, its singular order and the uncontracted
remainder.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
import json

BOSE = "bose"
FERMI = "fermi"
UNIT_SCALAR_ID = "unit"


class WickError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    name: str
    statistics: str
    mass: float
    components: int
    sing_index: Fraction
    partner: str

    def __post_init__(self):
        if self.statistics not in (BOSE, FERMI):
            raise WickError(f"unknown statistics {self.statistics!r}")
        if self.mass < 0:
            raise WickError("mass must be non-negative")
        if self.components < 1:
            raise WickError("components must be positive")
        object.__setattr__(self, "sing_index", Fraction(self.sing_index))
        if self.sing_index.denominator not in (1, 2):
            raise WickError("sing_index must be a half-integer")

    @property
    def is_fermion(self):
        return self.statistics == FERMI


@dataclass(frozen=True)
class Vertex:
    factors: tuple
    spacetime_label: int = 1
    roles: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if self.roles is None:
            object.__setattr__(self, "roles", ("full-field",) * len(self.factors))
        else:
            object.__setattr__(self, "roles", tuple(self.roles))
        if len(self.roles) != len(self.factors):
            raise WickError("one role per factor")


def dirac_field(mass=1.0):
    return FieldSpec("psi", FERMI, mass, 4, Fraction(0), "psibar")


def dirac_conjugate(mass=1.0):
    return FieldSpec("psibar", FERMI, mass, 4, Fraction(0), "psi")


def photon():
    return FieldSpec("A", BOSE, 0.0, 4, Fraction(-1, 2), "A")


def scalar_field(name="phi", mass=1.0):
    return FieldSpec(name, BOSE, mass, 1, Fraction(-1, 2), name)


def qed_vertex(label=1, mass=1.0):
    """The spinor-QED interaction  :psibar gamma^mu psi A_mu:  at one point."""
    return Vertex((dirac_conjugate(mass), photon(), dirac_field(mass)), spacetime_label=label)


def check_partners(species):
    """Verify the partner map is defined and involutive on the given species."""
    by_name = {}
    for f in species:
        by_name.setdefault(f.name, f)
    for f in by_name.values():
        partner = by_name.get(f.partner)
        if partner is None:
            raise WickError(f"field {f.name!r} has no partner {f.partner!r} among the vertex species")
        if partner.partner != f.name:
            raise WickError(f"partner map not involutive at {f.name!r} -> {f.partner!r}")
        if partner.statistics != f.statistics:
            raise WickError(f"{f.name!r} and its partner differ in statistics")
    return by_name


@dataclass(frozen=True)
class ContractionPattern:
    q: int
    pairs: tuple
    fermi_sign: int
    omega: object
    residual: tuple
    scalar_factor_id: str
    species: tuple = field(default=(), compare=False)

    def to_dict(self):
        return {
            "q": self.q,
            "pairs": [list(p) for p in self.pairs],
            "sign": self.fermi_sign,
            "omega": self.omega,
            "residual": [list(r) for r in self.residual],
            "scalar_id": self.scalar_factor_id,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            q=data["q"],
            pairs=tuple(tuple(p) for p in data["pairs"]),
            fermi_sign=data["sign"],
            omega=data["omega"],
            residual=tuple(tuple(r) for r in data["residual"]),
            scalar_factor_id=data["scalar_id"],
        )


def _admissible_pairs(v1, v2):
    return [
        (i, j)
        for i, a in enumerate(v1.factors)
        for j, b in enumerate(v2.factors)
        if a.partner == b.name
    ]


def _matchings(candidates, q):
    for chosen in combinations(candidates, q):
        left = {i for i, _ in chosen}
        right = {j for _, j in chosen}
        if len(left) == q and len(right) == q:
            yield chosen


def fermi_sign(pattern, v1, v2):
    """Parity of the fermion reordering that brings contracted pairs together.

    The factor list is v1 followed by v2.  Each contracted pair is moved to
    the front in the pattern's pair order, keeping the v1 factor first; the
    uncontracted fermions keep their relative order.
    """
    pairs = pattern.pairs if isinstance(pattern, ContractionPattern) else tuple(pattern)
    n1 = len(v1.factors)
    everything = list(v1.factors) + list(v2.factors)
    fermion_slots = [k for k, f in enumerate(everything) if f.is_fermion]
    target = []
    for i, j in pairs:
        for k in (i, n1 + j):
            if everything[k].is_fermion:
                target.append(k)
    target += [k for k in fermion_slots if k not in target]
    rank = {k: n for n, k in enumerate(fermion_slots)}
    perm = [rank[k] for k in target]
    inversions = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
    return -1 if inversions % 2 else 1


def singularity_degree(pattern_or_species):
    """omega = 2 * (sum of contracted singularity indices) + 3q - 4, None for q = 0."""
    if isinstance(pattern_or_species, ContractionPattern):
        species = pattern_or_species.species
        if pattern_or_species.q == 0:
            return None
    else:
        species = tuple(pattern_or_species)
    if not species:
        return None
    for f in species:
        if f.sing_index is None:
            raise WickError(f"no singularity index for {f.name!r}")
    total = 2 * sum(Fraction(f.sing_index) for f in species) + 3 * len(species) - 4
    if total.denominator != 1:
        raise WickError(f"non-integer singular order {total}")
    return int(total)


def _scalar_id(v1, v2, pairs):
    if not pairs:
        return UNIT_SCALAR_ID
    parts = [f"{v1.factors[i].name}{i}-{v2.factors[j].name}{j}" for i, j in pairs]
    return "k" + str(len(pairs)) + ":" + ",".join(parts)


def enumerate_contractions(v1, v2):
    """All admissible contraction patterns between two vertices, sorted by (q, pairs)."""
    check_partners(list(v1.factors) + list(v2.factors))
    candidates = _admissible_pairs(v1, v2)
    max_q = min(len(v1.factors), len(v2.factors))
    patterns = []
    for q in range(max_q + 1):
        for chosen in _matchings(candidates, q):
            pairs = tuple(sorted(chosen))
            species = tuple(v1.factors[i] for i, _ in pairs)
            used1 = {i for i, _ in pairs}
            used2 = {j for _, j in pairs}
            residual = tuple(
                [(1, i) for i in range(len(v1.factors)) if i not in used1]
                + [(2, j) for j in range(len(v2.factors)) if j not in used2]
            )
            omega = singularity_degree(species) if q else None
            patterns.append(ContractionPattern(
                q=q,
                pairs=pairs,
                fermi_sign=fermi_sign(pairs, v1, v2),
                omega=omega,
                residual=residual,
                scalar_factor_id=_scalar_id(v1, v2, pairs),
                species=species,
            ))
    patterns.sort(key=lambda p: (p.q, p.pairs))
    return patterns


def patterns_to_json(patterns, **kwargs):
    return json.dumps([p.to_dict() for p in patterns], **kwargs)


def patterns_from_json(text):
    return [ContractionPattern.from_dict(d) for d in json.loads(text)]


@dataclass(frozen=True)
class PartitionTerm:
    X: tuple
    Y: tuple
    ordering: str
    sign: int

    def to_dict(self):
        return {"X": list(self.X), "Y": list(self.Y), "ordering": self.ordering, "sign": self.sign}


@dataclass(frozen=True)
class PartitionSum:
    name: str
    n: int
    terms: tuple

    def __len__(self):
        return len(self.terms)

    def to_dict(self):
        return {"name": self.name, "n": self.n, "terms": [t.to_dict() for t in self.terms]}


R_ORDER = "S(Y,xn)Sbar(X)"
A_ORDER = "Sbar(X)S(Y,xn)"


def _divisions(n):
    Z = tuple(f"x{k}" for k in range(1, n))
    for size in range(1, n):
        for X in combinations(Z, size):
            Y = tuple(z for z in Z if z not in X)
            yield X, Y


def epstein_glaser_sums(n):
    """Symbolic A'_(n), R'_(n) and D_(n) = R'_(n) - A'_(n) over divisions with X nonempty."""
    if n < 2:
        raise WickError("order must be at least 2")
    divisions = list(_divisions(n))
    A = PartitionSum("A'", n, tuple(PartitionTerm(X, Y, A_ORDER, 1) for X, Y in divisions))
    R = PartitionSum("R'", n, tuple(PartitionTerm(X, Y, R_ORDER, 1) for X, Y in divisions))
    D = PartitionSum("D", n, R.terms + tuple(PartitionTerm(t.X, t.Y, t.ordering, -1) for t in A.terms))
    return A, R, D
