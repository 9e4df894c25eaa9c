"""Sampled form fields: finite point sets carrying forms, metrics, subspaces.

A :class:`FormField` is the discrete stand-in for a Hermitian form on a
vector bundle over a manifold: a list of sample points, each with named
d x d Hermitian forms and optionally coordinates, neighbor ids, a reference
metric ``g0``, a subbundle fiber, and a flag marking membership in the
anchor set F where the output metric must coincide with g0.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DimensionMismatch, QposError
from .hermitian import as_form, as_metric


@dataclass
class FieldPoint:
    id: object
    forms: dict
    coords: np.ndarray | None = None
    neighbors: list | None = None
    g0: np.ndarray | None = None
    subspace: np.ndarray | None = None  # (d, k) basis columns
    in_F: bool = False


class FormField:
    """A finite sample set with per-point forms; all points share one dim."""

    def __init__(self, dim: int, points: list[FieldPoint]):
        self.dim = int(dim)
        self.points = list(points)
        self._index = {p.id: i for i, p in enumerate(self.points)}
        if len(self._index) != len(self.points):
            raise QposError("duplicate point ids in field")
        self._validate()

    def _validate(self):
        d = self.dim
        for p in self.points:
            for name, M in p.forms.items():
                A = as_form(M)
                if A.shape[0] != d:
                    raise DimensionMismatch(f"form {name!r} at {p.id!r} has dim {A.shape[0]} != {d}")
                p.forms[name] = A
            if p.g0 is not None:
                p.g0 = as_metric(p.g0)
                if p.g0.shape[0] != d:
                    raise DimensionMismatch(f"g0 at {p.id!r} has wrong dim")
            if p.in_F and p.g0 is None:
                raise QposError(f"point {p.id!r} is in F but has no g0")
            if p.subspace is not None:
                B = np.asarray(p.subspace, dtype=complex)
                if B.ndim != 2 or B.shape[0] != d:
                    raise DimensionMismatch(f"subspace at {p.id!r} must be (d, k)")
                p.subspace = B
            if p.coords is not None:
                p.coords = np.asarray(p.coords, dtype=float)

    def __len__(self):
        return len(self.points)

    @property
    def ids(self):
        return [p.id for p in self.points]

    def index_of(self, point_id):
        return self._index[point_id]

    def form_names(self):
        names = set()
        for p in self.points:
            names.update(p.forms)
        return sorted(names, key=str)

    def form_stack(self, name: str) -> np.ndarray:
        """All points' matrices for one named form, shape (N, d, d)."""
        try:
            return np.stack([p.forms[name] for p in self.points])
        except KeyError as e:
            raise QposError(f"form {name!r} missing at some point") from e

    def g0_stack(self, default=None) -> np.ndarray:
        """Per-point g0 with ``default`` (identity if None) where absent."""
        if default is None:
            default = np.eye(self.dim, dtype=complex)
        default = as_metric(default)
        return np.stack([p.g0 if p.g0 is not None else default for p in self.points])

    def neighbor_indices(self) -> list[list[int]]:
        """Adjacency as index lists; empty lists where no neighbor data."""
        out = []
        for p in self.points:
            if p.neighbors:
                out.append([self._index[n] for n in p.neighbors if n in self._index])
            else:
                out.append([])
        return out

    def has_adjacency(self) -> bool:
        return any(p.neighbors for p in self.points)

    def anchored_mask(self) -> np.ndarray:
        """in_F points plus their 1-ring when adjacency is present.

        This is the finite-sample reading of "a neighborhood of F": the
        output metric is pinned to g0 on exactly this set.
        """
        mask = np.array([p.in_F for p in self.points], dtype=bool)
        if mask.any() and self.has_adjacency():
            extra = np.zeros_like(mask)
            for i, p in enumerate(self.points):
                if mask[i] and p.neighbors:
                    for n in p.neighbors:
                        if n in self._index:
                            extra[self._index[n]] = True
            mask |= extra
        return mask


@dataclass(frozen=True)
class CertificateEntry:
    point_id: object
    form: str
    q: int
    min_sum: float
    margin: float
    provenance: str

    @property
    def passed(self) -> bool:
        return self.margin > 0


@dataclass
class PositivityCertificate:
    """Per-point q-smallest-eigenvalue sums attesting strict q-positivity.

    ``margin = min_sum - margin_floor`` with ``margin_floor`` defaulting to
    1e-9 * ||form|| at each point; the certificate passes iff every margin is
    positive.
    """

    form: str
    q: int
    entries: list[CertificateEntry] = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failed_ids(self):
        return [e.point_id for e in self.entries if not e.passed]

    def min_margin(self) -> float:
        return min((e.margin for e in self.entries), default=float("inf"))


def certificate_from_sums(form: str, q: int, ids, min_sums, floors, provenances) -> PositivityCertificate:
    entries = [
        CertificateEntry(point_id=i, form=form, q=q, min_sum=float(s),
                         margin=float(s - f), provenance=pv)
        for i, s, f, pv in zip(ids, min_sums, floors, provenances)
    ]
    return PositivityCertificate(form=form, q=q, entries=entries)
