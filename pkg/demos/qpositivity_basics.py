"""Eigenstructure of Hermitian forms relative to a metric.

Walk through the core vocabulary: pencil spectra, inertia, traces, and the
equivalence between "sum of the q smallest eigenvalues is positive" and
"every q-plane restriction has positive trace".
"""

import numpy as np

from qpos import (
    Subspace,
    complement_sum_identity,
    inertia,
    max_subspace_trace,
    q_min_sum,
    restricted_trace,
    spectrum_wrt,
    trace_wrt,
)
from qpos.synthetic import random_g_orthonormal_frames, random_hermitian, random_metric

rng = np.random.default_rng(0)

print("== a form that is 3-positive but not 2-positive ==")
H = np.diag([3.0, -1.0, -1.0])
g = np.eye(3)
print("eigenvalues:", spectrum_wrt(H, g).eigenvalues)
print("inertia:", inertia(H).as_tuple())
print("sum of 2 smallest:", q_min_sum(H, g, 2), " (negative -> not strictly 2-positive)")
print("sum of 3 smallest:", q_min_sum(H, g, 3), " (positive -> strictly 3-positive)")

print("\n== the subspace-trace characterization ==")
H = random_hermitian(rng, 5)
g = random_metric(rng, 5)
q = 2
qs = q_min_sum(H, g, q)
frames = random_g_orthonormal_frames(rng, g, 2000, q)
traces = np.einsum("nki,kl,nli->n", frames.conj(), H, frames).real
print(f"q_min_sum            : {qs:+.6f}")
print(f"min sampled q-trace  : {traces.min():+.6f}  (never below q_min_sum)")
print(f"max sampled q-trace  : {traces.max():+.6f}")
print(f"max possible q-trace : {max_subspace_trace(H, g, q):+.6f}")

print("\n== trace identities ==")
s = spectrum_wrt(H, g)
W = Subspace(s.eigenvectors[:, :q])
print("trace_wrt(H, g)          :", trace_wrt(H, g))
print("sum of all eigenvalues   :", float(np.sum(s.eigenvalues)))
print("restricted to min q-span :", restricted_trace(H, g, W), "= q_min_sum", qs)

print("\n== complement identity used for the reversed-orientation branch ==")
lam = np.sort(rng.standard_normal(4))
lhs, rhs = complement_sum_identity(lam, 2)
print(f"head-minus-all {lhs:+.6f}  ==  minus-tail {rhs:+.6f}")
