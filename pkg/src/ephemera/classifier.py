"""Singular-point classification for systems (Phi, g) on C^k.

A system is a torus acting linearly with integer weights (quadratic moment
map Phi) together with an invariant polynomial g.  Points are classified by
support, stabilizer, criticality modulo Phi, slice Hessian block types, and
the chart zero-set predicate; every report carries one label from LABELS.

Real coordinates are ordered (x_1, y_1, ..., x_k, y_k).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import config
from .errors import NotCriticalModPhi
from .jets import (
    InvariantPolynomial,
    c_add,
    c_mul,
    chart_jet,
    ephemeral_zero_set_test,
    eval_raw_terms,
    slice_restriction,
    vanishes_below_order_mod_phi,
)
from .lattice import DefiningVector, StabilizerData, canonical_sign, smith_normal_form

RANK_TOL = 1e-8
SUPPORT_TOL = 1e-10
EIG_TOL = 1e-7

LABELS = (
    "regular",
    "regular-mod-phi-elliptic",
    "purely-elliptic",
    "hyperbolic-connected",
    "nondegenerate-ephemeral(focus-focus)",
    "nondegenerate-ephemeral(hyperbolic-disconnected)",
    "degenerate-ephemeral",
    "short-elliptic",
    "unclassified-degenerate",
)

EPHEMERAL_LABELS = (
    "nondegenerate-ephemeral(focus-focus)",
    "nondegenerate-ephemeral(hyperbolic-disconnected)",
    "degenerate-ephemeral",
)

# deterministic generic-combination coefficients for the block oracle
_GENERIC_COEFFS = (1.0, 0.6180339887498949, 0.7548776662466927, 0.5698402909980532,
                   0.8191725133961645, 0.6823278038280193)


@dataclass(frozen=True)
class SystemSpec:
    """Torus weights plus an invariant polynomial g.

    weights has one row per torus generator (possibly zero rows for a
    finite group); xi presents the kernel of the defining character and is
    kept non-primitive for disconnected stabilizers.
    """

    weights: tuple[tuple[int, ...], ...]
    xi: DefiningVector
    g: InvariantPolynomial
    name: str = ""

    def __post_init__(self):
        from .errors import NotInvariant
        from .jets import check_invariance

        if self.g.xi != self.xi:
            raise NotInvariant("g carries a different invariance context than the system")
        if not check_invariance(self.g):
            raise NotInvariant("g has a term outside the invariant lattice")

    @property
    def coords(self) -> int:
        return len(self.xi.xi)

    @property
    def torus_dim(self) -> int:
        return len(self.weights)

    # -- moment map ------------------------------------------------------

    def phi(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        sq = np.abs(z) ** 2
        return np.array(
            [0.5 * sum(w[j] * sq[j] for j in range(self.coords)) for w in self.weights]
        )

    def dphi(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = np.zeros((self.torus_dim, 2 * self.coords))
        for a, w in enumerate(self.weights):
            for j in range(self.coords):
                out[a, 2 * j] = w[j] * z[j].real
                out[a, 2 * j + 1] = w[j] * z[j].imag
        return out

    def hess_phi(self, mu) -> np.ndarray:
        diag = np.zeros(2 * self.coords)
        for a, w in enumerate(self.weights):
            for j in range(self.coords):
                diag[2 * j] += mu[a] * w[j]
                diag[2 * j + 1] += mu[a] * w[j]
        return np.diag(diag)

    def orbit_directions(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = np.zeros((2 * self.coords, self.torus_dim))
        for a, w in enumerate(self.weights):
            for j in range(self.coords):
                out[2 * j, a] = -w[j] * z[j].imag
                out[2 * j + 1, a] = w[j] * z[j].real
        return out

    # -- invariant function ----------------------------------------------

    def g_value(self, z) -> float:
        return self.g.eval(z)

    def grad_g(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = np.zeros(2 * self.coords)
        for j in range(self.coords):
            fz = eval_raw_terms(self.g.wirtinger(j), z)
            out[2 * j] = 2.0 * fz.real
            out[2 * j + 1] = -2.0 * fz.imag
        return out

    def hess_g(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        k = self.coords
        out = np.zeros((2 * k, 2 * k))
        dz = [self.g.wirtinger(j) for j in range(k)]
        for j in range(k):
            for l in range(j, k):
                p_hol = _raw_wirtinger(dz[j], l, conjugate=False)
                q_mix = _raw_wirtinger(dz[j], l, conjugate=True)
                p = eval_raw_terms(p_hol, z)
                q = eval_raw_terms(q_mix, z)
                out[2 * j, 2 * l] = 2.0 * (p + q).real
                out[2 * j, 2 * l + 1] = -2.0 * (p - q).imag
                out[2 * j + 1, 2 * l] = -2.0 * (p + q).imag
                out[2 * j + 1, 2 * l + 1] = -2.0 * (p - q).real
        # symmetrize: mixed partials commute for polynomials
        out = np.triu(out) + np.triu(out, 1).T
        return out


def _raw_wirtinger(terms: dict, j: int, conjugate: bool) -> dict:
    out: dict = {}
    for (a, b), c in terms.items():
        exps = b if conjugate else a
        if exps[j] == 0:
            continue
        new = list(exps)
        new[j] -= 1
        key = (a, tuple(new)) if conjugate else (tuple(new), b)
        out[key] = c_add(out.get(key, 0), c_mul(c, exps[j]))
    return out


def standard_complex_structure(k: int) -> np.ndarray:
    j = np.zeros((2 * k, 2 * k))
    for i in range(k):
        j[2 * i + 1, 2 * i] = 1.0
        j[2 * i, 2 * i + 1] = -1.0
    return j


def local_model_system(
    xi_entries, g: InvariantPolynomial | None = None, name: str = ""
) -> SystemSpec:
    """Slice system of a local model: identity-component weights plus the
    kernel character; g defaults to the imaginary part of the defining
    monomial."""
    from .lattice import slice_weights_from_xi

    xi = (
        xi_entries
        if isinstance(xi_entries, DefiningVector)
        else DefiningVector.from_entries(xi_entries)
    )
    per_coord = slice_weights_from_xi(xi)
    h = len(per_coord[0]) if per_coord else 0
    rows = tuple(
        tuple(per_coord[i][a] for i in range(len(xi.xi))) for a in range(h)
    )
    if g is None:
        g = InvariantPolynomial.imag_defining_monomial(xi)
    return SystemSpec(weights=rows, xi=xi, g=g, name=name)


def support_of(z, tol: float = SUPPORT_TOL) -> tuple[int, ...]:
    """Indices of the vanishing coordinates (exact zeros always count)."""
    z = np.asarray(z, dtype=complex)
    scale = float(np.max(np.abs(z))) if z.size else 0.0
    return tuple(i for i in range(len(z)) if abs(z[i]) <= tol * scale)


def stabilizer_slice(sys: SystemSpec, support) -> StabilizerData:
    """Stabilizer data of the support subspace inside an arbitrary system.

    The identity-component rank and weights come from the normal form of
    the non-vanishing columns; the component count is the gcd of the
    restricted defining exponents (the finite part lives in the kernel
    character, not in the weight rows).
    """
    support = sorted(set(support))
    others = [j for j in range(sys.coords) if j not in support]
    d = sys.torus_dim
    rows = [[sys.weights[a][j] for a in range(d)] for j in others]
    if rows and d:
        _, diag, v = smith_normal_form(rows)
        rank_b = sum(1 for i in range(min(len(rows), d)) if diag[i][i] != 0)
        lie = tuple(
            canonical_sign(tuple(v[r][j] for r in range(d)))
            for j in range(rank_b, d)
        )
    else:
        lie = tuple(
            tuple(1 if r == j else 0 for r in range(d)) for j in range(d)
        )
    slice_w = tuple(
        tuple(sum(sys.weights[a][i] * vec[a] for a in range(d)) for vec in lie)
        for i in support
    )
    xi_r = sys.xi.restrict(support)
    g = 0
    for x in xi_r.xi:
        g = gcd(g, abs(x))
    return StabilizerData(
        rank=len(lie),
        component_count=g if g > 0 else 1,
        slice_weights=slice_w,
        xi_restricted=xi_r,
        lie_basis=lie,
    )


def _kernel_of(matrix: np.ndarray, ambient: int) -> np.ndarray:
    """Orthonormal kernel basis (columns) of a row-listed linear map."""
    if matrix.size == 0 or not matrix.shape[0]:
        return np.eye(ambient)
    u, s, vt = np.linalg.svd(matrix)
    smax = s[0] if len(s) else 0.0
    rank = int(np.sum(s > RANK_TOL * max(smax, 1e-300)))
    return vt[rank:].T


def is_critical_mod_phi(sys: SystemSpec, z) -> bool:
    """Whether the derivative of g vanishes on the kernel of D(Phi)."""
    grad = sys.grad_g(z)
    kernel = _kernel_of(sys.dphi(z), 2 * sys.coords)
    if kernel.shape[1] == 0:
        return True
    proj = kernel.T @ grad
    tol = RANK_TOL * config.tolerance_scale()
    return float(np.linalg.norm(proj)) <= tol * (1.0 + float(np.linalg.norm(grad)))


def lagrange_multiplier(sys: SystemSpec, z) -> np.ndarray:
    """Least-squares mu with d(g - Phi^mu) = 0 at z."""
    if not is_critical_mod_phi(sys, z):
        raise NotCriticalModPhi(f"point {z} is not critical modulo the moment map")
    grad = sys.grad_g(z)
    if sys.torus_dim == 0:
        return np.zeros(0)
    mu, *_ = np.linalg.lstsq(sys.dphi(z).T, grad, rcond=None)
    residual = float(np.linalg.norm(sys.dphi(z).T @ mu - grad))
    if residual > RANK_TOL * config.tolerance_scale() * (1.0 + float(np.linalg.norm(grad))):
        raise NotCriticalModPhi(f"multiplier residual {residual:.2e} too large")
    return mu


@dataclass
class BlockData:
    kind: str  # elliptic | hyperbolic | focus-focus | degenerate
    eigenvalues: tuple[complex, ...]


def slice_hessian_blocks(sys: SystemSpec, z, mu) -> tuple[list[BlockData], bool, dict]:
    """Block types of the linearized flow on the reduced symplectic slice.

    Builds the orthogonal complement of the orbit directions inside
    ker D(Phi) (a J-invariant symplectic subspace), restricts the Hessian
    of g~ = g - Phi^mu and the stabilizer's quadratic moment components,
    and reads block types off the spectrum of J times a fixed generic
    combination.  Degeneracy: a near-zero eigenvalue, or the restricted
    forms spanning less than the complex slice dimension.
    """
    z = np.asarray(z, dtype=complex)
    if not is_critical_mod_phi(sys, z):
        raise NotCriticalModPhi(f"point {z} is not critical modulo the moment map")
    k = sys.coords
    kernel = _kernel_of(sys.dphi(z), 2 * k)
    orbit = sys.orbit_directions(z)
    if orbit.size:
        q, s, _ = np.linalg.svd(orbit, full_matrices=False)
        orbit_on = q[:, s > RANK_TOL * max(s[0] if len(s) else 0.0, 1e-300)]
    else:
        orbit_on = np.zeros((2 * k, 0))
    reduced = kernel - orbit_on @ (orbit_on.T @ kernel)
    u, s, _ = np.linalg.svd(reduced, full_matrices=False)
    slice_basis = u[:, s > 0.5]  # kernel columns keep unit length off the orbit
    dim = slice_basis.shape[1]
    jmat = standard_complex_structure(k)
    diagnostics: dict = {"slice_dim": dim}
    if dim == 0:
        return [], False, diagnostics
    assert dim % 2 == 0, "slice of a symplectic complement must be even-dimensional"
    s_cplx = dim // 2
    # J-invariance and symplectic orthogonality cross-checks
    j_s = slice_basis.T @ jmat @ slice_basis
    leak = np.linalg.norm(jmat @ slice_basis - slice_basis @ j_s)
    diagnostics["j_invariance_defect"] = float(leak)
    if orbit_on.shape[1]:
        diagnostics["symplectic_orthogonality_defect"] = float(
            np.linalg.norm(orbit_on.T @ jmat @ slice_basis)
        )
    hess_gt = sys.hess_g(z) - sys.hess_phi(mu)
    stab = stabilizer_slice(sys, support_of(z))
    forms = [slice_basis.T @ hess_gt @ slice_basis]
    for zeta in stab.lie_basis:
        forms.append(slice_basis.T @ sys.hess_phi(zeta) @ slice_basis)
    # span rank of the restricted quadratic forms
    vecs = np.array([f[np.triu_indices(dim)] for f in forms])
    sv = np.linalg.svd(vecs, compute_uv=False)
    span_rank = int(np.sum(sv > EIG_TOL * max(sv[0] if len(sv) else 0.0, 1e-300)))
    diagnostics["form_span_rank"] = span_rank
    combo = np.zeros((dim, dim))
    for i, f in enumerate(forms):
        norm = np.linalg.norm(f)
        if norm > 1e-300:
            combo += _GENERIC_COEFFS[i % len(_GENERIC_COEFFS)] * f / norm
    eigs = np.linalg.eigvals(j_s @ combo)
    diagnostics["eigenvalues"] = tuple(map(complex, eigs))
    diagnostics["g_only_eigenvalues"] = tuple(
        map(complex, np.linalg.eigvals(j_s @ forms[0]))
    )
    scale = float(np.max(np.abs(eigs))) if len(eigs) else 0.0
    degenerate = span_rank < s_cplx or scale == 0.0
    blocks: list[BlockData] = []
    used = np.zeros(len(eigs), dtype=bool)
    order = np.argsort(-np.abs(eigs))
    for idx in order:
        if used[idx]:
            continue
        lam = eigs[idx]
        used[idx] = True
        if abs(lam) <= EIG_TOL * scale:
            degenerate = True
            blocks.append(BlockData("degenerate", (complex(lam),)))
            continue
        partners = [idx]
        for target in (-lam, np.conj(lam), -np.conj(lam)):
            cand = None
            for i2 in range(len(eigs)):
                if used[i2]:
                    continue
                if abs(eigs[i2] - target) <= 1e-6 * scale and (cand is None):
                    cand = i2
            if cand is not None:
                used[cand] = True
                partners.append(cand)
        group = tuple(complex(eigs[i2]) for i2 in partners)
        if abs(lam.real) <= EIG_TOL * abs(lam):
            blocks.append(BlockData("elliptic", group))
        elif abs(lam.imag) <= EIG_TOL * abs(lam):
            blocks.append(BlockData("hyperbolic", group))
        else:
            blocks.append(BlockData("focus-focus", group))
    return blocks, degenerate, diagnostics


@dataclass
class SingularityReport:
    point: tuple[complex, ...]
    support: tuple[int, ...]
    stabilizer: StabilizerData
    tall: bool
    degree_N: int
    critical_mod_phi: bool
    multiplier: tuple[float, ...] | None
    blocks: list[BlockData]
    label: str
    diagnostics: dict = field(default_factory=dict)


def _df_rank_full(sys: SystemSpec, z) -> bool:
    rows = np.vstack([sys.dphi(z), sys.grad_g(z)[None, :]])
    s = np.linalg.svd(rows, compute_uv=False)
    smax = s[0] if len(s) else 0.0
    rank = int(np.sum(s > RANK_TOL * max(smax, 1e-300)))
    return rank == sys.torus_dim + 1


def classify_point(sys: SystemSpec, point) -> SingularityReport:
    """Full classification pipeline for one point of the system."""
    z = np.asarray(point, dtype=complex)
    support = support_of(z)
    stab = stabilizer_slice(sys, support)
    xi_r = stab.xi_restricted
    tall = xi_r.tall
    n_support = xi_r.degree_N
    degree = n_support if n_support >= 1 else 1
    diagnostics: dict = {"support_degree": n_support}
    critical = is_critical_mod_phi(sys, z)

    if not critical:
        label = "regular" if _df_rank_full(sys, z) else "regular-mod-phi-elliptic"
        return SingularityReport(
            point=tuple(map(complex, z)),
            support=tuple(support),
            stabilizer=stab,
            tall=tall,
            degree_N=degree,
            critical_mod_phi=False,
            multiplier=None,
            blocks=[],
            label=label,
            diagnostics=diagnostics,
        )

    mu = lagrange_multiplier(sys, z)
    blocks, degenerate, block_diag = slice_hessian_blocks(sys, z, mu)
    diagnostics.update(block_diag)
    kinds = {b.kind for b in blocks}

    if not tall:
        label = "unclassified-degenerate" if degenerate else "short-elliptic"
    elif n_support >= 2:
        p_slice = slice_restriction(sys.g, z, support, xi_r, max_degree=n_support)
        p_slice = p_slice.without_constant()
        vanishes = vanishes_below_order_mod_phi(p_slice, n_support)
        ephemeral = False
        if vanishes:
            jet = chart_jet(p_slice)
            ephemeral = ephemeral_zero_set_test(jet)
            diagnostics["chart_jet"] = (jet.A, jet.B, jet.D)
        diagnostics["vanishes_below_degree"] = vanishes
        if n_support > 2:
            # exact witness: all slice terms have degree >= n_support > 2
            diagnostics["degree2_taylor_vanishes"] = all(
                sum(a) + sum(b) > 2 for a, b in p_slice.terms
            )
        if ephemeral and degenerate:
            label = "degenerate-ephemeral"
        elif ephemeral:
            if "focus-focus" in kinds:
                label = "nondegenerate-ephemeral(focus-focus)"
            elif "hyperbolic" in kinds:
                label = "nondegenerate-ephemeral(hyperbolic-disconnected)"
            elif stab.component_count > 1:
                label = "nondegenerate-ephemeral(hyperbolic-disconnected)"
            else:
                label = "nondegenerate-ephemeral(focus-focus)"
        elif degenerate:
            label = "unclassified-degenerate"
        elif kinds <= {"elliptic"}:
            label = "purely-elliptic"
        elif "hyperbolic" in kinds and stab.component_count == 1:
            label = "hyperbolic-connected"
        elif "focus-focus" in kinds:
            label = "nondegenerate-ephemeral(focus-focus)"
        else:
            label = "nondegenerate-ephemeral(hyperbolic-disconnected)"
    else:
        label = "unclassified-degenerate" if degenerate else "purely-elliptic"

    return SingularityReport(
        point=tuple(map(complex, z)),
        support=tuple(support),
        stabilizer=stab,
        tall=tall,
        degree_N=degree,
        critical_mod_phi=True,
        multiplier=tuple(map(float, mu)),
        blocks=blocks,
        label=label,
        diagnostics=diagnostics,
    )


@dataclass
class FiberVerdict:
    connectivity_expected: bool
    obstruction: bool
    genericity_ok: bool


def fiber_verdicts(reports) -> FiberVerdict:
    """Aggregate connectivity predicates over the reports of one moment fiber."""
    from .lattice import connectivity_obstruction

    hyperbolic = [
        r
        for r in reports
        if r.label
        in ("hyperbolic-connected", "nondegenerate-ephemeral(hyperbolic-disconnected)")
    ]
    return FiberVerdict(
        connectivity_expected=not any(
            r.label == "hyperbolic-connected" for r in reports
        ),
        obstruction=connectivity_obstruction(
            [r.stabilizer for r in reports if r.tall]
        ),
        genericity_ok=len(hyperbolic) <= 1,
    )
