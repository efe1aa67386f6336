"""Time-periodic (Floquet) analysis.

A drive is described by a ``Schedule``: piecewise-constant Hamiltonian
segments interleaved with instantaneous non-unitary kicks over one
period.  The one-period propagator gf fixes the stroboscopic dynamics
psi(mT) = gf^m psi(0); conserved operators are unit-eigenvalue
eigenvectors of the superoperator gf^T kron gf^dag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_TOL_EIG,
    DEFAULT_TOL_RANK,
    Spectrum,
    as_matrix,
    eig,
    hs_norm,
    matexp,
    null_space,
)
from .liouville import (
    EigenOperator,
    PTPhase,
    canonicalize_operator,
    hermitize_basis,
)
from .vectorize import unvec

UNIT_MULTIPLIER_REL_TOL = 1e-8
HERMITIAN_FLAG_TOL = 1e-10


@dataclass
class Segment:
    """Constant-Hamiltonian stretch; propagates as exp(-i H duration)."""

    duration: float
    generator: np.ndarray

    def __post_init__(self):
        self.generator = as_matrix(self.generator)
        if self.duration < 0:
            raise ValueError("segment duration must be non-negative")

    def factor(self) -> np.ndarray:
        return matexp(-1j * self.duration * self.generator)


@dataclass
class Kick:
    """Instantaneous non-unitary factor exp(K); K is dimensionless."""

    generator: np.ndarray

    def __post_init__(self):
        self.generator = as_matrix(self.generator)

    def factor(self) -> np.ndarray:
        return matexp(self.generator)


@dataclass
class Schedule:
    """One period of a piecewise-constant drive, events in time order."""

    dim: int
    events: list

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not self.events:
            raise ValueError("schedule needs at least one event")
        for ev in self.events:
            if not isinstance(ev, (Segment, Kick)):
                raise TypeError(f"unsupported event type {type(ev).__name__}")
            if ev.generator.shape != (self.dim, self.dim):
                raise ValueError(
                    f"event generator shape {ev.generator.shape} != ({self.dim}, {self.dim})"
                )
        if self.period <= 0:
            raise ValueError("total segment duration must be positive")

    @property
    def period(self) -> float:
        return sum(ev.duration for ev in self.events if isinstance(ev, Segment))


@dataclass
class FloquetPropagator:
    gf: np.ndarray
    kappa: Spectrum
    phase: PTPhase


def classify_floquet_phase(kappa: Spectrum, tol: float = DEFAULT_TOL_EIG) -> PTPhase:
    """PT phase from the moduli of the one-period propagator eigenvalues."""
    w = kappa.eigenvalues
    moduli = np.abs(w)
    scale = max(float(np.max(moduli)), 1e-300)
    if w.size > 1:
        gaps = np.abs(w[:, None] - w[None, :])
        np.fill_diagonal(gaps, np.inf)
        if np.min(gaps) <= tol * scale and np.linalg.cond(kappa.eigenvectors) > 1.0 / tol:
            return PTPhase.EXCEPTIONAL_POINT
    if np.max(moduli) - np.min(moduli) <= tol * scale:
        return PTPhase.SYMMETRIC
    return PTPhase.BROKEN


def propagator(s: Schedule, tol_eig: float = DEFAULT_TOL_EIG) -> FloquetPropagator:
    """One-period time-ordered product; earliest event acts first."""
    gf = np.eye(s.dim, dtype=complex)
    for ev in s.events:
        gf = ev.factor() @ gf
    kappa = eig(gf, tol_eig)
    return FloquetPropagator(gf=gf, kappa=kappa, phase=classify_floquet_phase(kappa, tol_eig))


def build_floquet_superoperator(gf) -> np.ndarray:
    """Matrix of eta -> gf^dag eta gf under vec, i.e. gf^T kron gf^dag."""
    gf = as_matrix(gf)
    if gf.shape[0] != gf.shape[1]:
        raise ValueError("propagator must be square")
    return np.kron(gf.T, gf.conj().T)


def _multiplier_residual(gf: np.ndarray, op: np.ndarray, lam: complex) -> float:
    return hs_norm(gf.conj().T @ op @ gf - lam * op)


def stroboscopic_conserved(gf, tol: float = DEFAULT_TOL_RANK) -> list[EigenOperator]:
    """Hermitian basis of the unit-multiplier eigenspace of the superoperator.

    Extracted as the SVD null space of (superoperator - 1), which stays
    reliable near EP contours where the eigenspace can be defective.
    """
    gf = as_matrix(gf)
    n = gf.shape[0]
    gmat = build_floquet_superoperator(gf)
    basis = null_space(gmat - np.eye(n * n), tol)
    ops = []
    for b in hermitize_basis(basis, tol):
        op = canonicalize_operator(b)
        ops.append(
            EigenOperator(
                op=op,
                rate=1.0 + 0.0j,
                hermitian=True,
                residual=_multiplier_residual(gf, op, 1.0),
            )
        )
    return ops


def floquet_eigen_operators(
    gf,
    tol_eig: float = DEFAULT_TOL_EIG,
    tol_rank: float = DEFAULT_TOL_RANK,
) -> list[EigenOperator]:
    """All N^2 eigen-operators of the Floquet superoperator.

    The ``rate`` field carries the stroboscopic multiplier lambda.
    Unit-multiplier operators come Hermitized from the null-space route;
    the rest from the eigendecomposition.
    """
    gf = as_matrix(gf)
    gmat = build_floquet_superoperator(gf)
    spectrum = eig(gmat, tol_eig)
    lam = spectrum.eigenvalues
    scale = max(float(np.max(np.abs(lam))), 1e-300)
    conserved = stroboscopic_conserved(gf, tol_rank)
    others = []
    for k in range(lam.size):
        if abs(lam[k] - 1.0) <= UNIT_MULTIPLIER_REL_TOL * scale:
            continue
        op = canonicalize_operator(unvec(spectrum.eigenvectors[:, k]))
        others.append(
            EigenOperator(
                op=op,
                rate=complex(lam[k]),
                hermitian=hs_norm(op - op.conj().T) <= HERMITIAN_FLAG_TOL,
                residual=_multiplier_residual(gf, op, lam[k]),
            )
        )
    others.sort(key=lambda e: (abs(e.rate - 1.0), np.angle(e.rate), abs(e.rate)))
    return conserved + others


@dataclass
class RecursiveCandidates:
    """Symmetrized/antisymmetrized recursion applied to a conserved eta."""

    symmetrized: np.ndarray
    antisymmetrized: np.ndarray
    symmetrized_independent: bool
    antisymmetrized_independent: bool


def recursive_floquet(eta1, gf, tol: float = 1e-8) -> RecursiveCandidates:
    """Both recursion candidates, tagged for independence from eta1."""
    eta1 = as_matrix(eta1)
    gf = as_matrix(gf)
    if _multiplier_residual(gf, eta1, 1.0) > tol * max(hs_norm(eta1), 1e-300) * hs_norm(gf) ** 2:
        raise ValueError("eta1 is not stroboscopically conserved under gf")
    sym = 0.5 * (eta1 @ gf + gf.conj().T @ eta1)
    anti = -0.5j * (eta1 @ gf - gf.conj().T @ eta1)

    def independent(cand: np.ndarray) -> bool:
        nrm = hs_norm(cand)
        if nrm <= tol * hs_norm(eta1) * hs_norm(gf):
            return False
        e1 = eta1 / hs_norm(eta1)
        rem = cand - np.vdot(e1, cand) * e1
        return hs_norm(rem) > tol * nrm

    return RecursiveCandidates(
        symmetrized=sym,
        antisymmetrized=anti,
        symmetrized_independent=independent(sym),
        antisymmetrized_independent=independent(anti),
    )


def _split_events(s: Schedule, t0: float):
    """Partition events at absolute time t0, splitting a segment if needed."""
    before, after = [], []
    t = 0.0
    boundary_tol = 1e-12 * s.period
    remaining = list(s.events)
    for i, ev in enumerate(remaining):
        if isinstance(ev, Kick):
            if abs(t - t0) <= boundary_tol:
                raise ValueError(f"t0={t0} lands exactly on a kick; shift is ambiguous")
            (before if t < t0 else after).append(ev)
            continue
        end = t + ev.duration
        if end <= t0 + boundary_tol:
            before.append(ev)
        elif t >= t0 - boundary_tol:
            after.append(ev)
        else:
            before.append(Segment(t0 - t, ev.generator))
            after.append(Segment(end - t0, ev.generator))
        t = end
    return before, after


def time_shift(s: Schedule, t0: float, tol: float = 1e-9):
    """Shift the time origin to t0; returns (S, shifted schedule).

    S is the time-ordered product over [0, t0]; the shifted schedule is
    the cyclic rotation of the events, and its propagator equals
    S gf S^-1 (verified internally).
    """
    if not 0.0 <= t0 < s.period:
        raise ValueError(f"t0 must lie in [0, period), got {t0}")
    if t0 == 0.0:
        return np.eye(s.dim, dtype=complex), s
    before, after = _split_events(s, t0)
    smat = np.eye(s.dim, dtype=complex)
    for ev in before:
        smat = ev.factor() @ smat
    shifted = Schedule(dim=s.dim, events=after + before)
    gf = propagator(s).gf
    expected = smat @ gf @ np.linalg.inv(smat)
    got = propagator(shifted).gf
    if hs_norm(got - expected) > tol * max(hs_norm(gf), 1.0):
        raise ValueError("time-shift covariance check failed")
    return smat, shifted


@dataclass
class TraceSeries:
    """Normalized expectation-value traces on a uniform time grid.

    ``times`` are in units of the period; ``values`` has one row per
    operator.  Operators whose initial expectation vanished are left
    unnormalized and flagged via ``normalized``.
    """

    times: np.ndarray
    values: np.ndarray
    stroboscopic_indices: np.ndarray
    labels: list[str]
    rates: list[complex]
    normalized: list[bool]


def evolve_trace(
    s: Schedule,
    psi0,
    etas,
    steps_per_period: int = 200,
    periods: int = 10,
    labels: list[str] | None = None,
    rates: list[complex] | None = None,
) -> TraceSeries:
    """Dense-time evolution of normalized expectation values.

    Within segments the state advances by exact matrix exponentials of
    the sampled sub-interval; kicks are applied atomically (samples that
    coincide with a kick instant see the post-kick state).  Stroboscopic
    samples are generated by repeated application of the one-period
    propagator so they do not accumulate substep drift.
    """
    psi0 = np.asarray(psi0, dtype=complex).reshape(-1)
    if psi0.size != s.dim:
        raise ValueError(f"psi0 has length {psi0.size}, expected {s.dim}")
    if np.linalg.norm(psi0) == 0.0:
        raise ValueError("psi0 must be nonzero")
    if steps_per_period < 1 or periods < 1:
        raise ValueError("steps_per_period and periods must be >= 1")
    etas = [as_matrix(e) for e in etas]
    labels = labels if labels is not None else [f"eta{k + 1}" for k in range(len(etas))]
    rates = rates if rates is not None else [complex("nan")] * len(etas)

    t_samples = np.arange(steps_per_period) * (s.period / steps_per_period)
    partials = np.empty((steps_per_period, s.dim, s.dim), dtype=complex)
    acc = np.eye(s.dim, dtype=complex)
    t = 0.0
    k = 0
    boundary_tol = 1e-12 * s.period
    for ev in s.events:
        if isinstance(ev, Kick):
            acc = ev.factor() @ acc
            continue
        end = t + ev.duration
        while k < steps_per_period and t_samples[k] < end - boundary_tol:
            partials[k] = matexp(-1j * (t_samples[k] - t) * ev.generator) @ acc
            k += 1
        acc = ev.factor() @ acc
        t = end
    while k < steps_per_period:  # samples at the trailing boundary
        partials[k] = acc
        k += 1
    gf = acc

    n_times = periods * steps_per_period + 1
    times = np.arange(n_times) / steps_per_period
    values = np.empty((len(etas), n_times), dtype=complex)
    denoms = [np.vdot(psi0, e @ psi0) for e in etas]
    norm_flags = [
        bool(abs(d) > 1e-12 * hs_norm(e) * float(np.vdot(psi0, psi0).real))
        for d, e in zip(denoms, etas)
    ]
    psi_m = psi0.copy()
    for m in range(periods + 1):
        block = range(steps_per_period) if m < periods else [0]
        for j in block:
            psi = partials[j] @ psi_m if (m < periods and j > 0) else psi_m
            idx = m * steps_per_period + j
            for a, e in enumerate(etas):
                values[a, idx] = np.vdot(psi, e @ psi)
        psi_m = gf @ psi_m
    for a in range(len(etas)):
        if norm_flags[a]:
            values[a] /= denoms[a]
    return TraceSeries(
        times=times,
        values=values,
        stroboscopic_indices=np.arange(periods + 1) * steps_per_period,
        labels=list(labels),
        rates=[complex(r) for r in rates],
        normalized=norm_flags,
    )
