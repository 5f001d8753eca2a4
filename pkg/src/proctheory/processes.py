"""Processes as Choi operators on quantum/classical wire systems.

A process from system ``s_in`` to ``s_out`` is a completely positive map
stored as its Choi operator: a PSD matrix of side ``din * dout`` indexed by
``input (x) output``, with the defining action

    E(X) = Tr_in[ (X^T (x) 1_out) . choi ]

so that states are their own Choi matrices, effects are trace pairings, and
wiring two processes together contracts the matching ket and bra indices of
their Choi tensors. Classical wires are decohered quantum wires: every Choi
operator is diagonal in the classical indices (a checkable invariant that
all constructors and compositions preserve).

Trace preservation is deliberately *not* part of the type; it is one of the
causality-flavoured predicates at the bottom of this module, so the same
objects serve both the physical theory (CPTP maps) and the calculational
supertheory (arbitrary CP maps, cups, caps, supernormalised states).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    DEFAULT_TOL,
    Tolerances,
    dagger as mat_dagger,
    max_abs,
    mats_close,
    min_eigenvalue_hermitian,
)
from .systems import CLASSICAL, SystemType, TRIVIAL, WireFactor

__all__ = [
    "ProcessTensor",
    "Scalar",
    "ProcessTypeError",
    "apply",
    "as_scalar",
    "compose_seq",
    "compose_par",
    "discard",
    "max_mixed",
    "noise_state",
    "identity",
    "swap",
    "cup",
    "cap",
    "dagger_h",
    "state",
    "effect",
    "channel_from_unitary",
    "channel_from_kraus",
    "measurement_channel",
    "classical_channel",
    "is_causal",
    "preserves_identity",
    "preserves_max_mixed",
    "is_trace_nonincreasing",
    "is_zero",
    "random_cptp",
    "random_density",
    "random_povm",
    "random_unitary",
    "random_mixture_of_unitaries",
    "random_stochastic",
    "random_bistochastic",
]


class ProcessTypeError(TypeError):
    """System types of two processes do not line up for the attempted wiring."""


def _decohere_mask(choi, dims_in, dims_out, classical_positions):
    """Zero every entry whose ket and bra indices differ on a classical factor."""
    if not classical_positions:
        return choi
    dims = list(dims_in) + list(dims_out)
    n = len(dims)
    t = choi.reshape(dims + dims)
    for p in classical_positions:
        d = dims[p]
        shape = [1] * (2 * n)
        shape[p] = d
        shape[p + n] = d
        t = t * np.eye(d).reshape(shape)
    side = choi.shape[0]
    return t.reshape(side, side)


def _classical_positions(s_in: SystemType, s_out: SystemType):
    facs = s_in.factors + s_out.factors
    return [p for p, f in enumerate(facs) if f.kind == CLASSICAL]


@dataclass(frozen=True)
class ProcessTensor:
    """A completely positive map between systems, as an input (x) output Choi matrix."""

    input: SystemType
    output: SystemType
    choi: np.ndarray = field(repr=False)
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        choi = np.asarray(self.choi, dtype=complex)
        side = self.input.total_dim * self.output.total_dim
        if choi.shape != (side, side):
            raise ProcessTypeError(
                f"choi must be {side}x{side} for {self.input} -> {self.output}, got {choi.shape}"
            )
        scale = max(1.0, max_abs(choi))
        if max_abs(choi - mat_dagger(choi)) > self.tol.eq_rel * scale:
            raise ValueError("choi operator is not Hermitian")
        if min_eigenvalue_hermitian(choi, self.tol) < -self.tol.psd_rel * scale:
            raise ValueError("choi operator is not PSD: map is not completely positive")
        pos = _classical_positions(self.input, self.output)
        masked = _decohere_mask(choi, self.input.dims, self.output.dims, pos)
        if max_abs(choi - masked) > self.tol.zero_abs * scale:
            raise ValueError("choi operator violates classical decoherence")
        choi = choi.copy()
        choi.setflags(write=False)
        object.__setattr__(self, "choi", choi)

    @property
    def din(self):
        return self.input.total_dim

    @property
    def dout(self):
        return self.output.total_dim

    def choi4(self):
        """Choi tensor with axes (in-ket, out-ket, in-bra, out-bra)."""
        return self.choi.reshape(self.din, self.dout, self.din, self.dout)

    def __str__(self):
        return f"Process[{self.input} -> {self.output}]"


@dataclass(frozen=True)
class Scalar:
    """A closed diagram's value: a nonnegative real."""

    value: float

    def __post_init__(self):
        if self.value < -DEFAULT_TOL.zero_abs:
            raise ValueError(f"scalar must be nonnegative, got {self.value}")
        object.__setattr__(self, "value", max(0.0, float(self.value)))


def as_scalar(f: ProcessTensor, tol: Tolerances = DEFAULT_TOL):
    """Read a closed (trivial -> trivial) process as its scalar value."""
    if not (f.input.is_trivial() and f.output.is_trivial()):
        raise ProcessTypeError(f"{f} is not a closed diagram")
    z = complex(f.choi[0, 0])
    if abs(z.imag) > tol.eq_rel * max(1.0, abs(z)):
        raise ValueError(f"closed diagram evaluated to non-real scalar {z}")
    return Scalar(z.real if z.real > 0 else 0.0)


def apply(f: ProcessTensor, x):
    """Act on an operator: E(X) = Tr_in[(X^T (x) 1) choi]."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (f.din, f.din):
        raise ProcessTypeError(f"operator shape {x.shape} does not match input dim {f.din}")
    return np.einsum("aA,abAB->bB", x, f.choi4())


def _first_mismatch(a: SystemType, b: SystemType):
    for k, (fa, fb) in enumerate(zip(a.factors, b.factors)):
        if not fa.same_carrier(fb):
            return k, fa, fb
    return len(min(a.factors, b.factors, key=len)), None, None


def compose_seq(g: ProcessTensor, f: ProcessTensor, tol: Tolerances = DEFAULT_TOL):
    """Sequential composition g after f (output of f wired into input of g)."""
    if not f.output.same_carrier(g.input):
        k, fa, fb = _first_mismatch(f.output, g.input)
        raise ProcessTypeError(
            f"cannot compose {g} after {f}: factor {k} mismatch "
            f"({fa if fa else 'missing'} vs {fb if fb else 'missing'})"
        )
    j = np.einsum("abAB,bcBC->acAC", f.choi4(), g.choi4())
    side = f.din * g.dout
    return ProcessTensor(f.input, g.output, j.reshape(side, side), tol)


def compose_par(f: ProcessTensor, g: ProcessTensor, tol: Tolerances = DEFAULT_TOL):
    """Parallel composition f (x) g (concatenated inputs and outputs)."""
    j = np.einsum("abAB,cdCD->acbdACBD", f.choi4(), g.choi4())
    s_in = f.input * g.input
    s_out = f.output * g.output
    side = s_in.total_dim * s_out.total_dim
    return ProcessTensor(s_in, s_out, j.reshape(side, side), tol)


def dagger_h(f: ProcessTensor, tol: Tolerances = DEFAULT_TOL):
    """Hermitian-adjoint dagger: Tr[Y^dag f(X)] = Tr[dagger_h(f)(Y)^dag X]."""
    j = f.choi4().transpose(1, 0, 3, 2).conj()
    side = f.din * f.dout
    return ProcessTensor(f.output, f.input, j.reshape(side, side), tol)


# ---------------------------------------------------------------------------
# Generators


def _bell_pattern(d):
    """Sigma_ij |ii><jj| on a d-dimensional wire pair."""
    c = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            c[i * d + i, j * d + j] = 1.0
    return c


def discard(s: SystemType, tol: Tolerances = DEFAULT_TOL):
    """The unique trace/marginalisation effect: apply(discard, X) = Tr X."""
    d = s.total_dim
    return ProcessTensor(s, TRIVIAL, np.eye(d, dtype=complex), tol)


def max_mixed(s: SystemType, tol: Tolerances = DEFAULT_TOL):
    """Maximally mixed state 1/dim as a process from nothing."""
    d = s.total_dim
    return ProcessTensor(TRIVIAL, s, np.eye(d, dtype=complex) / d, tol)


def noise_state(s: SystemType, tol: Tolerances = DEFAULT_TOL):
    """Supernormalised maximally mixed state 1 (trace = dim)."""
    d = s.total_dim
    return ProcessTensor(TRIVIAL, s, np.eye(d, dtype=complex), tol)


def identity(s: SystemType, tol: Tolerances = DEFAULT_TOL):
    d = s.total_dim
    j = _decohere_mask(_bell_pattern(d), s.dims, s.dims, _classical_positions(s, s))
    return ProcessTensor(s, s, j, tol)


def cup(s: SystemType, tol: Tolerances = DEFAULT_TOL):
    """Bent wire from nothing to s (x) dual(s); Bell pair on quantum factors,
    perfectly correlated distribution on classical ones."""
    d = s.total_dim
    out = s * s.dual()
    j = _decohere_mask(_bell_pattern(d), [], out.dims, _classical_positions(TRIVIAL, out))
    return ProcessTensor(TRIVIAL, out, j, tol)


def cap(s: SystemType, tol: Tolerances = DEFAULT_TOL):
    """Adjoint of the cup: effect on s (x) dual(s)."""
    return dagger_h(cup(s, tol), tol)


def swap(a: SystemType, b: SystemType, tol: Tolerances = DEFAULT_TOL):
    """Wire crossing a (x) b -> b (x) a."""
    da, db = a.total_dim, b.total_dim
    u = np.zeros((da * db, da * db), dtype=complex)
    for x in range(da):
        for y in range(db):
            u[y * da + x, x * db + y] = 1.0
    s_in, s_out = a * b, b * a
    j4 = np.einsum("ba,BA->abAB", u, u.conj())
    d = da * db
    j = _decohere_mask(
        j4.reshape(d * d, d * d), s_in.dims, s_out.dims, _classical_positions(s_in, s_out)
    )
    return ProcessTensor(s_in, s_out, j, tol)


# ---------------------------------------------------------------------------
# Constructors from familiar data


def state(rho, s: SystemType, tol: Tolerances = DEFAULT_TOL):
    """Wrap a (not necessarily normalised) positive operator as a process from nothing."""
    return ProcessTensor(TRIVIAL, s, np.asarray(rho, dtype=complex), tol)


def effect(e, s: SystemType, tol: Tolerances = DEFAULT_TOL):
    """The functional X -> Tr[e X] as a process to nothing (choi = e^T)."""
    return ProcessTensor(s, TRIVIAL, np.asarray(e, dtype=complex).T, tol)


def channel_from_kraus(kraus, s_in: SystemType, s_out: SystemType, tol: Tolerances = DEFAULT_TOL):
    din, dout = s_in.total_dim, s_out.total_dim
    j4 = np.zeros((din, dout, din, dout), dtype=complex)
    for k in kraus:
        k = np.asarray(k, dtype=complex)
        if k.shape != (dout, din):
            raise ProcessTypeError(f"Kraus operator shape {k.shape}, expected {(dout, din)}")
        j4 += np.einsum("ba,BA->abAB", k, k.conj())
    j = _decohere_mask(
        j4.reshape(din * dout, din * dout), s_in.dims, s_out.dims, _classical_positions(s_in, s_out)
    )
    return ProcessTensor(s_in, s_out, j, tol)


def channel_from_unitary(u, s: SystemType, tol: Tolerances = DEFAULT_TOL):
    """Conjugation channel X -> U X U^dag."""
    return channel_from_kraus([u], s, s, tol)


def measurement_channel(povm, s_in: SystemType, s_out: SystemType, tol: Tolerances = DEFAULT_TOL):
    """Destructive measurement: quantum input, classical outcome wire.

    ``povm`` lists positive operators indexed by the outcome; they need not
    sum to the identity (the CP supertheory allows that).
    """
    din, dout = s_in.total_dim, s_out.total_dim
    if len(povm) != dout:
        raise ProcessTypeError(f"{len(povm)} POVM elements for outcome wire of size {dout}")
    j4 = np.zeros((din, dout, din, dout), dtype=complex)
    for a, m in enumerate(povm):
        j4[:, a, :, a] = np.asarray(m, dtype=complex).T
    return ProcessTensor(s_in, s_out, j4.reshape(din * dout, din * dout), tol)


def classical_channel(kernel, s_in: SystemType, s_out: SystemType, tol: Tolerances = DEFAULT_TOL):
    """Channel on classical wires from a kernel with entries kernel[a, x] = weight of x -> a."""
    kernel = np.asarray(kernel, dtype=float)
    din, dout = s_in.total_dim, s_out.total_dim
    if kernel.shape != (dout, din):
        raise ProcessTypeError(f"kernel shape {kernel.shape}, expected {(dout, din)}")
    j4 = np.zeros((din, dout, din, dout), dtype=complex)
    for x in range(din):
        for a in range(dout):
            j4[x, a, x, a] = kernel[a, x]
    return ProcessTensor(s_in, s_out, j4.reshape(din * dout, din * dout), tol)


# ---------------------------------------------------------------------------
# Causality-type predicates


def _trace_out_output(f: ProcessTensor):
    return np.einsum("abAb->aA", f.choi4())


def _trace_out_input(f: ProcessTensor):
    return np.einsum("abaB->bB", f.choi4())


def is_causal(f: ProcessTensor, tol: Tolerances = DEFAULT_TOL):
    """Discard-preservation (trace preservation): discard . f = discard."""
    return mats_close(_trace_out_output(f), np.eye(f.din), tol)


def preserves_identity(f: ProcessTensor, tol: Tolerances = DEFAULT_TOL):
    """Retrocausality constraint: f(1_in) = 1_out."""
    return mats_close(_trace_out_input(f), np.eye(f.dout), tol)


def preserves_max_mixed(f: ProcessTensor, tol: Tolerances = DEFAULT_TOL):
    """Unitality in the dimension-aware sense: f(1/din) = 1/dout."""
    return mats_close(_trace_out_input(f), (f.din / f.dout) * np.eye(f.dout), tol)


def is_trace_nonincreasing(f: ProcessTensor, tol: Tolerances = DEFAULT_TOL):
    m = np.eye(f.din) - _trace_out_output(f)
    scale = max(1.0, max_abs(m), max_abs(f.choi))
    return min_eigenvalue_hermitian((m + mat_dagger(m)) / 2, tol) >= -tol.psd_rel * scale


def is_zero(f: ProcessTensor, tol: Tolerances = DEFAULT_TOL):
    return max_abs(f.choi) <= tol.zero_abs


# ---------------------------------------------------------------------------
# Random in-class samples (test and theorem-suite oracles)


def _ginibre(rng, rows, cols):
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_unitary(rng, d):
    q, r = np.linalg.qr(_ginibre(rng, d, d))
    # fix phases so the distribution is Haar
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, d):
    g = _ginibre(rng, d, d)
    rho = g @ mat_dagger(g)
    return rho / np.trace(rho).real


def random_povm(rng, d, n_outcomes):
    ws = [_ginibre(rng, d, d) for _ in range(n_outcomes)]
    parts = [w @ mat_dagger(w) for w in ws]
    total = sum(parts)
    evals, evecs = np.linalg.eigh(total)
    inv_sqrt = evecs @ np.diag(1.0 / np.sqrt(evals)) @ mat_dagger(evecs)
    return [inv_sqrt @ p @ inv_sqrt for p in parts]


def random_cptp(rng, s_in: SystemType, s_out: SystemType, env_dim=None, tol: Tolerances = DEFAULT_TOL):
    """Random CPTP map via a Stinespring isometry; classical factors decohered."""
    din, dout = s_in.total_dim, s_out.total_dim
    denv = env_dim if env_dim is not None else din
    g = _ginibre(rng, dout * denv, din)
    q, _ = np.linalg.qr(g)  # isometry: q^dag q = 1_din
    v = q.reshape(dout, denv, din)
    j4 = np.einsum("bea,BeA->abAB", v, v.conj())
    j = _decohere_mask(
        j4.reshape(din * dout, din * dout), s_in.dims, s_out.dims, _classical_positions(s_in, s_out)
    )
    return ProcessTensor(s_in, s_out, j, tol)


def random_cp(rng, s_in: SystemType, s_out: SystemType, tol: Tolerances = DEFAULT_TOL):
    """Random completely positive map with no trace condition (Wishart Choi)."""
    din, dout = s_in.total_dim, s_out.total_dim
    g = _ginibre(rng, din * dout, din * dout)
    j = _decohere_mask(
        g @ mat_dagger(g), s_in.dims, s_out.dims, _classical_positions(s_in, s_out)
    )
    return ProcessTensor(s_in, s_out, j / (din * dout), tol)


def random_mixture_of_unitaries(rng, s: SystemType, n_terms=3, tol: Tolerances = DEFAULT_TOL):
    """Random unital CPTP map: convex mixture of unitary conjugations."""
    d = s.total_dim
    weights = rng.dirichlet(np.ones(n_terms))
    kraus = [np.sqrt(w) * random_unitary(rng, d) for w in weights]
    return channel_from_kraus(kraus, s, s, tol)


def random_stochastic(rng, n_in, n_out):
    """Column-stochastic kernel: kernel[a, x] with each column summing to 1."""
    k = rng.uniform(0.05, 1.0, size=(n_out, n_in))
    return k / k.sum(axis=0, keepdims=True)


def random_bistochastic(rng, n, n_terms=4):
    """Convex mixture of permutation matrices (Birkhoff sample)."""
    weights = rng.dirichlet(np.ones(n_terms))
    m = np.zeros((n, n))
    for w in weights:
        m += w * np.eye(n)[rng.permutation(n)]
    return m
