"""Process theories over the Choi-operator processes, and constructions on them.

A theory is a named membership predicate plus a composition discipline: the
physical theory of channels (trace preserving), its unital subtheory with a
rescaled dagger, the calculational supertheory of all CP maps (with cups and
caps), the renormalised bullet theory, the scalar quotient, and the
noise-restricted deterministic theory.

The normalisation functional N(f) = Tr[choi]/dim_in is the single positive
linear functional the bullet/quotient constructions hinge on: N(identity)=1,
N is multiplicative over parallel composition, and N(f)=0 exactly when f is
the zero process.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import DEFAULT_TOL, Tolerances, max_abs, min_eigenvalue_hermitian
from .processes import (
    ProcessTensor,
    ProcessTypeError,
    Scalar,
    compose_seq,
    dagger_h,
    is_causal,
    is_zero,
    preserves_max_mixed,
)

__all__ = [
    "Theory",
    "THEORIES",
    "theory_by_name",
    "MembershipVerdict",
    "membership",
    "normalization_scalar",
    "bullet_compose",
    "ProcessClass",
    "canonical_rep",
    "class_equal",
    "quotient_compose",
    "class_dagger",
    "NoiseParameter",
    "noisy",
    "dagger_unital",
]

ACYCLIC = "acyclic-only"
COMPACT = "compact"


@dataclass(frozen=True)
class Theory:
    name: str
    wiring: str  # ACYCLIC or COMPACT
    dagger: str  # "none" | "hermitian" | "hermitian-rescaled"

    @property
    def compact(self):
        return self.wiring == COMPACT


QPHYS = Theory("qphys", ACYCLIC, "none")
QPHYS_UNITAL = Theory("qphys-unital", ACYCLIC, "hermitian-rescaled")
QCALC = Theory("qcalc", COMPACT, "hermitian")
QCALC_BULLET = Theory("qcalc-bullet", COMPACT, "hermitian")
QCALC_QUOTIENT = Theory("qcalc-quotient", COMPACT, "hermitian")
QNEUT = Theory("qneut", COMPACT, "hermitian")

THEORIES = {t.name: t for t in (QPHYS, QPHYS_UNITAL, QCALC, QCALC_BULLET, QCALC_QUOTIENT, QNEUT)}


def theory_by_name(name):
    try:
        return THEORIES[name.lower()]
    except KeyError:
        raise KeyError(f"unknown theory {name!r}; expected one of {sorted(THEORIES)}") from None


@dataclass
class MembershipVerdict:
    ok: bool
    theory: str
    checks: dict = field(default_factory=dict)
    reasons: list = field(default_factory=list)
    n_value: float | None = None

    def __str__(self):
        status = "member" if self.ok else "not a member"
        extra = f" (N={self.n_value:.6g})" if self.n_value is not None else ""
        why = f": failed {', '.join(self.reasons)}" if self.reasons else ""
        return f"{status} of {self.theory}{extra}{why}"


def _is_cp(f: ProcessTensor, tol: Tolerances):
    scale = max(1.0, max_abs(f.choi))
    return min_eigenvalue_hermitian(f.choi, tol) >= -tol.psd_rel * scale


def membership(theory: Theory, f: ProcessTensor, tol: Tolerances = DEFAULT_TOL):
    """Evaluate the theory's membership predicate, reporting failed checks by name."""
    checks = {"cp": _is_cp(f, tol)}
    n = normalization_scalar(f).value
    if theory.name == "qphys":
        checks["causal"] = is_causal(f, tol)
    elif theory.name == "qphys-unital":
        checks["causal"] = is_causal(f, tol)
        checks["unital"] = preserves_max_mixed(f, tol)
    elif theory.name == "qcalc":
        pass
    elif theory.name == "qcalc-bullet":
        checks["representative"] = is_zero(f, tol) or abs(n - 1.0) <= tol.eq_rel
    elif theory.name == "qcalc-quotient":
        pass
    elif theory.name == "qneut":
        scale = max(1.0, max_abs(f.choi))
        checks["strictly-positive"] = (
            min_eigenvalue_hermitian(f.choi, tol) > tol.psd_rel * scale
        )
    else:
        raise KeyError(f"unknown theory {theory.name!r}")
    reasons = [name for name, ok in checks.items() if not ok]
    return MembershipVerdict(not reasons, theory.name, checks, reasons, n_value=n)


def normalization_scalar(f: ProcessTensor):
    """N(f) = Tr[choi]/dim_in: the probability weight left in f."""
    return Scalar(max(0.0, float(np.trace(f.choi).real)) / f.din)


def bullet_compose(g: ProcessTensor, f: ProcessTensor, tol: Tolerances = DEFAULT_TOL):
    """Renormalised sequential composition: (g o f)/N(g o f), or zero."""
    gf = compose_seq(g, f, tol)
    n = normalization_scalar(gf).value
    if n <= tol.zero_abs:
        return ProcessTensor(gf.input, gf.output, np.zeros_like(gf.choi), tol)
    return ProcessTensor(gf.input, gf.output, gf.choi / n, tol)


@dataclass(frozen=True)
class ProcessClass:
    """An equivalence class of processes up to positive scale, by its canonical member.

    The canonical member is the zero process or is normalised so N = 1.
    """

    canonical: ProcessTensor

    def is_zero_class(self, tol: Tolerances = DEFAULT_TOL):
        return is_zero(self.canonical, tol)


def canonical_rep(f: ProcessTensor, tol: Tolerances = DEFAULT_TOL):
    n = normalization_scalar(f).value
    if n <= tol.zero_abs:
        return ProcessClass(ProcessTensor(f.input, f.output, np.zeros_like(f.choi), tol))
    return ProcessClass(ProcessTensor(f.input, f.output, f.choi / n, tol))


def class_equal(a: ProcessClass, b: ProcessClass, tol: Tolerances = DEFAULT_TOL):
    ca, cb = a.canonical, b.canonical
    if not (ca.input.same_carrier(cb.input) and ca.output.same_carrier(cb.output)):
        return False
    scale = max(1.0, max_abs(ca.choi), max_abs(cb.choi))
    return max_abs(ca.choi - cb.choi) <= tol.eq_rel * scale


def quotient_compose(a: ProcessClass, b: ProcessClass, tol: Tolerances = DEFAULT_TOL):
    """Compose classes through arbitrary representatives; well defined by construction."""
    return canonical_rep(compose_seq(a.canonical, b.canonical, tol), tol)


def class_dagger(a: ProcessClass, tol: Tolerances = DEFAULT_TOL):
    """Hermitian adjoint descends to the quotient."""
    return canonical_rep(dagger_h(a.canonical, tol), tol)


@dataclass(frozen=True)
class NoiseParameter:
    epsilon: float

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 1.0):
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")


def noisy(f: ProcessTensor, eps, tol: Tolerances = DEFAULT_TOL):
    """Mix f with the depolariser: (1-eps) choi + eps (1 (x) 1)/dim_out.

    The depolariser term is the channel X -> Tr[X] 1/dim_out, so trace
    preservation survives the mixing. The result has a strictly positive
    definite Choi operator, so it can never be the zero process; noisy
    processes absorb wiring processes.
    """
    if not isinstance(eps, NoiseParameter):
        eps = NoiseParameter(float(eps))
    e = eps.epsilon
    side = f.din * f.dout
    j = (1.0 - e) * f.choi + e * np.eye(side, dtype=complex) / f.dout
    out = ProcessTensor(f.input, f.output, j, tol)
    scale = max(1.0, max_abs(j))
    lam = min_eigenvalue_hermitian(j, tol)
    if lam <= 0 or lam < e / f.dout - tol.psd_rel * scale:
        raise AssertionError(f"noisy choi not strictly positive: min eigenvalue {lam:g}")
    return out


def dagger_unital(f: ProcessTensor, tol: Tolerances = DEFAULT_TOL):
    """Dagger of the unital subtheory: Hermitian adjoint rescaled by dout/din."""
    verdict = membership(QPHYS_UNITAL, f, tol)
    if not verdict.ok:
        raise ValueError(f"dagger_unital precondition failed: {verdict}")
    g = dagger_h(f, tol)
    return ProcessTensor(g.input, g.output, g.choi * (f.dout / f.din), tol)
