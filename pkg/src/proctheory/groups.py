"""Finite groups, unitary representations, intertwiners, and the
no-signalling membership test for processes over causal/retrocausal wires.

Groups are explicit Cayley tables (every axiom is checked by exhaustive
scan), representations assign a unitary on the quantum factors of a system
to each group element (classical factors always transform trivially), and
the conjugate representation acts entrywise-conjugated on the
orientation-flipped system.

A process whose boundary is split into causal (forward) and retrocausal
(backward) wires is no-signalling when discarding its causal outputs
disconnects it from the causal inputs, and symmetrically when noise-feeding
its retrocausal inputs disconnects the retrocausal outputs. Membership in
the particle/antiparticle theory is completely positive + intertwiner +
no-signalling in both directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import DEFAULT_TOL, Tolerances, as_matrix, dagger as mat_dagger, max_abs
from .processes import ProcessTensor, is_causal, preserves_identity
from .systems import CLASSICAL, DOWN, QUANTUM, SystemType

__all__ = [
    "FiniteGroup",
    "validate_group",
    "cyclic_group",
    "permutation_group",
    "symmetric_group_s3",
    "Representation",
    "validate_representation",
    "trivial_rep",
    "tensor_rep",
    "conjugate_rep",
    "is_intertwiner",
    "OrientedPartition",
    "NoSignallingVerdict",
    "no_signalling",
    "qpart_membership",
    "load_representation",
    "parse_representation",
]


# ---------------------------------------------------------------------------
# Groups

@dataclass(frozen=True)
class FiniteGroup:
    order: int
    table: np.ndarray = field(repr=False)  # table[i, j] = index of g_i * g_j
    identity: int = 0

    def __post_init__(self):
        table = np.asarray(self.table, dtype=int)
        if table.shape != (self.order, self.order):
            raise ValueError(f"Cayley table must be {self.order}x{self.order}, got {table.shape}")
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def mul(self, a, b):
        return int(self.table[a, b])

    def inverse(self, a):
        hits = np.nonzero(self.table[a] == self.identity)[0]
        if len(hits) == 0:
            raise ValueError(f"element {a} has no inverse")
        return int(hits[0])

    def elements(self):
        return range(self.order)


def validate_group(g: FiniteGroup):
    """Exhaustively check the group axioms; returns a list of violations."""
    bad = []
    n = g.order
    if not ((0 <= g.table) & (g.table < n)).all():
        bad.append("table entries out of range")
        return bad
    for a in range(n):
        if g.table[g.identity, a] != a or g.table[a, g.identity] != a:
            bad.append(f"identity law fails at element {a}")
    for a in range(n):
        if g.identity not in g.table[a]:
            bad.append(f"element {a} has no inverse")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if g.table[g.table[a, b], c] != g.table[a, g.table[b, c]]:
                    bad.append(f"associativity fails at triple ({a}, {b}, {c})")
    return bad


def cyclic_group(n):
    table = np.fromfunction(lambda i, j: (i + j) % n, (n, n), dtype=int)
    return FiniteGroup(n, table, 0)


def permutation_group(perms):
    """Group generated by an explicit, composition-closed list of permutations.

    ``perms[k]`` maps position i to perms[k][i]; perms[0] must be the
    identity permutation and the list must be closed under composition.
    """
    perms = [tuple(p) for p in perms]
    index = {p: k for k, p in enumerate(perms)}
    n = len(perms)
    table = np.zeros((n, n), dtype=int)
    for a, pa in enumerate(perms):
        for b, pb in enumerate(perms):
            comp = tuple(pa[pb[i]] for i in range(len(pa)))  # a after b
            if comp not in index:
                raise ValueError(f"permutation list not closed: {pa} after {pb} = {comp}")
            table[a, b] = index[comp]
    return FiniteGroup(n, table, index[tuple(range(len(perms[0])))])


S3_PERMS = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0), (1, 0, 2)]


def symmetric_group_s3():
    """S3 via composition of the six permutations of three points."""
    return permutation_group(S3_PERMS)


def s3_standard_representation():
    """The 2-dimensional standard representation of S3 on a qubit.

    Built by restricting the permutation matrices to the plane orthogonal
    to (1,1,1), so the homomorphism property is inherited exactly.
    """
    from .systems import Q

    group = symmetric_group_s3()
    basis = np.array(
        [
            [1 / np.sqrt(2), 1 / np.sqrt(6)],
            [-1 / np.sqrt(2), 1 / np.sqrt(6)],
            [0.0, -2 / np.sqrt(6)],
        ]
    )
    mats = []
    for p in S3_PERMS:
        m = np.zeros((3, 3))
        for i in range(3):
            m[p[i], i] = 1.0
        mats.append(basis.T @ m @ basis)
    return Representation(group, Q(2), tuple(np.asarray(m, dtype=complex) for m in mats))


# ---------------------------------------------------------------------------
# Representations

@dataclass(frozen=True)
class Representation:
    group: FiniteGroup
    system: SystemType
    action: tuple = field(repr=False)  # unitary on the quantum factors, per element

    def __post_init__(self):
        action = tuple(np.asarray(u, dtype=complex) for u in self.action)
        if len(action) != self.group.order:
            raise ValueError(f"need {self.group.order} unitaries, got {len(action)}")
        dq = self.quantum_dim
        for k, u in enumerate(action):
            if u.shape != (dq, dq):
                raise ValueError(f"unitary for element {k} has shape {u.shape}, expected {(dq, dq)}")
            u.setflags(write=False)
        object.__setattr__(self, "action", action)

    @property
    def quantum_dim(self):
        d = 1
        for f in self.system.factors:
            if f.kind == QUANTUM:
                d *= f.dim
        return d

    def unitary(self, g):
        """Unitary on the full system (classical factors act as identity)."""
        u = self.action[g]
        facs = self.system.factors
        if all(f.kind == QUANTUM for f in facs) or not facs:
            return u
        qpos = [i for i, f in enumerate(facs) if f.kind == QUANTUM]
        d = self.system.total_dim
        if not qpos:  # purely classical system; the 1x1 quantum action is a phase
            return u[0, 0] * np.eye(d, dtype=complex)
        # interleave the quantum action with classical identities factor by factor
        n = len(facs)
        qdims = [facs[i].dim for i in qpos]
        ops = [u.reshape(qdims + qdims)]
        subs = [[p for p in qpos] + [p + n for p in qpos]]
        for i, f in enumerate(facs):
            if f.kind == CLASSICAL:
                ops.append(np.eye(f.dim))
                subs.append([i, i + n])
        args = []
        for op, sub in zip(ops, subs):
            args.extend([op, sub])
        args.append(list(range(2 * n)))
        return np.einsum(*args).reshape(d, d)


def validate_representation(r: Representation, tol: Tolerances = DEFAULT_TOL):
    """Check homomorphism, unit, and unitarity; returns violations."""
    bad = []
    g = r.group
    dq = r.quantum_dim
    eye = np.eye(dq)
    if max_abs(r.action[g.identity] - eye) > tol.eq_rel:
        bad.append("identity element does not act as the identity")
    for a in g.elements():
        u = r.action[a]
        if max_abs(u @ mat_dagger(u) - eye) > tol.eq_rel * max(1.0, max_abs(u) ** 2):
            bad.append(f"element {a} does not act unitarily")
    for a in g.elements():
        for b in g.elements():
            lhs = r.action[a] @ r.action[b]
            rhs = r.action[g.mul(a, b)]
            if max_abs(lhs - rhs) > tol.eq_rel * max(1.0, max_abs(lhs)):
                bad.append(f"homomorphism fails at pair ({a}, {b})")
    return bad


def trivial_rep(group: FiniteGroup, system: SystemType):
    dq = 1
    for f in system.factors:
        if f.kind == QUANTUM:
            dq *= f.dim
    return Representation(group, system, tuple(np.eye(dq, dtype=complex) for _ in group.elements()))


def tensor_rep(a: Representation, b: Representation):
    """Representation of the composite system, acting factor-wise."""
    if a.group is not b.group and not np.array_equal(a.group.table, b.group.table):
        raise ValueError("cannot tensor representations of different groups")
    action = tuple(np.kron(a.action[g], b.action[g]) for g in a.group.elements())
    return Representation(a.group, a.system * b.system, action)


def conjugate_rep(a: Representation):
    """Entrywise-conjugate action on the orientation-flipped system."""
    return Representation(a.group, a.system.dual(), tuple(u.conj() for u in a.action))


def is_intertwiner(
    f: ProcessTensor, rep_in: Representation, rep_out: Representation, tol: Tolerances = DEFAULT_TOL
):
    """Covariance: f . Ad_{U_in(g)} = Ad_{U_out(g)} . f for every group element.

    Equivalently the Choi operator is invariant under conjugation by
    conj(U_in(g)) (x) U_out(g).
    """
    if not rep_in.system.same_carrier(f.input):
        raise ValueError(f"input representation lives on {rep_in.system}, process input is {f.input}")
    if not rep_out.system.same_carrier(f.output):
        raise ValueError(f"output representation lives on {rep_out.system}, process output is {f.output}")
    for g in rep_in.group.elements():
        u = np.kron(rep_in.unitary(g).conj(), rep_out.unitary(g))
        moved = u @ f.choi @ mat_dagger(u)
        if max_abs(moved - f.choi) > tol.eq_rel * max(1.0, max_abs(f.choi)):
            return False
    return True


# ---------------------------------------------------------------------------
# Causal/retrocausal partitions and no-signalling

@dataclass(frozen=True)
class OrientedPartition:
    """Per boundary factor of a process: causal (False) or retrocausal (True)."""

    input_retro: tuple
    output_retro: tuple

    @classmethod
    def from_orientations(cls, f: ProcessTensor):
        return cls(
            tuple(fac.orientation == DOWN for fac in f.input.factors),
            tuple(fac.orientation == DOWN for fac in f.output.factors),
        )

    def check_consistent(self, f: ProcessTensor):
        if len(self.input_retro) != len(f.input.factors) or len(self.output_retro) != len(
            f.output.factors
        ):
            raise ValueError("partition does not match the process boundary")
        for flag, fac in zip(self.input_retro, f.input.factors):
            if fac.orientation == DOWN and not flag:
                raise ValueError(f"factor {fac} is oriented down but marked causal")
        for flag, fac in zip(self.output_retro, f.output.factors):
            if fac.orientation == DOWN and not flag:
                raise ValueError(f"factor {fac} is oriented down but marked causal")


@dataclass
class NoSignallingVerdict:
    ok: bool
    causal_to_retro: bool
    retro_to_causal: bool
    residual_causal_to_retro: float
    residual_retro_to_causal: float
    f_c: ProcessTensor | None = None
    f_r: ProcessTensor | None = None
    notes: list = field(default_factory=list)

    def failed_directions(self):
        out = []
        if not self.causal_to_retro:
            out.append("causal->retro")
        if not self.retro_to_causal:
            out.append("retro->causal")
        return out


def _trace_pairs(choi, dims, positions):
    """Partial trace over the ket/bra pairs at ``positions``; returns (tensor, kept dims)."""
    n = len(dims)
    t = choi.reshape(list(dims) + list(dims))
    subs = list(range(n)) + [i if i in positions else n + i for i in range(n)]
    kept = [i for i in range(n) if i not in positions]
    out = kept + [n + i for i in kept]
    return np.einsum(t, subs, out), [dims[i] for i in kept]


def _matches_identity_product(choi, dims, eye_positions, tol):
    """Does choi factor as 1 on eye_positions (x) residue/dim elsewhere?

    Returns (residual, residue tensor as a matrix on the kept positions).
    """
    n = len(dims)
    d_eyes = 1
    for p in eye_positions:
        d_eyes *= dims[p]
    residue, kept_dims = _trace_pairs(choi, dims, eye_positions)
    residue = residue / d_eyes
    kept = [i for i in range(n) if i not in eye_positions]
    ops, subs = [], []
    for p in eye_positions:
        ops.append(np.eye(dims[p]))
        subs.append([p, n + p])
    ops.append(residue)
    subs.append(kept + [n + i for i in kept])
    args = []
    for op, sub in zip(ops, subs):
        args.extend([op, sub])
    args.append(list(range(2 * n)))
    expected = np.einsum(*args)
    t = choi.reshape(list(dims) + list(dims))
    residual = max_abs(t - expected) / max(1.0, max_abs(t))
    side = 1
    for d in kept_dims:
        side *= d
    return residual, residue.reshape(side, side)


def _sub_system(s: SystemType, flags, retro):
    return SystemType(tuple(f for f, is_r in zip(s.factors, flags) if is_r == retro))


def no_signalling(
    f: ProcessTensor, partition: OrientedPartition | None = None, tol: Tolerances = DEFAULT_TOL
):
    """Check both no-signalling directions, extracting the factored marginals.

    Causal->retro: discarding all causal outputs must leave discarded causal
    inputs tensored with a retrocausal process F_r on the retro wires.
    Retro->causal: feeding noise into all retro inputs must leave a causal
    process F_c on the causal wires tensored with noise on the retro outputs.
    """
    if partition is None:
        partition = OrientedPartition.from_orientations(f)
    partition.check_consistent(f)
    n_in = len(f.input.factors)
    dims = list(f.input.dims) + list(f.output.dims)
    c_in = [i for i, r in enumerate(partition.input_retro) if not r]
    r_in = [i for i, r in enumerate(partition.input_retro) if r]
    c_out = [n_in + i for i, r in enumerate(partition.output_retro) if not r]
    r_out = [n_in + i for i, r in enumerate(partition.output_retro) if r]
    notes = []

    # causal -> retro: G = (discard causal outputs) . f
    g_tensor, g_dims = _trace_pairs(f.choi, dims, c_out)
    g_side = int(np.prod(g_dims)) if g_dims else 1
    # positions of the causal inputs inside G's factor list
    keep = [i for i in range(len(dims)) if i not in c_out]
    g_cin = [keep.index(i) for i in c_in]
    res_cr, fr_mat = _matches_identity_product(g_tensor.reshape(g_side, g_side), g_dims, g_cin, tol)
    ok_cr = res_cr <= tol.eq_rel
    fr = None
    s_r_in = _sub_system(f.input, partition.input_retro, True)
    s_r_out = _sub_system(f.output, partition.output_retro, True)
    try:
        fr = ProcessTensor(s_r_in, s_r_out, fr_mat, tol)
        if not preserves_identity(fr, tol):
            ok_cr = False
            notes.append("extracted retro part does not preserve the noise state")
    except ValueError as exc:
        ok_cr = False
        notes.append(f"extracted retro part is not a process: {exc}")

    # retro -> causal: G' = f . (noise on retro inputs)
    gp_tensor, gp_dims = _trace_pairs(f.choi, dims, r_in)
    gp_side = int(np.prod(gp_dims)) if gp_dims else 1
    keep = [i for i in range(len(dims)) if i not in r_in]
    gp_rout = [keep.index(i) for i in r_out]
    res_rc, fc_mat = _matches_identity_product(gp_tensor.reshape(gp_side, gp_side), gp_dims, gp_rout, tol)
    ok_rc = res_rc <= tol.eq_rel
    fc = None
    s_c_in = _sub_system(f.input, partition.input_retro, False)
    s_c_out = _sub_system(f.output, partition.output_retro, False)
    try:
        fc = ProcessTensor(s_c_in, s_c_out, fc_mat, tol)
        if not is_causal(fc, tol):
            ok_rc = False
            notes.append("extracted causal part is not trace preserving")
    except ValueError as exc:
        ok_rc = False
        notes.append(f"extracted causal part is not a process: {exc}")

    return NoSignallingVerdict(
        ok_cr and ok_rc, ok_cr, ok_rc, res_cr, res_rc,
        fc if ok_rc else None, fr if ok_cr else None, notes,
    )


@dataclass
class QPartVerdict:
    ok: bool
    checks: dict = field(default_factory=dict)
    reasons: list = field(default_factory=list)
    ns: NoSignallingVerdict | None = None

    def __str__(self):
        status = "member" if self.ok else "not a member"
        why = f": failed {', '.join(self.reasons)}" if self.reasons else ""
        return f"{status} of qpart{why}"


def qpart_membership(
    f: ProcessTensor,
    rep_in: Representation | None = None,
    rep_out: Representation | None = None,
    partition: OrientedPartition | None = None,
    tol: Tolerances = DEFAULT_TOL,
):
    """Particle/antiparticle theory membership: CP + intertwiner + no-signalling.

    Without representations the symmetry check is skipped (trivial group).
    On purely causal boundaries membership forces trace preservation, and on
    purely retrocausal ones noise preservation; both derived facts are
    reported in the checks.
    """
    if partition is None:
        partition = OrientedPartition.from_orientations(f)
    checks = {"cp": True}  # ProcessTensor construction enforces complete positivity
    if rep_in is not None or rep_out is not None:
        if rep_in is None or rep_out is None:
            raise ValueError("supply both rep_in and rep_out, or neither")
        checks["intertwiner"] = is_intertwiner(f, rep_in, rep_out, tol)
    ns = no_signalling(f, partition, tol)
    checks["no-signalling-causal-retro"] = ns.causal_to_retro
    checks["no-signalling-retro-causal"] = ns.retro_to_causal
    purely_causal = not any(partition.input_retro) and not any(partition.output_retro)
    purely_retro = all(partition.input_retro) and all(partition.output_retro)
    if purely_causal and all(checks.values()):
        checks["derived-causal"] = is_causal(f, tol)
    if purely_retro and all(checks.values()):
        checks["derived-retrocausal"] = preserves_identity(f, tol)
    reasons = [k for k, v in checks.items() if not v]
    return QPartVerdict(not reasons, checks, reasons, ns)


# ---------------------------------------------------------------------------
# Plain-text group/representation files

def parse_representation(text):
    """Parse the table format: order and identity, Cayley rows, matrix side,
    then per-element row-major complex entries (``a+bi`` tokens)."""
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    pos = 0

    def take(n):
        nonlocal pos
        if pos + n > len(tokens):
            raise ValueError("representation file ended early")
        out = tokens[pos : pos + n]
        pos += n
        return out

    order, identity = (int(x) for x in take(2))
    table = np.array([[int(x) for x in take(order)] for _ in range(order)])
    group = FiniteGroup(order, table, identity)
    side = int(take(1)[0])
    mats = []
    for _ in range(order):
        entries = [complex(tok.replace("i", "j")) for tok in take(side * side)]
        mats.append(as_matrix(entries, side, side))
    if pos != len(tokens):
        raise ValueError(f"{len(tokens) - pos} unexpected trailing tokens in representation file")
    return group, mats


def load_representation(path, system: SystemType | None = None):
    """Load a (group, matrices) file; with ``system`` given, build the Representation."""
    with open(path, "r", encoding="utf-8") as fh:
        group, mats = parse_representation(fh.read())
    if system is None:
        from .systems import Q

        system = Q(mats[0].shape[0])
    return Representation(group, system, tuple(mats))
