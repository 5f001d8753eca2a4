"""Wire bending and two-slot process matrices built from ordinary channels.

Bending moves a boundary factor to the other side of a process with its
orientation flipped, by composing with a cup or cap. Because the cup/cap
contraction pairs kets with kets and bras with bras, bending is exactly a
relabelling of the Choi tensor's boundary: the array is permuted, never
altered, so bending is involutive to machine precision.

A process matrix W maps a pair of channels (A, B) to a channel. Plugging
swaps into both slots of W yields an ordinary channel; conversely, any
CPTP channel of that shape can be read as a process matrix by retagging
its boundary legs as slot ports, which is how :func:`realize_process_matrix`
works. Plugging the swaps back in undoes the retagging, so the round trip
is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import DEFAULT_TOL, Tolerances
from .processes import ProcessTensor, is_causal
from .systems import SystemType

__all__ = [
    "SLOT_ROLES",
    "HigherOrderMap",
    "bend",
    "realize_process_matrix",
    "apply_process_matrix",
    "ordered_process_channel",
]

SLOT_ROLES = ("past", "a-out", "b-out", "a-in", "b-in", "future")
_INPUT_ROLES = ("past", "a-out", "b-out")
_OUTPUT_ROLES = ("a-in", "b-in", "future")


def bend(f: ProcessTensor, side, index, tol: Tolerances = DEFAULT_TOL):
    """Move boundary factor ``index`` on ``side`` ("in"/"out") to the end of
    the other side, orientation flipped.

    Implemented as composition with a cup (bending an input) or cap (bending
    an output); numerically this permutes the Choi tensor's axes and nothing
    else, so bending the resulting last factor back restores ``f`` exactly.
    """
    n_in, n_out = len(f.input.factors), len(f.output.factors)
    dims = list(f.input.dims) + list(f.output.dims)
    n = len(dims)
    t = f.choi.reshape(dims + dims)
    if side == "in":
        if not 0 <= index < n_in:
            raise IndexError(f"input port {index} out of range for {f}")
        pos = index
        new_in = f.input.factors[:index] + f.input.factors[index + 1 :]
        new_out = f.output.factors + (f.input.factors[index].dual(),)
        order = [i for i in range(n_in) if i != pos] + list(range(n_in, n)) + [pos]
    elif side == "out":
        if not 0 <= index < n_out:
            raise IndexError(f"output port {index} out of range for {f}")
        pos = n_in + index
        new_in = f.input.factors + (f.output.factors[index].dual(),)
        new_out = f.output.factors[:index] + f.output.factors[index + 1 :]
        order = list(range(n_in)) + [pos] + [i for i in range(n_in, n) if i != pos]
    else:
        raise ValueError(f"side must be 'in' or 'out', got {side!r}")
    perm = order + [i + n for i in order]
    t = t.transpose(perm)
    s_in, s_out = SystemType(new_in), SystemType(new_out)
    side_len = s_in.total_dim * s_out.total_dim
    return ProcessTensor(s_in, s_out, t.reshape(side_len, side_len), tol)


@dataclass(frozen=True)
class HigherOrderMap:
    """A two-slot process matrix: a process with slot-tagged boundary factors.

    ``input_roles`` assigns each input factor of the underlying process one
    of past/a-out/b-out (the W receives the global past and the slot
    outputs); ``output_roles`` assigns each output factor one of
    a-in/b-in/future (the W feeds the slot inputs and the global future).
    """

    underlying: ProcessTensor
    input_roles: tuple
    output_roles: tuple

    def __post_init__(self):
        if len(self.input_roles) != len(self.underlying.input.factors):
            raise ValueError("one input role per input factor required")
        if len(self.output_roles) != len(self.underlying.output.factors):
            raise ValueError("one output role per output factor required")
        for r in self.input_roles:
            if r not in _INPUT_ROLES:
                raise ValueError(f"invalid input role {r!r}; expected one of {_INPUT_ROLES}")
        for r in self.output_roles:
            if r not in _OUTPUT_ROLES:
                raise ValueError(f"invalid output role {r!r}; expected one of {_OUTPUT_ROLES}")

    def slot_system(self, role):
        if role in _INPUT_ROLES:
            facs = [f for f, r in zip(self.underlying.input.factors, self.input_roles) if r == role]
        else:
            facs = [f for f, r in zip(self.underlying.output.factors, self.output_roles) if r == role]
        return SystemType(tuple(facs))


def realize_process_matrix(w_channel: ProcessTensor, input_roles, output_roles,
                           tol: Tolerances = DEFAULT_TOL):
    """Read a CPTP channel as a process matrix by tagging its legs as slots.

    ``w_channel`` is the channel obtained from the process matrix by
    plugging swaps into both slots: its inputs carry the global past and the
    two slot outputs, its outputs the two slot inputs and the global future.
    Plugging swaps into the realized W recovers ``w_channel`` exactly.
    """
    if not is_causal(w_channel, tol):
        raise ValueError("process-matrix realization expects a trace-preserving channel")
    return HigherOrderMap(w_channel, tuple(input_roles), tuple(output_roles))


def _positions(roles, role):
    return [i for i, r in enumerate(roles) if r == role]


def apply_process_matrix(w: HigherOrderMap, a: ProcessTensor, b: ProcessTensor,
                         tol: Tolerances = DEFAULT_TOL):
    """Plug channels into the slots: contract W with choi(a) and choi(b).

    Each slot channel's leading input factors must match the slot's input
    wires and its leading output factors the slot's output wires; any further
    factors are ancilla legs that join the global boundary (so plugging
    ``swap(slot_in, slot_out)`` into both slots reproduces the underlying
    channel exactly). Inputs of the result are ordered past, then a's
    ancilla inputs, then b's; outputs are a's ancilla outputs, b's, future.

    The result is guaranteed CPTP when ``w`` came from a circuit-shaped
    channel; for exotic W inputs the contraction is still performed and the
    caller can test causality.
    """
    extras = {}
    for slot, ch in (("a", a), ("b", b)):
        s_in = w.slot_system(f"{slot}-in")
        s_out = w.slot_system(f"{slot}-out")
        k_in, k_out = len(s_in.factors), len(s_out.factors)
        if not SystemType(ch.input.factors[:k_in]).same_carrier(s_in):
            raise ValueError(f"slot {slot} expects input starting with {s_in}, got {ch.input}")
        if not SystemType(ch.output.factors[:k_out]).same_carrier(s_out):
            raise ValueError(f"slot {slot} expects output starting with {s_out}, got {ch.output}")
        extras[slot] = (ch.input.factors[k_in:], ch.output.factors[k_out:])

    u = w.underlying
    n_in = len(u.input.factors)
    n = n_in + len(u.output.factors)
    dims = list(u.input.dims) + list(u.output.dims)
    tw = u.choi.reshape(dims + dims)

    # W's kets get labels 0..n-1 and bras n..2n-1; ancilla legs get fresh labels.
    subs_w = list(range(2 * n))
    fresh = [2 * n]

    def channel_kets(ch, feed_positions, return_positions):
        kets = list(feed_positions)
        for _ in range(len(ch.input.factors) - len(feed_positions)):
            kets.append(fresh[0])
            fresh[0] += 1
        kets.extend(return_positions)
        for _ in range(len(ch.output.factors) - len(return_positions)):
            kets.append(fresh[0])
            fresh[0] += 1
        return kets

    a_in_pos = [n_in + i for i in _positions(w.output_roles, "a-in")]
    a_out_pos = _positions(w.input_roles, "a-out")
    b_in_pos = [n_in + i for i in _positions(w.output_roles, "b-in")]
    b_out_pos = _positions(w.input_roles, "b-out")

    kets_a = channel_kets(a, a_in_pos, a_out_pos)
    kets_b = channel_kets(b, b_in_pos, b_out_pos)
    shift = fresh[0]  # bras of W's wires are +n; ancilla bras are +shift
    bras_a = [l + n if l < 2 * n else l + shift for l in kets_a]
    bras_b = [l + n if l < 2 * n else l + shift for l in kets_b]

    dims_a = list(a.input.dims) + list(a.output.dims)
    dims_b = list(b.input.dims) + list(b.output.dims)
    ta = a.choi.reshape(dims_a + dims_a)
    tb = b.choi.reshape(dims_b + dims_b)

    past_pos = _positions(w.input_roles, "past")
    fut_pos = [n_in + i for i in _positions(w.output_roles, "future")]
    extra_in_a = [l for l in kets_a[: len(a.input.factors)] if l >= 2 * n]
    extra_in_b = [l for l in kets_b[: len(b.input.factors)] if l >= 2 * n]
    extra_out_a = [l for l in kets_a[len(a.input.factors) :] if l >= 2 * n]
    extra_out_b = [l for l in kets_b[len(b.input.factors) :] if l >= 2 * n]
    out_kets = past_pos + extra_in_a + extra_in_b + extra_out_a + extra_out_b + fut_pos
    out_bras = [l + n if l < 2 * n else l + shift for l in out_kets]

    res = np.einsum(tw, subs_w, ta, kets_a + bras_a, tb, kets_b + bras_b, out_kets + out_bras)
    s_in = w.slot_system("past") * SystemType(extras["a"][0]) * SystemType(extras["b"][0])
    s_out = SystemType(extras["a"][1]) * SystemType(extras["b"][1]) * w.slot_system("future")
    side = s_in.total_dim * s_out.total_dim
    return ProcessTensor(s_in, s_out, res.reshape(side, side), tol)


def ordered_process_channel(past: SystemType, mid: SystemType, late: SystemType,
                            tol: Tolerances = DEFAULT_TOL):
    """The swap-plugged channel of the causally ordered process matrix.

    Routing is by identity wires: past -> slot A input, slot A output ->
    slot B input, slot B output -> future. Realize it with roles
    (past, a-out, b-out) -> (a-in, b-in, future); applying channels then
    yields their ordered composite b . a.
    """
    from .processes import identity

    return identity(past * mid * late, tol)


def circuit_form_channel(g1: ProcessTensor, g2: ProcessTensor, g3: ProcessTensor,
                         tol: Tolerances = DEFAULT_TOL):
    """Swap-plugged channel of a general causally ordered circuit with memory.

    ``g1: P -> A_in (x) M1``, ``g2: A_out (x) M1 -> B_in (x) M2``,
    ``g3: B_out (x) M2 -> F``. Returns the channel
    ``(P, A_out, B_out) -> (A_in, B_in, F)`` obtained by plugging swaps into
    both slots; realize it with roles (past, a-out, b-out) ->
    (a-in, b-in, future). Applying channels (A, B) then equals the ordered
    composite g3 . (B (x) 1) . g2 . (A (x) 1) . g1.
    """
    from .processes import compose_par, compose_seq, identity, swap

    a_in = SystemType(g1.output.factors[:1])
    m1 = SystemType(g1.output.factors[1:])
    a_out = SystemType(g2.input.factors[:1])
    b_in = SystemType(g2.output.factors[:1])
    m2 = SystemType(g2.output.factors[1:])
    b_out = SystemType(g3.input.factors[:1])
    # (P, a_out, b_out) -> (A_in, M1, a_out, b_out)
    stage1 = compose_par(compose_par(g1, identity(a_out, tol), tol), identity(b_out, tol), tol)
    # -> (A_in, B_in, M2, b_out)
    g2_routed = compose_seq(g2, swap(m1, a_out, tol), tol)
    stage2 = compose_par(compose_par(identity(a_in, tol), g2_routed, tol), identity(b_out, tol), tol)
    # -> (A_in, B_in, F)
    g3_routed = compose_seq(g3, swap(m2, b_out, tol), tol)
    stage3 = compose_par(compose_par(identity(a_in, tol), identity(b_in, tol), tol), g3_routed, tol)
    return compose_seq(stage3, compose_seq(stage2, stage1, tol), tol)
