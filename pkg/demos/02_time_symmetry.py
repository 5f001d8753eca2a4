# Time symmetry: daggers, bent wires, and what causality forbids.
#
# The physical theory of channels has many states but a single effect, so it
# cannot be time-symmetric. Dropping trace preservation restores the
# symmetry: the Hermitian adjoint reflects diagrams, and cups & caps bend
# wires so inputs and outputs lose their distinction.

import numpy as np

from proctheory.processes import (
    as_scalar, cap, channel_from_unitary, compose_par, compose_seq, cup,
    dagger_h, discard, identity, is_causal, max_mixed, noise_state,
    preserves_identity, random_cptp, random_unitary, state,
)
from proctheory.systems import C, Q

rng = np.random.default_rng(1)

# -- the asymmetry of the causal theory --------------------------------------

zero, one = state(np.diag([1.0, 0.0]), Q(2)), state(np.diag([0.0, 1.0]), Q(2))
print("two distinct states:      ", np.max(np.abs(zero.choi - one.choi)))
# ... but discarding is the only effect: every channel preserves it
e = random_cptp(rng, Q(3), Q(2))
print("discard . E == discard:   ", np.allclose(compose_seq(discard(Q(2)), e).choi, discard(Q(3)).choi))

# -- the time reverse is a theory of eternal noise ----------------------------

r = dagger_h(e)
print("reversed channel feeds noise to noise:", preserves_identity(r))
print("dagger of discarding:     ", np.allclose(dagger_h(discard(Q(2))).choi, noise_state(Q(2)).choi))

# the Hermitian adjoint inverts reversible dynamics and is involutive
u = random_unitary(rng, 2)
print("dagger inverts unitaries: ",
      np.allclose(dagger_h(channel_from_unitary(u, Q(2))).choi,
                  channel_from_unitary(u.conj().T, Q(2)).choi))
print("dagger is involutive:     ", np.allclose(dagger_h(dagger_h(e)).choi, e.choi))

# -- cups & caps: bent wires satisfying the snake equations -------------------

s = Q(3)
snake = compose_seq(compose_par(cap(s), identity(s)), compose_par(identity(s), cup(s)))
print("snake equals identity:    ", np.allclose(snake.choi, identity(s).choi))

# closed loops: a classical loop closes to the set size, a quantum wire is a
# doubled (ket and bra) wire, so its loop carries the squared dimension
print("classical loop C(3):      ", as_scalar(compose_seq(cap(C(3)), cup(C(3)))).value)
print("quantum loop Q(3):        ", as_scalar(compose_seq(cap(Q(3)), cup(Q(3)))).value)

# -- a causal theory cannot keep cups & caps ----------------------------------

# force the cup to the only state a causal time-neutral theory could use
forced_cup = compose_par(noise_state(Q(2)), noise_state(Q(2).dual()))
forced_cap = dagger_h(forced_cup)
collapsed = compose_seq(compose_par(forced_cap, identity(Q(2))), compose_par(identity(Q(2)), forced_cup))
print("forced snake residual d=2:", np.max(np.abs(collapsed.choi - identity(Q(2)).choi)))

# -- the unital subtheory is time-symmetric -----------------------------------

from proctheory.theories import QPHYS_UNITAL, dagger_unital, membership

f = compose_seq(channel_from_unitary(u, Q(2)), channel_from_unitary(random_unitary(rng, 2), Q(2)))
print("unital membership:        ", membership(QPHYS_UNITAL, f).ok)
print("rescaled dagger involutes:", np.allclose(dagger_unital(dagger_unital(f)).choi, f.choi))
print("dagger of discard:        ", np.allclose(dagger_unital(discard(Q(2))).choi, max_mixed(Q(2)).choi))
print("channels stay causal:     ", is_causal(dagger_unital(f)), preserves_identity(dagger_unital(f)))
