# Higher-order maps from ordinary channels: bend wires with cups & caps,
# read a channel as a two-slot process matrix, and plug channels into it.

import numpy as np

from proctheory.higher_order import (
    apply_process_matrix, bend, circuit_form_channel, ordered_process_channel,
    realize_process_matrix,
)
from proctheory.processes import (
    compose_par, compose_seq, cup, identity, is_causal, random_cptp, swap,
)
from proctheory.systems import Q

rng = np.random.default_rng(4)
ROLES_IN = ("past", "a-out", "b-out")
ROLES_OUT = ("a-in", "b-in", "future")

# -- bending is exact -------------------------------------------------------------

print("bending both legs of the identity gives the cup:",
      np.allclose(bend(identity(Q(2)), "in", 0).choi, cup(Q(2)).choi))

f = random_cptp(rng, Q(2) * Q(3), Q(2))
restored = bend(bend(f, "in", 1), "out", 1)
print("bend twice restores the process:                ", np.allclose(restored.choi, f.choi))

# -- the causally ordered process matrix -------------------------------------------

w_ordered = realize_process_matrix(ordered_process_channel(Q(2), Q(2), Q(2)), ROLES_IN, ROLES_OUT)
a = random_cptp(rng, Q(2), Q(2))
b = random_cptp(rng, Q(2), Q(2))
print("ordered W composes its arguments:               ",
      np.allclose(apply_process_matrix(w_ordered, a, b).choi, compose_seq(b, a).choi))
print("W(id, id) = id:                                 ",
      np.allclose(apply_process_matrix(w_ordered, identity(Q(2)), identity(Q(2))).choi,
                  identity(Q(2)).choi))

# -- general circuit-shaped process matrices with memory ----------------------------

g1 = random_cptp(rng, Q(2), Q(2) * Q(2))        # past -> slot A in (x) memory
g2 = random_cptp(rng, Q(2) * Q(2), Q(2) * Q(2))  # slot A out (x) memory -> slot B in (x) memory
g3 = random_cptp(rng, Q(2) * Q(2), Q(2))        # slot B out (x) memory -> future
w_channel = circuit_form_channel(g1, g2, g3)
print("the swap-plugged channel is CPTP:               ", is_causal(w_channel))

w = realize_process_matrix(w_channel, ROLES_IN, ROLES_OUT)
got = apply_process_matrix(w, a, b)
oracle = compose_seq(
    g3,
    compose_seq(compose_par(b, identity(Q(2))),
                compose_seq(g2, compose_seq(compose_par(a, identity(Q(2))), g1))),
)
print("application equals the circuit oracle:          ", np.allclose(got.choi, oracle.choi))
print("the induced map is again a channel:             ", is_causal(got))

# plugging swaps back into W recovers the channel we started from, exactly
sw = swap(Q(2), Q(2))
roundtrip = apply_process_matrix(w, sw, sw)
print("swap round trip is exact:                       ",
      float(np.max(np.abs(roundtrip.choi - w_channel.choi))))
