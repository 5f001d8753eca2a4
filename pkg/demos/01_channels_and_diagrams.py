# Channels as Choi operators, and wiring them into diagrams.
#
# A process from one system to another is stored as its Choi operator; the
# Born rule is nothing but sequential composition of a state with a
# measurement channel, and diagram evaluation is tensor contraction.

import numpy as np

from proctheory import diagram as pd
from proctheory.processes import (
    apply, as_scalar, compose_par, compose_seq, discard, identity,
    measurement_channel, state, swap,
)
from proctheory.systems import C, Q

# -- a qubit state and a computational-basis measurement ---------------------

rho = state(np.diag([0.75, 0.25]), Q(2))
povm = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
meas = measurement_channel(povm, Q(2), C(2))

distribution = compose_seq(meas, rho)           # a classical state on C(2)
print("outcome distribution:", np.diag(distribution.choi).real)

# the same number the long way: p(a) = tr(M_a rho)
print("born rule oracle:    ", [float(np.trace(m @ np.diag([0.75, 0.25])).real) for m in povm])

# -- discarding is the unique effect -----------------------------------------

print("trace of the state:  ", as_scalar(compose_seq(discard(Q(2)), rho)).value)

# -- wires cross, identities do nothing --------------------------------------

sigma = np.kron(np.diag([0.3, 0.7]), np.diag([0.5, 0.5]))
crossed = apply(swap(Q(2), Q(2)), sigma)
print("swap moves factors:  ", np.allclose(crossed, np.kron(np.diag([0.5, 0.5]), np.diag([0.3, 0.7]))))
print("identity acts as id: ", np.allclose(apply(identity(Q(2)), np.diag([0.3, 0.7])), np.diag([0.3, 0.7])))

# -- the same computation as a wiring diagram --------------------------------

source = """
system q = Q(2)
system c = C(2)
box rho : -> q = choi [0.75, 0, 0, 0.25]
box m : q -> c = choi [1, 0, 0, 0,  0, 0, 0, 0,  0, 0, 0, 0,  0, 0, 0, 1]
diagram Born {
    node s : rho
    node meas : m
    wire s.out[0] -> meas.in[0]
    wire meas.out[0] -> bound.out[0]
}
"""
parsed = pd.parse(source, "born.pd")
env = pd.build_env(parsed)
born = parsed.diagrams["Born"]
print("typecheck violations:", pd.typecheck(born, compact=False))
print("diagram result:      ", np.diag(pd.evaluate(born, env).choi).real)

# evaluation only sees connectivity: any contraction order gives the same answer
rng = np.random.default_rng(0)
alt = pd.evaluate(born, env, contraction=pd.random_plan(born, rng))
print("order invariant:     ", np.allclose(alt.choi, pd.evaluate(born, env).choi))

# parallel composition is juxtaposition
pair = compose_par(rho, rho)
print("product state trace: ", np.trace(pair.choi).real)
