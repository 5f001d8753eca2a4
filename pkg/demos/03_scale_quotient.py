# Making the calculational theory operational: renormalised composition,
# the scale quotient, and determinism from noise.
#
# Arbitrary CP maps give "probabilities" above one. Two equivalent fixes:
# renormalise every sequential composition by the weight functional N
# (bullet composition, restricted to representative elements), or quotient
# the whole theory by positive scalars. Restricting to noisy processes
# removes the zero process too, so every closed diagram means something.

import numpy as np

from proctheory.processes import (
    as_scalar, cap, compose_par, compose_seq, cup, effect, identity,
    is_zero, measurement_channel, random_cp, random_cptp, random_density, state,
)
from proctheory.systems import C, Q
from proctheory.theories import (
    QCALC_BULLET, QNEUT, bullet_compose, canonical_rep, class_equal,
    membership, noisy, normalization_scalar, quotient_compose,
)

rng = np.random.default_rng(2)

# -- the weight functional N ---------------------------------------------------

rho = state(np.diag([0.75, 0.25]), Q(2))
halved = measurement_channel([np.diag([0.5, 0.0]), np.diag([0.0, 0.5])], Q(2), C(2))
print("N of a deficient measurement outcome:", normalization_scalar(compose_seq(halved, rho)).value)
print("N of the identity:                   ", normalization_scalar(identity(Q(5))).value)
print("N of the cup:                        ", normalization_scalar(cup(Q(3))).value)

# -- bullet composition restores the distribution ------------------------------

renorm = bullet_compose(halved, rho)
print("renormalised distribution:           ", np.diag(renorm.choi).real)
print("is a representative element:         ", membership(QCALC_BULLET, renorm).ok)

# the zero branch: an impossible measurement of an orthogonal state
e = effect(np.diag([0.0, 1.0]), Q(2))
pure = state(np.diag([1.0, 0.0]), Q(2))
print("zero branch taken:                   ", is_zero(bullet_compose(e, pure)))

# -- the quotient by positive scalars ------------------------------------------

f = random_cp(rng, Q(2), Q(3))
seven_f = type(f)(f.input, f.output, 7.0 * f.choi)
print("scaling is invisible in the quotient:", class_equal(canonical_rep(f), canonical_rep(seven_f)))

g = random_cp(rng, Q(3), Q(2))
lhs = quotient_compose(canonical_rep(g), canonical_rep(f))
rhs = canonical_rep(compose_seq(g, f))
print("composition is well defined:         ", class_equal(lhs, rhs))

# the two formulations agree: bullet on representatives = canonical of plain
fhat, ghat = canonical_rep(f).canonical, canonical_rep(g).canonical
print("bullet matches the quotient:         ",
      np.allclose(bullet_compose(ghat, fhat).choi, rhs.canonical.choi))

# the scalars collapse to {zero, one}
loop_class = canonical_rep(compose_seq(cap(Q(4)), cup(Q(4))))
print("every nonzero scalar is the class 1: ", loop_class.canonical.choi.real.ravel())

# -- noise restores determinism -------------------------------------------------

noisy_state = noisy(pure, 0.1)
print("noisy pure state:                    ", np.diag(noisy_state.choi).real)
print("lives in the noisy interior:         ", membership(QNEUT, noisy_state).ok)

# closed diagrams of noisy generators can never hit zero
closed = compose_seq(noisy(e, 0.05), noisy_state)
print("noisy closed diagram value:          ", as_scalar(closed).value)
print("its class is the unique scalar:      ", canonical_rep(closed).canonical.choi.real.ravel())

# even with disconnected closed wiring composed in parallel
with_loop = compose_par(closed, compose_seq(cap(Q(2)), cup(Q(2))))
print("with a parallel loop, still positive:", as_scalar(with_loop).value > 0)
