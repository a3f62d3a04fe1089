"""Nearly holomorphic derivatives of a newform at CM points, and period sums.

delta_k^m f is evaluated from its exact nearly holomorphic q-expansion; its
values on lattices of an order in Q(sqrt -7) are homogeneous of weight k + 2m,
so character-weighted sums over class representatives do not depend on the
representatives chosen.
"""
# %%
import mpmath

from anticyc.heckechar import DirichletCharacter, build_lambda, characters_of
from anticyc.nearly_holo import (PeriodCharacter, class_representatives, delta_power, euler_depletion_check,
                                 evaluate, finite_difference_delta_power, period_sum, period_summands)
from anticyc.qexp import load_level11
from anticyc.quadfield import ImagQuadField, enumerate_class_group

eig = load_level11()
f = eig.base

# %% delta f against a finite-difference derivative
z = mpmath.mpc("0.1", "0.6")
print("delta f(z)   :", mpmath.nstr(evaluate(delta_power(f.truncate(400), 1), z, 30).value, 20))
print("finite diff. :", mpmath.nstr(finite_difference_delta_power(f.truncate(400), 1, z, digits=30), 20))

# %% Period sums over Cl(Z + 11 O) in Q(sqrt -7)
F = ImagQuadField(-7)
lam = build_lambda(F, 2, DirichletCharacter.trivial(1))
order = F.order(11)
reps = class_representatives(order)
xi = [x for x in characters_of(enumerate_class_group(order)) if x.conductor == 11][0]
for m in (0, 1):
    chi = PeriodCharacter(lam, xi, m)
    P = period_sum(f, m, chi, reps, digits=30)
    moved = sum(period_summands(f, m, chi, [a.scale(F.from_coords(3, 1)) for a in reps], digits=30))
    print("m = %d: period sum %s, after rescaling %s" % (m, mpmath.nstr(P, 15), mpmath.nstr(moved, 15)))

# %% Depleting at 11 multiplies the period by the Euler-type factor E(p)
R1 = F.order(1)
chi1 = PeriodCharacter(lam, characters_of(enumerate_class_group(R1))[0], 0)
chk = euler_depletion_check(eig, 0, chi1, class_representatives(R1), 11, digits=30)
print("E(p) =", mpmath.nstr(chk.factor, 12), " relative error", mpmath.nstr(chk.rel_err, 3))
