"""p-adic measures as power series, tested on the q-expansion of a newform.

The q-model measure of f has Amice transform sum_n a(n) (1 + T)^n, so its
moments are sum_n a(n) n^m.  Twisting by a locally constant function acts on
the coefficients, and p-depletion makes the measure live on Z_p^x.
"""
# %%
from anticyc.heckechar import DirichletCharacter, dirichlet_characters
from anticyc.padic_measure import (LocallyConstantFn, PCoeffRing, act, act_precision_plan, is_unit_supported,
                                   moment, q_model_measure)
from anticyc.qexp import load_level11, p_deplete, twist

f = load_level11(120).base
print("level 11 newform:", [int(f[n]) for n in range(1, 16)])

# %% Moments against Z_3: sum a(n) n^m modulo 3^8
ring = PCoeffRing(3, 8, 2)
mu = q_model_measure(f, ring, "+")
for m in range(4):
    direct = sum(int(f[n]) * n**m for n in range(1, f.truncation + 1)) % ring.mod
    print("moment %d: %s (direct %d)" % (m, int(moment(mu, m)[0]) % ring.mod, direct))

# %% Twisting the measure by a character mod 9 is twisting the form
Ds = act_precision_plan(ring, 30, 8, 2)
geo = q_model_measure(f, ring, "geometric", Ds)
for chi in dirichlet_characters(9):
    refl = DirichletCharacter(9, {(-a) % 9: t for a, t in chi.turns.items()})
    same = act(LocallyConstantFn.from_character(ring, chi), geo).equals(
        q_model_measure(twist(f, refl), ring, "geometric", Ds))
    print("character of order %d: twist identity holds: %s" % (chi.order, same))

# %% Depletion removes the mass on 3 Z_3
print("f supported on units:", is_unit_supported(q_model_measure(f, ring, "+")))
print("f^(3) supported on units:", is_unit_supported(q_model_measure(p_deplete(f, 3), ring, "+")))
