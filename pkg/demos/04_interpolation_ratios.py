"""Both sides of the interpolation formula for several characters.

The left side squares the period sum, the right side is a product of
explicit constants and a smoothed numerical central L-value (not rigorous).
Periods do not appear on either side, so only the ratio's constancy across
characters of one conductor is meaningful.  Takes about half a minute.
"""
# %%
from anticyc.heckechar import DirichletCharacter, build_lambda, characters_of
from anticyc.lvalues import main_interpolation_report, ratio_spread
from anticyc.qexp import load_level11
from anticyc.quadfield import ImagQuadField, enumerate_class_group

eig = load_level11()
F = ImagQuadField(-7)
lam = build_lambda(F, 2, DirichletCharacter.trivial(1))
chars = [x for x in characters_of(enumerate_class_group(F.order(11))) if x.conductor == 11][:3]

# %%
reports = []
for xi in chars:
    r = main_interpolation_report(eig, lam, xi, 0, 11)
    reports.append(r)
    print("turns %-8s |ratio| %.12e  L-value %s (%s)" % ([str(t) for t in xi.turns], float(r.abs_ratio),
                                                      complex(r.L_value.value), r.flags["L_value"]))

# %% The modulus agrees; the raw complex ratio rotates with the Gauss sum of the p-part
print("spread of |ratio|      :", ratio_spread([r.abs_ratio for r in reports]))
print("spread of raw ratio    :", ratio_spread([r.ratio for r in reports]))
print("spread after phase fix :", ratio_spread([r.gauss_normalized_ratio for r in reports]))
