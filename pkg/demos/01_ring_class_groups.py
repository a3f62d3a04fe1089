"""Ring class groups of imaginary quadratic orders and their characters.

Run with ``python demos/01_ring_class_groups.py``.
"""
# %% The class group of Q(sqrt -23) as reduced binary quadratic forms
from anticyc.heckechar import characters_of
from anticyc.quadfield import ImagQuadField, class_number_formula, enumerate_class_group, split_prime

F = ImagQuadField(-23)
G = enumerate_class_group(F.order(1))
print("Cl(-23):", G.size, "classes, forms", G.representatives)

# %% Orders of conductor c p^n grow by the index formula
F = ImagQuadField(-7)
for n in range(3):
    order = F.order(11**n)
    size = enumerate_class_group(order).size
    print("conductor 11^%d: enumerated %4d, formula %4d" % (n, size, class_number_formula(F, 1, 11, n)))

# %% 11 splits in Q(sqrt -7); h = 1, so both primes above it reduce to the principal form
pbar, p = split_prime(F, 11)
print("primes above 11:", pbar, p)

# %% Characters of Cl(Z + 11 O): values on the classes are roots of unity
G = enumerate_class_group(F.order(11))
for chi in characters_of(G):
    print("order %2d  conductor %2d  turns %s" % (chi.order, chi.conductor, [str(t) for t in chi.turns]))
