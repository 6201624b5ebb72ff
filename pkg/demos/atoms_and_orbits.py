"""
Atoms, joint slice probabilities and orbits
===========================================

A few vectors x_1..x_t cut the coordinates into atoms.  Whether x and x + v
both land in the slice depends only on how many coordinates x takes from
each atom, so everything here is a count of binomial coefficients.
"""
from slicelab import (
    AtomAlgebra,
    all_in_slice_probability,
    joint_slice_probability,
    orbit_enumerate,
    orbit_size,
)

alg = AtomAlgebra.from_strings("11110000", "00111100")
print("atoms:", [f"{a:08b}"[::-1] for a in alg.nonempty_atoms()])
print("span:", [f"{v:08b}"[::-1] for v in alg.span()])

# Pr[|x| = 4 and |x + x_1| = 4]
print(joint_slice_probability(alg, {0: 4, alg.generators[0]: 4}))

rep = all_in_slice_probability(alg)
print("all of x + span in the slice:", rep.probability, "ratio to n^-2:", rep.ratio)

# orbits under permutations that fix every atom
for s in (0b00000001, 0b00000011, 0b00001111):
    print(f"{s:08b}"[::-1], orbit_size(s, alg), len(orbit_enumerate(s, alg)))
