"""
Non-classical polynomials from the Hamming weight
=================================================

|x| / 2^d takes values in (1/2^d)Z/Z and has degree exactly d, even though
it is built from a linear count.  Shifting a polynomial by j|x|/2^d can turn
slice bias into bias on the whole cube.
"""
from slicelab import (
    biased_rank_witness,
    classical_polynomial,
    correlation,
    degree,
    residue_decomposition_check,
    residue_spec,
    slice_spec,
    weight_polynomial,
)

for d in (1, 2, 3):
    p = weight_polynomial(8, 1, d)
    print(f"|x|/{2**d}: degree {degree(p)}")

print("2|x|/4 reduces to", weight_polynomial(8, 2, 2).q, "bit denominator")
print("residue identity holds:", residue_decomposition_check(12, 3))

# constant on the slice, spread out on the cube
P = weight_polynomial(8, 3, 2)
print("slice bias", correlation(p=P, domain=slice_spec(8)).magnitude)
print("cube bias", correlation(p=P).magnitude)
print("class bias", correlation(p=P, domain=residue_spec(8, 3)).magnitude)

w = biased_rank_witness(P, 8, 2, 0.5)
print("witness j =", w.j, "bias", w.residue_bias, "profile", [round(v, 4) for v in w.profile])

# a quadratic plus a weight term
Q = classical_polynomial(8, [0b11, 0b1100]) + weight_polynomial(8, 1, 2)
print("degree", degree(Q), "slice bias", correlation(p=Q, domain=slice_spec(8)).magnitude)
