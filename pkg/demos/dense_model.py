"""
How well a residue class models the middle slice
================================================

Both indicators are normalized to mean 1, so their difference has U_1 = 0.
The U_2 distance to D_{2n,2} (even weights) shrinks as the dimension grows.
"""
from slicelab import dense_model_distance, residue_spec, slice_spec

for m in (8, 12, 16, 20):
    est = dense_model_distance(m, 2, 2)
    print(f"2n={m:2d}  mu(U)={float(slice_spec(m).density()):.4f}  U2 distance {est.value:.5f}")

# finer residue classes track the slice in higher norms
print(residue_spec(12, 3).weights())
exact = dense_model_distance(12, 3, 3)
# single directions are heavily skewed here, so the normal interval runs narrow
mc = dense_model_distance(12, 3, 3, mode="mc", samples=2048, seed=1)
print(f"U3, k=3: exact {exact.value_pow:.6f}  mc {mc.value_pow:.6f} +- {mc.ci_radius:.6f}")
