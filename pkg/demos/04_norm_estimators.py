"""Norm estimators across the Lebesgue, oscillation and Hardy scales.

Evaluates the whole table on two exemplars: a mean-zero wavelet atom (a
genuine Hardy-space element) and a truncated logarithm (the standard
unbounded oscillation exemplar).
"""

from torwave import build_basis, norm_report, synthesize
from torwave.samples import derive_rng, random_psi_atom, truncated_log

basis = build_basis("daubechies", 4)
rng = derive_rng(11)

atom_tree, R = random_psi_atom(rng, 1, 2, 9, level_high=5)
atom = synthesize(atom_tree, basis)
blog = truncated_log(1, 512, (1.0 / 3.0,))
blog = blog - blog.mean()

SPACES = ["Lp:1", "Lp:2", "weakLp:1", "Llog", "BMO", "BMOplus", "bmo", "BMOlog",
          "H1_square", "H1_maximal", "h1", "Hlog"]

for name, f in [("wavelet atom on " + R.key(), atom),
                ("truncated logarithm", blog)]:
    print(f"== {name} ==")
    for space in SPACES:
        rep = norm_report(f, space, basis, 2)
        print(f"  {space:12s} {rep.value:12.6f}   [{rep.method}]")
    print()

print("orderings visible above: BMO <= BMO+ <= bmo, h1 <= H1_maximal,")
print("and the atom's H1_square stays below 1 by the coefficient budget.")
