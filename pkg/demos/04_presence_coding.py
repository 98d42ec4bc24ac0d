"""Walkthrough: discourse-presence coding and aggregation.

Records are coded against a closed 14-indicator vocabulary (six social,
eight cognitive), each code primary (1.0) or secondary (0.5). Category
scores sum the two indicators of a category; SP_total and CP_total sum
their categories. Inter-coder agreement is binary-presence Cohen's kappa.
"""

from facihub.presence import (CodedUnit, aggregate_indices, cohens_kappa,
                              learner_level_means, score_record)

# One record coded with three units.
units = [
    CodedUnit(record_id="rec1", indicator="OC1", salience="primary"),
    CodedUnit(record_id="rec1", indicator="OC2", salience="secondary"),
    CodedUnit(record_id="rec1", indicator="RC2", salience="primary"),
]
values = score_record(units)
print("nonzero indicator values:",
      {k: v for k, v in values.items() if v > 0})

vector = aggregate_indices(values)
print(f"SP_OC={vector.SP_OC}  SP_total={vector.SP_total}  "
      f"CP_RC={vector.CP_RC}  CP_total={vector.CP_total}")

# Learner-level means tame unequal participation before any inference.
rows = [
    ("u1", "with_pca", aggregate_indices({"OC1": 1.0})),
    ("u1", "with_pca", aggregate_indices({})),
    ("u1", "without_pca", aggregate_indices({"OC1": 0.5})),
]
means = learner_level_means(rows)
print("\nu1 with-condition mean SP_OC:", means[("u1", "with_pca")].SP_OC)

# Agreement between two coders on OC1, binary presence per record.
coder_a = {"r1": ["OC1"], "r2": [], "r3": ["OC1"], "r4": []}
coder_b = {"r1": ["OC1"], "r2": [], "r3": [], "r4": ["OC1"]}
result = cohens_kappa(coder_a, coder_b, "OC1")
print(f"\nkappa={result.value:.3f} (p_o={result.p_observed:.2f}, "
      f"p_e={result.p_expected:.2f}, n={result.n_records})")
