"""A desk-sized random-graph survey.

Smaller than the shipped defaults (8 observed, 4 latent, 50 graphs per
density) so it finishes in seconds; the printed table has the same
columns the CSV writer emits.  Certified counts fall as density rises,
raising the latent-cut budget k never loses a graph, and even at this
scale a few graphs part ways with their canonical forms.
"""

from semilatent import ExperimentConfig, run_experiment

cfg = ExperimentConfig(
    n_observed=8,
    n_latent=4,
    edge_probs=(0.25, 0.4),
    graphs_per_prob=50,
    k_bounds=(1, 2),
    seed=1,
)
result = run_experiment(cfg)
print(result.to_csv())

for p in cfg.edge_probs:
    a = result.cells[(p, 1)].n_lsc
    b = result.cells[(p, 2)].n_lsc
    mark = "" if a == b else f"  (k=2 adds {b - a})"
    print(f"p={p}: {a}/50 at k=1, {b}/50 at k=2{mark}")
print(f"canonical-form divergences: "
      f"{sum(c.n_g_not_can for (_, k), c in result.cells.items() if k == 2)} lost, "
      f"{sum(c.n_can_not_g for (_, k), c in result.cells.items() if k == 2)} gained")
