"""Leader election in anonymous port-labeled networks.

Library layout:

* `graph` — the port-labeled graph model, validation, PLG serialization.
* `views` — truncated degree-augmented views, canonical encodings, and
  view-equivalence partitions by iterated refinement.
* `sim` — synchronous full-information round executor.
* `tasks` — the four election tasks, output validation, election indexes.
* `family_g`, `family_u`, `family_j` — the three structured graph families
  with their generators, per-instance structural checks, and (for the last
  two) the k-round map-based election algorithms.
* `advice` — advice schemes, pigeonhole budgets, fooling-pair demos.
* `smallgraphs` — exhaustive/random small instances for cross-validation.
* `report` — CSV + figure summaries; `cli` — the command-line front end.
"""

__version__ = "0.1.0"
