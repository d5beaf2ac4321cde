"""The path-system engine on a hand-sized query, with the LP spelled out.

A six-node observed graph asks: can two vertex-disjoint paths run from
the allowed sources {y1, y2} onto the sinks, with the path into z
confined to a restricted edge set?  The instance is small enough to
print the whole linear program and still see what the solver does.
"""

from semilatent import has_path_system, has_trek_system, build_flow_graph, build_lp, solve_ilp
from semilatent.fixtures import fig7_instance

inst = fig7_instance()
G = inst["graph"]
print("edges:", " ".join(f"{a}->{b}" for a, b in G.edges))
print("restricted:", " ".join(f"{a}->{b}" for a, b in sorted(inst["d1_edges"])))
print(f"sinks: z={inst['z']} (restricted), p={inst['p']} (free); "
      f"sources ya={inst['ya']}")

fg = build_flow_graph(G, inst["d1_edges"], inst["z"], inst["p"], inst["ya"])
prog = build_lp(fg)
print("\nthe integer program, in LP format:")
print(prog.lp_text())

sol = solve_ilp(prog)
print(f"optimum {sol.objective} ({'integral' if sol.integral else 'fractional'}), "
      f"{sol.nodes_explored} branch-and-bound nodes, {sol.lp_pivots} pivots")

res = has_path_system(G, inst["d1_edges"], inst["z"], inst["p"], inst["ya"])
print(f"\npath system found via stage '{res.method}':")
for path in res.paths:
    print("  " + " -> ".join(path))

# The same engine answers trek queries through the doubled graph: left
# parts walk edges backwards, right parts forwards, and sided
# disjointness becomes plain vertex disjointness.
treks = has_trek_system(G, z=(), p=("z", "p"), ya=("y1", "y2"))
print(f"\ntrek system onto {{z, p}} (free right parts): {treks.found}")
for trek in treks.system.treks:
    print(f"  top {trek.top}: left {' -> '.join(trek.left)}  "
          f"right {' -> '.join(trek.right)}")
