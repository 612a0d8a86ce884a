"""A small timing grid of the two backends on random networks.

Each cell builds one Erdos-Renyi network, stimulates three input neurons
every ten steps, and times only the simulation loop.
"""

import io

from spikeforge.bench import format_table, run_bench
from spikeforge.formats import write_bench

rows = run_bench(sizes=(100, 500), probs=(0.25, 1.0), steps=500, backends=("mat", "abm"))
print(format_table(rows))

buf = io.StringIO()
write_bench(rows, buf)
print()
print(buf.getvalue())
