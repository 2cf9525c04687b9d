"""nous: a single-node dynamic knowledge-graph engine.

Fuses a curated triple base with a stream of noisy extracted triples,
scores every incoming fact, mines trending closed subgraph patterns over a
sliding window, and answers entity / trending / relationship-explanation
queries over CLI and HTTP.
"""

__version__ = "0.1.0"
