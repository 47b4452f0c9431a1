"""Performance limits of dual-hop relay links with transceiver hardware impairments.

Exact and asymptotic outage probabilities, ergodic-capacity bounds, SNDR and
capacity ceilings, and hardware design rules for amplify-and-forward and
decode-and-forward relaying over Nakagami-m fading, cross-validated against
quadrature and Monte-Carlo oracles. Served over HTTP (FastAPI) with a thin
command-line client.
"""

__version__ = "0.1.0"
