"""
Posmap - positive elementary operators and entanglement detection

This package contains:
- Signed Kraus maps, Choi matrices and complete-positivity checks
- Positivity falsification and contraction checks on Kraus coefficients
- Bipartite states with PPT, realignment and positive-map witness criteria
- Kraus-form quantum channels
- JSON documents for states, maps and channels
"""
