"""
Analyst Module - Command-line front end

This module contains tools to:
- Analyze a state against the criteria battery
- Check complete positivity of a map
- Run a single positive-map witness
- Generate reference states as documents
"""
