"""
Posmap - Positive maps and entanglement detection

Elementary-operator maps with Choi and positivity checks, separability
criteria (PPT, realignment, positive-map witnesses) and Kraus channels.
"""
