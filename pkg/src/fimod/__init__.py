"""Homological invariants of finitely generated FI-modules over exact fields."""
