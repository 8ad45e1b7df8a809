"""Rigidity of convex braced polygons: analysis, certificates, constructions and census."""
__version__ = "0.1.0"
