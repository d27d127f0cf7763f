"""Lattice machinery: Z_q arithmetic, gadgets, trapdoors, Gaussians, evaluation, parameters."""
