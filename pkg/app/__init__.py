"""Main Package

BV relaxed area toolkit: geometry, scenes, Plateau certificates, relaxed
area assembly, recovery sequences and the `bv-relax` command line.
"""
