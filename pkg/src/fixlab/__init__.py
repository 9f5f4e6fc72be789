"""fixlab: exact computation in finite direct products of Klein-bottle
groups, free abelian groups, and order-two factors.

The package provides normal-form arithmetic (`groupcore`), an exact
integer lattice kernel (`intlat`), finitely generated subgroups with
canonical data (`subgroup`), endomorphisms and their fixed subgroups
(`morphism`), and classification plus compression/inertia certificate
searches (`certify`).  The `fixlab` console script exposes all of it.
"""

__version__ = "0.1.0"
