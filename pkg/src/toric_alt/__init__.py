"""Root subgroups of toric automorphism groups: closure, unipotency and free-subgroup witnesses."""

__version__ = "0.1.0"
