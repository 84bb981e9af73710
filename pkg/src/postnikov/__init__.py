"""Postnikov towers, k-invariants and parametrized Eilenberg-MacLane spaces for finite simplicial sets."""
