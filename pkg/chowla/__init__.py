"""chowla: sieves, sign-pattern densities and random-graph experiments for λ and μ."""

__version__ = "0.1.0"
