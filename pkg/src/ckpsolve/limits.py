"""Resource caps that convert silent blow-ups into typed errors."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Limits:
    """Hard caps for desk-scale runs.

    max_table_cells: total dynamic-programming cells allowed per solve.
    max_oracle_users: brute-force subset oracle refuses instances above this n.
    max_oracle_products: brute-force option-product oracle cap.
    max_heavy_sets: cap on (subset, partial selection) pairs in the PTAS.
    max_range_guesses: cap on enumerated guess tuples in a fixed range.
    max_bid_options: declared options allowed per bid.
    """

    max_table_cells: int = 10**8
    max_oracle_users: int = 20
    max_oracle_products: int = 10**6
    max_heavy_sets: int = 10**6
    max_range_guesses: int = 10**7
    max_bid_options: int = 64


DEFAULT_LIMITS = Limits()
