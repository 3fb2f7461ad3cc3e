"""Shared test helpers: independent oracles kept free of the code under test."""

from __future__ import annotations

import pytest


def plaintext_relation(privacy_values: list[tuple[int, ...]], index: int) -> str:
    """Ordering chain for one digit index, computed by plain sorting.

    Independent of the protocol path: sorts participant indices by their
    actual plaintext digit (ties broken by participant index) and joins them
    with '<' where the digit strictly increases, '=' otherwise.
    """
    order = sorted(range(len(privacy_values)), key=lambda i: (privacy_values[i][index], i))
    parts = [str(order[0])]
    for prev, cur in zip(order, order[1:]):
        symbol = "<" if privacy_values[cur][index] > privacy_values[prev][index] else "="
        parts.append(symbol)
        parts.append(str(cur))
    return "".join(parts)


@pytest.fixture
def worked_example_inputs():
    """The worked three-party example: d=9, two digits, pinned masks and collapse."""
    return {
        "d": 9,
        "k": 3,
        "m": 2,
        "privacies": [(1, 4), (2, 2), (2, 3)],
        "masks": [(4, 6), (2, 5), (6, 1)],
        "collapse": [0, 1],
    }
