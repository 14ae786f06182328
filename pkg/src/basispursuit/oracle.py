"""Entry oracle: the only door between an algorithm and the hidden matrix."""
from __future__ import annotations

import numpy as np

from .linalg import as_matrix


class EntryOracle:
    """Answer entry, column and row queries about a hidden matrix, logging each one.

    ``inspected`` is the set of positions revealed through the counted
    channel.  Spot checks (rank-mismatch verification) go through a
    separate channel so they never inflate the sampling accounting.
    """

    def __init__(self, hidden):
        self._hidden = as_matrix(hidden).copy()
        self._hidden.flags.writeable = False
        self.shape = self._hidden.shape
        self.inspected = np.zeros(self.shape, dtype=bool)
        self.spot_checked = np.zeros(self.shape, dtype=bool)
        self.entry_reads = 0
        self.column_queries = 0
        self.row_queries = 0

    @property
    def m(self) -> int:
        return self.shape[0]

    @property
    def n(self) -> int:
        return self.shape[1]

    def query(self, i: int, j: int) -> float:
        self.inspected[i, j] = True
        self.entry_reads += 1
        return float(self._hidden[i, j])

    def column(self, j: int) -> np.ndarray:
        self.inspected[:, j] = True
        self.entry_reads += self.m
        self.column_queries += 1
        return self._hidden[:, j].copy()

    def row(self, i: int) -> np.ndarray:
        self.inspected[i, :] = True
        self.entry_reads += self.n
        self.row_queries += 1
        return self._hidden[i, :].copy()

    def spot_check_row(self, i: int) -> np.ndarray:
        self.spot_checked[i, :] = True
        return self._hidden[i, :].copy()

    @property
    def inspected_count(self) -> int:
        return int(self.inspected.sum())

    def inspected_entries(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in zip(*np.nonzero(self.inspected))}
