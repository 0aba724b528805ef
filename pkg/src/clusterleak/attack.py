"""End-to-end reconstruction attack on a disclosure trace.

Ties the pieces together: candidate trajectory matrix from the trace,
exact RREF of the augmented system, then the single-nonzero leakage
certificate with the recovered values.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator

from .rref import leakage_rows, rref_augmented
from .simulation import DisclosureTrace
from .trajectory import build_record, truncate_trace
from .validation import check_random_state


class TrajectoryReconstructor(BaseEstimator):
    """Recover exact inputs from a sequence of disclosed cluster sums.

    ``fit`` takes a :class:`DisclosureTrace` (or a plain sequence of
    k x d integer sum matrices) and leaves the reconstruction state in
    fitted attributes: ``record_`` (candidate trajectory matrix),
    ``rref_`` (reduced augmented system), ``certificate_`` and
    ``recovered_`` (list of (trajectory column, exact value vector)).

    Parameters
    ----------
    coord : coordinate whose sign changes drive the gain/loss sets.
    truncate_last : if set, attack only the final ``truncate_last``
        disclosed iterations.
    random_state : seed for the random completion of template blocks.
    """

    def __init__(self, coord=0, truncate_last=None, random_state=None):
        self.coord = coord
        self.truncate_last = truncate_last
        self.random_state = random_state

    def fit(self, trace, y=None):
        if not isinstance(trace, DisclosureTrace):
            trace = DisclosureTrace.from_sums(trace)
        if self.truncate_last is not None:
            trace = truncate_trace(trace, self.truncate_last)
        rng = check_random_state(self.random_state)
        self.trace_ = trace
        self.record_ = build_record(trace, rng, coord=self.coord)
        self.rref_ = rref_augmented(self.record_.w_star, trace.stacked())
        self.certificate_ = leakage_rows(self.rref_)
        self.n_trajectories_ = self.record_.n_star
        self.recovered_ = list(self.certificate_.determined)
        return self

    def fit_recover(self, trace):
        """Fit and return the recovered (column, value vector) pairs."""
        return self.fit(trace).recovered_
