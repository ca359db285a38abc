"""Shared test configuration.

Hypothesis runs with a bounded example budget and no deadline: the
quadrature-backed properties have per-call latencies far above the
default deadline, and the suite must stay deterministic in CI.
"""

from hypothesis import settings

settings.register_profile("suite", max_examples=50, deadline=None,
                          derandomize=True)
settings.load_profile("suite")
