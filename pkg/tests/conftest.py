"""Shared test configuration: a deterministic, time-bounded hypothesis
profile so the whole suite stays reproducible and fast."""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")
