import hypothesis

hypothesis.settings.register_profile(
    "deterministic",
    hypothesis.settings(
        deadline=None,
        derandomize=True,
        max_examples=25,
        suppress_health_check=[hypothesis.HealthCheck.too_slow],
    ),
)
hypothesis.settings.load_profile("deterministic")
