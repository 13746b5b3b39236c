from hypothesis import settings

# Deterministic suite: no example database, fixed derivation of examples.
settings.register_profile("det", derandomize=True, database=None, max_examples=60)
settings.load_profile("det")
