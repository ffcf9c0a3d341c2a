import functools

import crystalband as cb


@functools.lru_cache(maxsize=None)
def spec(name):
    """Builtins are immutable; share one instance per test session."""
    return cb.builtin(name)


@functools.lru_cache(maxsize=None)
def bands(name, N):
    return cb.sample_bands(spec(name), N)
