import numpy as np
import pytest

from triscore import (
    Dataset,
    ForecastObsPair,
    ForecastRecord,
    ObsCategory,
    brier_rule,
    custom_rule,
    make_ternary,
    rps_rule,
)

CATS = (ObsCategory.B, ObsCategory.N, ObsCategory.A)


def random_simplex(rng, n):
    """n random simplex points, uniformly (Dirichlet(1,1,1))."""
    return rng.dirichlet((1.0, 1.0, 1.0), size=n)


def random_pd_rules(rng, k, scale=1.0):
    """k random scoring rules with comfortably positive definite L'L."""
    rules = []
    while len(rules) < k:
        L = rng.uniform(-scale, scale, size=(3, 3))
        A = L.T @ L
        if np.linalg.eigvalsh(0.5 * (A + A.T)).min() > 1e-6:
            rules.append(custom_rule(L))
    return rules


def categorical_pairs(rng, n, sharpen=1.0):
    """Forecast-observation pairs with observations drawn from a
    forecast-dependent law (the forecast raised to ``sharpen``)."""
    forecasts = random_simplex(rng, n)
    law = forecasts**sharpen
    law /= law.sum(axis=1, keepdims=True)
    pairs = []
    for p, w in zip(forecasts, law):
        obs = CATS[rng.choice(3, p=w)]
        pairs.append(ForecastObsPair(make_ternary(*p), obs))
    return pairs


def simplex_grid(step_inv=100):
    """All simplex points with coordinates k/step_inv."""
    pts = []
    for i in range(step_inv + 1):
        for j in range(step_inv + 1 - i):
            pts.append(make_ternary(i / step_inv, j / step_inv, (step_inv - i - j) / step_inv))
    return pts


def frozen_dataset():
    """Small deterministic dataset used by golden-file and CLI tests.

    Built with explicit integer arithmetic (no RNG) so its bytes are
    stable across library versions.
    """
    records = []
    obs_cycle = "BBNBABNAABNBBANBBBAN"  # fixed, mildly B-heavy
    k = 0
    for lat in range(4):
        for lon in range(5):
            for year in range(12):
                u = ((lat * 131 + lon * 37 + year * 17 + 7) * 69069 + 12345) % 1000
                v = ((lat * 59 + lon * 101 + year * 29 + 3) * 69069 + 54321) % 1000
                a = 1 + u % 97
                b = 1 + v % 89
                c = 1 + (u + v) % 83
                s = a + b + c
                p = make_ternary(a / s, b / s, c / s)
                obs = ObsCategory(obs_cycle[k % len(obs_cycle)])
                k += 1
                records.append(
                    ForecastRecord(lat=float(lat), lon=float(lon), ternary=p, obs=obs)
                )
    return Dataset(records=tuple(records))


@pytest.fixture
def rng():
    return np.random.default_rng(20240813)


@pytest.fixture
def brier():
    return brier_rule()


@pytest.fixture
def rps():
    return rps_rule()
