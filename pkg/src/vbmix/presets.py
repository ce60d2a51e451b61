"""Built-in data-generating mixtures used by the experiments and the CLI."""

import numpy as np

from .family import gaussian_location
from .mixture import MixtureParams

_SQRT2 = float(np.sqrt(2.0))


def gauss6_two() -> MixtureParams:
    """Two equally weighted 6-D Gaussians at -+(2/sqrt(6)) * 1."""
    d = 6
    mu = 2.0 / np.sqrt(d) * np.ones(d)
    return MixtureParams(gaussian_location(d), np.array([0.5, 0.5]), np.stack([-mu, mu]))


def evidence1d_pair() -> MixtureParams:
    """(1/2) N(-2, 1) + (1/2) N(2, 1)."""
    return MixtureParams(gaussian_location(1), np.array([0.5, 0.5]), np.array([[-2.0], [2.0]]))


def model1() -> MixtureParams:
    return MixtureParams(
        gaussian_location(2),
        np.array([0.3, 0.7]),
        np.array([[0.0, 0.0], [2.0, 2.0]]),
    )


def model2() -> MixtureParams:
    return MixtureParams(
        gaussian_location(2),
        np.array([0.5, 0.5]),
        np.array([[_SQRT2, 0.0], [0.0, _SQRT2]]),
    )


def model3() -> MixtureParams:
    return MixtureParams(
        gaussian_location(4),
        np.array([0.2, 0.3, 0.5]),
        np.array(
            [
                [0.0, 0.0, 0.0, 0.0],
                [2.5, 1.5, 2.0, 1.5],
                [1.5, 3.0, 2.75, 2.0],
            ]
        ),
    )


def model4() -> MixtureParams:
    return MixtureParams(
        gaussian_location(4),
        np.array([0.3, 0.3, 0.4]),
        np.array(
            [
                [_SQRT2, 0.0, 0.0, 0.0],
                [0.0, _SQRT2, 0.0, 0.0],
                [0.0, 0.0, _SQRT2, 0.0],
            ]
        ),
    )


def model5() -> MixtureParams:
    return MixtureParams(
        gaussian_location(6),
        np.array([0.1, 0.3, 0.1, 0.3, 0.2]),
        np.array(
            [
                [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                [-1.5, 2.25, -1.0, 0.0, 0.5, 0.75],
                [0.25, 1.5, 0.75, 0.25, -0.5, -1.0],
                [-0.25, 0.5, -2.5, 1.25, 0.75, 1.5],
                [-1.0, -1.5, -0.25, 1.75, -0.5, 2.0],
            ]
        ),
    )


def model6() -> MixtureParams:
    comps = np.zeros((5, 6))
    for k in range(5):
        comps[k, k] = _SQRT2
    return MixtureParams(gaussian_location(6), np.full(5, 0.2), comps)


PRESET_MODELS = {
    "gauss6": gauss6_two,
    "evidence1d": evidence1d_pair,
    "model1": model1,
    "model2": model2,
    "model3": model3,
    "model4": model4,
    "model5": model5,
    "model6": model6,
}


def get_model(name: str) -> MixtureParams:
    try:
        return PRESET_MODELS[name]()
    except KeyError:
        raise KeyError(
            f"unknown model preset {name!r}; available: {', '.join(sorted(PRESET_MODELS))}"
        ) from None
