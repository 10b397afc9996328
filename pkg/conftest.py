"""
Общие фикстуры тестов: ковариация Γ и квантили суммы S иллюстративного набора данных
"""

import numpy as np
import pytest

STATION_GAMMA = np.array([
    [1.003, 0.716, 0.624, 0.638, 0.767, 0.616, 0.714, 0.768],
    [0.716, 0.988, 0.311, 0.507, 0.491, 0.530, 0.468, 0.635],
    [0.624, 0.311, 1.009, 0.291, 0.470, 0.369, 0.496, 0.488],
    [0.638, 0.507, 0.291, 0.979, 0.504, 0.419, 0.499, 0.422],
    [0.767, 0.491, 0.470, 0.504, 0.991, 0.486, 0.550, 0.599],
    [0.616, 0.530, 0.369, 0.419, 0.486, 0.992, 0.282, 0.486],
    [0.714, 0.468, 0.496, 0.499, 0.550, 0.282, 1.024, 0.520],
    [0.768, 0.635, 0.488, 0.422, 0.599, 0.486, 0.520, 1.007],
])

STATION_COEFFS = (0.999, 0.1101, 0.1332)
STATION_SUM_CUMULANTS = {2: 37.426, 4: 463.509, 6: 105098.112}

# уровень (%), нижняя и верхняя граница полосы, наблюдение
STATION_QUANTILES = (
    (0.0, -41.921, -22.644, -29.191),
    (0.1, -21.549, -18.876, -20.72),
    (0.5, -16.956, -15.72, -17.032),
    (1.0, -15.033, -14.124, -14.771),
    (5.0, -10.248, -9.748, -10.049),
    (10.0, -7.897, -7.518, -7.774),
    (20.0, -5.159, -4.838, -5.194),
    (25.0, -4.138, -3.838, -4.212),
    (50.0, -0.136, 0.137, -0.18),
    (75.0, 3.836, 4.145, 4.013),
    (80.0, 4.84, 5.155, 4.987),
    (90.0, 7.507, 7.903, 7.573),
    (95.0, 9.765, 10.273, 9.911),
    (99.0, 14.114, 15.058, 14.293),
    (99.5, 15.718, 17.034, 16.01),
    (99.9, 18.93, 21.625, 20.159),
    (99.99, 21.908, 29.07, 28.542),
    (100.0, 22.897, 43.735, 28.983),
)


@pytest.fixture
def station_gamma() -> np.ndarray:
    return STATION_GAMMA.copy()


@pytest.fixture
def station_model(station_gamma):
    from models.cgf import EllipticalCgf
    return EllipticalCgf(np.zeros(8), station_gamma, STATION_COEFFS)
