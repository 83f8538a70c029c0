import numpy as np
import pytest

import spectral_shape as ss

# Example-1 center sets (edge length sqrt(3))
CENTERS_M3 = ((-np.sqrt(3.0) / 2.0, 0.5), (np.sqrt(3.0) / 2.0, 0.5), (0.0, -1.0))
CENTERS_M4 = ((-1.5, 0.0), (1.5, 0.0), (0.0, -np.sqrt(3.0) / 2.0),
              (0.0, np.sqrt(3.0) / 2.0))


@pytest.fixture(scope="session")
def centers_m3():
    return np.array(CENTERS_M3)


@pytest.fixture(scope="session")
def centers_m4():
    return np.array(CENTERS_M4)


@pytest.fixture(scope="session")
def disk_mesh_64():
    return ss.mesh_from_circles([((0.0, 0.0), 1.0)], 64)


@pytest.fixture(scope="session")
def disk_mesh_128():
    return ss.mesh_from_circles([((0.0, 0.0), 1.0)], 128)


@pytest.fixture(scope="session")
def neumann_window():
    """Flat ellipse over kappa in [0.5, 4.5], clear of resonances."""
    return ss.Contour(2.5, 2.0, 0.15, 40)


@pytest.fixture(scope="session")
def ite_window():
    """Window holding the first real and first complex disk ITEs (n=4)."""
    return ss.Contour(2.55, 0.55, 0.7, 48)
