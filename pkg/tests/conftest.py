import numpy as np
import pytest

# The 3x3 circulant fixture: bistochastic but neither unistochastic nor
# orthostochastic. Link lengths between rows 0 and 1 are (0, 1/2, 0),
# which cannot close a triangle.
CIRCULANT = 0.5 * np.array(
    [
        [1.0, 1.0, 0.0],
        [0.0, 1.0, 1.0],
        [1.0, 0.0, 1.0],
    ]
)


@pytest.fixture
def circulant():
    return CIRCULANT.copy()
