"""k-nearest-neighbour scoring."""
import numpy as np


def knn_score(train_x: np.ndarray, train_pos: np.ndarray, x: np.ndarray, k: int) -> np.ndarray:
    """Positive fraction among the ``k`` nearest training rows (Euclidean).

    Distance ties go to the earlier training row; rows are kept in sample-id
    order, so that is the lower id.
    """
    k = min(k, len(train_x))
    d2 = ((x[:, None, :] - train_x[None, :, :]) ** 2).sum(axis=2)
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    return train_pos[nearest].mean(axis=1)
