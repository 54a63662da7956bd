import numpy as np
from typing import Dict, List, Mapping
from scipy import integrate

METRIC_NAMES = ("ISE", "MSE", "MAE", "SUP")


def density_errors(x: np.ndarray, truth: np.ndarray, estimate: np.ndarray) -> Dict[str, float]:
    """Discrepancies between an estimate and the truth on an evaluation grid."""
    diff = np.asarray(estimate, dtype=float) - np.asarray(truth, dtype=float)
    return {
        "ISE": float(integrate.trapezoid(diff**2, x=x)),
        "MSE": float(np.mean(diff**2)),
        "MAE": float(np.mean(np.abs(diff))),
        "SUP": float(np.max(np.abs(diff))),
    }


class MetricsTracker:
    def __init__(self):
        """Collect per-replicate metrics for every estimator."""
        self.values: Dict[str, Dict[str, List[float]]] = {}
        self.total_replicates = 0
        self.failed_replicates = 0

    def update(self, estimator: str, metrics: Mapping[str, float]):
        """Record one replicate's metrics for `estimator`."""
        bucket = self.values.setdefault(estimator, {})
        for name, value in metrics.items():
            bucket.setdefault(name, []).append(float(value))

    def record_replicate(self, failed: bool = False):
        self.total_replicates += 1
        if failed:
            self.failed_replicates += 1

    @property
    def failure_rate(self) -> float:
        return self.failed_replicates / self.total_replicates if self.total_replicates > 0 else 0.0

    def get_stats(self) -> Dict[str, Dict[str, Dict[str, float]]]:
        """Statistics for every (estimator, metric)."""
        return {
            estimator: {name: self._calculate_stats(data) for name, data in bucket.items()}
            for estimator, bucket in self.values.items()
        }

    def _calculate_stats(self, data: List[float]) -> Dict[str, float]:
        """Calculate statistics for a list of values."""
        if not data:
            return {"mean": 0.0, "std": 0.0, "stderr": 0.0, "min": 0.0, "max": 0.0, "count": 0}

        arr = np.array(data)
        std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
        return {
            "mean": float(np.mean(arr)),
            "std": std,
            "stderr": std / np.sqrt(arr.size),
            "min": float(np.min(arr)),
            "max": float(np.max(arr)),
            "count": int(arr.size),
        }
