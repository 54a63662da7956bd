import json
import os
from datetime import datetime
from typing import Dict, Any, Mapping, Optional


class RunLogger:
    def __init__(self, log_dir: str = "logs", experiment_name: Optional[str] = None):
        """Initialize logger with directory and experiment name."""
        self.dir = log_dir
        self.exp_name = experiment_name
        self.logs = {
            "events": [],
            "replicates": [],
            "failures": [],
        }

    def log_config(self, config: Mapping[str, Any], seed: int):
        """Record the resolved configuration and master seed."""
        self.log_event("config", config=dict(config), seed=seed)

    def log_event(self, name: str, **data: Any):
        entry = self._create_log_entry({"event": name, **data})
        self.logs["events"].append(entry)

    def log_replicate(self, replicate: int, metrics: Mapping[str, Mapping[str, float]], m: int, h: float):
        """Log replicate-level metrics and selected hyperparameters."""
        entry = self._create_log_entry({
            "replicate": replicate,
            "metrics": {k: dict(v) for k, v in metrics.items()},
            "m": m,
            "h": h,
        })
        self.logs["replicates"].append(entry)

    def log_failure(self, replicate: int, error: str):
        entry = self._create_log_entry({"replicate": replicate, "error": error})
        self.logs["failures"].append(entry)

    def save_logs(self, path: Optional[str] = None):
        """Save all logged data to file."""
        if path is None:
            path = os.path.join(self.dir, f"{self.exp_name or 'experiment'}_logs.json")

        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, 'w') as f:
            json.dump(self.logs, f, indent=2, default=str)
        return path

    def _create_log_entry(self, data: Dict[str, Any]) -> Dict[str, Any]:
        """Create a log entry with timestamp."""
        entry = data.copy()
        entry["timestamp"] = datetime.now().isoformat()
        return entry
