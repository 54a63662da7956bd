from .config import ConfigManager
from .logging import RunLogger
from .metrics import MetricsTracker, density_errors
from .seeding import substream
from .visualization import Plotter

__all__ = ["ConfigManager", "MetricsTracker", "Plotter", "RunLogger", "density_errors", "substream"]
