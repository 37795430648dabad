# queues/__init__.py
from .message_bus import JobBus, run_jobs, sample_worker

__all__ = ["JobBus", "run_jobs", "sample_worker"]
