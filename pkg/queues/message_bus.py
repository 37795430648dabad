# queues/message_bus.py
"""
Job bus for fanning sample runs out to worker coroutines.

A run owns one task queue and one result queue. Worker coroutines pull
{"id", "payload"} jobs, execute the handler in a thread and push
{"id", "result" | "error"} messages back. Results are reassembled by id so
the output order never depends on scheduling.
"""

import asyncio
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from utils.logger import log_debug

STOP = {"id": None}


@dataclass
class JobBus:
    task_queue: asyncio.Queue = field(default_factory=asyncio.Queue)
    result_queue: asyncio.Queue = field(default_factory=asyncio.Queue)


async def sample_worker(name: str, bus: JobBus, handler: Callable[[Any], Any]) -> None:
    log_debug(f"[{name}] started")
    while True:
        job = await bus.task_queue.get()
        if job["id"] is None:
            bus.task_queue.task_done()
            break
        try:
            result = await asyncio.to_thread(handler, job["payload"])
            message = {"id": job["id"], "result": result}
        except Exception as e:
            # the error is reported with the job, the worker keeps going
            log_debug(f"[{name}] job {job['id']} failed: {e}")
            message = {"id": job["id"], "error": e}
        await bus.result_queue.put(message)
        bus.task_queue.task_done()


async def _run(payloads: Sequence[Any], handler: Callable[[Any], Any], workers: int) -> list[dict]:
    bus = JobBus()
    for i, payload in enumerate(payloads):
        await bus.task_queue.put({"id": i, "payload": payload})
    count = max(1, min(workers, len(payloads)))
    for _ in range(count):
        await bus.task_queue.put(STOP)
    tasks = [asyncio.create_task(sample_worker(f"Worker{k}", bus, handler)) for k in range(count)]
    await bus.task_queue.join()
    await asyncio.gather(*tasks)

    messages = []
    while not bus.result_queue.empty():
        messages.append(bus.result_queue.get_nowait())
    return sorted(messages, key=lambda m: m["id"])


def run_jobs(payloads: Sequence[Any], handler: Callable[[Any], Any], workers: int = 4) -> list[dict]:
    """Run handler over payloads on `workers` coroutines; messages come back in payload order."""
    if not payloads:
        return []
    return asyncio.run(_run(list(payloads), handler, workers))
