"""Sustained-lethargy alerting: k-contiguous-frame debounce plus webhooks.

A notification fires only after k consecutive frames classified in the
lowest activeness class, which suppresses single-frame false positives.
After a fire (or a streak completed inside the cooldown window) the
counter re-arms from zero. Delivery happens off the classification
critical path behind a bounded drop-oldest queue, so a slow or stalled
webhook endpoint can never hold up frame processing.
"""

from __future__ import annotations

import logging
import threading
import time
from collections import deque
from dataclasses import dataclass, replace
from typing import Callable

import requests

log = logging.getLogger(__name__)

DEFAULT_MESSAGE = "Person {person_id} has been in the lowest activeness class for {k} consecutive frames (ts={ts})"

#: Delay before retry attempts 2..4 on timeout or 5xx.
RETRY_BACKOFF_S = (0.5, 1.0, 2.0)

QUEUE_CAPACITY = 256


class DeliveryFailed(RuntimeError):
    """All delivery attempts failed (or the server rejected the request)."""


class InvalidUrl(ValueError):
    """Webhook URL missing or not an http(s) URL."""


@dataclass(frozen=True)
class AlertConfig:
    k: int = 5
    lowest_class: int = 1
    cooldown_ms: int = 60_000
    webhook_url: str = ""
    message_template: str = DEFAULT_MESSAGE
    timeout_s: float = 10.0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.cooldown_ms < 0:
            raise ValueError("cooldown_ms must be >= 0")


@dataclass(frozen=True)
class AlertState:
    """Per-person debounce state; treat as immutable and thread over update()."""

    consecutive: int = 0
    last_fired_ts: int | None = None
    last_ts: int | None = None
    non_monotonic: int = 0


@dataclass(frozen=True)
class AlertEvent:
    person_id: int
    ts: int
    message: str
    streak_len: int


def update(state: AlertState, label: int, ts: int, cfg: AlertConfig,
           person_id: int = 0) -> tuple[AlertState, AlertEvent | None]:
    """Advance the debounce state machine by one classified frame.

    Lowest-class frames extend the streak; anything else resets it. On
    reaching k the event fires unless the cooldown since the previous
    fire has not elapsed, in which case the streak is consumed silently.
    A backwards timestamp is flagged but the frame is still processed.
    """
    non_monotonic = state.non_monotonic
    if state.last_ts is not None and ts < state.last_ts:
        non_monotonic += 1
        log.warning("person %s: timestamp went backwards (%s < %s)", person_id, ts, state.last_ts)

    if label != cfg.lowest_class:
        return replace(state, consecutive=0, last_ts=ts, non_monotonic=non_monotonic), None

    consecutive = state.consecutive + 1
    if consecutive < cfg.k:
        return replace(state, consecutive=consecutive, last_ts=ts,
                       non_monotonic=non_monotonic), None

    # streak complete: fire unless still cooling down from the last one
    in_cooldown = (
        state.last_fired_ts is not None and ts - state.last_fired_ts < cfg.cooldown_ms
    )
    if in_cooldown:
        return replace(state, consecutive=0, last_ts=ts, non_monotonic=non_monotonic), None
    event = AlertEvent(
        person_id=person_id,
        ts=ts,
        message=cfg.message_template.format(person_id=person_id, ts=ts, k=cfg.k),
        streak_len=cfg.k,
    )
    new_state = AlertState(consecutive=0, last_fired_ts=ts, last_ts=ts,
                           non_monotonic=non_monotonic)
    return new_state, event


@dataclass(frozen=True)
class DeliveryResult:
    ok: bool
    status: int | None
    attempts: int


def send_webhook(event: AlertEvent, cfg: AlertConfig,
                 sleep: Callable[[float], None] = time.sleep) -> DeliveryResult:
    """POST the event to the configured webhook as ``{"text": message}``.

    2xx is success. Timeouts, connection errors and 5xx are retried up to
    three times with backoff (0.5s, 1s, 2s); 4xx is never retried.

    Raises:
        InvalidUrl: URL empty or not http(s).
        DeliveryFailed: non-retryable status, or retries exhausted.
    """
    url = cfg.webhook_url
    if not url or not url.startswith(("http://", "https://")):
        raise InvalidUrl(f"webhook URL must be an http(s) URL, got {url!r}")
    payload = {"text": event.message}
    attempts = len(RETRY_BACKOFF_S) + 1
    last_error = "unknown"
    for attempt in range(1, attempts + 1):
        try:
            resp = requests.post(url, json=payload, timeout=cfg.timeout_s)
        except (requests.Timeout, requests.ConnectionError) as exc:
            last_error = type(exc).__name__
            log.warning("webhook attempt %d/%d failed: %s", attempt, attempts, last_error)
        else:
            if 200 <= resp.status_code < 300:
                return DeliveryResult(True, resp.status_code, attempt)
            if 400 <= resp.status_code < 500:
                raise DeliveryFailed(f"webhook rejected with HTTP {resp.status_code}")
            last_error = f"HTTP {resp.status_code}"
            log.warning("webhook attempt %d/%d failed: %s", attempt, attempts, last_error)
        if attempt <= len(RETRY_BACKOFF_S):
            sleep(RETRY_BACKOFF_S[attempt - 1])
    raise DeliveryFailed(f"webhook delivery failed after {attempts} attempts ({last_error})")


class AlertDispatcher:
    """Bounded single-producer/single-consumer delivery queue.

    ``submit`` never blocks: when the queue is full the oldest pending
    event is dropped with a warning. The consumer thread delivers through
    ``sink`` (defaults to a real webhook send) and swallows delivery
    errors after logging them.
    """

    def __init__(self, cfg: AlertConfig, sink: Callable[[AlertEvent], None] | None = None,
                 capacity: int = QUEUE_CAPACITY):
        self._cfg = cfg
        self._sink = sink if sink is not None else self._send
        self._queue: deque[AlertEvent] = deque()
        self._capacity = capacity
        self._cond = threading.Condition()
        self._closed = False
        self._dropped = 0
        self._delivered = 0
        self._failed = 0
        self._worker = threading.Thread(target=self._run, name="alert-dispatch", daemon=True)
        self._worker.start()

    def _send(self, event: AlertEvent) -> None:
        send_webhook(event, self._cfg)

    def submit(self, event: AlertEvent) -> None:
        with self._cond:
            if self._closed:
                return
            if len(self._queue) >= self._capacity:
                self._queue.popleft()
                self._dropped += 1
                log.warning("alert queue full; dropped oldest event (%d dropped total)", self._dropped)
            self._queue.append(event)
            self._cond.notify()

    def _run(self) -> None:
        while True:
            with self._cond:
                while not self._queue and not self._closed:
                    self._cond.wait()
                if not self._queue and self._closed:
                    return
                event = self._queue.popleft()
            try:
                self._sink(event)
                self._delivered += 1
            except (DeliveryFailed, InvalidUrl) as exc:
                self._failed += 1
                log.error("alert delivery failed: %s", exc)
            except Exception:
                self._failed += 1
                log.exception("unexpected alert delivery error")

    def close(self, timeout: float | None = 10.0) -> None:
        """Stop accepting events and wait for pending deliveries."""
        with self._cond:
            self._closed = True
            self._cond.notify()
        self._worker.join(timeout=timeout)

    @property
    def counters(self) -> dict[str, int]:
        with self._cond:
            return {
                "delivered": self._delivered,
                "failed": self._failed,
                "dropped": self._dropped,
            }
