"""
VITACEP - Event System

Publish/subscribe bus that carries store notifications (new samples, new
events, registered and finalized definitions) to the continuous evaluator.
"""

import logging
import threading
import time
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, List

logger = logging.getLogger(__name__)


class EventType(Enum):
    """Notifications published by the store."""

    SAMPLES_APPENDED = "samples_appended"
    EVENTS_APPENDED = "events_appended"
    DEFINITION_REGISTERED = "definition_registered"
    EVENTS_FINALIZED = "events_finalized"


@dataclass
class Event:
    """Notification data structure."""

    type: EventType
    data: Dict[str, Any]
    timestamp: float

    @classmethod
    def create(cls, event_type: EventType, /, **kwargs) -> "Event":
        """
        Create a notification stamped with the current wall-clock time.

        Args:
            event_type: Type of notification
            **kwargs: Payload, e.g. stream_id and count
        """
        return cls(type=event_type, data=kwargs, timestamp=time.time())


Handler = Callable[[Event], None]


class EventBus:
    """
    Bus for publish-subscribe communication between the store and its listeners.

    Thread-safe for concurrent subscribe/publish operations.
    """

    def __init__(self):
        self._handlers: Dict[EventType, List[Handler]] = {}
        self._lock = threading.RLock()

    def subscribe(self, event_type: EventType, handler: Handler) -> None:
        with self._lock:
            self._handlers.setdefault(event_type, []).append(handler)

    def unsubscribe(self, event_type: EventType, handler: Handler) -> None:
        with self._lock:
            handlers = self._handlers.get(event_type, [])
            if handler in handlers:
                handlers.remove(handler)

    def publish(self, event: Event) -> int:
        """
        Publish a notification to all subscribers.

        Handlers are called outside the lock. A failing handler is logged and
        does not stop delivery to the others.

        Returns:
            Number of handlers that ran without error
        """
        with self._lock:
            handlers = list(self._handlers.get(event.type, []))

        delivered = 0
        for handler in handlers:
            try:
                handler(event)
                delivered += 1
            except Exception as e:
                logger.error(f"Error in handler for {event.type.value}: {e}", exc_info=True)
        return delivered

    def clear(self) -> None:
        with self._lock:
            self._handlers.clear()
