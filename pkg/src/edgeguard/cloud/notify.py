"""Notification channels for confirmed alerts.

The reference channel posts JSON to a webhook URL; the log channel just
records locally and always succeeds. Delivery functions return (ok,
detail) so the service can drive the shared retry schedule.
"""

from __future__ import annotations

import json
import urllib.error
import urllib.request
from typing import Callable, Tuple


def _default_post(url: str, body: dict) -> Tuple[bool, str]:
    data = json.dumps(body, sort_keys=True).encode("utf-8")
    request = urllib.request.Request(
        url, data=data, headers={"Content-Type": "application/json"}, method="POST"
    )
    try:
        with urllib.request.urlopen(request, timeout=5) as response:
            if 200 <= response.status < 300:
                return True, "http %d" % response.status
            return False, "http %d" % response.status
    except (urllib.error.URLError, OSError) as exc:
        return False, str(exc)


class LogNotifier:
    channel = "log"

    def deliver(self, body: dict) -> Tuple[bool, str]:
        return True, "logged"


class WebhookNotifier:
    channel = "webhook"

    def __init__(self, url: str, post: Callable[[str, dict], Tuple[bool, str]] = None):
        self.url = url
        self._post = post or _default_post

    def deliver(self, body: dict) -> Tuple[bool, str]:
        return self._post(self.url, body)
