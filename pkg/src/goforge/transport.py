"""Line-oriented engine transports and the shared engine error hierarchy.

A transport moves newline-delimited text to and from one engine.  The real
implementation wraps a subprocess's stdio; tests use an in-process transport
driven by a handler function.  One session owns one transport; neither is
shared between threads.
"""

from __future__ import annotations

import queue
import subprocess
import threading
from typing import Callable, List, Optional


class EngineError(Exception):
    """Base class for engine transport/protocol failures."""


class EngineCrashedError(EngineError):
    """The engine process exited or its pipes closed unexpectedly."""


class EngineTimeoutError(EngineError):
    """No response arrived within the configured timeout."""


class ProtocolError(EngineError):
    """The engine emitted a line the protocol cannot interpret.

    ``raw_line`` carries the offending text verbatim.
    """

    def __init__(self, message: str, raw_line: str = ""):
        super().__init__(message)
        self.raw_line = raw_line


class IllegalPositionRejectedError(EngineError):
    """The engine refused to analyze the submitted position."""


class SubprocessTransport:
    """Stdio transport around an engine subprocess.

    A background thread drains stdout into a queue so receives can honor
    timeouts without blocking on the pipe.
    """

    def __init__(self, command: List[str]):
        try:
            self._proc = subprocess.Popen(
                command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                bufsize=1,
            )
        except OSError as err:
            raise EngineCrashedError(f"could not launch {command[0]!r}: {err}") from err
        self._lines: "queue.Queue[Optional[str]]" = queue.Queue()
        self._reader = threading.Thread(target=self._drain, daemon=True)
        self._reader.start()

    def _drain(self):
        for line in self._proc.stdout:
            self._lines.put(line.rstrip("\n"))
        self._lines.put(None)  # EOF marker

    def send_line(self, line: str):
        if self._proc.poll() is not None:
            raise EngineCrashedError("engine process has exited")
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, ValueError) as err:
            raise EngineCrashedError(f"engine stdin closed: {err}") from err

    def recv_line(self, timeout: float) -> str:
        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            raise EngineTimeoutError(f"no response within {timeout:.0f}s") from None
        if line is None:
            raise EngineCrashedError("engine closed its output stream")
        return line

    def close(self):
        if self._proc.poll() is None:
            try:
                self._proc.terminate()
                self._proc.wait(timeout=5)
            except Exception:
                self._proc.kill()


class InProcessTransport:
    """Synchronous transport backed by a handler function.

    ``handler(line)`` returns the list of reply lines to enqueue (empty to
    simulate a dropped response).  Receiving from an empty queue raises an
    immediate timeout, so fault tests never sleep.  Tracks the high-water
    mark of sent-but-unconsumed requests for pipelining assertions.
    """

    def __init__(self, handler: Callable[[str], List[str]]):
        self._handler = handler
        self._replies: List[str] = []
        self._outstanding = 0
        self.max_outstanding = 0
        self.sent_lines: List[str] = []
        self.closed = False

    def send_line(self, line: str):
        if self.closed:
            raise EngineCrashedError("transport closed")
        self.sent_lines.append(line)
        self._outstanding += 1
        self.max_outstanding = max(self.max_outstanding, self._outstanding)
        self._replies.extend(self._handler(line))

    def recv_line(self, timeout: float) -> str:
        if self.closed:
            raise EngineCrashedError("transport closed")
        if not self._replies:
            raise EngineTimeoutError("mock engine produced no response")
        self._outstanding -= 1
        return self._replies.pop(0)

    def close(self):
        self.closed = True
