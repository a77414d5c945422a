"""Client for an external perplexity scorer speaking the sidecar protocol.

Wire protocol, one JSON object per line, UTF-8, over the child process's
standard pipes:

    sidecar -> client  {"hello": "viseme-scorer", "version": 1}     (on start)
    client  -> sidecar {"id": 1, "texts": ["EXCUSE ME", ...]}
    sidecar -> client  {"id": 1, "ppl": [5.3, ...]}
                    or {"id": 1, "error": "..."}

Request ids are strictly increasing per connection and responses arrive
in request order.  Timeouts, malformed replies and version mismatches
surface as distinct errors with the offending payload retained.
"""

from __future__ import annotations

import json
import subprocess
import threading
from queue import Empty, Queue
from typing import Sequence

from .errors import EmptyInputError, ScorerProtocolError, ScorerTransportError

PROTOCOL_NAME = "viseme-scorer"
PROTOCOL_VERSION = 1


class ExternalScorer:
    """Launches a sidecar process and scores sentences through it."""

    def __init__(self, command: Sequence[str], timeout: float = 60.0, batch_size: int = 64):
        if not command:
            raise ValueError("external scorer needs a command line")
        self.command = list(command)
        self.timeout = timeout
        self.batch_size = batch_size
        self._next_id = 1
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise ScorerTransportError(f"cannot launch scorer {self.command!r}: {exc}") from exc
        self._lines: Queue = Queue()
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()
        self.handshake = self._expect_handshake()

    def _read_loop(self) -> None:
        assert self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)  # EOF marker

    def _next_line(self, what: str) -> str:
        try:
            line = self._lines.get(timeout=self.timeout)
        except Empty:
            raise ScorerTransportError(f"timed out waiting for {what}") from None
        if line is None:
            code = self._proc.poll()
            raise ScorerTransportError(f"scorer process closed its pipe before {what} (exit={code})")
        return line

    def _expect_handshake(self) -> dict:
        line = self._next_line("handshake")
        try:
            hello = json.loads(line)
        except json.JSONDecodeError:
            raise ScorerProtocolError("handshake is not valid JSON", payload=line) from None
        if hello.get("hello") != PROTOCOL_NAME:
            raise ScorerProtocolError(f"unexpected handshake {hello!r}", payload=line)
        if hello.get("version") != PROTOCOL_VERSION:
            raise ScorerProtocolError(
                f"protocol version mismatch: got {hello.get('version')!r}, "
                f"want {PROTOCOL_VERSION}",
                payload=line,
            )
        return hello

    def _request(self, texts: list[str]) -> list[float]:
        request_id = self._next_id
        self._next_id += 1
        message = json.dumps({"id": request_id, "texts": texts})
        try:
            assert self._proc.stdin is not None
            self._proc.stdin.write(message + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, ValueError, OSError) as exc:
            raise ScorerTransportError(f"cannot write to scorer: {exc}") from exc

        line = self._next_line(f"response {request_id}")
        try:
            response = json.loads(line)
        except json.JSONDecodeError:
            raise ScorerProtocolError("response is not valid JSON", payload=line) from None
        if response.get("id") != request_id:
            raise ScorerProtocolError(
                f"response id {response.get('id')!r} does not match request {request_id}",
                payload=line,
            )
        if "error" in response:
            raise ScorerProtocolError(f"scorer error: {response['error']}", payload=line)
        ppl = response.get("ppl")
        if not isinstance(ppl, list) or len(ppl) != len(texts):
            raise ScorerProtocolError(
                f"expected {len(texts)} perplexities, got {ppl!r}", payload=line
            )
        return [float(p) for p in ppl]

    def perplexity(self, words: Sequence[str]) -> float:
        return self.batch_perplexity([words])[0]

    def batch_perplexity(self, sentences: Sequence[Sequence[str]]) -> list[float]:
        if not sentences:
            raise EmptyInputError("batch contains no sentences")
        texts = []
        for words in sentences:
            if not words:
                raise EmptyInputError("batch contains an empty word sequence")
            texts.append(" ".join(words))
        out: list[float] = []
        for start in range(0, len(texts), self.batch_size):
            out.extend(self._request(texts[start : start + self.batch_size]))
        return out

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                if self._proc.stdin is not None:
                    self._proc.stdin.close()
            except OSError:
                pass
            self._proc.terminate()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()

    def __enter__(self) -> "ExternalScorer":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def score_remote(endpoint: ExternalScorer, sentences: Sequence[Sequence[str]]) -> list[float]:
    """Sidecar-computed perplexities for a batch of word sequences."""
    return endpoint.batch_perplexity(sentences)
