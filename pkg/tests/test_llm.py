import threading

import pytest

from eventline.errors import (
    AuthFailureError,
    FixtureMissError,
    MalformedUpstreamResponseError,
    RateLimitedError,
    UpstreamUnavailableError,
)
from eventline.llm import (
    ChatRequest,
    ClientConfig,
    LlmClient,
    Message,
    RateLimiter,
    RecordingTransport,
    ReplayTransport,
    RetryPolicy,
    request_hash,
)


class ScriptedTransport:
    """Yields scripted outcomes in order; an Exception instance means raise it."""

    def __init__(self, script):
        self.script = list(script)
        self.calls = []

    def send(self, payload):
        self.calls.append(payload)
        action = self.script.pop(0)
        if isinstance(action, Exception):
            raise action
        return {"choices": [{"message": {"role": "assistant", "content": action}}]}


def make_request(text="hello"):
    return ChatRequest(messages=(Message("user", text),))


def make_client(transport, max_attempts=3, sleeps=None):
    config = ClientConfig(
        retry=RetryPolicy(max_attempts=max_attempts, base_backoff_ms=100),
        requests_per_minute=10_000_000,
    )
    return LlmClient(
        config,
        transport=transport,
        sleep=(sleeps.append if sleeps is not None else lambda s: None),
    )


class TestComplete:
    def test_success_passthrough(self):
        client = make_client(ScriptedTransport(["ok"]))
        assert client.complete(make_request()) == "ok"

    def test_two_failures_then_success(self):
        transport = ScriptedTransport(
            [UpstreamUnavailableError("boom"), RateLimitedError("slow"), "ok"]
        )
        client = make_client(transport, max_attempts=3)
        assert client.complete(make_request()) == "ok"
        assert len(transport.calls) == 3

    def test_exhausted_attempts(self):
        transport = ScriptedTransport([UpstreamUnavailableError(f"e{i}") for i in range(3)])
        client = make_client(transport, max_attempts=3)
        with pytest.raises(UpstreamUnavailableError):
            client.complete(make_request())
        assert len(transport.calls) == 3

    def test_auth_failure_is_not_retried(self):
        transport = ScriptedTransport([AuthFailureError("nope"), "never"])
        client = make_client(transport)
        with pytest.raises(AuthFailureError):
            client.complete(make_request())
        assert len(transport.calls) == 1

    def test_malformed_response_is_not_retried(self):
        class BadShape:
            def __init__(self):
                self.calls = []

            def send(self, payload):
                self.calls.append(payload)
                return {"unexpected": True}

        transport = BadShape()
        client = make_client(transport)
        with pytest.raises(MalformedUpstreamResponseError):
            client.complete(make_request())
        assert len(transport.calls) == 1

    def test_backoff_delays_never_decrease(self):
        sleeps = []
        transport = ScriptedTransport(
            [UpstreamUnavailableError("a")] * 4 + ["ok"]
        )
        client = make_client(transport, max_attempts=5, sleeps=sleeps)
        assert client.complete(make_request()) == "ok"
        assert len(sleeps) == 4
        assert all(b >= a for a, b in zip(sleeps, sleeps[1:]))

    def test_request_validation(self):
        with pytest.raises(ValueError):
            ChatRequest(messages=())
        with pytest.raises(ValueError):
            ChatRequest(messages=(Message("user", "x"),), temperature=-1)
        with pytest.raises(ValueError):
            Message("alien", "x")


class TestReplay:
    def test_fixture_round_trip(self):
        request = make_request("what happens next?")
        fixture = {"version": 1, "responses": {request_hash(request): "a canned answer"}}
        client = make_client(ReplayTransport(fixture))
        assert client.complete(request) == "a canned answer"
        assert client.complete(request) == "a canned answer"

    def test_altered_prompt_misses(self):
        request = make_request("original")
        fixture = {"version": 1, "responses": {request_hash(request): "x"}}
        client = make_client(ReplayTransport(fixture))
        with pytest.raises(FixtureMissError):
            client.complete(make_request("altered"))

    def test_empty_fixture_misses(self):
        client = make_client(ReplayTransport({"version": 1, "responses": {}}))
        with pytest.raises(FixtureMissError):
            client.complete(make_request())

    def test_fixture_file_round_trip(self, tmp_path):
        request = make_request("file based")
        recording = RecordingTransport(ScriptedTransport(["recorded!"]))
        make_client(recording).complete(request)
        path = tmp_path / "fixture.json"
        recording.save(path)
        client = make_client(ReplayTransport(path))
        assert client.complete(request) == "recorded!"

    def test_hash_ignores_content_padding(self):
        a = make_request("  padded  ")
        b = make_request("padded")
        assert request_hash(a) == request_hash(b)

    def test_hash_depends_on_role_and_text(self):
        a = ChatRequest(messages=(Message("user", "x"),))
        b = ChatRequest(messages=(Message("system", "x"),))
        c = ChatRequest(messages=(Message("user", "y"),))
        assert len({request_hash(a), request_hash(b), request_hash(c)}) == 3


class TestRateLimiter:
    def test_waits_after_burst(self):
        clock = {"t": 0.0}
        sleeps = []

        def fake_sleep(s):
            sleeps.append(s)
            clock["t"] += s

        limiter = RateLimiter(60, clock=lambda: clock["t"], sleep=fake_sleep)
        for _ in range(60):
            limiter.acquire()
        assert sleeps == []
        limiter.acquire()  # bucket empty: must wait for one token (1 s at 60/min)
        assert len(sleeps) == 1
        assert sleeps[0] == pytest.approx(1.0, abs=1e-6)

    def test_thread_safety_under_contention(self):
        limiter = RateLimiter(10_000_000)
        taken = []

        def worker():
            for _ in range(200):
                limiter.acquire()
                taken.append(1)

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(taken) == 1600
