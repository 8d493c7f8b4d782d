"""Episode record format: round trips, varints, error handling."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from causalneuron.records import (
    EpisodeRecord,
    _read_varint,
    _write_varint,
)


def random_record(rng, n_steps=500, n_channels=10):
    frames = []
    for t in range(n_steps):
        if rng.random() < 0.3:
            k = int(rng.integers(1, 5))
            chans = sorted(rng.choice(n_channels, size=k, replace=False).tolist())
            frames.append((t, chans))
    rewards = sorted(set(rng.integers(0, n_steps, 5).tolist()))
    punish = sorted(set(rng.integers(0, n_steps, 3).tolist()))
    return EpisodeRecord.build(
        step_ms=1, n_channels=n_channels, seed=int(rng.integers(0, 2**16)),
        n_steps=n_steps, frames=frames, reward_steps=rewards,
        punishment_steps=punish,
    )


class TestVarint:
    @given(st.integers(min_value=0, max_value=2**63 - 1))
    def test_round_trip(self, value):
        buf = bytearray()
        _write_varint(buf, value)
        out, pos = _read_varint(bytes(buf), 0)
        assert out == value
        assert pos == len(buf)

    def test_single_byte_values(self):
        for v in (0, 1, 127):
            buf = bytearray()
            _write_varint(buf, v)
            assert len(buf) == 1

    def test_concatenated_stream(self):
        buf = bytearray()
        values = [0, 127, 128, 300, 10**9]
        for v in values:
            _write_varint(buf, v)
        pos = 0
        out = []
        while pos < len(buf):
            v, pos = _read_varint(bytes(buf), pos)
            out.append(v)
        assert out == values


class TestRoundTrip:
    def test_bytes_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            rec = random_record(rng)
            again = EpisodeRecord.from_bytes(rec.to_bytes())
            assert again == rec

    def test_resave_byte_identical(self, tmp_path):
        rng = np.random.default_rng(1)
        rec = random_record(rng)
        p1 = tmp_path / "a.spkc"
        p2 = tmp_path / "b.spkc"
        rec.save(p1)
        EpisodeRecord.load(p1).save(p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_frames_reconstruction(self):
        frames = [(3, [1, 4]), (7, [0]), (499, [2, 3, 9])]
        rec = EpisodeRecord.build(
            step_ms=1, n_channels=10, seed=0, n_steps=500,
            frames=frames, reward_steps=[100],
        )
        assert list(rec.frames()) == frames

    def test_empty_frames_dropped(self):
        rec = EpisodeRecord.build(
            step_ms=1, n_channels=5, seed=0, n_steps=10,
            frames=[(2, []), (4, [1])], reward_steps=[],
        )
        assert list(rec.frames()) == [(4, [1])]

    def test_header_fields_survive(self):
        rec = EpisodeRecord.build(
            step_ms=2, n_channels=133, seed=12345, n_steps=1000,
            frames=[], reward_steps=[5],
        )
        again = EpisodeRecord.from_bytes(rec.to_bytes())
        assert again.step_ms == 2
        assert again.n_channels == 133
        assert again.seed == 12345
        assert again.n_steps == 1000
        assert again.duration_s == 2.0

    def test_events_preserved_and_sorted(self):
        rec = EpisodeRecord.build(
            step_ms=1, n_channels=5, seed=0, n_steps=100,
            frames=[], reward_steps=[90, 10], punishment_steps=[50],
        )
        again = EpisodeRecord.from_bytes(rec.to_bytes())
        assert again.reward_steps.tolist() == [10, 90]
        assert again.punishment_steps.tolist() == [50]


class TestErrors:
    def test_bad_magic(self):
        rng = np.random.default_rng(2)
        raw = bytearray(random_record(rng).to_bytes())
        raw[:4] = b"NOPE"
        with pytest.raises(ValueError, match="magic"):
            EpisodeRecord.from_bytes(bytes(raw))

    def test_bad_version(self):
        rng = np.random.default_rng(3)
        raw = bytearray(random_record(rng).to_bytes())
        raw[4] = 99
        with pytest.raises(ValueError, match="version"):
            EpisodeRecord.from_bytes(bytes(raw))

    def test_equality_discriminates(self):
        rng = np.random.default_rng(4)
        a = random_record(rng)
        b = random_record(rng)
        assert a != b
        assert a == EpisodeRecord.from_bytes(a.to_bytes())
