#!/usr/bin/env python3
"""
Channels Test - Kraus-form quantum channels

Covers audits, evolution, composition, the dual map and the view of a
channel as an all-plus elementary operator.
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

# Add the project root to Python path for imports
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.posmap.channels import (
    ChannelKind,
    QuantumChannel,
    as_elementary_operator,
    audit,
    compose,
    dephasing_channel,
    evolve,
    heisenberg,
    identity_channel,
    random_channel,
)
from src.posmap.errors import ChannelError
from src.posmap.maps import apply, is_completely_positive
from src.posmap.states import random_density


def test_audit_examples():
    assert audit(identity_channel(3)) == ChannelKind.TRACE_PRESERVING
    assert audit(dephasing_channel(2)) == ChannelKind.TRACE_PRESERVING
    scaled = QuantumChannel.from_kraus([0.5 * np.eye(2)])
    assert scaled.kind == ChannelKind.TRACE_NONINCREASING
    assert not scaled.trace_preserving


def test_audit_rejects_trace_increasing_family():
    with pytest.raises(ChannelError, match="not a channel"):
        QuantumChannel.from_kraus([np.eye(2), np.eye(2)])


def test_declared_kind_is_replaced_by_audit():
    channel = QuantumChannel(dim_in=2, dim_out=2, kraus=(0.5 * np.eye(2),), kind=ChannelKind.TRACE_PRESERVING)
    assert channel.kind == ChannelKind.TRACE_NONINCREASING


def test_channel_validation():
    with pytest.raises(ChannelError, match="at least one"):
        QuantumChannel(dim_in=2, dim_out=2, kraus=())
    with pytest.raises(ChannelError, match="shape"):
        QuantumChannel(dim_in=2, dim_out=2, kraus=(np.eye(3),))


def test_dephasing_kills_coherences():
    out = evolve(dephasing_channel(2), np.full((2, 2), 0.5))
    assert_allclose(out, np.eye(2) / 2, atol=1e-15)


def test_identity_channel_leaves_state_unchanged():
    rho = random_density(3, seed=2)
    assert_allclose(evolve(identity_channel(3), rho), rho, atol=1e-15)


def test_evolve_rejects_invalid_states():
    with pytest.raises(ChannelError, match="trace"):
        evolve(identity_channel(2), np.eye(2))
    with pytest.raises(ChannelError, match="positive semidefinite"):
        evolve(identity_channel(2), np.diag([1.5, -0.5]))
    with pytest.raises(ChannelError, match="shape"):
        evolve(identity_channel(2), np.eye(3) / 3)


def test_random_channels_preserve_trace_and_positivity():
    for seed in range(100):
        channel = random_channel(3, 1 + seed % 4, seed=seed)
        gram = sum(m.conj().T @ m for m in channel.kraus)
        assert np.max(np.abs(gram - np.eye(3))) <= 1e-12
        assert channel.trace_preserving
        out = evolve(channel, random_density(3, seed=seed + 1000))
        assert abs(np.trace(out) - 1) <= 1e-12
        assert np.linalg.eigvalsh((out + out.conj().T) / 2)[0] >= -1e-10


def test_compose_matches_sequential_evolution():
    rng = np.random.default_rng(5)
    for _ in range(10):
        first = random_channel(2, 2, seed=rng)
        second = random_channel(2, 3, seed=rng)
        rho = random_density(2, seed=rng)
        combined = compose(second, first)
        assert len(combined.kraus) == 6
        assert combined.trace_preserving
        assert_allclose(evolve(combined, rho), evolve(second, evolve(first, rho)), atol=1e-12)


def test_compose_with_identity():
    channel = random_channel(3, 2, seed=9)
    rho = random_density(3, seed=10)
    assert_allclose(evolve(compose(identity_channel(3), channel), rho), evolve(channel, rho), atol=1e-12)


def test_compose_dimension_mismatch():
    with pytest.raises(ChannelError, match="cannot compose"):
        compose(identity_channel(2), identity_channel(3))


def test_heisenberg_duality():
    channel = random_channel(3, 3, seed=4)
    rho = random_density(3, seed=5)
    rng = np.random.default_rng(6)
    y = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    y = y + y.conj().T
    lhs = np.trace(evolve(channel, rho) @ y)
    rhs = np.trace(rho @ heisenberg(channel, y))
    assert abs(lhs - rhs) <= 1e-12
    assert_allclose(heisenberg(channel, np.eye(3)), np.eye(3), atol=1e-12)


def test_as_elementary_operator():
    channel = dephasing_channel(2)
    phi = as_elementary_operator(channel)
    assert phi.k == 2
    assert phi.l == 0
    rho = random_density(2, seed=1)
    assert_allclose(apply(phi, rho), evolve(channel, rho), atol=1e-15)
    for seed in range(5):
        assert is_completely_positive(as_elementary_operator(random_channel(2, 3, seed=seed))).is_cp


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
