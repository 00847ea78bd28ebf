"""Statevector validators against independent complex-arithmetic references."""

import cmath
import math
from fractions import Fraction

import pytest

from shiftlab.errors import GuardError
from shiftlab.instance import new_instance
from shiftlab.kinds import INTERVAL, POW2
from shiftlab.phase_sim import (
    COMBINE_ENUM_K_CAP,
    STATEVECTOR_N_CAP,
    measure_with_correction,
    statevector_combine_dist,
    statevector_generate,
)


def _phase_oracle(s, l, N):
    """Reference phase in turns via explicit complex exponential."""
    z = cmath.exp(2j * math.pi * s * l / N)
    return (cmath.phase(z) / (2 * math.pi)) % 1.0


def test_generate_pow2():
    inst = new_instance(8, 3, seed=21)
    rep = statevector_generate(inst)
    assert rep.max_label_dev < 1e-9
    assert rep.max_phase_dev < 1e-9
    for l in range(8):
        ref = _phase_oracle(3, l, 8)
        d = abs(rep.phase_turns[l] - ref)
        assert min(d, 1 - d) < 1e-9


def test_generate_zero_shift():
    inst = new_instance(2, 0, seed=1)
    rep = statevector_generate(inst)
    assert rep.max_phase_dev < 1e-12  # |0>+|1> for both labels
    assert rep.max_label_dev < 1e-12


def test_generate_odd():
    inst = new_instance(5, 2, seed=9)
    rep = statevector_generate(inst)
    assert rep.max_label_dev < 1e-9
    for l in range(5):
        ref = _phase_oracle(2, l, 5)
        d = abs(rep.phase_turns[l] - ref)
        assert min(d, 1 - d) < 1e-9


def test_generate_guard():
    inst = new_instance(STATEVECTOR_N_CAP * 2, 0, seed=0)
    with pytest.raises(GuardError):
        statevector_generate(inst)


def test_combine_dist_constant_ancilla():
    labels = (4, 8, 12)  # all 0 mod 4
    dist = statevector_combine_dist(labels, 2, POW2)
    assert dist.values == (0,)
    assert dist.probs[0] == 1
    assert dist.preimages[0] == tuple(range(8))


def test_combine_dist_small_case():
    dist = statevector_combine_dist((1, 2, 3), 2, POW2)
    assert dist.probs[0] == Fraction(1, 4)
    assert dist.preimages[0] == (0, 5)


def test_combine_dist_normalizes():
    dist = statevector_combine_dist((7, 11, 13, 2, 5), 3, POW2)
    assert sum(dist.probs.values()) == 1


def test_combine_dist_interval_counts():
    dist = statevector_combine_dist((3, 5, 6, 7), 2, INTERVAL, B=8)
    counts = {v: len(dist.preimages[v]) for v in dist.values}
    assert counts == {0: 2, 1: 3, 2: 4, 3: 4, 4: 2, 5: 1}
    assert dist.preimages[0] == (0, 1)
    assert dist.preimages[5] == (15,)


def test_combine_dist_guard():
    with pytest.raises(GuardError):
        statevector_combine_dist(tuple(range(COMBINE_ENUM_K_CAP + 1)), 2, POW2)


def test_measure_with_correction_wraps_instance():
    inst = new_instance(16, 1, seed=4)
    out = measure_with_correction(inst.derive_element(4))
    assert abs(out.p_zero - 0.5) < 1e-12
    out2 = measure_with_correction(inst.derive_element(4), Fraction(-1, 4))
    assert out2.bit == 0 and out2.p_zero == 1.0
