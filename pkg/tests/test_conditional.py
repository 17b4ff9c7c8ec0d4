import numpy as np
import pytest

from cekit import channels as chn
from cekit.cause import MODES, ce_max, ce_min, conditional_ce


@pytest.mark.parametrize("bip", [chn.one_time_pad(), chn.pauli_one_time_pad()],
                         ids=["classical", "pauli"])
def test_one_time_pad(bip, quick):
    assert conditional_ce(bip, "max|min", quick) == pytest.approx(0, abs=1e-6)
    assert conditional_ce(bip, "min|max", quick) == pytest.approx(1, abs=1e-6)
    assert conditional_ce(bip, "max|max", quick) == pytest.approx(1, abs=1e-6)


def test_embedded_classical_pad_loses_min_effect(quick):
    # decoherence makes the quantum CE_min of every slice zero
    assert conditional_ce(chn.one_time_pad_quantum(), "min|max", quick) < 1e-6


def test_trivial_conditioning_collapses(quick):
    inner = chn.random_channel(2, 2, 4)
    bip = chn.BipartiteChannel(inner, 2, 1)
    mx, mn = ce_max(inner, quick).value, ce_min(inner, quick).value
    inner_cfg = quick.with_(restarts=4)
    for mode in MODES:
        v = conditional_ce(bip, mode, quick)
        ref = ce_max(inner, inner_cfg).value if mode.startswith("max") else ce_min(inner, inner_cfg).value
        assert v == pytest.approx(ref, abs=1e-9)
        assert v == pytest.approx(mx if mode.startswith("max") else mn, abs=1e-3)


def test_mode_ordering(quick):
    bip = chn.BipartiteChannel(chn.random_channel(4, 2, 7), 2, 2)
    v = {m: conditional_ce(bip, m, quick) for m in MODES}
    assert v["max|min"] <= v["max|max"] + 1e-9
    assert v["min|min"] <= v["min|max"] + 1e-9
    assert v["min|max"] <= v["max|max"] + 1e-9


def test_bad_mode(quick):
    with pytest.raises(ValueError):
        conditional_ce(chn.one_time_pad(), "max", quick)
