import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridsat.direct import ChannelPair
from hybridsat.dv_teleport import (
    CAT_PLUS,
    FockTruncation,
    TeleportParams,
    choose_kmax,
    dv_metrics,
    sigma_of,
    teleport_dv_state,
    trace_defect,
    transfer_00,
    transfer_10,
    transfer_11,
    transfer_coefficients,
    tuned_gain,
)
from hybridsat.errors import DomainError, TruncationError

PERFECT = TeleportParams.symmetric(1.0, math.inf)


def params_with_sigma(sigma):
    # g=1, T_A=T_B=1 gives sigma = exp(-2r)
    return TeleportParams.symmetric(1.0, -0.5 * math.log(sigma))


def test_sigma_lossless_and_symmetric():
    for r in (0.0, 0.5, 2.5):
        assert sigma_of(TeleportParams.symmetric(1.0, r)) == pytest.approx(math.exp(-2 * r), rel=1e-14)
        for T in (0.2, 0.7):
            expected = T * math.exp(-2 * r) + 1 - T
            assert sigma_of(TeleportParams.symmetric(T, r)) == pytest.approx(expected, rel=1e-12)
    assert sigma_of(TeleportParams.symmetric(1.0, 0.5)) == pytest.approx(0.36788, abs=1e-5)


def test_sigma_general_gain():
    # direct transcription of the asymmetric formula at one point
    g, r, ta, tb = 1.3, 1.1, 0.6, 0.8
    expected = (math.exp(2 * r) * (g * math.sqrt(ta) - math.sqrt(tb)) ** 2
                + math.exp(-2 * r) * (g * math.sqrt(ta) + math.sqrt(tb)) ** 2
                + 2 * g * g * (1 - ta) + 2 * (1 - tb)) / (4 * g * g)
    assert sigma_of(TeleportParams(g, r, ChannelPair(ta, tb))) == pytest.approx(expected, rel=1e-14)


def test_ideal_resource_has_zero_sigma():
    assert sigma_of(PERFECT) == 0.0
    assert PERFECT.gamma == 1.0


def test_params_validation():
    with pytest.raises(DomainError):
        TeleportParams(0.0, 1.0, ChannelPair(1, 1))
    with pytest.raises(DomainError):
        TeleportParams(1.0, -1.0, ChannelPair(1, 1))
    with pytest.raises(DomainError):
        FockTruncation(k_max=-1)
    with pytest.raises(DomainError):
        FockTruncation(delta=0.0)


def test_tuned_gain():
    assert tuned_gain(ChannelPair(0.5, 0.5)) == 1.0
    assert tuned_gain(ChannelPair(0.9, 0.4)) == pytest.approx(2 / 3, rel=1e-14)
    with pytest.raises(DomainError):
        tuned_gain(ChannelPair(0.0, 0.4))


def test_transfer_perfect_limit():
    assert transfer_00(0, 1.0) == 1.0
    assert all(transfer_00(k, 1.0) == 0.0 for k in range(1, 6))
    assert transfer_11(1, 1.0, 1.0) == 1.0
    assert transfer_11(0, 1.0, 1.0) == 0.0
    assert transfer_10(0, 1.0, 1.0) == 1.0


def test_transfer_values_at_gamma_two():
    p = params_with_sigma(0.5)
    assert p.gamma == pytest.approx(2.0, rel=1e-14)
    assert transfer_00(0, 2.0) == pytest.approx(2 / 3, rel=1e-14)
    assert transfer_00(1, 2.0) == pytest.approx(2 / 9, rel=1e-14)
    # unscaled closed forms at gamma=2, g=1
    assert transfer_11(2, 2.0, 1.0) == pytest.approx(2 * (1 + 8) / 3**4, rel=1e-14)
    assert transfer_10(1, 2.0, 1.0) == pytest.approx(4 * math.sqrt(2) / 27, rel=1e-14)


def test_transfer_coefficients_packing():
    p = params_with_sigma(0.5)
    assert transfer_coefficients(-1, p) == (0.0, 0.0, pytest.approx(1 / 3, rel=1e-14))
    a, b, c = transfer_coefficients(2, p)
    assert a == 0.5 * transfer_11(2, 2.0, 1.0)
    assert b == 0.5 * transfer_10(2, 2.0, 1.0)
    assert c == 0.5 * transfer_00(3, 2.0)
    with pytest.raises(DomainError):
        transfer_coefficients(-2, p)


def test_transfer_no_overflow_for_large_gamma():
    # gamma ~ 1e3 and k ~ 1e3 would overflow a direct (gamma+1)^k evaluation
    assert 0 <= transfer_11(2000, 1e3, 1.0) < 1
    assert 0 <= transfer_00(2000, 1e3) < 1


def test_state_perfect_channel():
    rho = teleport_dv_state(PERFECT, FockTruncation(k_max=1))
    f, e = dv_metrics(1.0, PERFECT)
    assert f == pytest.approx(1.0, abs=1e-8)
    assert e == pytest.approx(1.0, abs=1e-8)
    assert rho.trace == pytest.approx(1.0, abs=1e-15)


def test_state_block_population():
    p = params_with_sigma(0.5)
    k_max = choose_kmax(p)
    rho = teleport_dv_state(p, FockTruncation(k_max)).entries.reshape(2, k_max + 2, 2, k_max + 2)
    assert rho[CAT_PLUS, 0, CAT_PLUS, 0] == pytest.approx(0.5 * transfer_11(0, 2.0, 1.0), rel=1e-14)


def test_state_trace_at_paper_cutoff():
    p = TeleportParams.symmetric(0.5, 2.5)
    rho = teleport_dv_state(p, FockTruncation(k_max=32, delta=1e-14))
    assert abs(rho.trace - 1.0) < 1e-14


def test_state_truncation_error():
    with pytest.raises(TruncationError):
        teleport_dv_state(TeleportParams.symmetric(0.5, 2.5), FockTruncation(k_max=10))


def test_choose_kmax_examples():
    assert choose_kmax(PERFECT) == 1
    p = TeleportParams.symmetric(0.5, 2.5)
    k = choose_kmax(p, 1e-14)
    assert 25 <= k <= 35
    assert trace_defect(p, k) < 1e-14 <= trace_defect(p, k - 1)
    assert choose_kmax(p, 1e-6) < k
    with pytest.raises(DomainError):
        choose_kmax(p, 0.0)


def test_choose_kmax_matches_linear_scan():
    for T in (0.3, 0.6, 0.9):
        p = TeleportParams.symmetric(T, 1.5)
        k = choose_kmax(p)
        scan = next(j for j in range(0, 500) if trace_defect(p, j) < 1e-14)
        assert k == scan


def test_alpha_invariance():
    p = TeleportParams.symmetric(0.6, 2.0)
    vals = [dv_metrics(a, p) for a in (1.0, 1.5, 2.0)]
    for f, e in vals[1:]:
        assert f == pytest.approx(vals[0][0], abs=1e-10)
        assert e == pytest.approx(vals[0][1], abs=1e-10)


def test_squeezing_saturates():
    ch = ChannelPair.from_total_loss_db(15.0)
    f25 = dv_metrics(1.0, TeleportParams(1.0, 2.5, ch))[0]
    f35 = dv_metrics(1.0, TeleportParams(1.0, 3.5, ch))[0]
    assert abs(f35 - f25) < 0.01


def test_gain_tuning_dominates():
    for ta, tb in ((0.9, 0.3), (0.3, 0.9), (0.8, 0.5)):
        ch = ChannelPair(ta, tb)
        f1, e1 = dv_metrics(1.5, TeleportParams(1.0, 2.5, ch))
        ft, et = dv_metrics(1.5, TeleportParams(tuned_gain(ch), 2.5, ch))
        assert ft >= f1 and et >= e1


def test_metrics_reject_bad_alpha():
    with pytest.raises(DomainError):
        dv_metrics(0.0, PERFECT)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.5, 2.0), st.floats(0.0, 3.0), st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_prop_blocks_physical_and_normalised(g, r, ta, tb):
    p = TeleportParams(g, r, ChannelPair(ta, tb))
    assert p.gamma >= g * g
    k_max = choose_kmax(p)
    assert abs(trace_defect(p, k_max)) < 1e-14
    for k in range(0, min(k_max, 60)):
        a, b, c = transfer_coefficients(k, p)
        assert a >= 0 and c >= 0
        # b_k couples (cat+, k+1) with (cat-, k): diagonal entries a_{k+1}, c_{k-1}
        a_up = transfer_coefficients(k + 1, p)[0]
        c_down = transfer_coefficients(k - 1, p)[2]
        assert a_up * c_down - b * b >= -1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.05, 1.0))
def test_prop_teleported_state_valid(r, T):
    p = TeleportParams.symmetric(T, r)
    rho = teleport_dv_state(p, FockTruncation(choose_kmax(p)))
    assert rho.eigenvalues()[0] > -1e-12
    f, e = dv_metrics(1.0, p)
    assert 0.0 <= f <= 1.0 and e >= 0.0


def test_fidelity_increases_with_r():
    ch = ChannelPair.from_total_loss_db(5.0)
    fids = [dv_metrics(1.0, TeleportParams(1.0, r, ch))[0] for r in np.arange(0.0, 3.01, 0.5)]
    assert all(x < y for x, y in zip(fids, fids[1:]))
