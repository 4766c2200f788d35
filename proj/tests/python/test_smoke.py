import math

import numpy as np
import pytest
from scipy import special

import hdgocean as hdg


@pytest.mark.parametrize("order", [0.0, 1.0, 4.0])
def test_bessel_matches_scipy(order):
    xs = np.linspace(0.5, 10.0, 97)
    for x in xs:
        assert hdg.bessel(hdg.BesselKind.First, order, x) == pytest.approx(special.jv(order, x), abs=1e-12)
        assert hdg.bessel(hdg.BesselKind.Second, order, x) == pytest.approx(special.yv(order, x), abs=1e-12, rel=1e-12)
        assert hdg.bessel_derivative(hdg.BesselKind.First, order, x) == pytest.approx(special.jvp(order, x), abs=1e-12)


def test_bessel_rejects_bad_arguments():
    with pytest.raises(ValueError):
        hdg.bessel(hdg.BesselKind.Second, 0.0, 0.0)


def test_channel_solution_and_error():
    p = hdg.ChannelParams()
    exact = hdg.ChannelSolution(p)
    assert exact(p.L) == pytest.approx(p.A)
    assert abs(exact.derivative(p.L1)) < 1e-15
    coarse = hdg.channel_error(20)
    fine = hdg.channel_error(40)
    assert coarse["error"] == "" and fine["error"] == ""
    assert fine["e2"] < coarse["e2"] / 4


def test_manufactured_order():
    e = [hdg.manufactured_error(n, 2)["e2"] for n in (4, 8, 16)]
    orders = [math.log2(a / b) for a, b in zip(e, e[1:])]
    assert min(orders) >= 1.8


def test_standing_wave_short_run():
    r = hdg.standing_wave(dt=0.05, t_end=2.0, nx=20, nz=20)
    q = r["q"]
    assert q.shape == (20, 20)
    assert np.all(np.isfinite(q))
    # antisymmetric about the basin center
    assert np.max(np.abs(q + q[:, ::-1])) <= 1e-9 * np.max(np.abs(q))
    assert r["worst_divergence_ratio"] < 1e-8


def test_unstable_step_raises():
    with pytest.raises(RuntimeError):
        hdg.standing_wave(dt=0.5, t_end=60.0)
