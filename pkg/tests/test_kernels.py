import numpy as np
import pytest

from creditbackbone import _kernels

pytestmark = pytest.mark.skipif(_kernels.NUMBA_KERNELS is None, reason="numba unavailable")

NB, NP = _kernels.NUMBA_KERNELS, _kernels.NUMPY_KERNELS


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv(_kernels.ENV_FLAG, "1")
    assert _kernels.active() is NP
    monkeypatch.setenv(_kernels.ENV_FLAG, "0")
    assert _kernels.active() is NB
    monkeypatch.delenv(_kernels.ENV_FLAG)
    assert _kernels.active() is NB


def test_accumulate_twins_agree():
    rng = np.random.default_rng(3)
    idx = rng.integers(0, 50, size=2000)
    w = rng.exponential(size=2000)
    s1, d1 = NB.accumulate(idx, w, 60)
    s2, d2 = NP.accumulate(idx, w, 60)
    np.testing.assert_array_equal(d1, d2)
    np.testing.assert_allclose(s1, s2, rtol=1e-14)
    assert d1[50:].sum() == 0


def test_pvalue_twins_agree_including_log_space():
    rng = np.random.default_rng(4)
    x = rng.random(5000)
    k = rng.integers(1, 3000, size=5000)
    x[:10] = 1.0
    x[10:20] = 0.0
    p1, l1 = NB.disparity_pvalues(x, k)
    p2, l2 = NP.disparity_pvalues(x, k)
    # pow/exp ulp differences grow with the exponent (k up to 3000)
    np.testing.assert_allclose(p1, p2, rtol=1e-12, atol=0)
    finite = np.isfinite(l2)
    np.testing.assert_array_equal(np.isfinite(l1), finite)
    np.testing.assert_allclose(l1[finite], l2[finite], rtol=1e-12)
    assert np.all(p1[k == 1] == 1.0)


def test_log_space_matches_closed_form_where_representable():
    x = np.array([1e-4, 1e-3, 5e-3])
    k = np.array([5000, 5000, 5000])
    p, logp = NP.disparity_pvalues(x, k)
    np.testing.assert_allclose(p, (1 - x) ** 4999, rtol=1e-10)
    np.testing.assert_allclose(logp, 4999 * np.log1p(-x), rtol=1e-14)


def test_log_space_keeps_order_below_underflow():
    x = np.array([0.6, 0.7])
    k = np.array([5000, 5000])
    p, logp = NP.disparity_pvalues(x, k)
    assert p[0] == p[1] == 0.0
    assert logp[1] < logp[0] < -1000


@pytest.mark.parametrize("theta_b", [1e-3, 0.0025, 0.05])
def test_bh_cutoff_twins_agree(theta_b):
    rng = np.random.default_rng(5)
    for _ in range(50):
        p = np.sort(rng.random(rng.integers(0, 40)) ** 3)
        assert NB.bh_cutoff(p, theta_b) == NP.bh_cutoff(p, theta_b)


def test_bh_cutoff_strict_at_boundary():
    p = np.array([0.0025, 0.005])
    assert NP.bh_cutoff(p, 0.0025) == 0
    assert NB.bh_cutoff(p, 0.0025) == 0


def test_component_labels_twins_agree():
    rng = np.random.default_rng(6)
    for n in (1, 5, 40, 300):
        m = rng.integers(0, 2 * n)
        u = rng.integers(0, n, size=m)
        v = rng.integers(0, n, size=m)
        a = NB.component_labels(n, u, v)
        b = NP.component_labels(n, u, v)
        np.testing.assert_array_equal(a, b)
        # labels are component minima
        assert np.all(a <= np.arange(n))
        assert np.all(a[a] == a)


def test_component_labels_path_graph():
    n = 6
    u = np.array([5, 4, 3, 2, 1])
    v = np.array([4, 3, 2, 1, 0])
    for kern in (NB, NP):
        np.testing.assert_array_equal(kern.component_labels(n, u, v), np.zeros(n))


def test_minmax_twins_agree():
    rng = np.random.default_rng(7)
    a, b = rng.random(500), rng.random(500)
    lo1, hi1 = NB.minmax_sums(a, b)
    lo2, hi2 = NP.minmax_sums(a, b)
    assert lo1 == pytest.approx(lo2, rel=1e-13)
    assert hi1 == pytest.approx(hi2, rel=1e-13)


def test_benchmark_script_runs(capsys):
    import runpy
    from pathlib import Path

    if _kernels.NUMBA_KERNELS is None:
        pytest.skip("numba unavailable")
    script = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    mod = runpy.run_path(str(script))
    mod["main"](["--size", "2000", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "disparity_pvalues" in out and "speedup" in out
