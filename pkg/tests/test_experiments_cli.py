import filecmp
import json
import math
import os

import numpy as np
import pytest

from deconv.cli import main as cli_main
from deconv.experiments import (
    ExperimentSpec,
    run_fig1,
    run_fig2,
    run_fig3,
    sin_mix,
    spectral_peak_to_floor,
    taylor_sin_mix,
)
from deconv.polynomials import Polynomial1D
from deconv.signals import dft, sample_function, signal_from_csv


class TestTaylorSinMix:
    def test_degree_one(self):
        p = taylor_sin_mix(1)
        assert np.array_equal(p.coeffs, [0.0, 8.0])

    def test_degree_three(self):
        # cubic coefficient is -(5^3 + 3^3)/3! = -152/6
        p = taylor_sin_mix(3)
        assert abs(p.coeffs[3] - (-152.0 / 6.0)) < 1e-14
        assert p.coeffs[1] == 8.0 and p.coeffs[2] == 0.0

    def test_derivatives_at_zero(self):
        # oracle: k-th Maclaurin coefficient is f^{(k)}(0) / k!; for the sine
        # mix the derivatives cycle through 5^k cos / -5^k sin patterns
        p = taylor_sin_mix(9)
        for k in range(1, 10, 2):
            expect = (-1) ** ((k - 1) // 2) * (5**k + 3**k) / math.factorial(k)
            assert abs(p.coeffs[k] - expect) < 1e-12 * abs(expect)

    def test_degree_50_approximates_on_window(self):
        p = taylor_sin_mix(50)
        xs = np.linspace(-2.0, 2.0, 401)
        assert np.abs(p(xs) - sin_mix(xs)).max() < 1e-6

    def test_rejects_degree_zero(self):
        with pytest.raises(Exception):
            taylor_sin_mix(0)


@pytest.fixture(scope="module")
def fig1_summary(tmp_path_factory):
    out = str(tmp_path_factory.mktemp("fig1"))
    return run_fig1(ExperimentSpec.fig1(), out), out


class TestFig1:

    def test_coefficient_roundtrip(self, fig1_summary):
        s, _ = fig1_summary
        assert s["coefficient_roundtrip_rel_error"] < 1e-8

    def test_outputs_exist(self, fig1_summary):
        s, out = fig1_summary
        for name in s["outputs"] + ["summary.json"]:
            assert os.path.exists(os.path.join(out, name))

    def test_sampled_route_shows_edge_effects(self, fig1_summary):
        # the discrete route is orders of magnitude worse than the exact
        # coefficient route, and the innermost quarter beats the boundary zone
        s, out = fig1_summary
        assert s["sampled_edge_max_abs_error"] > 1e4 * s["coefficient_roundtrip_rel_error"]
        errs, ts = [], []
        with open(os.path.join(out, "fig1_sampled_error.csv")) as fh:
            next(fh)
            for line in fh:
                t, e = line.split(",")
                ts.append(float(t)); errs.append(float(e))
        ts = np.array(ts); errs = np.array(errs)
        central = errs[np.abs(ts) < 0.5].max()
        boundary = errs[np.abs(ts) > 1.9].max()
        assert central < boundary

    def test_affine_variant_zero_error(self, tmp_path):
        s = run_fig1(ExperimentSpec.fig1(taylor_degree=1), str(tmp_path))
        assert s["coefficient_roundtrip_rel_error"] == 0.0

    def test_config_echoed(self, fig1_summary):
        s, _ = fig1_summary
        assert s["config"]["epsilon"] == 0.9
        assert s["config"]["kernel_family"] == "bump"
        assert s["config"]["taylor_degree"] == 50


@pytest.fixture(scope="module")
def fig2_summary(tmp_path_factory):
    out = str(tmp_path_factory.mktemp("fig2"))
    return run_fig2(ExperimentSpec.fig2(), out), out


class TestFig2:

    def test_config_defaults_embedded(self, fig2_summary):
        s, _ = fig2_summary
        assert s["config"]["order"] == 90
        assert s["config"]["epsilon"] == 0.55
        assert s["config"]["n_samples"] == 2048

    def test_error_matches_spectral_prediction(self, fig2_summary):
        # the pipeline must reproduce what the frequency response dictates:
        # tone recovery factors 0.9979 (omega 3) and 0.0462 (omega 5) give a
        # predicted interior error of ~0.675
        s, _ = fig2_summary
        f3 = s["spectral_factor_at_tones"]["3.0"]
        f5 = s["spectral_factor_at_tones"]["5.0"]
        predicted = math.sqrt(((1 - f3) ** 2 + (1 - f5) ** 2) / 2.0)
        assert abs(s["interior_rel_l2"] - predicted) < 0.02

    def test_residuals_decrease(self, fig2_summary):
        s, _ = fig2_summary
        assert s["residual_norm_last"] < s["residual_norm_first"]

    def test_spectra_files(self, fig2_summary):
        _, out = fig2_summary
        lines = open(os.path.join(out, "fig2_spectrum_kernel.csv")).read().splitlines()
        assert lines[0] == "freq,re,im,abs"
        assert len(lines) == 2049

    def test_working_configuration_recovers(self, tmp_path):
        # with the kernel scale halved the same pipeline reconstructs nearly
        # perfectly, confirming the machinery rather than the parameters
        s = run_fig2(ExperimentSpec.fig2(epsilon=0.275), str(tmp_path))
        assert s["interior_rel_l2"] < 0.02
        assert s["spectral_factor_at_tones"]["5.0"] > 0.999


@pytest.fixture(scope="module")
def fig3_summary(tmp_path_factory):
    out = str(tmp_path_factory.mktemp("fig3"))
    return run_fig3(ExperimentSpec.fig3(), out), out


class TestFig3:

    def test_snr_below_one(self, fig3_summary):
        s, _ = fig3_summary
        assert s["snr_interior_power_ratio"] < 1.0

    def test_filter_reduces_error(self, fig3_summary):
        s, _ = fig3_summary
        assert s["interior_rel_l2_filtered"] < s["interior_rel_l2_unfiltered"]

    def test_seed_recorded(self, fig3_summary):
        s, _ = fig3_summary
        assert s["config"]["noise_seed"] == 20260808
        assert s["config"]["noise_variance"] == 0.5

    def test_zero_variance_allpass_reproduces_fig2(self, tmp_path):
        # degenerate noise and a filter away, fig3's reconstruction column
        # must equal fig2's byte for byte
        out2 = str(tmp_path / "f2"); out3 = str(tmp_path / "f3")
        run_fig2(ExperimentSpec.fig2(), out2)
        run_fig3(ExperimentSpec.fig3(noise_variance=0.0), out3)
        sig2 = open(os.path.join(out2, "fig2_signals.csv")).read().splitlines()
        sig3 = open(os.path.join(out3, "fig3_signals.csv")).read().splitlines()
        # columns: fig2 t,original,convolved,reconstructed
        #          fig3 t,original,convolved,noisy,reconstructed,filtered
        for l2, l3 in zip(sig2[1:], sig3[1:]):
            c2 = l2.split(","); c3 = l3.split(",")
            assert c2[:3] == c3[:3]
            assert c2[3] == c3[4]

    def test_determinism_byte_identical(self, tmp_path):
        a = str(tmp_path / "a"); b = str(tmp_path / "b")
        run_fig3(ExperimentSpec.fig3(), a)
        run_fig3(ExperimentSpec.fig3(), b)
        for name in os.listdir(a):
            assert filecmp.cmp(os.path.join(a, name), os.path.join(b, name), shallow=False)


class TestPeakToFloor:
    def test_clean_tone_dominates(self):
        # non-integer period count leaks into neighbours, but the tone still
        # towers over the local floor
        s = sample_function(lambda t: np.sin(5 * t), -6.0, 6.0, 2048)
        d = spectral_peak_to_floor(dft(s), 5.0)
        assert d["ratio"] > 20.0

    def test_white_noise_has_no_peak(self, rng):
        from deconv.signals import GridSignal
        s = GridSignal(0.0, 12 / 2047, rng.normal(size=2048))
        d = spectral_peak_to_floor(dft(s), 5.0)
        assert d["ratio"] < 10.0


class TestCli:
    def test_kernel_moments_values(self, capsys):
        assert cli_main(["kernel", "moments", "--family", "gaussian", "--max-m", "4"]) == 0
        rows = capsys.readouterr().out.strip().splitlines()
        assert rows[0] == "m,moment"
        vals = [float(r.split(",")[1]) for r in rows[1:]]
        assert np.allclose(vals, [1.0, 0.0, 2.0, 0.0, 12.0], atol=1e-8)

    def test_kernel_fourier_and_check(self, capsys, tmp_path):
        assert cli_main(["kernel", "fourier", "--family", "gaussian",
                         "--epsilon", "0.55", "--xi-max", "2", "--n-grid", "5"]) == 0
        rows = capsys.readouterr().out.strip().splitlines()
        assert rows[0] == "xi,value"
        mid = float(rows[3].split(",")[1])
        assert mid == 1.0  # transform at xi = 0
        out = str(tmp_path / "check.json")
        assert cli_main(["kernel", "check", "--family", "bump", "--epsilon", "0.9",
                         "--xi-max", "20", "--n-grid", "401", "--out", out]) == 0
        rep = json.loads(open(out).read())
        assert rep["passed"] is False and rep["zero_crossings"]

    def test_poly_conv_deconv_roundtrip_via_files(self, tmp_path):
        p = Polynomial1D([0.25, -1.0, 0.5, 2.0])
        p_path = str(tmp_path / "p.json")
        q_path = str(tmp_path / "q.json")
        r_path = str(tmp_path / "r.json")
        open(p_path, "w").write(p.to_json())
        assert cli_main(["poly", "conv", "--family", "gaussian", "--epsilon", "0.8",
                         "--in", p_path, "--out", q_path]) == 0
        assert cli_main(["poly", "deconv", "--family", "gaussian", "--epsilon", "0.8",
                         "--in", q_path, "--out", r_path]) == 0
        r = Polynomial1D.from_json(open(r_path).read())
        assert np.abs(r.padded(4) - p.coeffs).max() < 1e-10

    def test_poly_iterate_multi(self, tmp_path):
        mp_path = str(tmp_path / "mp.json")
        out_path = str(tmp_path / "out.json")
        open(mp_path, "w").write(
            '{"dim": 2, "terms": [{"alpha": [2, 0], "coeff": 1.0}]}')
        assert cli_main(["poly", "conv", "--family", "gaussian", "--epsilon", "1.0",
                         "--in", mp_path, "--out", out_path]) == 0
        data = json.loads(open(out_path).read())
        consts = [t for t in data["terms"] if t["alpha"] == [0, 0]]
        assert abs(consts[0]["coeff"] - 2.0) < 1e-9

    def test_signal_conv_and_dft(self, tmp_path):
        s = sample_function(lambda t: np.sin(2 * np.pi * t), 0.0, 1.0, 256)
        s_path = str(tmp_path / "s.csv")
        c_path = str(tmp_path / "c.csv")
        sp_path = str(tmp_path / "sp.csv")
        from deconv.signals import signal_to_csv
        signal_to_csv(s, s_path)
        assert cli_main(["signal", "conv", "--family", "gaussian", "--epsilon", "0.05",
                         "--in", s_path, "--out", c_path]) == 0
        out = signal_from_csv(c_path)
        assert out.n == 256
        assert cli_main(["signal", "dft", "--in", s_path, "--out", sp_path]) == 0
        assert open(sp_path).readline().strip() == "freq,re,im,abs"

    def test_deconv_run(self, tmp_path):
        from deconv.kernels import GaussianKernel
        from deconv.signals import convolve_signal, discretize_kernel, signal_to_csv
        f = sample_function(lambda t: np.sin(3 * t), -6.0, 6.0, 1024)
        g = convolve_signal(f, discretize_kernel(GaussianKernel(), 0.3, f.dt))
        g_path = str(tmp_path / "g.csv"); f_path = str(tmp_path / "f.csv")
        out_path = str(tmp_path / "rec.csv"); rep_path = str(tmp_path / "rep.json")
        signal_to_csv(g, g_path); signal_to_csv(f, f_path)
        assert cli_main(["deconv", "run", "--family", "gaussian", "--epsilon", "0.3",
                         "--order", "40", "--in", g_path, "--out", out_path,
                         "--report", rep_path, "--reference", f_path]) == 0
        rep = json.loads(open(rep_path).read())
        assert rep["orders_run"] == 40
        assert rep["interior_rel_l2"] < 0.05

    def test_experiment_subcommand_summary(self, tmp_path, capsys):
        assert cli_main(["experiment", "fig2", "--out", str(tmp_path),
                         "--order", "5", "--grid=-6:6:512"]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["config"]["order"] == 5
        assert summary["config"]["epsilon"] == 0.55

    def test_numeric_error_exit_code_and_json(self, tmp_path, capsys):
        p_path = str(tmp_path / "p.json")
        open(p_path, "w").write("[1.0, 2.0]")
        code = cli_main(["poly", "conv", "--family", "gaussian", "--epsilon", "-1",
                         "--in", p_path])
        assert code == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ParameterError"

    def test_usage_error_exit_code_2(self):
        with pytest.raises(SystemExit) as exc:
            cli_main(["poly", "conv", "--no-such-flag"])
        assert exc.value.code == 2

    def test_config_file_defaults(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"family": "gaussian", "max-m": 2}')
        assert cli_main(["kernel", "moments", "--config", str(cfg)]) == 0
        rows = capsys.readouterr().out.strip().splitlines()
        assert len(rows) == 4  # header + m = 0, 1, 2
