import numpy as np
import pytest

import spectral_shape as ss
from spectral_shape.cli import (RunConfig, dump_config, emit_boundary_svg,
                                emit_heatmap, main, parse_config, run)
from spectral_shape.errors import ParseError, ValidationError

MINIMAL_NEUMANN = """
[run]
mode = neumann-eigs

[geometry]
type = circles
circles = 0,0,1.0

[discretization]
n = 256

[contour]
center_re = 1.85
radius_re = 0.35
radius_im = 0.1
nodes = 24
"""

OPTIMIZE_CONFIG = """
[run]
mode = optimize-neumann

[geometry]
type = equipotential
centers = -0.8660254037844386,0.5; 0.8660254037844386,0.5; 0,-1

[discretization]
n = 192

[contour]
center_re = 1.6
radius_re = 1.3
radius_im = 0.15
nodes = 32

[solver]
probe_columns = 14

[optimizer]
k = 3
x0_alpha = 2.01
x0_c = 1.69
simplex_scale = 0.02
max_evals = 25
search_n = 96
"""


class TestParseConfig:
    def test_minimal_defaults_filled(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(MINIMAL_NEUMANN)
        cfg = parse_config(path)
        assert cfg.mode == "neumann-eigs"
        assert cfg.solver.probe_columns == 16
        assert cfg.solver.rng_seed == 1
        assert cfg.contour.nodes == 24
        # untouched sections fall back to documented defaults
        assert cfg.k == 1 and cfg.output_dir == "out"

    def test_default_contour_nodes(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(MINIMAL_NEUMANN.replace("nodes = 24\n", ""))
        assert parse_config(path).contour.nodes == 32

    def test_odd_n_rejected(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(MINIMAL_NEUMANN.replace("n = 256", "n = 257"))
        with pytest.raises(ValidationError, match="n must be even"):
            parse_config(path)

    def test_round_trip_is_identity(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(OPTIMIZE_CONFIG)
        cfg = parse_config(path)
        dumped = tmp_path / "resolved.cfg"
        dumped.write_text(dump_config(cfg))
        again = parse_config(dumped)
        assert dump_config(again) == dump_config(cfg)
        assert again == cfg

    def test_parse_errors_carry_line_numbers(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("[run]\nmode neumann-eigs\n")
        with pytest.raises(ParseError, match="line 2"):
            parse_config(path)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(MINIMAL_NEUMANN + "\n[solver]\nbogus = 3\n")
        with pytest.raises(ValidationError, match="bogus"):
            parse_config(path)

    def test_missing_refraction_for_ite(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(MINIMAL_NEUMANN.replace("neumann-eigs", "ite-eigs"))
        with pytest.raises(ValidationError, match="refraction"):
            parse_config(path)


class TestArtifacts:
    def test_svg_quadratic_path(self, tmp_path):
        mesh = ss.mesh_from_circles([((0.0, 0.0), 1.0)], 8)
        out = tmp_path / "boundary.svg"
        emit_boundary_svg(mesh, out)
        text = out.read_text()
        assert text.count("<path") == 1
        assert text.count("Q ") == 4
        assert "Z" in text and 'viewBox="0 0 1 1"' in text

    def test_svg_multiple_components(self, tmp_path):
        mesh = ss.mesh_from_circles([((0, 0), 1.0), ((3, 0), 1.0)], 16)
        out = tmp_path / "two.svg"
        emit_boundary_svg(mesh, out)
        assert out.read_text().count("<path") == 2

    def test_heatmap_constant_grid_uniform(self, tmp_path):
        out = tmp_path / "u.ppm"
        emit_heatmap(np.full((16, 16), 2.5), out)
        data = out.read_bytes()
        header, _, rest = data.partition(b"255\n")
        assert header.startswith(b"P6")
        assert b"max |u| = 2.5" in header
        assert set(rest) == {255}

    def test_heatmap_nan_is_white_and_values_scale(self, tmp_path):
        grid = np.array([[np.nan, 0.0], [1.0, 2.0]])
        out = tmp_path / "v.ppm"
        emit_heatmap(grid, out)
        rest = out.read_bytes().split(b"255\n", 1)[1]
        pix = np.frombuffer(rest, dtype=np.uint8).reshape(2, 2, 3)
        assert tuple(pix[0, 0]) == (255, 255, 255)   # NaN -> white
        assert tuple(pix[0, 1]) == (0, 0, 0)
        assert tuple(pix[1, 1]) == (255, 255, 255)   # max |u|
        assert pix[1, 0, 0] == round(255 / 2)

    def test_heatmap_deterministic_bytes(self, tmp_path):
        rng = np.random.default_rng(0)
        grid = rng.uniform(0, 3, (9, 9))
        a, b = tmp_path / "a.ppm", tmp_path / "b.ppm"
        emit_heatmap(grid, a)
        emit_heatmap(grid, b)
        assert a.read_bytes() == b.read_bytes()


class TestRuns:
    def test_neumann_eigs_run(self, tmp_path):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text(MINIMAL_NEUMANN)
        cfg = parse_config(cfg_path)
        out = tmp_path / "out"
        assert run(cfg, output_dir=out) == 0
        lines = (out / "eigenvalues.csv").read_text().strip().splitlines()
        assert lines[0] == ("re_kappa,im_kappa,re_lambda,im_lambda,"
                            "lambda_times_area,multiplicity,residual")
        assert len(lines) == 2
        fields = lines[1].split(",")
        assert float(fields[0]) == pytest.approx(1.8411837813406593, abs=1e-6)
        assert int(fields[5]) == 2
        assert (out / "boundary.svg").exists()
        assert (out / "resolved-config.txt").exists()

    def test_rerun_reproduces_csv_bit_identically(self, tmp_path):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text(MINIMAL_NEUMANN)
        cfg = parse_config(cfg_path)
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        run(cfg, output_dir=out1)
        resolved = parse_config(out1 / "resolved-config.txt")
        run(resolved, output_dir=out2)
        assert (out1 / "eigenvalues.csv").read_bytes() \
            == (out2 / "eigenvalues.csv").read_bytes()

    def test_eigenfunction_heatmap_peaks_on_rim(self, tmp_path):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text(MINIMAL_NEUMANN.replace("n = 256", "n = 128")
                            + "\n[output]\nheatmaps = 1\ngrid = 100\n")
        cfg = parse_config(cfg_path)
        out = tmp_path / "out"
        assert run(cfg, output_dir=out) == 0
        data = (out / "eigenfunction_1.ppm").read_bytes()
        rest = data.split(b"255\n", 1)[1]
        pix = np.frombuffer(rest, dtype=np.uint8).reshape(100, 100, 3)[:, :, 0]
        # reconstruct pixel centers (grid spans the padded bounding box)
        pad = 1.0 + 0.02 * 2.0
        xs = np.linspace(-pad, pad, 100)
        gx, gy = np.meshgrid(xs, -xs)      # ppm rows top-down
        r = np.hypot(gx, gy)
        interior = r < 0.97
        vals = np.where(interior, pix, 0)
        peak_r = r.flat[np.argmax(vals)]
        # J_1 radial profile peaks at the rim (r ~ 0.96 of the unit radius)
        assert 0.85 < peak_r < 1.0

    def test_ite_compare_run(self, tmp_path, ite_window):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text("""
[run]
mode = ite-compare

[geometry]
type = circles
circles = 0,0,1.0

[discretization]
n = 128

[contour]
center_re = 2.55
radius_re = 0.55
radius_im = 0.7
nodes = 48

[solver]
probe_columns = 8

[refraction]
value = 4.0
""")
        cfg = parse_config(cfg_path)
        out = tmp_path / "out"
        assert run(cfg, output_dir=out) == 0
        line = (out / "ite_compare.csv").read_text().strip().splitlines()[1]
        _, real_col, abs_col = line.split(",")
        assert float(real_col) == pytest.approx(26.4683, abs=1e-3)
        assert float(abs_col) == pytest.approx(17.2647, abs=1e-3)

    def test_optimize_neumann_run(self, tmp_path):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text(OPTIMIZE_CONFIG + "\n[solver]\n"
                            "residual_tol = 1e-5\n")
        cfg = parse_config(cfg_path)
        out = tmp_path / "out"
        assert run(cfg, output_dir=out) == 0
        report = (out / "report.txt").read_text()
        value = float([ln for ln in report.splitlines()
                       if ln.startswith("objective")][0].split("=")[1]
                      .split("(")[0])
        assert value == pytest.approx(32.90, abs=0.01)
        assert "trace:" in report
        assert (out / "boundary.svg").exists()

    def test_csv_rows_sorted_by_modulus(self, tmp_path):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text(MINIMAL_NEUMANN
                            .replace("center_re = 1.85", "center_re = 2.5")
                            .replace("radius_re = 0.35", "radius_re = 2.0")
                            .replace("n = 256", "n = 128"))
        out = tmp_path / "out"
        assert run(parse_config(cfg_path), output_dir=out) == 0
        rows = (out / "eigenvalues.csv").read_text().strip().splitlines()[1:]
        mods = [abs(complex(float(r.split(",")[0]), float(r.split(",")[1])))
                for r in rows]
        assert len(mods) >= 3
        assert mods == sorted(mods)

    def test_oracle_run(self, tmp_path):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text("""
[run]
mode = oracle

[contour]
center_re = 2.55
radius_re = 0.55
radius_im = 0.7
nodes = 48

[refraction]
value = 4.0

[oracle]
radius = 1.0
k_max = 5
""")
        out = tmp_path / "out"
        assert run(parse_config(cfg_path), output_dir=out) == 0
        neumann = (out / "oracle_neumann.csv").read_text().splitlines()
        assert len(neumann) >= 4
        first = neumann[1].split(",")
        assert float(first[0]) == pytest.approx(1.8411837813406593, rel=1e-9)
        ite = (out / "oracle_ite.csv").read_text().splitlines()
        assert len(ite) == 4    # header + conjugate pair + one real root


class TestMainExitCodes:
    def test_config_error_is_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text(MINIMAL_NEUMANN.replace("n = 256", "n = 257"))
        code = main([str(bad), "--output-dir", str(tmp_path / "o")])
        assert code == 2
        assert "ValidationError" in capsys.readouterr().err

    def test_numerical_error_is_exit_3(self, tmp_path, capsys):
        cfg = tmp_path / "num.cfg"
        cfg.write_text("""
[run]
mode = neumann-eigs

[geometry]
type = equipotential
centers = -5,0; 5,0
alpha = 1.0
level = 0.5

[discretization]
n = 64

[contour]
center_re = 1.85
radius_re = 0.35
radius_im = 0.1
nodes = 16
""")
        code = main([str(cfg), "--output-dir", str(tmp_path / "o")])
        assert code == 3
        err = capsys.readouterr().err
        assert '"error"' in err
        assert (tmp_path / "o" / "error.json").exists()

    def test_success_exit_0(self, tmp_path):
        cfg = tmp_path / "ok.cfg"
        cfg.write_text(MINIMAL_NEUMANN)
        assert main([str(cfg), "--output-dir", str(tmp_path / "o")]) == 0
