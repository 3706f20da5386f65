import numpy as np
import pytest

from plot_errors import FigureSpec, PlotDataError, load_csv, render_figure

HEADER = (
    "t,R11,R12,R13,R21,R22,R23,R31,R32,R33,"
    "w1,w2,w3,u1,u2,u3,err_R,err_W,defect"
)


def write_csv(path, rows):
    lines = [HEADER] + [",".join("%.17g" % v for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def small_csv(tmp_path):
    rows = np.zeros((4, 19))
    rows[:, 0] = [0.0, 0.1, 0.2, 0.3]
    rows[:, 16] = [2.0, 1.0, 0.5, 0.25]  # err_R
    rows[:, 17] = [1.0, 0.4, 0.16, 0.064]  # err_W
    rows[:, 18] = 1e-13
    return write_csv(tmp_path / "small.csv", rows)


def test_load_csv_names_and_shape(small_csv):
    names, data = load_csv(str(small_csv))
    assert names == HEADER.split(",")
    assert data.shape == (4, 19)


def test_plotted_values_are_raw_csv_values(small_csv):
    fig = render_figure(FigureSpec(csv_path=str(small_csv)))
    lines = fig.axes[0].get_lines()
    assert [line.get_label() for line in lines] == ["err_R", "err_W"]
    assert np.array_equal(lines[0].get_ydata(), [2.0, 1.0, 0.5, 0.25])
    assert lines[0].get_ydata()[0] == 2.0
    assert lines[0].get_ydata()[-1] == 0.25
    assert np.array_equal(lines[0].get_xdata(), [0.0, 0.1, 0.2, 0.3])


def test_defect_overlay_and_linear_scale(small_csv):
    spec = FigureSpec(
        csv_path=str(small_csv), columns=["err_R", "err_W", "defect"], yscale="linear"
    )
    fig = render_figure(spec)
    ax = fig.axes[0]
    assert len(ax.get_lines()) == 3
    assert ax.get_yscale() == "linear"


def test_default_scale_is_log(small_csv):
    fig = render_figure(FigureSpec(csv_path=str(small_csv)))
    assert fig.axes[0].get_yscale() == "log"


def test_missing_column_raises_with_name(small_csv):
    with pytest.raises(PlotDataError, match="err_Q"):
        render_figure(FigureSpec(csv_path=str(small_csv), columns=["err_Q"]))


def test_header_only_file_is_an_error(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(HEADER + "\n")
    with pytest.raises(PlotDataError, match="no data rows"):
        render_figure(FigureSpec(csv_path=str(path)))


def test_script_writes_png(small_csv, tmp_path, run_plot_script):
    out = tmp_path / "fig.png"
    result = run_plot_script([str(small_csv), "--output", str(out)])
    assert result.returncode == 0
    assert out.exists() and out.stat().st_size > 0
    assert result.stdout.strip().endswith(str(out))


def test_script_missing_column_exits_nonzero(small_csv, tmp_path, run_plot_script):
    result = run_plot_script(
        [str(small_csv), "--columns", "err_Q", "--output", str(tmp_path / "x.png")]
    )
    assert result.returncode != 0
    assert "err_Q" in result.stderr
