"""S1 acceptance for the figure package.

Each shipped scenario CSV renders without error, the fig2 analogue
contains exactly the expected series, re-rendering is byte-identical,
and contract violations produce named diagnostics.
"""

import os
import warnings

import matplotlib.pyplot as plt
import pytest

from amdiqkd_figures.cli import load_specs, main
from amdiqkd_figures.csvdata import DataError, FigureSpec, load_rows
from amdiqkd_figures.render import _RENDERERS, render

HERE = os.path.dirname(os.path.abspath(__file__))
SPEC_FILE = os.path.join(HERE, "..", "specs", "figures.toml")
DATA = os.path.join(HERE, "..", "data")

GOOD_CSV = os.path.join(DATA, "fig2.csv")

CONTRACT_HEADER = (
    "L_km,N,e_d_z,E_hom,rate_no_ad,rate_ad,b_opt,plob,"
    "mu,nu,p_mu,p_nu,Tc,E_z,phi11_z_upper,s11_frac"
)


def retarget(spec: FigureSpec, out: str) -> FigureSpec:
    return FigureSpec(
        kind=spec.kind,
        csv_paths=spec.csv_paths,
        output_path=out,
        log_y=spec.log_y,
        show_b=spec.show_b,
        show_plob=spec.show_plob,
        title=spec.title,
    )


def test_s1_every_shipped_csv_renders(tmp_path):
    specs = load_specs(SPEC_FILE)
    assert sorted(s.kind for s in specs) == sorted(_RENDERERS)
    for spec in specs:
        out = tmp_path / f"{spec.kind}.png"
        render(retarget(spec, str(out)))
        assert out.stat().st_size > 0


def test_s1_rerender_is_byte_identical(tmp_path):
    for spec in load_specs(SPEC_FILE):
        a = tmp_path / f"{spec.kind}_a.png"
        b = tmp_path / f"{spec.kind}_b.png"
        render(retarget(spec, str(a)))
        render(retarget(spec, str(b)))
        assert a.read_bytes() == b.read_bytes(), f"{spec.kind} render not deterministic"


def test_s1_fig2_contains_expected_series(tmp_path, monkeypatch):
    captured = {}
    real_savefig = plt.Figure.savefig

    def capture(fig, *args, **kwargs):
        ax, twin = fig.axes[0], fig.axes[1]
        captured["labels"] = [line.get_label() for line in ax.get_lines()]
        captured["scatter"] = len(twin.collections)
        return real_savefig(fig, *args, **kwargs)

    monkeypatch.setattr(plt.Figure, "savefig", capture)
    spec = [s for s in load_specs(SPEC_FILE) if s.kind == "fig2"][0]
    render(retarget(spec, str(tmp_path / "fig2.png")))
    assert captured["labels"] == ["with AD", "without AD", "PLOB bound"]
    assert captured["scatter"] == 1  # the optimal-b scatter


def test_missing_column_diagnostic(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("L_km,rate_ad\n0.0,1e-3\n")
    with pytest.raises(DataError, match="missing column 'N'"):
        load_rows(str(bad))


def test_empty_csv_diagnostic(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text(CONTRACT_HEADER + "\n")
    with pytest.raises(DataError, match="no data rows"):
        load_rows(str(empty))


def test_all_zero_ad_rates_warns_but_renders(tmp_path):
    csv_path = tmp_path / "zeros.csv"
    row = "500.0,7.24e13,0.1,0.1,0.0,0.0,1,0.01," + ",".join(["0.1"] * 8)
    csv_path.write_text(CONTRACT_HEADER + "\n" + row + "\n")
    out = tmp_path / "zeros.png"
    spec = FigureSpec(kind="fig2", csv_paths=(str(csv_path),), output_path=str(out))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        render(spec)
    assert out.exists()
    assert any("AD curve omitted" in str(w.message) for w in caught)


def test_cli_subcommand_and_exit_codes(tmp_path):
    out = tmp_path / "cli.png"
    assert main(["fig2", "--csv", GOOD_CSV, "--out", str(out)]) == 0
    assert out.exists()
    assert main(["render", "--spec", str(tmp_path / "missing.toml")]) == 2
    bad_spec = tmp_path / "bad.toml"
    bad_spec.write_text("[[figure]]\nkind = 'fig9'\ncsv = ['x.csv']\nout = 'x.png'\n")
    assert main(["render", "--spec", str(bad_spec)]) == 2


def test_rendering_is_read_only():
    before = open(GOOD_CSV, "rb").read()
    load_rows(GOOD_CSV)
    assert open(GOOD_CSV, "rb").read() == before
