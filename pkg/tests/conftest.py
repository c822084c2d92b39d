import json
import sys

import pytest

from fracstab import FracOrder, Known, QuasiPolynomial, Unknown


@pytest.fixture(scope="session")
def basset_qp():
    """a*s + b*s**0.5 + c with all three coefficients free."""
    return QuasiPolynomial(
        ((Unknown("c"), FracOrder(0)), (Unknown("b"), FracOrder(1, 2)), (Unknown("a"), FracOrder(1)))
    )


@pytest.fixture(scope="session")
def furnace_qp():
    """a*s**1.31 + b*s**0.97 + c with all three coefficients free."""
    return QuasiPolynomial(
        ((Unknown("c"), "0"), (Unknown("b"), "0.97"), (Unknown("a"), "1.31"))
    )


@pytest.fixture(scope="session")
def furnace_nominal():
    """The heating-furnace denominator at its nominal coefficients."""
    return QuasiPolynomial(((Known(1.69), "0"), (Known(6009.5), "0.97"), (Known(14994.0), "1.31")))


BASSET_DOC = {
    "denominator": [
        {"coeff": {"param": "c"}, "order": "0"},
        {"coeff": {"param": "b"}, "order": "0.5"},
        {"coeff": {"param": "a"}, "order": "1"},
    ]
}

FURNACE_DOC = {
    "denominator": [
        {"coeff": {"param": "c"}, "order": "0"},
        {"coeff": {"param": "b"}, "order": "0.97"},
        {"coeff": {"param": "a"}, "order": "1.31"},
    ]
}


@pytest.fixture()
def basset_cfg(tmp_path):
    path = tmp_path / "basset.cfg"
    path.write_text(json.dumps(BASSET_DOC))
    return str(path)


@pytest.fixture()
def furnace_cfg(tmp_path):
    path = tmp_path / "furnace.cfg"
    path.write_text(json.dumps(FURNACE_DOC))
    return str(path)


def run_cli(args, env=None):
    """Invoke the CLI in-process; returns (exit_code, stdout, stderr)."""
    import contextlib
    import io
    import os

    from fracstab.cli import main

    saved = {}
    if env:
        for k, v in env.items():
            saved[k] = os.environ.get(k)
            os.environ[k] = v
    out, err = io.StringIO(), io.StringIO()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = main(list(args))
    finally:
        for k, v in saved.items():
            if v is None:
                os.environ.pop(k, None)
            else:
                os.environ[k] = v
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="session")
def cli():
    return run_cli


@pytest.fixture(scope="session")
def cli_subprocess():
    """Command prefix for running the CLI as a real subprocess."""
    return [sys.executable, "-m", "fracstab"]
