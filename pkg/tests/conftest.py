import numpy as np
import pytest

from adsb_features.core import AircraftEvent

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(number, title, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        lines.append(f"criterion {number} {status}: {title}" + (f" ({detail})" if detail else ""))
        print(lines[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


def central_differences(loss, arrays, h=1e-5):
    """Numerical gradient of ``loss()`` w.r.t. every entry of ``arrays``.

    ``arrays`` are perturbed in place and restored.
    """
    grads = []
    for a in arrays:
        g = np.zeros_like(a)
        for idx in np.ndindex(a.shape):
            old = a[idx]
            a[idx] = old + h
            up = loss()
            a[idx] = old - h
            down = loss()
            a[idx] = old
            g[idx] = (up - down) / (2 * h)
        grads.append(g)
    return grads


def grad_close(analytic, numeric, rtol=1e-4, atol=1e-7):
    """Elementwise: within ``atol`` absolute or ``rtol`` relative."""
    diff = np.abs(analytic - numeric)
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    return bool(np.all((diff <= atol) | (diff <= rtol * scale)))


def make_event(**overrides):
    base = dict(tsec=100, cmsgs=250, alt=3500, galt=3620, inhg=29.92, lat=40.7, long=-74.0,
                pos_time=1_504_224_000_000, spd=120.0, spd_typ=0, trak=90.0, trk_h=False,
                vsi=0, gnd=False, trt=5, talt=4000.0, ttrk=90.0, reg="N101SV", icao="A00001",
                country="United States", interesting=False)
    base.update(overrides)
    return AircraftEvent(**base)
