"""Log of every engine run made in this process during the test session.

``install`` swaps a logging wrapper in for ``run_cover`` everywhere the
package exposes it.  conftest.py calls it before any test module imports
the function, so the acceptance audits can revisit every run.  Runs made
inside sweep worker processes are not seen.
"""
import plankcover
from plankcover import cli, engine, sweep

RUNS = []  # (instance, certificate)
_run_cover = engine.run_cover


def logged_run_cover(instance, config=None):
    cert = _run_cover(instance, config)
    RUNS.append((instance, cert))
    return cert


def install():
    for mod in (plankcover, engine, cli, sweep):
        mod.run_cover = logged_run_cover


def unique_runs():
    seen, out = set(), []
    for inst, cert in RUNS:
        key = (inst.planks, cert.ordering, cert.placements, cert.steps)
        if key not in seen:
            seen.add(key)
            out.append((inst, cert))
    return out
