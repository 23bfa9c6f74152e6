import importlib.resources as ir

import pytest

from tabsynth import normalize, refine, specfile, synth


def _preset_text(name):
    return ir.files("tabsynth").joinpath("presets/%s" % name).read_text()


@pytest.fixture(scope="session")
def so_spec():
    return specfile.preset("so")


@pytest.fixture(scope="session")
def ipc_spec():
    return specfile.preset("ipc")


@pytest.fixture(scope="session")
def so_ns(so_spec):
    return normalize.normalize(so_spec)


@pytest.fixture(scope="session")
def ipc_ns(ipc_spec):
    return normalize.normalize(ipc_spec)


@pytest.fixture(scope="session")
def so_calc(so_ns):
    return synth.synthesize(so_ns)


@pytest.fixture(scope="session")
def ipc_calc(ipc_ns):
    return synth.synthesize(ipc_ns)


@pytest.fixture(scope="session")
def so_ctx(so_calc):
    return refine.parse_context(_preset_text("so.ctx"), so_calc.signature,
                                so_calc.skolems)


@pytest.fixture(scope="session")
def so_refined(so_calc, so_ctx):
    steps = refine.parse_script(_preset_text("so.refine"))
    calc, _ = refine.apply_script(so_calc, steps, ctx=so_ctx)
    return calc


@pytest.fixture(scope="session")
def ipc_refined(ipc_calc):
    steps = refine.parse_script(_preset_text("ipc.refine"))
    calc, _ = refine.apply_script(ipc_calc, steps)
    return calc


@pytest.fixture(scope="session")
def so_blocked(so_refined):
    return refine.attach_ub(so_refined, synth.UbConfig(True, 0))


@pytest.fixture(scope="session")
def ipc_blocked(ipc_refined):
    return refine.attach_ub(ipc_refined, synth.UbConfig(True, 0))
