import numpy as np
import pytest

from platelab.config import config_from_dict
from platelab.couple import pure_bending_couple
from platelab.domains import disc_domain
from platelab.experiments import build_experiment, run_experiment
from platelab.fem import solve
from platelab.meshing import generate_mesh
from platelab.tensors import PlateTensorField, TensorField


def base_config(**overrides):
    """Minimal disc config; overrides are merged shallowly per section."""
    data = {
        "name": "test",
        "seed": 42,
        "thickness": 0.1,
        "domain": {"kind": "disc", "radius": 1.0},
        "tensor": {"kind": "isotropic", "lam": 1.0, "mu": 1.0},
        "couple": {"kind": "pure_bending", "hessian": [[1.0, 0.0], [0.0, 0.0]]},
        "mesh": {"target_h": 0.15},
    }
    for key, val in overrides.items():
        if isinstance(val, dict) and isinstance(data.get(key), dict):
            data[key] = {**data[key], **val}
        else:
            data[key] = val
    return config_from_dict(data)


@pytest.fixture(scope="session")
def disc_dom():
    return disc_domain(1.0)


@pytest.fixture(scope="session")
def iso_plate():
    return PlateTensorField(TensorField.isotropic(1.0, 1.0), 0.1)


@pytest.fixture(scope="session")
def disc_mesh(disc_dom):
    return generate_mesh(disc_dom, 0.12, seed=7)


@pytest.fixture(scope="session")
def pure_bending_sol(disc_dom, iso_plate, disc_mesh):
    """Unit-disc solve with hessian e1 x e1 data; exact for the element."""
    couple = pure_bending_couple(
        disc_dom.curve, iso_plate, np.array([[1.0, 0.0], [0.0, 0.0]]))
    return solve(disc_mesh, iso_plate, couple)


@pytest.fixture(scope="session")
def stiff_pair():
    """One solved stiff-disc-inclusion experiment, shared where a real
    budget/lemma is needed."""
    cfg = base_config(
        inclusion={"shape": "disc", "center": [0.1, -0.05], "radius": 0.35,
                   "tensor": {"kind": "scaled", "factor": 3.0}},
        mesh={"target_h": 0.14, "refine_levels": 1},
    )
    dom = cfg.build_domain()
    exp = build_experiment(cfg, dom, label="stiff", seed=42)
    record, budget, lemma, sol0, sol = run_experiment(cfg, exp)
    return {"cfg": cfg, "dom": dom, "exp": exp, "record": record,
            "budget": budget, "lemma": lemma, "sol0": sol0, "sol": sol}
