"""JSON experiment configuration: parsing, defaults, and object builders.

One config file drives a whole campaign.  Parsing is strict about
types and value ranges and reports the JSON path of the offending key;
the resolved config (defaults filled in) can be re-emitted and
reparsed to an equivalent one.
"""

import json
import math
import copy

import numpy as np

from .errors import ConfigError
from . import domains
from .tensors import TensorField, PlateTensorField
from .couple import couple_from_expressions, pure_bending_couple, trig_couple


_DEFAULTS = {
    "name": "experiment",
    "seed": 0,
    "out": "out",
    "thickness": 0.1,
    "domain": {"kind": "disc", "radius": 1.0, "center": [0.0, 0.0],
               "rho0": None, "M0": None, "M1": None},
    "tensor": {"kind": "isotropic", "lam": 1.0, "mu": 1.0},
    "inclusion": None,
    "couple": {"kind": "pure_bending", "hessian": [[1.0, 0.0], [0.0, 0.0]]},
    "mesh": {"target_h": 0.12, "refine_levels": 0, "refine_factor": 0.5,
             "min_angle": 20.0, "local_refine": True},
    "hypotheses": {"delta0": 0.0, "F_cap": None},
    "exponents": {"delta": 0.5, "delta_chi": 0.5, "A1": 1.0, "B1": 1.0},
    "scan": {"rho_min": None, "rho_max": None, "rho_ratio": math.sqrt(2.0),
             "budget_rho": None,
             "n_rho": 6, "n_freq": 21, "freq_max": None,
             "three_spheres": {"n_centers": 8, "r1": None,
                               "ratios": [1.0, 2.0, 4.0]}},
    "campaign": {"n_experiments": 10, "radius_range": [0.08, 0.25],
                 "jump_factors": [2.0], "center_jitter": 0.25,
                 "couple_modes": [2, 3, 4], "amplitude": 1.0,
                 "d0": 0.05, "h1": 0.1, "workers": 1},
    "bounds": {"form": "auto"},
}


def _merge(base, override, path=""):
    out = copy.deepcopy(base)
    for key, val in override.items():
        here = "%s.%s" % (path, key) if path else key
        if key in out and isinstance(out[key], dict) and isinstance(val, dict):
            out[key] = _merge(out[key], val, here)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _need(d, key, path, types=None):
    if key not in d or d[key] is None:
        raise ConfigError("%s.%s: missing required value" % (path, key))
    v = d[key]
    if types is not None and not isinstance(v, types):
        raise ConfigError("%s.%s: expected %s, got %r"
                          % (path, key, types, type(v).__name__))
    return v


class ExperimentConfig:
    """Resolved configuration with builders for every module input."""

    def __init__(self, data):
        self.data = _merge(_DEFAULTS, data)
        self._validate()

    def _validate(self):
        d = self.data
        if not isinstance(d.get("seed"), int):
            raise ConfigError("seed: expected an integer")
        if d["thickness"] <= 0:
            raise ConfigError("thickness: must be positive")
        dk = d["domain"].get("kind")
        if dk not in ("disc", "ellipse", "rounded_polygon"):
            raise ConfigError("domain.kind: unknown kind %r" % (dk,))
        tk = d["tensor"].get("kind")
        if tk not in ("isotropic", "orthotropic", "components"):
            raise ConfigError("tensor.kind: unknown kind %r" % (tk,))
        ck = d["couple"].get("kind")
        if ck not in ("pure_bending", "expressions", "trig", "random_trig"):
            raise ConfigError("couple.kind: unknown kind %r" % (ck,))
        ex = d["exponents"]
        for key in ("delta", "delta_chi"):
            if not (0.0 < ex[key] < 1.0):
                raise ConfigError("exponents.%s: must lie in (0,1)" % key)

    # -- builders ---------------------------------------------------------

    def build_domain(self):
        d = self.data["domain"]
        kw = {"rho0": d.get("rho0"), "M0": d.get("M0"), "M1": d.get("M1")}
        if d["kind"] == "disc":
            return domains.disc_domain(radius=_need(d, "radius", "domain", (int, float)),
                                       center=tuple(d.get("center", (0.0, 0.0))), **kw)
        if d["kind"] == "ellipse":
            return domains.ellipse_domain(_need(d, "a", "domain", (int, float)),
                                          _need(d, "b", "domain", (int, float)),
                                          center=tuple(d.get("center", (0.0, 0.0))), **kw)
        verts = _need(d, "vertices", "domain", list)
        return domains.rounded_polygon_domain(verts,
                                              _need(d, "fillet", "domain", (int, float)),
                                              **kw)

    def _tensor_from(self, spec, path):
        kind = spec.get("kind")
        if kind == "isotropic":
            return TensorField.isotropic(_need(spec, "lam", path, (int, float)),
                                         _need(spec, "mu", path, (int, float)))
        if kind == "orthotropic":
            return TensorField.orthotropic(
                _need(spec, "a11", path, (int, float)),
                _need(spec, "a12", path, (int, float)),
                _need(spec, "a22", path, (int, float)),
                _need(spec, "a33", path, (int, float)))
        if kind == "components":
            comp = _need(spec, "values", path, dict)
            return TensorField.from_dict(comp)
        raise ConfigError("%s.kind: unknown kind %r" % (path, kind))

    def build_tensor(self):
        return self._tensor_from(self.data["tensor"], "tensor")

    def build_plate(self, tensor=None):
        if tensor is None:
            tensor = self.build_tensor()
        return PlateTensorField(tensor, self.data["thickness"])

    def inclusion_tensor(self, base):
        spec = self.data.get("inclusion")
        if not spec or "tensor" not in spec or spec["tensor"] is None:
            return None
        t = spec["tensor"]
        if isinstance(t, dict) and t.get("kind") == "scaled":
            return base.scaled(_need(t, "factor", "inclusion.tensor", (int, float)))
        return self._tensor_from(t, "inclusion.tensor")

    def build_inclusion(self):
        spec = self.data.get("inclusion")
        if not spec:
            return None
        shape = spec.get("shape", "disc")
        if shape == "disc":
            region = domains.DiscRegion(tuple(_need(spec, "center", "inclusion", list)),
                                        _need(spec, "radius", "inclusion", (int, float)))
        elif shape == "polygon":
            import shapely.geometry as sgeom
            region = domains.PolygonRegion(
                sgeom.Polygon(_need(spec, "vertices", "inclusion", list)))
        else:
            raise ConfigError("inclusion.shape: unknown shape %r" % (shape,))
        base = self.build_tensor()
        return domains.Inclusion(region,
                                 d0=spec.get("d0", 0.05),
                                 h1=spec.get("h1", 0.1),
                                 tensor=self.inclusion_tensor(base))

    def build_couple(self, dom, plate, rng=None):
        spec = self.data["couple"]
        kind = spec["kind"]
        if kind == "pure_bending":
            hess = np.asarray(_need(spec, "hessian", "couple", list), dtype=float)
            if hess.shape != (2, 2):
                raise ConfigError("couple.hessian: expected a 2x2 matrix")
            return pure_bending_couple(dom.curve, plate, hess)
        if kind == "expressions":
            support = spec.get("support")
            return couple_from_expressions(dom.curve,
                                           _need(spec, "n", "couple", str),
                                           _need(spec, "tau", "couple", str),
                                           support=tuple(support) if support else None)
        if kind == "trig":
            return trig_couple(dom.curve,
                               _need(spec, "modes", "couple", list),
                               spec.get("coef_n"),
                               spec.get("coef_tau"))
        if rng is None:
            rng = np.random.default_rng(self.data["seed"])
        from .experiments import random_compatible_couple
        return random_compatible_couple(
            dom, rng,
            modes=spec.get("modes", self.data["campaign"]["couple_modes"]),
            amplitude=spec.get("amplitude", 1.0))

    def mesh_kwargs(self):
        m = self.data["mesh"]
        return {"target_h": m["target_h"], "min_angle": m["min_angle"],
                "seed": self.data["seed"]}

    def to_dict(self):
        return copy.deepcopy(self.data)


def config_from_dict(data):
    if not isinstance(data, dict):
        raise ConfigError("top level: expected a JSON object")
    return ExperimentConfig(data)


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError("cannot read config %s: %s" % (path, e))
    except json.JSONDecodeError as e:
        raise ConfigError("config %s is not valid JSON: line %d column %d: %s"
                          % (path, e.lineno, e.colno, e.msg))
    return config_from_dict(data)


def dump_config(cfg, path):
    """Emit the resolved config; reparsing it gives an equivalent config."""
    from .exports import write_json

    write_json(path, cfg.to_dict())
