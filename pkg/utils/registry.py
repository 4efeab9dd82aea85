import hashlib

import numpy as np

SWEEP_PARAMS = {
    "cylinder": ("H", "r"),
    "cone": ("H", "r"),
    "power": ("H", "p"),
    "sphere": ("R",),
    "half_sphere": ("R",),
    "expression": ("H",),
    "tabulated": (),
}

MATERIAL_PARAMS = {
    "density": ("alpha", "beta"),
    "mass": ("M", "m"),
}

POLYNOMIAL = "c0 + c1*z + c2*z^2"


def seed_hash(*args):
    """
    Derive an integer hash from all args, for use as a random seed.
    """
    args_str = str(args)
    return int(hashlib.md5(args_str.encode("utf-8")).hexdigest(), 16) % (2**31)


def sweepable(raw):
    """Parameters a sweep may vary for the scenario mapping ``raw``."""
    kind = raw.get("kind") or ("expression" if "g" in raw else "tabulated")
    form = "mass" if ("M" in raw or "m" in raw) else "density"
    return SWEEP_PARAMS.get(kind, ()) + MATERIAL_PARAMS[form]


def _corpus(random_seed):
    """
    Global registry of verification scenarios. Each geometry is paired with
    the unit material and one seeded random (alpha, beta).
    """

    corpus = []

    def _scenario(name, geometry):
        assert not any(s["name"].startswith(name + "/") for s in corpus)
        random_state = np.random.RandomState(seed_hash(random_seed, name))
        materials = [
            (1.0, 1.0),
            (10 ** random_state.uniform(-2, 0), 10 ** random_state.uniform(-1, 1)),
        ]
        for i, (alpha, beta) in enumerate(materials):
            corpus.append(dict(name=f"{name}/{i}", alpha=float(alpha), beta=float(beta), **geometry))

    _scenario("cylinder", dict(kind="cylinder", r=1.0, H=1.0))
    _scenario("cone", dict(kind="cone", r=1.0, H=1.0))
    for p in (0.4, 1.0, 2.0):
        _scenario(f"power-p{p:g}", dict(kind="power", p=p, H=1.0))
    _scenario("sphere", dict(kind="sphere", R=1.0))
    _scenario("half_sphere", dict(kind="half_sphere", R=1.0))

    for k in range(2):
        name = f"polynomial-{k}"
        random_state = np.random.RandomState(seed_hash(random_seed, name, "coefficients"))
        c = random_state.uniform(0.2, 1.0, size=3)
        constants = {f"c{i}": float(v) for i, v in enumerate(c)}
        _scenario(name, dict(kind="expression", g=POLYNOMIAL, constants=constants, H=1.0))

    return corpus


def build_corpus(seed=0, tol=1e-8):
    from utils.scenario import scenario_from_dict

    return [scenario_from_dict(raw, default_tol=tol) for raw in _corpus(seed)]


def corpus_names(seed=0):
    return [raw["name"] for raw in _corpus(seed)]
