import math
import os

from yacs.config import CfgNode as CN

from utils.errors import DomainError

_C = CN()

_C.tol = 1e-8  # solver tolerance on |T(h*) - h*|, COG_DEFAULT_TOL overrides
_C.quad_tol = 1e-10  # absolute and relative quadrature tolerance
_C.max_iter = 200  # root refinement iterations
_C.samples = 201  # curve samples including both ends

_C.scan_grid = 1000  # grid for the brute-force minimum of T
_C.monotone_grid = 1000  # grid for the monotonicity check of F
_C.ode_points = 50  # random interior levels for the ODE residual
_C.fd_step = 1e-5  # central-difference step, relative to H
_C.rate_steps = [1e-3, 5e-4, 2.5e-4]  # moment-rate steps, relative to H
_C.oracle_ladder = [1000, 10000, 100000]
_C.oracle_n = 200000  # slices for the oracle agreement check

_C.seed = 0
_C.output_dir = None  # directory for log.txt and CSV outputs
_C.verbose = True

_C.verify = CN()
_C.verify.minimum_tol = 1e-6  # |h*_fixed - h*_argmin| / H
_C.verify.fixed_point_tol = 1e-8
_C.verify.ode_tol = 1e-8  # ODE residual / (1 + |T'|)
_C.verify.ode_fd_tol = 1e-6
_C.verify.rate_order = 2.0
_C.verify.rate_order_slack = 0.2
_C.verify.oracle_tol = 1e-4  # / H
_C.verify.oracle_min_order = 1.0
_C.verify.agreement_tol = 1e-8


def get_cfg_default():
    cfg = _C.clone()
    raw = os.environ.get("COG_DEFAULT_TOL")
    if raw is not None:
        try:
            tol = float(raw)
        except ValueError:
            tol = float("nan")
        if not tol > 0.0 or math.isinf(tol):
            raise DomainError(f"COG_DEFAULT_TOL must be a positive number, got {raw!r}")
        cfg.tol = tol
    return cfg
