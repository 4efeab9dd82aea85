import math


class ResidualMeter:
    """Track the worst and mean absolute value of a stream of residuals.

    Examples::
        >>> meter = ResidualMeter()
        >>> for h in levels:
        ...     meter.update(ode_residual(profile, material, h), scale=1 + abs(slope))
        >>> meter.max
    """

    def __init__(self):
        self.reset()

    def reset(self):
        self.val = 0.0
        self.max = 0.0
        self.sum = 0.0
        self.count = 0
        self.argmax = None

    def update(self, val, scale=1.0, at=None):
        val = abs(val) / scale
        if not math.isfinite(val):
            val = math.inf
        self.val = val
        self.sum += val
        self.count += 1
        if self.argmax is None or val > self.max:
            self.max = val
            self.argmax = at

    @property
    def avg(self):
        return self.sum / self.count if self.count else 0.0
