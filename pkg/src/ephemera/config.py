"""Runtime-adjustable numeric tolerance scale (CLI --tolerance-scale)."""

_scale = 1.0


def set_tolerance_scale(value: float) -> None:
    global _scale
    if value <= 0:
        raise ValueError("tolerance scale must be positive")
    _scale = float(value)


def tolerance_scale() -> float:
    return _scale
