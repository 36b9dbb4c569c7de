import math

SIGNIFICANCE_LEVELS = ((0.001, "***"), (0.01, "**"), (0.05, "*"))


def stars(p: float) -> str:
    if p is None or math.isnan(p):
        return ""
    for level, mark in SIGNIFICANCE_LEVELS:
        if p < level:
            return mark
    return ""


def format_p(p: float) -> str:
    if p is None or math.isnan(p):
        return ""
    if p < 1e-300:
        return "<1e-300"
    return f"{p:.6g}"


def fmt(x) -> str:
    """Six significant digits; blank for missing values."""
    if x is None:
        return ""
    if isinstance(x, float) and math.isnan(x):
        return ""
    return f"{x:.6g}"
