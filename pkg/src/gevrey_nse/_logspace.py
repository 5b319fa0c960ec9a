"""Log-domain arithmetic for positive quantities that overflow float64.

A positive real x is represented by its natural log (``-inf`` encodes 0).
Signed values use (sign, log|x|) pairs; sign 0 encodes exact zero.
"""
import math

LOG_ZERO = -math.inf


def log_add(la, lb):
    """log(e^la + e^lb), safe against overflow of either term."""
    if la == LOG_ZERO:
        return lb
    if lb == LOG_ZERO:
        return la
    if la < lb:
        la, lb = lb, la
    return la + math.log1p(math.exp(lb - la))


def log_sum(values):
    acc = LOG_ZERO
    for v in values:
        acc = log_add(acc, v)
    return acc


def log_sub(la, lb):
    """log(e^la - e^lb); requires la >= lb."""
    if lb == LOG_ZERO:
        return la
    if lb > la:
        raise ValueError("log_sub requires la >= lb")
    if la == lb:
        return LOG_ZERO
    return la + math.log1p(-math.exp(lb - la))


def from_float(x):
    """(sign, log|x|) pair for a finite float."""
    if x == 0.0:
        return 0, LOG_ZERO
    return (1 if x > 0 else -1), math.log(abs(x))


def to_float(sign, logmag):
    """Back to float64; overflows saturate to +/-inf."""
    if sign == 0 or logmag == LOG_ZERO:
        return 0.0
    if logmag > 709.0:
        return math.inf * sign
    return sign * math.exp(logmag)


def signed_add(a, b):
    """Sum of two (sign, log|x|) pairs."""
    sa, la = a
    sb, lb = b
    if sa == 0:
        return b
    if sb == 0:
        return a
    if sa == sb:
        return sa, log_add(la, lb)
    if la == lb:
        return 0, LOG_ZERO
    if la > lb:
        return sa, log_sub(la, lb)
    return sb, log_sub(lb, la)


def signed_scale(a, factor):
    """(sign, log|x|) times a finite float factor."""
    sa, la = a
    if sa == 0 or factor == 0.0:
        return 0, LOG_ZERO
    sf, lf = from_float(factor)
    return sa * sf, la + lf
