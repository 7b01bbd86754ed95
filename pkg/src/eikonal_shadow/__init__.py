"""Continuation of two-dimensional eikonals past a caustic into the shadow.

Modules: ``kernel`` (special functions), ``smoothing`` (regularised
differentiation), ``geometry`` (curves and curvature), ``marching`` (the
hodograph solver), ``oracle`` (closed-form continuations), ``continuation``
(trigonometric continuation of samples) and ``cli``.
"""

__version__ = "0.1.0"
