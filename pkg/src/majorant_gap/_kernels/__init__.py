"""Backend selection for the numeric kernels.

The compiled extension is preferred when present.  Set MAJORANT_GAP_BACKEND
to ``pure`` or ``compiled`` to force a choice (``auto`` is the default);
both backends produce identical results, only speed differs.
"""

import os

_choice = os.environ.get("MAJORANT_GAP_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "compiled", "pure"):
    raise RuntimeError(
        "MAJORANT_GAP_BACKEND must be one of auto/compiled/pure, got %r" % (_choice,)
    )

if _choice == "pure":
    from . import pure as _impl
    backend_name = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
        backend_name = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise RuntimeError(
                "MAJORANT_GAP_BACKEND=compiled but the extension is not built; "
                "reinstall the package or use the pure backend"
            )
        from . import pure as _impl
        backend_name = "pure"

bessel_k0 = _impl.bessel_k0
bessel_k1 = _impl.bessel_k1
bessel_k0k1 = _impl.bessel_k0k1
f3_cdf = _impl.f3_cdf
f3_pdf = _impl.f3_pdf
f3_quantile = _impl.f3_quantile
sample_m_block = _impl.sample_m_block
upper_hull = _impl.upper_hull


def get_backend(name: str):
    """Return a specific backend module (used by tests and benchmarks)."""
    if name == "pure":
        from . import pure
        return pure
    if name == "compiled":
        from . import _core  # type: ignore[attr-defined]
        return _core
    raise ValueError("unknown backend %r" % (name,))
