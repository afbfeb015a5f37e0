"""Select the compiled kernels or the numpy fallback at import time."""
import os

if os.environ.get("WAVEKIT_PURE", "") in ("1", "true", "yes"):
    from wavekit import _purepy as kernels
    NAME = "python"
else:
    try:
        from wavekit import _core as kernels
        NAME = "compiled"
    except ImportError:  # extension not built
        from wavekit import _purepy as kernels
        NAME = "python"

series_dd = kernels.series_dd
cos_sum = kernels.cos_sum
sin_sum = kernels.sin_sum
