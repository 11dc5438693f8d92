"""diqsim - Device-independent QKD pipeline simulator.

A seedable simulator of entangled-outcome statistics under noise, CHSH
estimation, key sifting, Cascade reconciliation and privacy amplification,
with experiment drivers for noise sweeps and Cascade convergence heatmaps.
"""

__version__ = "0.1.0"
__app_name__ = "diqsim"
