"""Cooperative response of driven sub-wavelength atom arrays.

Dipole-dipole kernels, collective modes, the uniform mean-field model with
its bistability analysis, the cooperative-resonance-fluorescence limit with
an exact Dicke-space solver, and scattered-light observables.
"""

__version__ = "0.1.0"
