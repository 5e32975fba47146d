"""Driven and coupled electromagnetic resonators with balanced electric and magnetic coupling.

Modules
-------
circuit_model
    Lumped-element circuits to effective frequencies and coupling rates.
driven_mode, bloch_tls
    A driven harmonic mode and a driven two-level system.
coupled_modes
    Normal modes of two coupled resonators, with and without the rotating wave approximation.
transmission_lines
    Coupled transmission lines and directional couplers.
transmon
    Perturbative and exact transmon matrix elements.
mist_sim
    Semiclassical measurement-induced state transitions in transmon readout.
cli
    Command-line front end (``balanced-coupling``).
"""

__version__ = "0.1.0"
