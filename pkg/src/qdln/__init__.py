"""FDTD and photon-statistics workbench for quantum dots on thin-film LiNbO3."""

__version__ = "0.1.0"
