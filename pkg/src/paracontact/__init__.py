"""Verification toolkit for almost contact, Lorentzian almost paracontact and
Lorentzian para-Sasakian structures and their hypersurfaces."""

__version__ = "0.1.0"
