"""
ancova-check: ANCOVA treatment effects, their variance estimators and the
population limits that decide whether model-based standard errors are valid
under unequal randomisation.
"""

__version__ = "0.1.0"
