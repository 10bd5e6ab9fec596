"""
cddp-toolkit
Instances, bounds and a matheuristic for the two-stage stochastic cross-dock door design problem
"""

__version__ = "0.3.0"
