"""
Algorithmic packages of cddp-toolkit
"""
