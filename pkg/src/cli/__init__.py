"""
Command-line front end of cddp-toolkit
"""
