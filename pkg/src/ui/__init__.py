"""
Terminal presentation helpers
"""
