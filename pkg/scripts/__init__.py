"""
Utility scripts for crinifer.
"""
