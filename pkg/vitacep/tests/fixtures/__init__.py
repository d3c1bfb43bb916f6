"""
Shared synthetic fixtures and brute-force oracles for the test suite.
"""
