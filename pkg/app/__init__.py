"""
Twisted cancellation formula verifier package
"""
__version__ = "1.0.0"
