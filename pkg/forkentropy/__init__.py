"""
fork-entropy: fork diversity and pull-based development metrics from forge
event data.
"""
__version__ = "1.0.0"
