"""Maximum and minimum causal effects of quantum and classical channels."""

__version__ = "0.1.0"
