"""Shallow semantical embeddings of non-classical logics in simple type theory."""

__version__ = "0.1.0"
