"""Heights, canonical heights and Betti maps on families of elliptic curves."""

__version__ = "0.1.0"
