"""Analysis toolkit for standardization-meeting contribution documents."""
__version__ = "0.1.0"
