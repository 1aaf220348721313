"""Critical points of the total variance and SLOCC classification of pure states."""

__version__ = "0.1.0"
