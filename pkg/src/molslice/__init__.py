"""Static slicing and aspect extraction for MOL, a small object-oriented language."""

__version__ = "0.1.0"
