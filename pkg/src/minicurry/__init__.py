"""An interpreter for a small functional logic language with a derivable Data class."""

__version__ = "0.1.0"
