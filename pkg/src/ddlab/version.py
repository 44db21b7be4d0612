"""Build identifier embedded in every report."""

__version__ = "0.1.0"

BUILD_ID = f"ddlab {__version__}"
