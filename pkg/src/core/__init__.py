"""Core imaging, prior, restoration, enhancement and metric functionality."""
