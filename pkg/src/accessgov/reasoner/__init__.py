"""Stage interpretation backends and the resilience layer for remote calls."""
