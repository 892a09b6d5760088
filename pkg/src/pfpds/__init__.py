"""Prefix-free parsing as a queryable compressed text index."""
