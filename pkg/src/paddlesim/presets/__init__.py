"""Shipped scenario preset configs (data files)."""
