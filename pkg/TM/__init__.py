"""Thinging machine models: parsing, validation, events and chronologies."""
