"""Core language: elaboration of rules, IR, and code generation."""
