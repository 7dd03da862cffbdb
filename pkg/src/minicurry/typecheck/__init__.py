"""Type inference with Eq and Data contexts."""
