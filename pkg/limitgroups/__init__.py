"""Computational experiments on limit groups: free words, ping-pong certificates, surface and double twists, SL2 targets."""
