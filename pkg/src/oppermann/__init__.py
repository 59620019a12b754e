"""Verification of Oppermann's conjecture by sieving in arithmetic progressions."""
