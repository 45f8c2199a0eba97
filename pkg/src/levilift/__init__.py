"""Lifting semisimple-character data along fixed points of a finite automorphism group."""
