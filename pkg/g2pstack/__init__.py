"""g2pstack: grapheme-to-phoneme learning and dialect stacking toolkit."""

__version__ = "0.1.0"
