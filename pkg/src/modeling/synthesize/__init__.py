from .synthesis_block import IdentityStatsMLP, PGDecoder, StyleStats, SynthesisBlock

__all__ = ['IdentityStatsMLP', 'PGDecoder', 'StyleStats', 'SynthesisBlock']
