from .disentangle_block import DisentanglementBlock, LatentBundle, ProjectionHead, TemporalEncoder

__all__ = ['DisentanglementBlock', 'LatentBundle', 'ProjectionHead', 'TemporalEncoder']
