"""Neural components of the retargeting model."""

from .retarget_model import RetargetModel

__all__ = ['RetargetModel']
