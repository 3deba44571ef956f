from .discriminator import MotionDiscriminator, discriminate

__all__ = ['MotionDiscriminator', 'discriminate']
