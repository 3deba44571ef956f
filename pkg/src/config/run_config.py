"""Run configuration models.

Every knob of the pipeline lives in one of these pydantic models so a run can be
described by a single JSON file. Unknown keys are rejected at every level.
"""
import json
import math
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Total temporal downsampling of both encoders: N_mc = N_id = T / 8
DOWNSAMPLE_FACTOR = 8
ENCODER_LAYERS = 8
# Full-scale discriminator width; reduced configurations may end narrower
DISCRIMINATOR_LAST_CHANNELS = 256


class _StrictModel(BaseModel):
    """Base model that rejects unknown keys."""
    model_config = ConfigDict(extra='forbid')


class EncoderConfig(_StrictModel):
    """Layer schedule for the MC and ID encoders."""
    in_channels: int = 50
    first_channels: int = 64
    last_channels: int = 128
    channels: Optional[List[int]] = None
    strides: List[int] = Field(default_factory=lambda: [1, 2, 1, 2, 1, 2, 1, 1])
    kernel_size: int = 3
    negative_slope: float = 0.2
    eps: float = 1e-5

    @field_validator('strides')
    @classmethod
    def validate_strides(cls, v: List[int]) -> List[int]:
        """Eight layers whose strides multiply to the downsampling factor."""
        if len(v) != ENCODER_LAYERS:
            raise ValueError(f"Encoder needs {ENCODER_LAYERS} layers, got {len(v)}")
        if math.prod(v) != DOWNSAMPLE_FACTOR:
            raise ValueError(f"Stride product must be {DOWNSAMPLE_FACTOR}, got {math.prod(v)}")
        return v

    @field_validator('kernel_size')
    @classmethod
    def validate_kernel(cls, v: int) -> int:
        if v < 1 or v % 2 == 0:
            raise ValueError(f"kernel_size must be odd and positive, got {v}")
        return v

    @model_validator(mode='after')
    def validate_channels(self) -> 'EncoderConfig':
        if self.channels is not None:
            if len(self.channels) != len(self.strides):
                raise ValueError("channels and strides must have the same length")
            if self.channels[-1] != self.last_channels:
                raise ValueError("last entry of channels must equal last_channels")
        return self

    def channel_schedule(self) -> List[int]:
        """Per-layer output channels, rising geometrically to last_channels."""
        if self.channels is not None:
            return list(self.channels)
        n = len(self.strides)
        ratio = self.last_channels / self.first_channels
        schedule = [int(round(self.first_channels * ratio ** (i / (n - 1)))) for i in range(n)]
        schedule[-1] = self.last_channels
        return schedule


class DecoderConfig(_StrictModel):
    """PG decoder layout."""
    num_blocks: int = 3
    channels: List[int] = Field(default_factory=lambda: [128, 96, 64])
    alpha: float = Field(default=0.9, ge=0.0, le=1.0)
    upsample_factor: Literal[2] = 2
    kernel_size: int = 3
    negative_slope: float = 0.2
    eps: float = 1e-5
    stats_hidden: Optional[int] = None

    @model_validator(mode='after')
    def validate_blocks(self) -> 'DecoderConfig':
        if len(self.channels) != self.num_blocks:
            raise ValueError(
                f"Decoder has {self.num_blocks} blocks but {len(self.channels)} channel entries"
            )
        return self

    @property
    def total_upsampling(self) -> int:
        return self.upsample_factor ** self.num_blocks


class DiscriminatorConfig(_StrictModel):
    """Temporal-convolution discriminator layout; the last channel is 256 by default."""
    in_channels: int = 50
    channels: List[int] = Field(
        default_factory=lambda: [64, 128, 192, DISCRIMINATOR_LAST_CHANNELS]
    )
    strides: List[int] = Field(default_factory=lambda: [2, 2, 2, 2])
    kernel_size: int = 3
    negative_slope: float = 0.2

    @model_validator(mode='after')
    def validate_layers(self) -> 'DiscriminatorConfig':
        if len(self.channels) != len(self.strides):
            raise ValueError("channels and strides must have the same length")
        if not self.channels or min(self.channels) < 1:
            raise ValueError(f"channels must be a non-empty list of positive widths, got {self.channels}")
        return self


class ModelConfig(_StrictModel):
    """Full generator + discriminator architecture."""
    num_joints: int = 25
    clip_length: int = 64
    mc_encoder: EncoderConfig = Field(default_factory=lambda: EncoderConfig(last_channels=128))
    id_encoder: EncoderConfig = Field(default_factory=lambda: EncoderConfig(last_channels=144))
    projection_channels: int = 144
    decoder: DecoderConfig = Field(default_factory=DecoderConfig)
    discriminator: DiscriminatorConfig = Field(default_factory=DiscriminatorConfig)

    # Ablation switches
    use_projection_head: bool = True
    use_adain: bool = True
    use_pg_blocks: bool = True

    @model_validator(mode='after')
    def validate_shapes(self) -> 'ModelConfig':
        width = 2 * self.num_joints
        for name, cfg in [('mc_encoder', self.mc_encoder), ('id_encoder', self.id_encoder),
                          ('discriminator', self.discriminator)]:
            if cfg.in_channels != width:
                raise ValueError(f"{name}.in_channels must be 2 * num_joints = {width}")
        if self.clip_length % DOWNSAMPLE_FACTOR != 0:
            raise ValueError(f"clip_length must be divisible by {DOWNSAMPLE_FACTOR}")
        if self.decoder.total_upsampling != DOWNSAMPLE_FACTOR:
            raise ValueError(
                f"Decoder upsamples by {self.decoder.total_upsampling}, "
                f"encoders downsample by {DOWNSAMPLE_FACTOR}"
            )
        if not self.use_projection_head and self.projection_channels != self.id_encoder.last_channels:
            raise ValueError("Without a projection head, projection_channels must equal C_id")
        return self

    @property
    def latent_length(self) -> int:
        return self.clip_length // DOWNSAMPLE_FACTOR


class LossWeights(_StrictModel):
    """Weights of the total objective and the triplet margin."""
    lambda_rec: float = Field(default=10.0, ge=0.0)
    lambda_adv: float = Field(default=2.0, ge=0.0)
    lambda_mc: float = Field(default=2.0, ge=0.0)
    lambda_id: float = Field(default=6.0, ge=0.0)
    delta: float = Field(default=0.2, ge=0.0)


class TrainConfig(_StrictModel):
    """Optimizer and schedule settings."""
    batch_size: int = Field(default=128, ge=1)
    max_epochs: int = Field(default=2000, ge=0)
    betas: Tuple[float, float] = (0.5, 0.999)
    weight_decay: float = Field(default=1e-3, ge=0.0)
    # Zero learning rates are accepted so a step can be run as a no-op
    autoencoder_lr: float = Field(default=1e-4, ge=0.0)
    discriminator_lr: float = Field(default=2e-4, ge=0.0)
    lr_gamma: float = Field(default=0.5, gt=0.0, le=1.0)
    lr_step_epochs: int = Field(default=400, ge=1)
    seed: int = 0
    triplets_per_epoch: Optional[int] = Field(default=None, ge=1)
    checkpoint_every: int = Field(default=50, ge=1)
    gan_form: Literal['lsgan', 'log'] = 'lsgan'
    precision: Literal['float32', 'float64'] = 'float32'


class DatasetConfig(_StrictModel):
    """Synthetic data and preprocessing settings."""
    n_ids: int = Field(default=6, ge=2)
    n_test_ids: int = Field(default=4, ge=0)
    n_contents: int = Field(default=8, ge=2)
    clips_per_cell: int = Field(default=2, ge=1)
    clip_length: int = 64
    fps: float = Field(default=30.0, gt=0.0)
    noise_deg: float = Field(default=1.5, ge=0.0)
    seed: int = 0


class EvalConfig(_StrictModel):
    """IDScore protocol settings."""
    gallery_fraction: float = Field(default=0.5, gt=0.0, lt=1.0)
    embedder: str = 'baseline'
    embedder_epochs: int = Field(default=80, ge=1)
    embedding_dim: int = Field(default=64, ge=2)
    embedder_channels: int = Field(default=64, ge=4)
    mapper_epochs: int = Field(default=300, ge=1)
    use_baseline_mapper: bool = False
    # Add reconstructions of train-identity clips, labelled with their source identity
    embedder_sees_reconstructions: bool = True
    seed: int = 0

    @field_validator('embedder')
    @classmethod
    def validate_embedder(cls, v: str) -> str:
        if v != 'baseline' and not v.startswith('external:'):
            raise ValueError(f"embedder must be 'baseline' or 'external:<path>', got {v!r}")
        return v


class RunConfig(_StrictModel):
    """Top-level configuration file."""
    model: ModelConfig = Field(default_factory=ModelConfig)
    losses: LossWeights = Field(default_factory=LossWeights)
    train: TrainConfig = Field(default_factory=TrainConfig)
    dataset: DatasetConfig = Field(default_factory=DatasetConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)
    # Unset paths fall back to RETARGET_OUTPUT_DIR and its data/ subdirectory
    data_dir: Optional[str] = None
    output_dir: Optional[str] = None

    @model_validator(mode='after')
    def validate_clip_length(self) -> 'RunConfig':
        if self.dataset.clip_length != self.model.clip_length:
            raise ValueError("dataset.clip_length must equal model.clip_length")
        return self

    @classmethod
    def load(cls, path: Path) -> 'RunConfig':
        """Load and validate a JSON configuration file."""
        return cls.model_validate(json.loads(Path(path).read_text()))

    def save(self, path: Path) -> None:
        Path(path).write_text(self.model_dump_json(indent=2))

    def with_seed(self, seed: int) -> 'RunConfig':
        """Copy with every seed replaced."""
        data = self.model_dump()
        for section in ('train', 'dataset', 'eval'):
            data[section]['seed'] = seed
        return RunConfig.model_validate(data)

    @classmethod
    def desk_scale(cls) -> 'RunConfig':
        """Reduced configuration for CPU runs on the synthetic dataset (channels / 4)."""
        return cls(
            model=ModelConfig(
                mc_encoder=EncoderConfig(first_channels=16, last_channels=32),
                id_encoder=EncoderConfig(first_channels=16, last_channels=36),
                projection_channels=36,
                decoder=DecoderConfig(channels=[32, 24, 16]),
                discriminator=DiscriminatorConfig(channels=[16, 32, 48, 64]),
            ),
            train=TrainConfig(
                batch_size=16,
                max_epochs=300,
                autoencoder_lr=5e-4,
                discriminator_lr=1e-3,
                triplets_per_epoch=192,
                checkpoint_every=25,
            ),
            eval=EvalConfig(embedder_channels=32, embedding_dim=32),
        )
